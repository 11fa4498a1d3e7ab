// qkt: command-line driver for kicked-top QFI sweeps.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qkt/config.hpp"
#include "qkt/errors.hpp"
#include "qkt/sweep.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonFlags {
  std::string config;
  bool full = false;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 0;
  bool resume = false;
  bool verbose = false;
};

fs::path default_out_dir() {
  if (const char* env = std::getenv("QKT_OUTPUT_DIR"); env && *env) return env;
  return "qkt_out";
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "INI config file applied over the defaults")->check(CLI::ExistingFile);
  cmd->add_flag("--full", f.full, "paper-scale defaults (N=1000) instead of desk scale");
  cmd->add_option("--seed", f.seed, "override the configured seed");
  cmd->add_option("--out", f.out, "output directory (default $QKT_OUTPUT_DIR or ./qkt_out)");
  cmd->add_option("--threads", f.threads, "worker threads (default: all)")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--resume", f.resume, "continue from checkpoints in the output directory");
  cmd->add_flag("-v,--verbose", f.verbose, "debug logging");
}

qkt::ExperimentConfig base_config(const CommonFlags& f) {
  auto cfg = f.full ? qkt::paper_config() : qkt::desk_config();
  if (!f.config.empty()) cfg = qkt::load_config(f.config, cfg);
  if (f.seed) cfg.seed = *f.seed;
  cfg.validate();
  return cfg;
}

qkt::RunOptions run_options(const CommonFlags& f) {
  qkt::RunOptions opts;
  opts.out_dir = f.out.empty() ? default_out_dir() : fs::path(f.out);
  opts.resume = f.resume;
  opts.threads = f.threads;
#ifdef _OPENMP
  if (f.threads > 0) omp_set_num_threads(f.threads);
#endif
  if (f.verbose) spdlog::set_level(spdlog::level::debug);
  return opts;
}

void report(const qkt::RunSummary& summary) {
  if (!summary.completed) {
    fmt::print("run interrupted; rerun with --resume\n");
    return;
  }
  fmt::print("config hash {}\n", summary.config_hash);
  for (const auto& p : summary.outputs) fmt::print("wrote {}\n", p.string());
}

qkt::FitWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw qkt::ConfigError("--window expects lo:hi, got '" + text + "'");
  const auto bound = [&](const std::string& s, double fallback) {
    if (s.empty()) return fallback;
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw qkt::ConfigError("--window: bad bound '" + s + "'");
    }
  };
  return {bound(text.substr(0, colon), 0.0), bound(text.substr(colon + 1), std::numeric_limits<double>::infinity())};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Fisher information of the kicked top under restricted subsystem access"};
  app.set_version_flag("--version", QKT_VERSION);
  app.require_subcommand(1);

  CommonFlags flags;
  auto* sweep = app.add_subcommand("qfi-sweep", "QFI versus time for every configured Q");
  auto* scaling = app.add_subcommand("q-scaling", "QFI versus Q at t_E, t_H and a late time");
  auto* classical = app.add_subcommand("classical", "Lyapunov exponents and phase portraits");
  auto* repro = app.add_subcommand("reproduce", "run the canned recipe for one figure");
  for (auto* cmd : {sweep, scaling, classical, repro}) add_common(cmd, flags);

  std::string figure;
  repro->add_option("figure_id", figure, "one of fig1b, fig1c, fig2, fig3, fig4, figS2, figS3")->required();

  auto* fit = app.add_subcommand("fit", "power-law fits over an existing QFI table");
  std::string fit_input;
  std::string fit_axis = "time";
  std::string fit_window = ":";
  std::string fit_output;
  fit->add_option("--input", fit_input, "QFI CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--axis", fit_axis, "time or subsystem")->check(CLI::IsMember({"time", "subsystem"}));
  fit->add_option("--window", fit_window, "inclusive x window lo:hi (either side may be empty)");
  fit->add_option("--output", fit_output, "write fits here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) {
      report(qkt::run_qfi_sweep(base_config(flags), run_options(flags)));
    } else if (*scaling) {
      report(qkt::run_q_scaling(base_config(flags), run_options(flags)));
    } else if (*classical) {
      report(qkt::run_classical(base_config(flags), run_options(flags)));
    } else if (*repro) {
      auto opts = run_options(flags);
      std::optional<fs::path> cfg_path;
      if (!flags.config.empty()) cfg_path = flags.config;
      if (flags.seed) throw qkt::ConfigError("reproduce: set the seed in a --config file");
      report(qkt::reproduce(figure, flags.full, opts, cfg_path));
    } else if (*fit) {
      const auto axis = fit_axis == "time" ? qkt::FitAxis::Time : qkt::FitAxis::Subsystem;
      const auto rows = qkt::read_qfi_csv(fit_input);
      const auto fits = qkt::fit_table(rows, axis, parse_window(fit_window));
      if (!fit_output.empty()) {
        const std::string exp_id = rows.empty() ? "" : rows.front().experiment_id;
        const std::string hash = rows.empty() ? "" : rows.front().config_hash;
        qkt::write_fit_csv(fit_output, exp_id, hash, fits);
      } else {
        fmt::print("kappa,label,fixed,exponent,exponent_stderr,r_squared,n_points\n");
        for (const auto& f : fits) {
          fmt::print("{:g},{},{:g},{:.6f},{:.6f},{:.6f},{}\n", f.kappa, f.label, f.fixed, f.fit.exponent,
                     f.fit.exponent_stderr, f.fit.r_squared, f.fit.n_points);
        }
      }
    }
  } catch (const qkt::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  } catch (const qkt::DomainError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const qkt::NumericError& e) {
    spdlog::error("numeric abort: {}", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitOther;
  }
  return kExitOk;
}
