#include "qkt/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qkt/checkpoint.hpp"
#include "qkt/classical.hpp"
#include "qkt/errors.hpp"
#include "qkt/qfi.hpp"
#include "qkt/reduction.hpp"

namespace qkt {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string now_iso() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_file_atomically(const fs::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Append-only row sink; each row goes out in a single write followed by a flush,
/// so an interrupted process leaves at most one torn final line.
class RowAppender {
public:
  explicit RowAppender(const fs::path& path) : file_(std::fopen(path.c_str(), "ab")) {
    if (!file_) throw std::runtime_error("cannot append to " + path.string());
  }
  ~RowAppender() {
    if (file_) std::fclose(file_);
  }
  RowAppender(const RowAppender&) = delete;
  RowAppender& operator=(const RowAppender&) = delete;

  void append(const std::string& line) {
    const std::string full = line + '\n';
    if (std::fwrite(full.data(), 1, full.size(), file_) != full.size() || std::fflush(file_) != 0) {
      throw std::runtime_error("row write failed");
    }
  }

private:
  std::FILE* file_;
};

std::string kappa_tag(double kappa) { return fmt::format("{:g}", kappa); }

struct TaskSpec {
  std::string id;
  double kappa = 0.0;
  InitialState state;
  std::vector<std::int64_t> times;
  std::vector<int> qs;
};

/// Persistent record of one experiment run in a directory.
class Manifest {
public:
  Manifest(fs::path path, std::string experiment_id, std::string config_hash, std::vector<std::string> tasks,
           bool resume)
      : path_(std::move(path)) {
    if (resume && fs::exists(path_)) {
      doc_ = json::parse(read_file(path_));
      if (doc_.value("config_hash", "") != config_hash) {
        throw ConfigError("resume: " + path_.string() + " belongs to a run with config hash " +
                          doc_.value("config_hash", std::string("?")));
      }
      doc_["resumed_at"].push_back(now_iso());
    } else {
      doc_ = json{{"experiment_id", experiment_id},
                  {"config_hash", config_hash},
                  {"code_version", QKT_VERSION},
                  {"started", now_iso()},
                  {"finished", nullptr},
                  {"resumed_at", json::array()},
                  {"outputs", json::array()},
                  {"tasks", json::array()}};
    }
    for (const auto& id : tasks) {
      if (!find(id)) doc_["tasks"].push_back({{"id", id}, {"status", "pending"}});
    }
    save();
  }

  bool done(const std::string& id) {
    const auto* task = find(id);
    return task && (*task)["status"] == "done";
  }

  void set_status(const std::string& id, const std::string& status, const std::string& message = {}) {
    auto* task = find(id);
    (*task)["status"] = status;
    if (!message.empty()) (*task)["message"] = message;
    save();
  }

  void finish(const std::vector<fs::path>& outputs) {
    json list = json::array();
    for (const auto& p : outputs) list.push_back(p.filename().string());
    doc_["outputs"] = list;
    doc_["finished"] = now_iso();
    save();
  }

private:
  json* find(const std::string& id) {
    for (auto& task : doc_["tasks"])
      if (task["id"] == id) return &task;
    return nullptr;
  }
  void save() { write_file_atomically(path_, doc_.dump(2) + "\n"); }

  fs::path path_;
  json doc_;
};

struct RunContext {
  const ExperimentConfig* cfg = nullptr;
  std::string experiment_id;
  std::string hash;
  std::uint64_t hash_value = 0;
  fs::path parts_dir;
  bool resume = false;
  std::int64_t step_budget = 0; // 0 = unlimited
};

/// Drops a torn trailing line and every row later than `t_max`.
void truncate_part(const fs::path& part, std::int64_t t_max) {
  const std::string text = read_file(part);
  std::string kept;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string::npos) break; // torn line
    const std::string_view line(text.data() + start, nl - start);
    if (parse_row(line).t <= t_max) {
      kept.append(line);
      kept.push_back('\n');
    }
    start = nl + 1;
  }
  write_file_atomically(part, kept);
}

/// Runs one (kappa, state) evolution, appending rows to its part file.
/// Returns false if the step budget ran out.
bool run_task(RunContext& ctx, const TaskSpec& task, const Propagator& prop) {
  const auto& cfg = *ctx.cfg;
  const fs::path part = ctx.parts_dir / (task.id + ".csv");
  const fs::path ckpt_path = ctx.parts_dir / (task.id + ".ckpt");
  const SpinBasis basis(cfg.n_qubits);

  std::optional<Snapshot> start;
  if (ctx.resume && fs::exists(ckpt_path)) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    if (ckpt.config_hash != ctx.hash_value || ckpt.kappa != task.kappa ||
        ckpt.snapshot.state.basis.n_qubits() != cfg.n_qubits) {
      throw ConfigError("resume: checkpoint " + ckpt_path.string() + " does not match this run");
    }
    truncate_part(part, ckpt.snapshot.t);
    start = std::move(ckpt.snapshot);
    spdlog::info("task {}: resuming at t={}", task.id, start->t);
  } else {
    write_file_atomically(part, "");
    fs::remove(ckpt_path);
    start = Snapshot{0, coherent_state(basis, task.state.theta, task.state.phi)};
  }

  std::vector<std::int64_t> remaining;
  for (auto t : task.times) {
    if (t > start->t || (t == 0 && start->t == 0 && !fs::exists(ckpt_path))) remaining.push_back(t);
  }

  const auto save = [&](const Snapshot& snap) {
    save_checkpoint(ckpt_path, Checkpoint{ctx.hash_value, task.kappa, prop.alpha(), snap});
  };

  RowAppender out(part);
  const bool has_full = std::find(task.qs.begin(), task.qs.end(), cfg.n_qubits) != task.qs.end();
  const auto sink = [&](const Snapshot& snap) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> qfis = subsystem_qfi(snap.state, task.qs, cfg.spectral_tol);
    const double full = has_full ? qfis[std::find(task.qs.begin(), task.qs.end(), cfg.n_qubits) - task.qs.begin()]
                                 : pure_qfi(snap.state);
    const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    const QfiRecord full_rec{task.kappa, cfg.alpha, cfg.n_qubits, cfg.n_qubits, task.state.theta,
                             task.state.phi, snap.t, full, task.state.label};
    for (std::size_t i = 0; i < task.qs.size(); ++i) {
      QfiRow row;
      row.experiment_id = ctx.experiment_id;
      row.config_hash = ctx.hash;
      row.kappa = task.kappa;
      row.alpha = cfg.alpha;
      row.n = cfg.n_qubits;
      row.q = task.qs[i];
      row.theta = task.state.theta;
      row.phi = task.state.phi;
      row.label = task.state.label;
      row.t = snap.t;
      row.qfi = qfis[i];
      if (row.q != cfg.n_qubits) {
        QfiRecord rec = full_rec;
        rec.q = row.q;
        rec.qfi = row.qfi;
        row.qfi_fractional = fractional_qfi(rec, full_rec);
      }
      if (cfg.record_timing) row.wall_ms = wall / static_cast<double>(task.qs.size());
      out.append(format_row(row));
    }
    save(snap);
  };

  EvolveOptions eo;
  eo.renormalize_every = cfg.renormalize_every;
  eo.checkpoint_every = cfg.checkpoint_every;
  // sample times are checkpointed by the sink once their rows are written
  eo.on_checkpoint = [&](const Snapshot& snap) {
    if (!std::binary_search(remaining.begin(), remaining.end(), snap.t)) save(snap);
  };
  eo.max_steps = ctx.step_budget;
  const auto result = evolve(prop, *start, remaining, sink, eo);
  if (ctx.step_budget > 0) {
    ctx.step_budget -= result.last.t - start->t;
    if (ctx.step_budget == 0) ctx.step_budget = -1; // spent; 0 would mean unlimited
  }
  return result.completed;
}

struct SweepPlan {
  std::string stem;
  std::vector<TaskSpec> tasks;
};

/// Shared driver for the evolution-based experiments. Returns the path of the
/// assembled CSV, or nothing if the run was interrupted.
std::optional<fs::path> run_evolutions(const ExperimentConfig& cfg, const RunOptions& opts,
                                       const SweepPlan& plan, const std::string& experiment_id) {
  fs::create_directories(opts.out_dir);
  RunContext ctx;
  ctx.cfg = &cfg;
  ctx.experiment_id = experiment_id;
  ctx.hash = cfg.hash();
  ctx.hash_value = std::stoull(ctx.hash, nullptr, 16);
  ctx.parts_dir = opts.out_dir / (plan.stem + ".parts");
  ctx.resume = opts.resume;
  ctx.step_budget = opts.interrupt_after_steps;
  fs::create_directories(ctx.parts_dir);

  std::vector<std::string> ids;
  for (const auto& t : plan.tasks) ids.push_back(t.id);
  Manifest manifest(opts.out_dir / (plan.stem + ".manifest.json"), experiment_id, ctx.hash, ids, opts.resume);

  std::map<double, std::optional<Propagator>> props;
  for (const auto& task : plan.tasks) {
    if (opts.resume && manifest.done(task.id)) continue;
    auto& prop = props[task.kappa];
    if (!prop) prop = build_propagator(SpinBasis(cfg.n_qubits), task.kappa, cfg.alpha);
    manifest.set_status(task.id, "running");
    spdlog::info("task {}: {} sample times, {} subsystem sizes", task.id, task.times.size(), task.qs.size());
    try {
      if (!run_task(ctx, task, *prop)) {
        manifest.set_status(task.id, "interrupted");
        return std::nullopt;
      }
    } catch (const NumericError& e) {
      manifest.set_status(task.id, "failed", e.what());
      throw;
    }
    manifest.set_status(task.id, "done");
    if (ctx.step_budget < 0) return std::nullopt;
  }

  std::string assembled(kQfiCsvHeader);
  assembled += '\n';
  for (const auto& task : plan.tasks) assembled += read_file(ctx.parts_dir / (task.id + ".csv"));
  const fs::path csv = opts.out_dir / (plan.stem + ".csv");
  write_file_atomically(csv, assembled);
  manifest.finish({csv});
  return csv;
}

std::string task_id(double kappa, const InitialState& s) { return "k" + kappa_tag(kappa) + "_" + s.label; }

std::string fmt_opt(const std::optional<double>& v, const char* spec) {
  return v ? fmt::format(fmt::runtime(spec), *v) : std::string();
}

struct TransitionRow {
  double kappa;
  std::string label;
  std::int64_t t;
  SlopeTransition fit;
};

} // namespace

std::string format_row(const QfiRow& r) {
  return fmt::format("{},{},{:.10g},{:.17g},{},{},{:.10g},{:.10g},{},{},{:.17g},{},{}", r.experiment_id,
                     r.config_hash, r.kappa, r.alpha, r.n, r.q, r.theta, r.phi, r.label, r.t, r.qfi,
                     fmt_opt(r.qfi_fractional, "{:.17g}"), fmt_opt(r.wall_ms, "{:.3f}"));
}

QfiRow parse_row(std::string_view line) {
  const auto f = split_csv(line);
  if (f.size() != 13) throw DomainError("QFI row: expected 13 columns, got " + std::to_string(f.size()));
  try {
    QfiRow r;
    r.experiment_id = f[0];
    r.config_hash = f[1];
    r.kappa = std::stod(f[2]);
    r.alpha = std::stod(f[3]);
    r.n = std::stoi(f[4]);
    r.q = std::stoi(f[5]);
    r.theta = std::stod(f[6]);
    r.phi = std::stod(f[7]);
    r.label = f[8];
    r.t = std::stoll(f[9]);
    r.qfi = std::stod(f[10]);
    if (!f[11].empty()) r.qfi_fractional = std::stod(f[11]);
    if (!f[12].empty()) r.wall_ms = std::stod(f[12]);
    return r;
  } catch (const std::logic_error&) {
    throw DomainError("QFI row: malformed line '" + std::string(line) + "'");
  }
}

std::vector<QfiRow> read_qfi_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kQfiCsvHeader) throw DomainError(path.string() + ": unexpected header");
  std::vector<QfiRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

std::vector<double> subsystem_qfi(const DickeState& state, const std::vector<int>& qs, double spectral_tol) {
  std::vector<double> out(qs.size(), 0.0);
  const int n = state.basis.n_qubits();
  std::vector<std::string> errors(qs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < qs.size(); ++i) {
    try {
      out[i] = qs[i] == n ? pure_qfi(state) : mixed_qfi(reduce(state, qs[i]), spectral_tol);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (!errors[i].empty()) throw NumericError(fmt::format("Q={}: {}", qs[i], errors[i]));
  }
  return out;
}

SampleTimes characteristic_sample_times(const ExperimentConfig& cfg, double kappa) {
  const double j = 0.5 * cfg.n_qubits;
  SampleTimes out;
  out.heisenberg = std::max<std::int64_t>(1, std::llround(j / 3.0));
  if (const auto it = cfg.ehrenfest_lyapunov.find(kappa); it != cfg.ehrenfest_lyapunov.end()) {
    out.ehrenfest = std::max<std::int64_t>(1, std::llround(characteristic_times(j, it->second).ehrenfest));
  }
  return out;
}

std::vector<FitRow> fit_table(const std::vector<QfiRow>& rows, FitAxis axis, FitWindow window) {
  // group key: (kappa, label, fixed coordinate), in first-appearance order
  std::vector<std::tuple<double, std::string, double>> order;
  std::map<std::tuple<double, std::string, double>, std::vector<Sample>> groups;
  for (const auto& r : rows) {
    if (axis == FitAxis::Subsystem && r.q == r.n) continue;
    const double fixed = axis == FitAxis::Time ? r.q : static_cast<double>(r.t);
    const double x = axis == FitAxis::Time ? static_cast<double>(r.t) : r.q;
    auto key = std::make_tuple(r.kappa, r.label, fixed);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back({x, r.qfi});
  }
  std::vector<FitRow> fits;
  for (const auto& key : order) {
    try {
      fits.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                      fit_power_law(groups[key], window, axis)});
    } catch (const DomainError& e) {
      spdlog::debug("fit skipped for kappa={} {} fixed={}: {}", std::get<0>(key), std::get<1>(key),
                    std::get<2>(key), e.what());
    }
  }
  return fits;
}

void write_fit_csv(const fs::path& path, std::string_view experiment_id, std::string_view config_hash,
                   const std::vector<FitRow>& fits) {
  std::string text =
      "experiment_id,config_hash,kappa,label,axis,fixed,window_lo,window_hi,exponent,intercept,r_squared,"
      "exponent_stderr,n_points\n";
  for (const auto& f : fits) {
    text += fmt::format("{},{},{:.10g},{},{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{}\n",
                        experiment_id, config_hash, f.kappa, f.label, to_string(f.fit.axis), f.fixed,
                        f.fit.window.lo, f.fit.window.hi, f.fit.exponent, f.fit.intercept, f.fit.r_squared,
                        f.fit.exponent_stderr, f.fit.n_points);
  }
  write_file_atomically(path, text);
}

RunSummary run_qfi_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const std::string experiment_id = opts.experiment_id.empty() ? "qfi-sweep" : opts.experiment_id;
  SweepPlan plan{"qfi_sweep", {}};
  for (double kappa : cfg.kappas)
    for (const auto& s : cfg.states) plan.tasks.push_back({task_id(kappa, s), kappa, s, cfg.times, cfg.subsystems});

  RunSummary summary;
  summary.config_hash = cfg.hash();
  const auto csv = run_evolutions(cfg, opts, plan, experiment_id);
  if (!csv) {
    summary.completed = false;
    return summary;
  }
  summary.outputs.push_back(*csv);

  // time-scaling fits over the three dynamical regimes
  const auto rows = read_qfi_csv(*csv);
  std::vector<FitRow> fits;
  const double j = 0.5 * cfg.n_qubits;
  for (double kappa : cfg.kappas) {
    std::vector<QfiRow> subset;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(subset), [&](const QfiRow& r) { return r.kappa == kappa; });
    const double t_h = j / 3.0;
    std::vector<FitWindow> windows;
    if (const auto it = cfg.ehrenfest_lyapunov.find(kappa); it != cfg.ehrenfest_lyapunov.end()) {
      const double t_e = characteristic_times(j, it->second).ehrenfest;
      windows.push_back({1.0, t_e});
      if (t_e < t_h) windows.push_back({std::nextafter(t_e, t_h), t_h});
    }
    windows.push_back({std::nextafter(t_h, 1e300), 1e4});
    for (const auto& w : windows) {
      auto part = fit_table(subset, FitAxis::Time, w);
      fits.insert(fits.end(), part.begin(), part.end());
    }
  }
  const fs::path fit_csv = opts.out_dir / "qfi_sweep_fits.csv";
  write_fit_csv(fit_csv, experiment_id, summary.config_hash, fits);
  summary.outputs.push_back(fit_csv);
  return summary;
}

RunSummary run_q_scaling(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const std::string experiment_id = opts.experiment_id.empty() ? "q-scaling" : opts.experiment_id;
  // the full-access reference for fractional QFI is computed per snapshot but
  // only emitted as a row when N is in the list
  const std::vector<int>& qs = cfg.scaling_subsystems;

  SweepPlan plan{"q_scaling", {}};
  for (double kappa : cfg.kappas) {
    const auto times = characteristic_sample_times(cfg, kappa);
    std::set<std::int64_t> ts{times.heisenberg, cfg.late_time};
    if (times.ehrenfest) {
      ts.insert(*times.ehrenfest);
    } else {
      spdlog::warn("no Ehrenfest exponent configured for kappa {}; skipping t_E", kappa);
    }
    for (const auto& s : cfg.states) plan.tasks.push_back({task_id(kappa, s), kappa, s, {ts.begin(), ts.end()}, qs});
  }

  RunSummary summary;
  summary.config_hash = cfg.hash();
  const auto csv = run_evolutions(cfg, opts, plan, experiment_id);
  if (!csv) {
    summary.completed = false;
    return summary;
  }
  summary.outputs.push_back(*csv);

  const auto rows = read_qfi_csv(*csv);
  const auto fits = fit_table(rows, FitAxis::Subsystem, {1.0, static_cast<double>(cfg.n_qubits - 1)});
  const fs::path fit_csv = opts.out_dir / "q_scaling_fits.csv";
  write_fit_csv(fit_csv, experiment_id, summary.config_hash, fits);
  summary.outputs.push_back(fit_csv);

  // fractional-QFI slope transitions per (kappa, state, t)
  std::vector<std::tuple<double, std::string, std::int64_t>> order;
  std::map<std::tuple<double, std::string, std::int64_t>, std::vector<Sample>> groups;
  for (const auto& r : rows) {
    if (!r.qfi_fractional) continue;
    auto key = std::make_tuple(r.kappa, r.label, r.t);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back({static_cast<double>(r.q) / r.n, *r.qfi_fractional});
  }
  std::string text =
      "experiment_id,config_hash,kappa,label,t,split,s_below,stderr_below,s_above,stderr_above,significant\n";
  for (const auto& key : order) {
    try {
      const auto tr = slope_transition(groups[key], cfg.transition_split);
      text += fmt::format("{},{},{:.10g},{},{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{}\n", experiment_id,
                          summary.config_hash, std::get<0>(key), std::get<1>(key), std::get<2>(key),
                          cfg.transition_split, tr.below.exponent, tr.below.exponent_stderr, tr.above.exponent,
                          tr.above.exponent_stderr, tr.significant() ? "true" : "false");
    } catch (const DomainError& e) {
      spdlog::warn("slope transition skipped for kappa={} {} t={}: {}", std::get<0>(key), std::get<1>(key),
                   std::get<2>(key), e.what());
    }
  }
  const fs::path tr_csv = opts.out_dir / "q_scaling_transitions.csv";
  write_file_atomically(tr_csv, text);
  summary.outputs.push_back(tr_csv);
  return summary;
}

RunSummary run_classical(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const std::string experiment_id = opts.experiment_id.empty() ? "classical" : opts.experiment_id;
  fs::create_directories(opts.out_dir);
  RunSummary summary;
  summary.config_hash = cfg.hash();

  std::vector<std::string> ids;
  for (double k : cfg.lyapunov_kappas) ids.push_back("lyapunov_k" + kappa_tag(k));
  for (double k : cfg.portrait_kappas) ids.push_back("portrait_k" + kappa_tag(k));
  Manifest manifest(opts.out_dir / "classical.manifest.json", experiment_id, summary.config_hash, ids, false);

  if (!cfg.lyapunov_kappas.empty()) {
    std::string text = "experiment_id,config_hash,kappa,alpha,n_trajectories,n_steps,seed,lambda_mean\n";
    for (double k : cfg.lyapunov_kappas) {
      const auto est = lyapunov(k, cfg.alpha, cfg.lyapunov_trajectories, cfg.lyapunov_steps, cfg.seed);
      text += fmt::format("{},{},{:.10g},{:.17g},{},{},{},{:.17g}\n", experiment_id, summary.config_hash, k,
                          cfg.alpha, est.n_trajectories, est.n_steps, est.seed, est.lambda_mean);
      spdlog::info("lyapunov kappa={} lambda={:.5f}", k, est.lambda_mean);
      manifest.set_status("lyapunov_k" + kappa_tag(k), "done");
    }
    const fs::path path = opts.out_dir / "lyapunov.csv";
    write_file_atomically(path, text);
    summary.outputs.push_back(path);
  }

  const auto grid = sphere_grid(cfg.portrait_theta, cfg.portrait_phi);
  for (double k : cfg.portrait_kappas) {
    std::string text = "theta,phi,orbit,t\n";
    for (const auto& p : phase_portrait(k, cfg.alpha, grid, cfg.portrait_steps)) {
      text += fmt::format("{:.9f},{:.9f},{},{}\n", p.theta, p.phi, p.orbit, p.t);
    }
    const fs::path path = opts.out_dir / ("portrait_k" + kappa_tag(k) + ".csv");
    write_file_atomically(path, text);
    summary.outputs.push_back(path);
    manifest.set_status("portrait_k" + kappa_tag(k), "done");
  }
  manifest.finish(summary.outputs);
  return summary;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1b", "fig1c", "fig2", "fig3", "fig4", "figS2", "figS3"};
  return ids;
}

ExperimentConfig figure_config(std::string_view figure_id, bool full,
                               const std::optional<fs::path>& config_path) {
  ExperimentConfig cfg = full ? paper_config() : desk_config();
  const int n = cfg.n_qubits;
  const auto with_full = [n](std::vector<int> reference) {
    auto qs = scale_subsystems(reference, n);
    if (qs.back() != n) qs.push_back(n);
    return qs;
  };
  std::vector<InitialState> main_states;
  for (const auto& s : default_states()) {
    if (s.label == "non-equatorial-island" || s.label == "chaotic-sea" || s.label == "edge") main_states.push_back(s);
  }

  if (figure_id == "fig1b") {
    cfg.lyapunov_kappas.clear();
    for (int i = 1; i <= 20; ++i) cfg.lyapunov_kappas.push_back(0.5 * i);
    for (double k : {12.0, 15.0, 20.0, 25.0, 30.0}) cfg.lyapunov_kappas.push_back(k);
    if (full) {
      cfg.lyapunov_trajectories = 40000;
      cfg.lyapunov_steps = 50000;
    }
    cfg.portrait_kappas.clear();
  } else if (figure_id == "fig1c") {
    cfg.lyapunov_kappas.clear();
    cfg.portrait_kappas = {3.0, 30.0};
    if (full) cfg.portrait_steps = 2000;
  } else if (figure_id == "fig2") {
    cfg.kappas = {3.0};
    cfg.states = main_states;
    cfg.subsystems = with_full({5, 10, 25, 50, 100, 150, 250, 500});
  } else if (figure_id == "fig3") {
    cfg.kappas = {30.0};
    cfg.states = main_states;
    cfg.subsystems = with_full({50, 100, 150});
  } else if (figure_id == "fig4") {
    cfg.kappas = {3.0, 30.0};
    cfg.states = main_states;
  } else if (figure_id == "figS2") {
    cfg.kappas = {3.0};
  } else if (figure_id == "figS3") {
    cfg.kappas = {3.0};
  } else {
    throw ConfigError("unknown figure id '" + std::string(figure_id) + "'");
  }
  if (config_path) cfg = load_config(*config_path, cfg);
  cfg.validate();
  return cfg;
}

RunSummary reproduce(std::string_view figure_id, bool full, RunOptions opts,
                     const std::optional<fs::path>& config_path) {
  const ExperimentConfig cfg = figure_config(figure_id, full, config_path);
  if (opts.experiment_id.empty()) opts.experiment_id = std::string(figure_id);
  if (figure_id == "fig1b" || figure_id == "fig1c") return run_classical(cfg, opts);
  if (figure_id == "fig4" || figure_id == "figS3") return run_q_scaling(cfg, opts);
  return run_qfi_sweep(cfg, opts);
}

} // namespace qkt
