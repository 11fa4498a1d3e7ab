#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qkt/analysis.hpp"
#include "qkt/config.hpp"
#include "qkt/floquet.hpp"

namespace qkt {

/// Column order of every QFI table.
inline constexpr std::string_view kQfiCsvHeader =
    "experiment_id,config_hash,kappa,alpha,N,Q,theta,phi,label,t,qfi,qfi_fractional,wall_ms";

/// One parsed row of a QFI table.
struct QfiRow {
  std::string experiment_id;
  std::string config_hash;
  double kappa = 0.0;
  double alpha = 0.0;
  int n = 0;
  int q = 0;
  double theta = 0.0;
  double phi = 0.0;
  std::string label;
  std::int64_t t = 0;
  double qfi = 0.0;
  std::optional<double> qfi_fractional;
  std::optional<double> wall_ms;
};

std::string format_row(const QfiRow& row);
QfiRow parse_row(std::string_view line);
std::vector<QfiRow> read_qfi_csv(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir;
  std::string experiment_id;   ///< defaults to the subcommand name
  bool resume = false;
  int threads = 1;
  /// Abandon the run after this many Floquet steps in total, without a final
  /// checkpoint (0 = never). Simulates an interrupted process.
  std::int64_t interrupt_after_steps = 0;
};

struct RunSummary {
  bool completed = true;
  std::string config_hash;
  std::vector<std::filesystem::path> outputs;
};

/// QFI at every configured Q for every snapshot of the configured time grid,
/// for each (kappa, state). Writes qfi_sweep.csv, qfi_sweep_fits.csv and
/// manifest.json under out_dir.
RunSummary run_qfi_sweep(const ExperimentConfig& cfg, const RunOptions& opts);

/// QFI over the scaling Q list at t_E, t_H and the late time for each
/// (kappa, state), with fractional QFI, per-time Q-scaling fits and
/// slope-transition summaries.
RunSummary run_q_scaling(const ExperimentConfig& cfg, const RunOptions& opts);

/// Lyapunov exponents over the configured kappa grid plus phase portraits.
RunSummary run_classical(const ExperimentConfig& cfg, const RunOptions& opts);

/// Canned recipe for one figure: fig1b, fig1c, fig2, fig3, fig4, figS2, figS3.
/// Starts from desk or paper defaults, applies the figure's settings and then
/// the optional user config file. Throws ConfigError for an unknown id.
ExperimentConfig figure_config(std::string_view figure_id, bool full,
                               const std::optional<std::filesystem::path>& config_path = std::nullopt);
RunSummary reproduce(std::string_view figure_id, bool full, RunOptions opts,
                     const std::optional<std::filesystem::path>& config_path = std::nullopt);

/// Ordered list of recognized figure ids.
const std::vector<std::string>& figure_ids();

/// Rounded characteristic sample times {t_E, t_H} for one kappa (t_E absent
/// when no exponent is configured for that kappa).
struct SampleTimes {
  std::optional<std::int64_t> ehrenfest;
  std::int64_t heisenberg = 1;
};
SampleTimes characteristic_sample_times(const ExperimentConfig& cfg, double kappa);

/// Power-law fits over a QFI table. Time axis: one fit per (kappa, label, Q)
/// in `window`; subsystem axis: one fit per (kappa, label, t) over Q < N.
struct FitRow {
  double kappa = 0.0;
  std::string label;
  double fixed = 0.0; ///< Q for time fits, t for subsystem fits
  ScalingFit fit;
};
std::vector<FitRow> fit_table(const std::vector<QfiRow>& rows, FitAxis axis, FitWindow window);

/// Writes fits as CSV.
void write_fit_csv(const std::filesystem::path& path, std::string_view experiment_id,
                   std::string_view config_hash, const std::vector<FitRow>& fits);

/// QFI of `state` reduced to each Q (Q = N uses the pure-state formula).
std::vector<double> subsystem_qfi(const DickeState& state, const std::vector<int>& qs, double spectral_tol);

} // namespace qkt
