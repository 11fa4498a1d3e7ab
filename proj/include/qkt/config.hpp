#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qkt {

struct InitialState {
  double theta = 0.0;
  double phi = 0.0;
  std::string label;
};

/// Everything that determines the numbers an experiment produces. Output
/// location and thread count are run options, not part of the config hash.
struct ExperimentConfig {
  int n_qubits = 1000;
  std::vector<double> kappas{3.0, 30.0};
  double alpha = 1.5707963267948966;
  std::vector<InitialState> states;
  std::uint64_t seed = 1;

  // time sweeps
  std::vector<int> subsystems;        ///< Q values; Q = N means full access
  std::vector<std::int64_t> times;    ///< sample times, strictly increasing
  double spectral_tol = 1e-12;
  std::int64_t checkpoint_every = 4096;
  std::int64_t renormalize_every = 0;
  bool record_timing = false;

  // subsystem sweeps
  std::vector<int> scaling_subsystems;
  std::map<double, double> ehrenfest_lyapunov; ///< kappa -> exponent used for t_E
  std::int64_t late_time = 32768;
  double transition_split = 0.1;

  // classical
  std::vector<double> lyapunov_kappas{0.5, 1.0, 2.0, 2.5, 3.0, 6.0, 10.0, 30.0};
  int lyapunov_trajectories = 2000;
  std::int64_t lyapunov_steps = 5000;
  std::vector<double> portrait_kappas{3.0, 30.0};
  int portrait_theta = 24;
  int portrait_phi = 48;
  std::int64_t portrait_steps = 400;

  /// Throws ConfigError when an invariant fails (Q outside [1, N], duplicate
  /// labels, unsorted times, ...).
  void validate() const;

  /// Stable text rendering of every field, used for hashing and echoed into
  /// the run directory.
  std::string canonical_text() const;

  /// FNV-1a of canonical_text() as 16 hex digits.
  std::string hash() const;
};

/// The five marked initial states (equatorial, island, non-equatorial
/// island, chaotic sea, edge).
std::vector<InitialState> default_states();

/// Paper-scale defaults: N = 1000, samples to 2^15.
ExperimentConfig paper_config();

/// Desk-scale defaults: N = 100, samples to 2^12.
ExperimentConfig desk_config();

/// Q list rescaled from a 1000-qubit reference to `n_qubits`, deduplicated.
std::vector<int> scale_subsystems(const std::vector<int>& reference, int n_qubits);

/// Parses "0..64, pow2:7..15, 100..200/10, 5000": inclusive ranges, optional
/// stride, powers of two. Result is sorted and deduplicated.
std::vector<std::int64_t> parse_time_grid(std::string_view text);

/// Like parse_time_grid for Q values; the token "N" stands for n_qubits.
std::vector<int> parse_subsystem_list(std::string_view text, int n_qubits);

/// Applies an INI-style file over `base`. Unknown sections or keys throw
/// ConfigError, as do malformed values.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base);
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base);

} // namespace qkt
