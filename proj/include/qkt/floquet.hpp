#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qkt/spinops.hpp"

namespace qkt {

inline constexpr double kDefaultAlpha = std::numbers::pi / 2.0;

/// Kicked-top Floquet operator U = T R with twist T = exp(-i kappa/(2j) Jy^2)
/// and rotation R = exp(-i alpha Jz), for kicking period 1.
///
/// Jy^2 only couples k to k and k +- 2, and R is diagonal, so U is block
/// diagonal in the parity of k. The two blocks are stored separately and the
/// dense (N+1)x(N+1) matrices are only assembled on request.
class Propagator {
public:
  struct ParityBlock {
    std::vector<int> indices;   ///< basis indices k with the block's parity
    Eigen::MatrixXcd twist;     ///< T restricted to the block
    Eigen::MatrixXcd unitary;   ///< U restricted to the block
  };

  const SpinBasis& basis() const noexcept { return basis_; }
  double kappa() const noexcept { return kappa_; }
  double alpha() const noexcept { return alpha_; }

  /// exp(-i alpha (k - j)) for every basis index.
  const Eigen::VectorXcd& rotation_phases() const noexcept { return rotation_; }
  const std::array<ParityBlock, 2>& blocks() const noexcept { return blocks_; }

  Eigen::MatrixXcd dense_twist() const;
  Eigen::MatrixXcd dense_unitary() const;

private:
  friend Propagator build_propagator(const SpinBasis&, double, double);
  Propagator(SpinBasis basis, double kappa, double alpha) : basis_(basis), kappa_(kappa), alpha_(alpha) {}

  SpinBasis basis_;
  double kappa_;
  double alpha_;
  Eigen::VectorXcd rotation_;
  std::array<ParityBlock, 2> blocks_;
};

/// Builds the propagator from one symmetric eigendecomposition of Jy^2 per
/// parity block. Throws DomainError for kappa < 0 and NumericError if the
/// eigensolver fails or the result is not unitary to 1e-10.
Propagator build_propagator(const SpinBasis& basis, double kappa, double alpha = kDefaultAlpha);

struct Snapshot {
  std::int64_t t = 0;
  DickeState state;
};

/// One kick: c' = U c and dc' = U dc + T (-i Jz) R c.
Snapshot step(const Propagator& prop, const Snapshot& snap);

/// Reusable stepping kernel; avoids per-step allocations in long runs.
class Stepper {
public:
  explicit Stepper(const Propagator& prop);

  /// Advances the state in place by one period.
  void advance(DickeState& state);

private:
  const Propagator* prop_;
  Eigen::VectorXd m_;
  std::array<Eigen::MatrixXcd, 2> in_;
  std::array<Eigen::MatrixXcd, 2> out_;
};

struct EvolveOptions {
  /// Renormalize c every this many steps (0 disables). A correction larger
  /// than `max_norm_drift` aborts with NumericError.
  std::int64_t renormalize_every = 0;
  double max_norm_drift = 1e-9;

  /// Called with the running snapshot every `checkpoint_every` steps (0 disables).
  std::int64_t checkpoint_every = 0;
  std::function<void(const Snapshot&)> on_checkpoint;

  /// Stop after this many steps even if sample times remain (0 = unlimited).
  std::int64_t max_steps = 0;
};

struct EvolveResult {
  Snapshot last;        ///< state at the time evolution stopped
  bool completed = true;
};

/// Propagates `start` and hands a snapshot to `sink` at every requested time.
/// `sample_times` must be strictly increasing, >= start.t and <= 2^32.
EvolveResult evolve(const Propagator& prop, const Snapshot& start,
                    std::span<const std::int64_t> sample_times,
                    const std::function<void(const Snapshot&)>& sink,
                    const EvolveOptions& options = {});

/// Convenience overload starting at t = 0 from `initial`.
EvolveResult evolve(const Propagator& prop, const DickeState& initial,
                    std::span<const std::int64_t> sample_times,
                    const std::function<void(const Snapshot&)>& sink,
                    const EvolveOptions& options = {});

} // namespace qkt
