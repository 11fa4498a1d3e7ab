#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qkt/floquet.hpp"

namespace qkt {

/// Point (X, Y, Z) = J/j on the unit sphere.
struct ClassicalPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  static ClassicalPoint from_angles(double theta, double phi);
  double theta() const;  ///< arccos Z
  double phi() const;    ///< atan2(Y, X) mapped to [0, 2 pi)
  double norm() const;
  Eigen::Vector3d vec() const { return {x, y, z}; }
};

/// One period of the semiclassical kicked-top map: rotation by alpha about z
/// followed by a twist about y by angle kappa * Y'. The result is
/// renormalized; the pre-normalization drift is reported through `drift`.
ClassicalPoint map_step(const ClassicalPoint& p, double kappa, double alpha = kDefaultAlpha,
                        double* drift = nullptr);

/// d(X', Y', Z') / d(X, Y, Z) of the map above.
Eigen::Matrix3d jacobian(const ClassicalPoint& p, double kappa, double alpha = kDefaultAlpha);

struct LyapunovEstimate {
  double kappa = 0.0;
  double alpha = 0.0;
  double lambda_mean = 0.0;
  int n_trajectories = 0;
  std::int64_t n_steps = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_trajectory; ///< filled when requested
};

/// Uniform point on the sphere for trajectory `index` (Z and phi uniform),
/// drawn from a counter-based stream keyed by `seed`.
ClassicalPoint sphere_sample(std::uint64_t seed, std::uint64_t index);

/// Largest finite-time Lyapunov exponent of one trajectory, Benettin style:
/// a tangent vector is pushed through the Jacobian, projected onto the
/// tangent plane and renormalized each period.
double local_lyapunov(const ClassicalPoint& start, double kappa, double alpha, std::int64_t n_steps);

/// Phase-space average of local_lyapunov over n_traj uniformly seeded
/// trajectories. The result does not depend on the thread count.
LyapunovEstimate lyapunov(double kappa, double alpha, int n_traj, std::int64_t n_steps,
                          std::uint64_t seed, bool keep_per_trajectory = false);

struct PortraitPoint {
  int orbit = 0;
  std::int64_t t = 0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Orbits of every seed point for t = 0..n_steps in (theta, phi) coordinates,
/// orbit-major.
std::vector<PortraitPoint> phase_portrait(double kappa, double alpha,
                                          std::span<const ClassicalPoint> seeds, std::int64_t n_steps);

/// Regular-grid seeds: n_theta x n_phi cell centres (poles excluded).
std::vector<ClassicalPoint> sphere_grid(int n_theta, int n_phi);

/// Mean angular distance of the points from the direction of their centroid.
double angular_dispersion(std::span<const ClassicalPoint> points);

/// Island-membership heuristic: the orbit of `seed` over n_steps is regular
/// if, for some period p <= max_period, each of the p interleaved
/// sub-orbits has angular dispersion below `threshold`. Period > 1 covers
/// island chains, where a single centroid is meaningless.
bool is_regular_orbit(const ClassicalPoint& seed, double kappa, double alpha,
                      std::int64_t n_steps = 1000, double threshold = 0.5, int max_period = 8);

} // namespace qkt
