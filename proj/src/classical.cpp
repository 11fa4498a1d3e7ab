#include "qkt/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "qkt/errors.hpp"
#include "qkt/rng.hpp"

namespace qkt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Orthonormal basis of the tangent plane at unit vector n.
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangent_frame(const Eigen::Vector3d& n) {
  const Eigen::Vector3d helper =
      std::abs(n.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  Eigen::Vector3d e1 = helper - helper.dot(n) * n;
  e1.normalize();
  return {e1, n.cross(e1)};
}

} // namespace

ClassicalPoint ClassicalPoint::from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double ClassicalPoint::theta() const { return std::acos(std::clamp(z, -1.0, 1.0)); }

double ClassicalPoint::phi() const {
  double p = std::atan2(y, x);
  if (p < 0.0) p += kTwoPi;
  return p >= kTwoPi ? 0.0 : p;
}

double ClassicalPoint::norm() const { return std::sqrt(x * x + y * y + z * z); }

ClassicalPoint map_step(const ClassicalPoint& p, double kappa, double alpha, double* drift) {
  const double ca = std::cos(alpha);
  const double sa = std::sin(alpha);
  const double rx = p.x * ca - p.y * sa;
  const double ry = p.x * sa + p.y * ca;
  const double w = kappa * ry;
  const double cw = std::cos(w);
  const double sw = std::sin(w);
  ClassicalPoint out{rx * cw + p.z * sw, ry, -rx * sw + p.z * cw};
  const double norm = out.norm();
  if (drift) *drift = std::abs(norm - 1.0);
  out.x /= norm;
  out.y /= norm;
  out.z /= norm;
  return out;
}

Eigen::Matrix3d jacobian(const ClassicalPoint& p, double kappa, double alpha) {
  const double ca = std::cos(alpha);
  const double sa = std::sin(alpha);
  const double rx = p.x * ca - p.y * sa;
  const double ry = p.x * sa + p.y * ca;
  const double w = kappa * ry;
  const double cw = std::cos(w);
  const double sw = std::sin(w);
  const double xn = rx * cw + p.z * sw;
  const double zn = -rx * sw + p.z * cw;

  Eigen::Matrix3d jac;
  jac << ca * cw + kappa * sa * zn, -sa * cw + kappa * ca * zn, sw,
         sa,                        ca,                         0.0,
         -ca * sw - kappa * sa * xn, sa * sw - kappa * ca * xn, cw;
  return jac;
}

ClassicalPoint sphere_sample(std::uint64_t seed, std::uint64_t index) {
  const Philox4x32 gen(seed);
  const auto bits = gen({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0U, 0U});
  const double z = 2.0 * Philox4x32::to_unit(bits[0], bits[1]) - 1.0;
  const double phi = kTwoPi * Philox4x32::to_unit(bits[2], bits[3]);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

double local_lyapunov(const ClassicalPoint& start, double kappa, double alpha, std::int64_t n_steps) {
  if (n_steps < 1) throw DomainError("local_lyapunov: n_steps must be >= 1");
  ClassicalPoint p = start;
  Eigen::Vector3d tangent = tangent_frame(p.vec()).first;
  double log_stretch = 0.0;
  double worst_drift = 0.0;
  for (std::int64_t s = 0; s < n_steps; ++s) {
    const Eigen::Matrix3d jac = jacobian(p, kappa, alpha);
    double drift = 0.0;
    p = map_step(p, kappa, alpha, &drift);
    worst_drift = std::max(worst_drift, drift);
    Eigen::Vector3d next = jac * tangent;
    const Eigen::Vector3d n = p.vec();
    next -= next.dot(n) * n;
    const double len = next.norm();
    log_stretch += std::log(len);
    tangent = next / len;
  }
  if (worst_drift > 1e-12) spdlog::debug("classical map drift {:.2e} before renormalization", worst_drift);
  return log_stretch / static_cast<double>(n_steps);
}

LyapunovEstimate lyapunov(double kappa, double alpha, int n_traj, std::int64_t n_steps,
                          std::uint64_t seed, bool keep_per_trajectory) {
  if (n_traj < 1 || n_steps < 1) throw DomainError("lyapunov: need n_traj >= 1 and n_steps >= 1");
  std::vector<double> local(static_cast<std::size_t>(n_traj));
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n_traj; ++i) {
    local[static_cast<std::size_t>(i)] =
        local_lyapunov(sphere_sample(seed, static_cast<std::uint64_t>(i)), kappa, alpha, n_steps);
  }
  // ascending-index reduction keeps the mean independent of scheduling
  double sum = 0.0;
  for (double v : local) sum += v;

  LyapunovEstimate est;
  est.kappa = kappa;
  est.alpha = alpha;
  est.lambda_mean = sum / n_traj;
  est.n_trajectories = n_traj;
  est.n_steps = n_steps;
  est.seed = seed;
  if (keep_per_trajectory) est.per_trajectory = std::move(local);
  return est;
}

std::vector<PortraitPoint> phase_portrait(double kappa, double alpha,
                                          std::span<const ClassicalPoint> seeds, std::int64_t n_steps) {
  if (n_steps < 0) throw DomainError("phase_portrait: n_steps must be >= 0");
  std::vector<PortraitPoint> out;
  out.reserve(seeds.size() * static_cast<std::size_t>(n_steps + 1));
  for (std::size_t orbit = 0; orbit < seeds.size(); ++orbit) {
    ClassicalPoint p = seeds[orbit];
    for (std::int64_t t = 0; t <= n_steps; ++t) {
      if (t > 0) p = map_step(p, kappa, alpha);
      out.push_back({static_cast<int>(orbit), t, p.theta(), p.phi()});
    }
  }
  return out;
}

std::vector<ClassicalPoint> sphere_grid(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw DomainError("sphere_grid: grid must be non-empty");
  std::vector<ClassicalPoint> grid;
  grid.reserve(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi));
  for (int a = 0; a < n_theta; ++a) {
    const double theta = std::numbers::pi * (a + 0.5) / n_theta;
    for (int b = 0; b < n_phi; ++b) {
      grid.push_back(ClassicalPoint::from_angles(theta, kTwoPi * (b + 0.5) / n_phi));
    }
  }
  return grid;
}

double angular_dispersion(std::span<const ClassicalPoint> points) {
  if (points.empty()) throw DomainError("angular_dispersion: no points");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p.vec();
  const double len = centroid.norm();
  if (len == 0.0) return std::numbers::pi / 2.0;
  centroid /= len;
  double total = 0.0;
  for (const auto& p : points) total += std::acos(std::clamp(p.vec().dot(centroid), -1.0, 1.0));
  return total / static_cast<double>(points.size());
}

bool is_regular_orbit(const ClassicalPoint& seed, double kappa, double alpha, std::int64_t n_steps,
                      double threshold, int max_period) {
  std::vector<ClassicalPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(n_steps + 1));
  ClassicalPoint p = seed;
  orbit.push_back(p);
  for (std::int64_t t = 0; t < n_steps; ++t) {
    p = map_step(p, kappa, alpha);
    orbit.push_back(p);
  }
  for (int period = 1; period <= max_period; ++period) {
    bool all_tight = true;
    for (int offset = 0; offset < period && all_tight; ++offset) {
      std::vector<ClassicalPoint> sub;
      for (std::size_t i = static_cast<std::size_t>(offset); i < orbit.size(); i += period) sub.push_back(orbit[i]);
      all_tight = angular_dispersion(sub) < threshold;
    }
    if (all_tight) return true;
  }
  return false;
}

} // namespace qkt
