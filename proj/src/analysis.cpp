#include "qkt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "qkt/errors.hpp"

namespace qkt {

std::string_view to_string(FitAxis axis) noexcept {
  return axis == FitAxis::Time ? "time" : "subsystem";
}

ScalingFit fit_power_law(std::span<const Sample> samples, FitWindow window, FitAxis axis) {
  if (!(window.lo <= window.hi)) throw DomainError("fit_power_law: empty window");
  std::vector<double> lx;
  std::vector<double> ly;
  int rejected = 0;
  for (const auto& s : samples) {
    if (!window.contains(s.x)) continue;
    if (!(s.x > 0.0)) throw DomainError("fit_power_law: x must be positive");
    if (!(s.y > 0.0)) {
      ++rejected;
      continue;
    }
    lx.push_back(std::log(s.x));
    ly.push_back(std::log(s.y));
  }
  if (rejected > 0) spdlog::warn("fit_power_law: skipped {} non-positive samples", rejected);
  const auto n = static_cast<double>(lx.size());
  if (lx.size() < 3) {
    throw DomainError("fit_power_law: need at least 3 usable points in window, have " +
                      std::to_string(lx.size()));
  }

  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DomainError("fit_power_law: x values do not vary");

  ScalingFit fit;
  fit.axis = axis;
  fit.window = window;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    ss_res += e * e;
  }
  // a constant series (up to rounding in the logs) is fitted exactly; call that R^2 = 1
  const double y_scale = std::max(1.0, std::abs(my));
  const double flat = n * std::pow(64.0 * std::numeric_limits<double>::epsilon() * y_scale, 2);
  fit.r_squared = syy > flat ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.exponent_stderr = std::sqrt(ss_res / (n - 2.0) / sxx);
  fit.n_points = static_cast<int>(lx.size());
  fit.n_rejected = rejected;
  return fit;
}

CharacteristicTimes characteristic_times(double j, double lambda) {
  if (!(j > 0.0)) throw DomainError("characteristic_times: j must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("characteristic_times: Ehrenfest time undefined for lambda <= 0");
  }
  return {j, lambda, std::log(2.0 * j) / lambda, j / 3.0};
}

bool SlopeTransition::significant() const noexcept {
  return std::abs(below.exponent - above.exponent) > below.exponent_stderr + above.exponent_stderr;
}

SlopeTransition slope_transition(std::span<const Sample> samples, double split) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double below_hi = std::nextafter(split, -inf);
  SlopeTransition out;
  out.below = fit_power_law(samples, {0.0, below_hi}, FitAxis::Subsystem);
  out.above = fit_power_law(samples, {split, inf}, FitAxis::Subsystem);
  return out;
}

} // namespace qkt
