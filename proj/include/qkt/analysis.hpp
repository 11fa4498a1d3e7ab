#pragma once

#include <span>
#include <string_view>
#include <utility>

namespace qkt {

enum class FitAxis { Time, Subsystem };

std::string_view to_string(FitAxis axis) noexcept;

struct Sample {
  double x = 0.0;
  double y = 0.0;
};

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// log y = intercept + exponent * log x, fitted by unweighted least squares.
struct ScalingFit {
  FitAxis axis = FitAxis::Time;
  FitWindow window;
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double exponent_stderr = 0.0;
  int n_points = 0;
  int n_rejected = 0; ///< in-window samples dropped for y <= 0
};

/// Ordinary least squares in log-log space over samples with x in `window`.
/// Samples with y <= 0 are skipped and counted. Throws DomainError when
/// fewer than 3 usable points remain or the x values do not vary.
ScalingFit fit_power_law(std::span<const Sample> samples, FitWindow window,
                         FitAxis axis = FitAxis::Time);

struct CharacteristicTimes {
  double j = 0.0;
  double lambda = 0.0;
  double ehrenfest = 0.0;  ///< ln(2j) / lambda
  double heisenberg = 0.0; ///< j / 3
};

/// Throws DomainError for j <= 0 or lambda <= 0.
CharacteristicTimes characteristic_times(double j, double lambda);

struct SlopeTransition {
  ScalingFit below;
  ScalingFit above;
  /// |s_below - s_above| exceeds the sum of both standard errors.
  bool significant() const noexcept;
};

/// Separate log-log slopes for x < split and x >= split (at least 3 points each).
SlopeTransition slope_transition(std::span<const Sample> samples, double split);

} // namespace qkt
