#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "qkt/reduction.hpp"
#include "qkt/spinops.hpp"

namespace qkt {

/// Pairs (n, m) with p_n + p_m at or below this are dropped from the mixed-state sum.
/// Absolute, since the reduced states have unit trace.
inline constexpr double kDefaultSpectralTol = 1e-12;

/// Eigenvalues at or above -kNegativeEigenvalueSlack are treated as rounding.
inline constexpr double kNegativeEigenvalueSlack = 1e-10;

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   ///< descending, clipped at 0 and renormalized to unit sum
  Eigen::MatrixXcd eigenvectors; ///< columns match eigenvalues
  double clipped_mass = 0.0;     ///< total |negative eigenvalue| removed by clipping
};

/// Eigendecomposition of a density matrix with the negative-eigenvalue
/// policy applied: values in [-1e-10, 0) become 0 and the spectrum is
/// rescaled to unit sum; anything more negative throws NumericError.
SpectralDecomposition spectral_decomposition(const Eigen::MatrixXcd& rho);

/// 4 (<dpsi|dpsi> - |<dpsi|psi>|^2) for a pure state with derivative dc.
/// Throws DomainError unless ||c|| = 1 to 1e-8.
double pure_qfi(const DickeState& state);

/// 2 sum_{n,m} |<psi_m| drho |psi_n>|^2 / (p_n + p_m) over pairs with
/// p_n + p_m > spectral_tol. Throws DomainError for spectral_tol <= 0.
double mixed_qfi(const ReducedDensity& rd, double spectral_tol = kDefaultSpectralTol);

/// Same sum evaluated in a caller-supplied eigenbasis.
double mixed_qfi(const SpectralDecomposition& spec, const Eigen::MatrixXcd& drho,
                 double spectral_tol = kDefaultSpectralTol);

struct QfiRecord {
  double kappa = 0.0;
  double alpha = 0.0;
  int n = 0;
  int q = 0;
  double theta = 0.0;
  double phi = 0.0;
  std::int64_t t = 0;
  double qfi = 0.0;
  std::string label;
};

/// partial.qfi / full.qfi. Both zero gives 0; values up to 1 + 1e-6 are
/// clipped to 1, larger ones throw NumericError. Records must describe the
/// same run and `full` must have Q = N (DomainError otherwise).
double fractional_qfi(const QfiRecord& partial, const QfiRecord& full);

} // namespace qkt
