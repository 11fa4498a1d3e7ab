#include "qkt/spinops.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "qkt/binomial.hpp"
#include "qkt/errors.hpp"

namespace qkt {

namespace {

using cd = std::complex<double>;

// sqrt(j(j+1) - m(m+1)) = sqrt((k+1)(N-k)) for the step k -> k+1
double raising_element(int n, int k) {
  return std::sqrt(static_cast<double>(k + 1) * static_cast<double>(n - k));
}

void check_same_basis(const DickeState& state, const CollectiveOperator& op) {
  if (!(state.basis == op.basis) || state.c.size() != op.matrix.rows()) {
    throw DomainError("dimension mismatch between state and operator");
  }
}

} // namespace

SpinBasis::SpinBasis(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1) throw DomainError("SpinBasis: need at least one qubit");
}

int SpinBasis::index_of_two_m(int two_m) const {
  if (std::abs(two_m) > n_ || ((two_m + n_) % 2) != 0) {
    throw DomainError("SpinBasis: 2m=" + std::to_string(two_m) + " not in the multiplet");
  }
  return (two_m + n_) / 2;
}

std::string_view to_string(OperatorLabel label) noexcept {
  switch (label) {
  case OperatorLabel::Jx: return "Jx";
  case OperatorLabel::Jy: return "Jy";
  case OperatorLabel::Jz: return "Jz";
  case OperatorLabel::JySquared: return "Jy2";
  }
  return "?";
}

OperatorLabel parse_operator_label(std::string_view text) {
  if (text == "Jx") return OperatorLabel::Jx;
  if (text == "Jy") return OperatorLabel::Jy;
  if (text == "Jz") return OperatorLabel::Jz;
  if (text == "Jy2" || text == "Jy^2") return OperatorLabel::JySquared;
  throw DomainError("unknown operator label '" + std::string(text) + "'");
}

CollectiveOperator build_operator(const SpinBasis& basis, OperatorLabel label) {
  const int n = basis.n_qubits();
  const int dim = basis.dim();
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  switch (label) {
  case OperatorLabel::Jz:
    for (int k = 0; k < dim; ++k) mat(k, k) = basis.m(k);
    break;
  case OperatorLabel::Jx:
    for (int k = 0; k + 1 < dim; ++k) {
      const double e = 0.5 * raising_element(n, k);
      mat(k + 1, k) = e;
      mat(k, k + 1) = e;
    }
    break;
  case OperatorLabel::Jy:
    // Jy = (J+ - J-) / 2i
    for (int k = 0; k + 1 < dim; ++k) {
      const double e = 0.5 * raising_element(n, k);
      mat(k + 1, k) = cd(0.0, -e);
      mat(k, k + 1) = cd(0.0, e);
    }
    break;
  case OperatorLabel::JySquared: {
    const auto jy = build_operator(basis, OperatorLabel::Jy).matrix;
    mat = jy * jy;
    break;
  }
  }
  return {basis, label, std::move(mat)};
}

Eigen::MatrixXcd rotation_generator(const SpinBasis& basis, double phi) {
  const auto jx = build_operator(basis, OperatorLabel::Jx).matrix;
  const auto jy = build_operator(basis, OperatorLabel::Jy).matrix;
  return std::sin(phi) * jx - std::cos(phi) * jy;
}

DickeState coherent_state(const SpinBasis& basis, double theta, double phi) {
  constexpr double pi = std::numbers::pi;
  if (!(theta >= 0.0 && theta <= pi)) throw DomainError("coherent_state: theta outside [0, pi]");
  if (!(phi >= 0.0 && phi < 2.0 * pi)) throw DomainError("coherent_state: phi outside [0, 2pi)");

  const int n = basis.n_qubits();
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis.dim());
  const long double cos_half = std::cos(0.5L * static_cast<long double>(theta));
  const long double sin_half = std::sin(0.5L * static_cast<long double>(theta));

  if (sin_half == 0.0L) {
    c(n) = 1.0;
  } else if (cos_half <= 0.0L) {
    c(0) = std::polar(1.0, std::fmod(n * phi, 2.0 * pi));
  } else {
    const long double log_cos = std::log(cos_half);
    const long double log_sin = std::log(sin_half);
    for (int k = 0; k <= n; ++k) {
      const long double log_mag =
          0.5L * log_binomial(n, k) + k * log_cos + (n - k) * log_sin;
      const double mag = static_cast<double>(std::exp(log_mag));
      // reduce the phase argument before it loses digits at large N
      const double arg = std::fmod(static_cast<double>(n - k) * phi, 2.0 * pi);
      c(k) = std::polar(mag, arg);
    }
  }
  return {basis, std::move(c), Eigen::VectorXcd::Zero(basis.dim())};
}

double expectation(const DickeState& state, const CollectiveOperator& op) {
  check_same_basis(state, op);
  return state.c.dot(op.matrix * state.c).real();
}

double variance(const DickeState& state, const CollectiveOperator& op) {
  check_same_basis(state, op);
  const Eigen::VectorXcd applied = op.matrix * state.c;
  const double second = applied.squaredNorm();
  const double first = state.c.dot(applied).real();
  const double var = second - first * first;
  if (var < 0.0) {
    if (var < -1e-12 * std::max(1.0, second)) {
      throw NumericError("variance: significantly negative (" + std::to_string(var) + ")");
    }
    return 0.0;
  }
  return var;
}

} // namespace qkt
