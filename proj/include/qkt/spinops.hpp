#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace qkt {

/// Symmetric (Dicke) sector of N qubits: spin j = N/2, dimension N + 1.
///
/// Basis index k counts up-spins, so the magnetic quantum number is
/// m = k - j and |j, j> is index N. j is kept exact as the integer 2j = N.
class SpinBasis {
public:
  explicit SpinBasis(int n_qubits);

  int n_qubits() const noexcept { return n_; }
  int two_j() const noexcept { return n_; }
  int dim() const noexcept { return n_ + 1; }
  double j() const noexcept { return 0.5 * n_; }

  /// m = k - j for basis index k.
  double m(int k) const noexcept { return k - 0.5 * n_; }

  /// Inverse of m(): index for 2m (must have the parity of N and |2m| <= N).
  int index_of_two_m(int two_m) const;

  friend bool operator==(const SpinBasis&, const SpinBasis&) = default;

private:
  int n_;
};

enum class OperatorLabel { Jx, Jy, Jz, JySquared };

std::string_view to_string(OperatorLabel label) noexcept;

/// Parses "Jx", "Jy", "Jz", "Jy2"; throws DomainError on anything else.
OperatorLabel parse_operator_label(std::string_view text);

struct CollectiveOperator {
  SpinBasis basis;
  OperatorLabel label;
  Eigen::MatrixXcd matrix;
};

/// Dense matrix of a collective spin operator J_a = sum_i s_i^a (s = sigma/2)
/// in the Dicke basis.
CollectiveOperator build_operator(const SpinBasis& basis, OperatorLabel label);

/// Jx sin(phi) - Jy cos(phi): the generator whose exponential prepares |theta, phi>.
Eigen::MatrixXcd rotation_generator(const SpinBasis& basis, double phi);

/// Dicke amplitudes together with their derivative with respect to the kick angle.
struct DickeState {
  SpinBasis basis;
  Eigen::VectorXcd c;
  Eigen::VectorXcd dc;

  double norm() const { return c.norm(); }
};

/// Spin-coherent state exp(i theta (Jx sin phi - Jy cos phi)) |j, j>, evaluated
/// from the closed-form binomial amplitudes
///   c_k = sqrt(C(N,k)) cos^k(theta/2) sin^(N-k)(theta/2) exp(i (N-k) phi).
/// Requires theta in [0, pi] and phi in [0, 2 pi); out-of-range angles are
/// rejected rather than wrapped. The derivative part is zero.
DickeState coherent_state(const SpinBasis& basis, double theta, double phi);

/// <op^2> - <op>^2, clipped at zero when rounding pushes it below (down to -1e-12).
double variance(const DickeState& state, const CollectiveOperator& op);

/// <c|op|c> (real part; op is assumed Hermitian).
double expectation(const DickeState& state, const CollectiveOperator& op);

} // namespace qkt
