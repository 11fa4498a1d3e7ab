#pragma once

#include <Eigen/Dense>

#include "qkt/spinops.hpp"

namespace qkt {

/// sqrt(C(Q,l) C(N-Q,r) / C(N,l+r)): amplitude of |D_Q^(l)> (x) |D_{N-Q}^(r)>
/// in the Dicke state |D_N^(l+r)>. Evaluated through log-gamma, finite for
/// N up to well beyond 10^4. Throws DomainError for out-of-range indices.
double bipartite_weight(int n, int q, int l, int r);

/// All bipartite weights for one split, indexed (l, r).
class WeightTable {
public:
  WeightTable(int n_qubits, int accessible);

  int n_qubits() const noexcept { return n_; }
  int accessible() const noexcept { return q_; }
  const Eigen::MatrixXd& values() const noexcept { return w_; }
  double operator()(int l, int r) const { return w_(l, r); }

private:
  int n_;
  int q_;
  Eigen::MatrixXd w_; // (Q+1) x (N-Q+1)
};

/// Reduced state of the first Q qubits and its derivative with respect to alpha.
///
/// `factor` is the (Q+1)x(N-Q+1) coefficient matrix F with F(p,r) =
/// w(p,r) c_{p+r}, so rho = F F^dagger; `dfactor` is the same built from dc.
/// Consumers may use the factors instead of the dense matrices when the
/// traced block is the smaller one.
struct ReducedDensity {
  int q = 0;
  Eigen::MatrixXcd rho;
  Eigen::MatrixXcd drho;
  Eigen::MatrixXcd factor;
  Eigen::MatrixXcd dfactor;
};

/// Closed-form partial trace over the last N - Q qubits of a symmetric state:
///   rho_pq = sum_r w(p,r) w(q,r) c_{p+r} c*_{q+r},
/// with drho from the product rule. Both outputs are Hermitized; an
/// anti-Hermitian residue above 1e-12 throws NumericError.
ReducedDensity reduce(const DickeState& state, int q);

/// Same, reusing a precomputed weight table (must match the state's N).
ReducedDensity reduce(const DickeState& state, const WeightTable& weights);

} // namespace qkt
