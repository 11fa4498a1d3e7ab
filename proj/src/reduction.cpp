#include "qkt/reduction.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "qkt/binomial.hpp"
#include "qkt/errors.hpp"

namespace qkt {

namespace {

constexpr double kHermitianSlack = 1e-12;

double hermitize(Eigen::MatrixXcd& m) {
  const double deviation = (m - m.adjoint()).cwiseAbs().maxCoeff();
  m = (0.5 * (m + m.adjoint())).eval();
  return deviation;
}

} // namespace

double bipartite_weight(int n, int q, int l, int r) {
  if (n < 1 || q < 0 || q > n) throw DomainError("bipartite_weight: need 0 <= Q <= N");
  if (l < 0 || l > q || r < 0 || r > n - q) {
    throw DomainError("bipartite_weight: index out of range (l=" + std::to_string(l) +
                      ", r=" + std::to_string(r) + ")");
  }
  const long double log_w =
      0.5L * (log_binomial(q, l) + log_binomial(n - q, r) - log_binomial(n, l + r));
  return static_cast<double>(std::exp(log_w));
}

WeightTable::WeightTable(int n_qubits, int accessible) : n_(n_qubits), q_(accessible) {
  if (accessible < 1 || accessible > n_qubits) {
    throw DomainError("WeightTable: need 1 <= Q <= N (Q=" + std::to_string(accessible) + ")");
  }
  std::vector<long double> log_fact(n_ + 1);
  for (int i = 0; i <= n_; ++i) log_fact[i] = log_factorial(i);
  const auto log_binom = [&](int a, int b) { return log_fact[a] - log_fact[b] - log_fact[a - b]; };

  w_.resize(q_ + 1, n_ - q_ + 1);
  for (int l = 0; l <= q_; ++l) {
    for (int r = 0; r <= n_ - q_; ++r) {
      const long double log_w =
          0.5L * (log_binom(q_, l) + log_binom(n_ - q_, r) - log_binom(n_, l + r));
      w_(l, r) = static_cast<double>(std::exp(log_w));
    }
  }
}

ReducedDensity reduce(const DickeState& state, int q) {
  const int n = state.basis.n_qubits();
  if (q < 1 || q > n) throw DomainError("reduce: need 1 <= Q <= N (Q=" + std::to_string(q) + ")");
  return reduce(state, WeightTable(n, q));
}

ReducedDensity reduce(const DickeState& state, const WeightTable& weights) {
  const int n = state.basis.n_qubits();
  if (weights.n_qubits() != n) throw DomainError("reduce: weight table built for a different N");
  if (state.c.size() != n + 1 || state.dc.size() != n + 1) throw DomainError("reduce: bad state size");
  const int q = weights.accessible();
  const int traced = n - q;

  ReducedDensity out;
  out.q = q;
  out.factor.resize(q + 1, traced + 1);
  out.dfactor.resize(q + 1, traced + 1);
  for (int r = 0; r <= traced; ++r) {
    for (int p = 0; p <= q; ++p) {
      const double w = weights(p, r);
      out.factor(p, r) = w * state.c(p + r);
      out.dfactor(p, r) = w * state.dc(p + r);
    }
  }

  out.rho.noalias() = out.factor * out.factor.adjoint();
  out.drho.noalias() = out.dfactor * out.factor.adjoint();
  out.drho += out.drho.adjoint().eval();

  const double dev_rho = hermitize(out.rho);
  const double dev_drho = hermitize(out.drho);
  spdlog::trace("reduce Q={} hermiticity residue rho={:.2e} drho={:.2e}", q, dev_rho, dev_drho);
  if (dev_rho > kHermitianSlack) {
    throw NumericError("reduce: rho not Hermitian (residue " + std::to_string(dev_rho) + ")");
  }
  return out;
}

} // namespace qkt
