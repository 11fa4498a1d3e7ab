#include "qkt/qfi.hpp"

#include <cmath>
#include <string>

#include "qkt/errors.hpp"

namespace qkt {

namespace {

constexpr double kFractionalSlack = 1e-6;

double pair_sum(const Eigen::VectorXd& p, const Eigen::MatrixXcd& d, double tol) {
  const Eigen::Index size = p.size();
  double total = 0.0;
  for (Eigen::Index n = 0; n < size; ++n) {
    for (Eigen::Index m = 0; m < size; ++m) {
      const double denom = p(n) + p(m);
      if (denom > tol) total += std::norm(d(m, n)) / denom;
    }
  }
  return 2.0 * total;
}

} // namespace

SpectralDecomposition spectral_decomposition(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw DomainError("spectral_decomposition: not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
  if (eig.info() != Eigen::Success) throw NumericError("spectral_decomposition: eigensolver failed");

  const Eigen::Index size = rho.rows();
  SpectralDecomposition out;
  out.eigenvalues.resize(size);
  out.eigenvectors.resize(size, size);
  // Eigen returns ascending order
  for (Eigen::Index i = 0; i < size; ++i) {
    out.eigenvalues(i) = eig.eigenvalues()(size - 1 - i);
    out.eigenvectors.col(i) = eig.eigenvectors().col(size - 1 - i);
  }
  for (Eigen::Index i = 0; i < size; ++i) {
    double& p = out.eigenvalues(i);
    if (p < 0.0) {
      if (p < -kNegativeEigenvalueSlack) {
        throw NumericError("spectral_decomposition: eigenvalue " + std::to_string(p) +
                           " below -1e-10");
      }
      out.clipped_mass += -p;
      p = 0.0;
    }
  }
  const double sum = out.eigenvalues.sum();
  if (!(sum > 0.0)) throw NumericError("spectral_decomposition: vanishing trace");
  out.eigenvalues /= sum;
  return out;
}

double pure_qfi(const DickeState& state) {
  if (std::abs(state.c.norm() - 1.0) > 1e-8) throw DomainError("pure_qfi: state is not normalized");
  const double dd = state.dc.squaredNorm();
  const std::complex<double> overlap = state.c.dot(state.dc);
  const double value = 4.0 * (dd - std::norm(overlap));
  if (value < 0.0) {
    if (value < -1e-9) throw NumericError("pure_qfi: negative value " + std::to_string(value));
    return 0.0;
  }
  return value;
}

double mixed_qfi(const SpectralDecomposition& spec, const Eigen::MatrixXcd& drho, double spectral_tol) {
  if (!(spectral_tol > 0.0)) throw DomainError("mixed_qfi: spectral_tol must be positive");
  const Eigen::MatrixXcd& v = spec.eigenvectors;
  const Eigen::MatrixXcd d = v.adjoint() * drho * v;
  return pair_sum(spec.eigenvalues, d, spectral_tol);
}

double mixed_qfi(const ReducedDensity& rd, double spectral_tol) {
  if (!(spectral_tol > 0.0)) throw DomainError("mixed_qfi: spectral_tol must be positive");

  // rho = F F^+ with F of size (Q+1) x (N-Q+1). When N-Q < Q the rank is at
  // most N-Q+1, so a thin SVD F = U S W^+ replaces the (Q+1)-dim eigenproblem.
  const bool use_factors = rd.factor.size() > 0 && rd.factor.cols() < rd.factor.rows() &&
                           rd.factor.rows() == rd.rho.rows();
  if (!use_factors) return mixed_qfi(spectral_decomposition(rd.rho), rd.drho, spectral_tol);

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(rd.factor, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("mixed_qfi: SVD failed");
  const Eigen::MatrixXcd& u = svd.matrixU();
  Eigen::VectorXd p = svd.singularValues().cwiseAbs2();
  const double sum = p.sum();
  if (!(sum > 0.0)) throw NumericError("mixed_qfi: vanishing trace");
  p /= sum;

  // range-range pairs: <u_m| dF F^+ + F dF^+ |u_n>
  const Eigen::MatrixXcd a = u.adjoint() * rd.dfactor;
  const Eigen::MatrixXcd b = u.adjoint() * rd.factor;
  Eigen::MatrixXcd d = a * b.adjoint();
  d += d.adjoint().eval();
  double total = pair_sum(p, d, spectral_tol);

  // range-kernel pairs: with P the kernel projector, P drho u_n = s_n P dF w_n,
  // so |P drho u_n|^2 / p_n = sum |P dF w_n|^2; both orderings count
  const Eigen::MatrixXcd e = rd.dfactor * svd.matrixV();
  const Eigen::MatrixXcd kernel_part = e - u * (u.adjoint() * e);
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    if (p(n) > spectral_tol) total += 4.0 * sum * kernel_part.col(n).squaredNorm();
  }
  return total;
}

double fractional_qfi(const QfiRecord& partial, const QfiRecord& full) {
  if (partial.kappa != full.kappa || partial.alpha != full.alpha || partial.n != full.n ||
      partial.theta != full.theta || partial.phi != full.phi || partial.t != full.t) {
    throw DomainError("fractional_qfi: records describe different runs");
  }
  if (full.q != full.n) throw DomainError("fractional_qfi: reference record must have Q = N");
  if (partial.q > full.q || partial.q < 1) throw DomainError("fractional_qfi: partial Q out of range");
  if (partial.qfi < 0.0 || full.qfi < 0.0) throw DomainError("fractional_qfi: negative QFI");
  if (full.qfi == 0.0) {
    if (partial.qfi == 0.0) return 0.0;
    throw DomainError("fractional_qfi: full-access QFI is zero but partial is not");
  }
  const double ratio = partial.qfi / full.qfi;
  if (ratio > 1.0) {
    if (ratio > 1.0 + kFractionalSlack) {
      throw NumericError("fractional_qfi: ratio " + std::to_string(ratio) + " exceeds 1");
    }
    return 1.0;
  }
  return ratio;
}

} // namespace qkt
