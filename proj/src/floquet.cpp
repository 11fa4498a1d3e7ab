#include "qkt/floquet.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <spdlog/spdlog.h>

#include "qkt/errors.hpp"

namespace qkt {

namespace {

using cd = std::complex<double>;

constexpr std::int64_t kMaxPeriods = std::int64_t{1} << 32;

double raising_element(int n, int k) {
  return std::sqrt(static_cast<double>(k + 1) * static_cast<double>(n - k));
}

// Real symmetric Jy^2 = (J+J- + J-J+ - J+^2 - J-^2) / 4 restricted to the
// indices of one parity class.
Eigen::MatrixXd jy_squared_block(int n, const std::vector<int>& idx) {
  const auto size = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    const int k = idx[a];
    const double down = k > 0 ? raising_element(n, k - 1) : 0.0;
    const double up = k < n ? raising_element(n, k) : 0.0;
    block(a, a) = 0.25 * (down * down + up * up);
    if (a + 1 < size) {
      const double off = -0.25 * raising_element(n, k) * raising_element(n, k + 1);
      block(a + 1, a) = off;
      block(a, a + 1) = off;
    }
  }
  return block;
}

} // namespace

Propagator build_propagator(const SpinBasis& basis, double kappa, double alpha) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("build_propagator: kappa must be >= 0");
  if (!std::isfinite(alpha)) throw DomainError("build_propagator: alpha must be finite");

  Propagator prop(basis, kappa, alpha);
  const int n = basis.n_qubits();
  const int dim = basis.dim();

  prop.rotation_.resize(dim);
  for (int k = 0; k < dim; ++k) prop.rotation_(k) = std::polar(1.0, -alpha * basis.m(k));

  const double twist_rate = kappa / static_cast<double>(basis.two_j());
  for (int parity = 0; parity < 2; ++parity) {
    auto& block = prop.blocks_[parity];
    for (int k = parity; k < dim; k += 2) block.indices.push_back(k);
    const auto size = static_cast<Eigen::Index>(block.indices.size());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jy_squared_block(n, block.indices));
    if (eig.info() != Eigen::Success) {
      throw NumericError("build_propagator: Jy^2 eigendecomposition failed");
    }
    Eigen::VectorXcd phases(size);
    for (Eigen::Index a = 0; a < size; ++a) {
      phases(a) = std::polar(1.0, -twist_rate * eig.eigenvalues()(a));
    }
    const Eigen::MatrixXcd vecs = eig.eigenvectors().cast<cd>();
    block.twist = vecs * phases.asDiagonal() * vecs.transpose();

    Eigen::VectorXcd rot(size);
    for (Eigen::Index a = 0; a < size; ++a) rot(a) = prop.rotation_(block.indices[a]);
    block.unitary = block.twist * rot.asDiagonal();

    const double defect =
        (block.unitary.adjoint() * block.unitary - Eigen::MatrixXcd::Identity(size, size))
            .cwiseAbs()
            .maxCoeff();
    if (defect > 1e-10) {
      throw NumericError("build_propagator: unitarity defect " + std::to_string(defect));
    }
  }
  return prop;
}

Eigen::MatrixXcd Propagator::dense_twist() const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis_.dim(), basis_.dim());
  for (const auto& block : blocks_) {
    for (std::size_t a = 0; a < block.indices.size(); ++a)
      for (std::size_t b = 0; b < block.indices.size(); ++b)
        out(block.indices[a], block.indices[b]) = block.twist(a, b);
  }
  return out;
}

Eigen::MatrixXcd Propagator::dense_unitary() const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis_.dim(), basis_.dim());
  for (const auto& block : blocks_) {
    for (std::size_t a = 0; a < block.indices.size(); ++a)
      for (std::size_t b = 0; b < block.indices.size(); ++b)
        out(block.indices[a], block.indices[b]) = block.unitary(a, b);
  }
  return out;
}

Stepper::Stepper(const Propagator& prop) : prop_(&prop), m_(prop.basis().dim()) {
  for (int k = 0; k < prop.basis().dim(); ++k) m_(k) = prop.basis().m(k);
  for (int p = 0; p < 2; ++p) {
    const auto size = static_cast<Eigen::Index>(prop.blocks()[p].indices.size());
    in_[p].resize(size, 2);
    out_[p].resize(size, 2);
  }
}

void Stepper::advance(DickeState& state) {
  if (!(state.basis == prop_->basis()) || state.c.size() != prop_->basis().dim() ||
      state.dc.size() != state.c.size()) {
    throw DomainError("step: state dimension does not match propagator");
  }
  // [c', dc'] = U [c, dc - i Jz c], since U dc + T(-i Jz)R c = T R (dc - i Jz c)
  for (int p = 0; p < 2; ++p) {
    const auto& block = prop_->blocks()[p];
    auto& in = in_[p];
    for (std::size_t a = 0; a < block.indices.size(); ++a) {
      const int k = block.indices[a];
      const cd ck = state.c(k);
      in(a, 0) = ck;
      in(a, 1) = state.dc(k) + cd(ck.imag() * m_(k), -ck.real() * m_(k));
    }
    out_[p].noalias() = block.unitary * in;
    for (std::size_t a = 0; a < block.indices.size(); ++a) {
      const int k = block.indices[a];
      state.c(k) = out_[p](a, 0);
      state.dc(k) = out_[p](a, 1);
    }
  }
}

Snapshot step(const Propagator& prop, const Snapshot& snap) {
  Snapshot next = snap;
  Stepper stepper(prop);
  stepper.advance(next.state);
  next.t = snap.t + 1;
  return next;
}

EvolveResult evolve(const Propagator& prop, const Snapshot& start,
                    std::span<const std::int64_t> sample_times,
                    const std::function<void(const Snapshot&)>& sink,
                    const EvolveOptions& options) {
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < start.t) throw DomainError("evolve: sample time before start time");
    if (sample_times[i] > kMaxPeriods) throw DomainError("evolve: sample time exceeds 2^32 periods");
    if (i > 0 && sample_times[i] <= sample_times[i - 1]) {
      throw DomainError("evolve: sample times must be strictly increasing");
    }
  }

  Snapshot snap = start;
  Stepper stepper(prop);
  std::int64_t taken = 0;
  for (const std::int64_t target : sample_times) {
    while (snap.t < target) {
      if (options.max_steps > 0 && taken >= options.max_steps) return {std::move(snap), false};
      stepper.advance(snap.state);
      ++snap.t;
      ++taken;
      if (options.renormalize_every > 0 && snap.t % options.renormalize_every == 0) {
        const double norm = snap.state.c.norm();
        const double drift = std::abs(norm - 1.0);
        spdlog::debug("t={} norm drift {:.3e}", snap.t, drift);
        if (drift >= options.max_norm_drift) {
          throw NumericError("evolve: norm drift " + std::to_string(drift) + " at t=" +
                             std::to_string(snap.t));
        }
        snap.state.c /= norm;
        snap.state.dc /= norm;
      }
      if (options.checkpoint_every > 0 && options.on_checkpoint &&
          snap.t % options.checkpoint_every == 0) {
        options.on_checkpoint(snap);
      }
    }
    sink(snap);
  }
  return {std::move(snap), true};
}

EvolveResult evolve(const Propagator& prop, const DickeState& initial,
                    std::span<const std::int64_t> sample_times,
                    const std::function<void(const Snapshot&)>& sink,
                    const EvolveOptions& options) {
  return evolve(prop, Snapshot{0, initial}, sample_times, sink, options);
}

} // namespace qkt
