#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "qkt/errors.hpp"
#include "qkt/floquet.hpp"
#include "qkt/qfi.hpp"
#include "qkt/reduction.hpp"

using namespace qkt;
using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

DickeState evolved(int n, double kappa, double theta, double phi, int t) {
  const SpinBasis b(n);
  const auto prop = build_propagator(b, kappa);
  auto s = coherent_state(b, theta, phi);
  Stepper stepper(prop);
  for (int i = 0; i < t; ++i) stepper.advance(s);
  return s;
}

// rho(alpha) = (1 + cos a sz + sin a sx) / 2 and its alpha derivative
ReducedDensity qubit_ring(double a) {
  ReducedDensity rd;
  rd.q = 1;
  rd.rho.resize(2, 2);
  rd.rho << 1 + std::cos(a), std::sin(a), std::sin(a), 1 - std::cos(a);
  rd.rho *= 0.5;
  rd.drho.resize(2, 2);
  rd.drho << -std::sin(a), std::cos(a), std::cos(a), std::sin(a);
  rd.drho *= 0.5;
  return rd;
}

} // namespace

TEST_CASE("pure QFI basics") {
  const SpinBasis b(10);
  CHECK(pure_qfi(coherent_state(b, 1.0, 2.0)) == 0.0);
  auto s = coherent_state(b, 1.0, 2.0);
  s.c *= 1.1;
  CHECK_THROWS_AS(pure_qfi(s), DomainError);
  const auto s1 = evolved(1000, 3.0, pi / 2, pi / 2, 1);
  CHECK(pure_qfi(s1) == doctest::Approx(1000.0).epsilon(1e-9));
}

TEST_CASE("mixed QFI of a pure qubit ring is 1") {
  for (double a : {0.0, 0.3, 1.0, pi / 2, 2.9}) {
    CAPTURE(a);
    CHECK(mixed_qfi(qubit_ring(a)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mixed QFI vanishes without parameter dependence") {
  const auto s = coherent_state(SpinBasis(20), 2.0, 1.0);
  for (int q : {1, 10, 20}) CHECK(mixed_qfi(reduce(s, q)) == 0.0);
  CHECK_THROWS_AS(mixed_qfi(reduce(s, 5), 0.0), DomainError);
  CHECK_THROWS_AS(mixed_qfi(reduce(s, 5), -1.0), DomainError);
}

TEST_CASE("spectral decomposition contract") {
  const auto rd = reduce(evolved(80, 3.0, 2.46, 0.32, 300), 30);
  const auto spec = spectral_decomposition(rd.rho);
  CHECK(spec.eigenvalues.sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index i = 1; i < spec.eigenvalues.size(); ++i) CHECK(spec.eigenvalues(i) <= spec.eigenvalues(i - 1));
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
    const Eigen::VectorXcd v = spec.eigenvectors.col(i);
    CHECK((rd.rho * v - spec.eigenvalues(i) * v).norm() <= 1e-9);
  }

  Eigen::Matrix2cd bad;
  bad << 1.1, 0, 0, -0.1;
  CHECK_THROWS_AS(spectral_decomposition(bad), NumericError);
  Eigen::Matrix2cd slightly;
  slightly << 1.0 + 5e-11, 0, 0, -5e-11;
  const auto clipped = spectral_decomposition(slightly);
  CHECK(clipped.eigenvalues(1) == 0.0);
  CHECK(clipped.clipped_mass == doctest::Approx(5e-11));
  CHECK(clipped.eigenvalues.sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("full-access mixed QFI equals the pure-state formula") {
  for (double kappa : {3.0, 30.0}) {
    for (int t : {10, 167, 1024}) {
      CAPTURE(kappa);
      CAPTURE(t);
      const auto s = evolved(100, kappa, 2.56, 2.31, t);
      const double pure = pure_qfi(s);
      CHECK(std::abs(mixed_qfi(reduce(s, 100)) - pure) <= 1e-6 * pure);
    }
  }
}

TEST_CASE("factor and dense evaluation paths agree") {
  const auto s = evolved(120, 3.0, 2.2, 2.44, 400);
  for (int q : {20, 60, 61, 100, 119}) {
    CAPTURE(q);
    auto rd = reduce(s, q);
    const double factored = mixed_qfi(rd);
    const double dense = mixed_qfi(spectral_decomposition(rd.rho), rd.drho);
    CHECK(factored == doctest::Approx(dense).epsilon(1e-9));
    rd.factor.resize(0, 0);
    CHECK(mixed_qfi(rd) == doctest::Approx(dense).epsilon(1e-12));
  }
}

TEST_CASE("QFI is nondecreasing in Q") {
  for (double kappa : {3.0, 30.0}) {
    const auto s = evolved(60, kappa, 2.56, 2.31, 167);
    double prev = 0.0;
    for (int q = 1; q <= 60; ++q) {
      const double f = q == 60 ? pure_qfi(s) : mixed_qfi(reduce(s, q));
      CAPTURE(q);
      CHECK(prev <= f * (1.0 + 1e-6));
      prev = f;
    }
  }
}

TEST_CASE("QFI respects the generator-norm bound") {
  for (int t : {1, 10, 100, 1000}) {
    const auto s = evolved(50, 30.0, 2.46, 0.32, t);
    CHECK(pure_qfi(s) <= 4.0 * t * t * 25.0 * 25.0);
  }
}

TEST_CASE("QFI is invariant under a global phase and eigenvector reordering") {
  const auto s = evolved(70, 3.0, 2.56, 2.31, 200);
  auto rotated = s;
  const cplx phase = std::polar(1.0, 0.77);
  rotated.c *= phase;
  rotated.dc *= phase;
  const double base = mixed_qfi(reduce(s, 25));
  CHECK(mixed_qfi(reduce(rotated, 25)) == doctest::Approx(base).epsilon(1e-10));
  CHECK(pure_qfi(rotated) == doctest::Approx(pure_qfi(s)).epsilon(1e-12));

  const auto rd = reduce(s, 25);
  const auto spec = spectral_decomposition(rd.rho);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(spec.eigenvalues.size()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    SpectralDecomposition shuffled = spec;
    for (std::size_t i = 0; i < order.size(); ++i) {
      shuffled.eigenvalues(static_cast<Eigen::Index>(i)) = spec.eigenvalues(order[i]);
      // random phase per eigenvector as well
      shuffled.eigenvectors.col(static_cast<Eigen::Index>(i)) =
          spec.eigenvectors.col(order[i]) * std::polar(1.0, 0.1 * static_cast<double>(i));
    }
    CHECK(mixed_qfi(shuffled, rd.drho) == doctest::Approx(base).epsilon(1e-8));
  }
}

TEST_CASE("halving the spectral cutoff barely moves the QFI") {
  const auto s = evolved(100, 3.0, 2.56, 2.31, 1024);
  for (int q : {5, 25, 50, 90}) {
    const auto rd = reduce(s, q);
    const double a = mixed_qfi(rd, kDefaultSpectralTol);
    const double b = mixed_qfi(rd, 0.5 * kDefaultSpectralTol);
    CAPTURE(q);
    CHECK(std::abs(a - b) <= 1e-4 * a);
  }
}

TEST_CASE("fractional QFI") {
  QfiRecord full{3.0, pi / 2, 100, 100, 2.56, 2.31, 167, 50.0, "edge"};
  QfiRecord part = full;
  part.q = 10;
  part.qfi = 5.0;
  CHECK(fractional_qfi(part, full) == doctest::Approx(0.1));
  CHECK(fractional_qfi(full, full) == 1.0);
  part.qfi = 0.0;
  CHECK(fractional_qfi(part, full) == 0.0);
  part.qfi = 50.0 * (1 + 5e-7);
  CHECK(fractional_qfi(part, full) == 1.0);
  part.qfi = 50.0 * 1.01;
  CHECK_THROWS_AS(fractional_qfi(part, full), NumericError);

  QfiRecord zero = full;
  zero.qfi = 0.0;
  part.qfi = 0.0;
  CHECK(fractional_qfi(part, zero) == 0.0);
  part.qfi = 1.0;
  CHECK_THROWS_AS(fractional_qfi(part, zero), DomainError);

  QfiRecord other = part;
  other.t = 168;
  CHECK_THROWS_AS(fractional_qfi(other, full), DomainError);
  QfiRecord not_full = full;
  not_full.q = 99;
  CHECK_THROWS_AS(fractional_qfi(part, not_full), DomainError);
}

TEST_CASE("fractional QFI grows with Q for an edge-like state") {
  const auto s = evolved(100, 3.0, 2.56, 2.31, 17);
  const double full_qfi = pure_qfi(s);
  const QfiRecord full{3.0, pi / 2, 100, 100, 2.56, 2.31, 17, full_qfi, "edge"};
  QfiRecord q10 = full;
  q10.q = 10;
  q10.qfi = mixed_qfi(reduce(s, 10));
  QfiRecord q50 = full;
  q50.q = 50;
  q50.qfi = mixed_qfi(reduce(s, 50));
  CHECK(fractional_qfi(q10, full) <= fractional_qfi(q50, full));
  CHECK(fractional_qfi(q50, full) <= 1.0);
}
