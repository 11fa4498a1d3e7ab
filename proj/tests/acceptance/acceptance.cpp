// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <tuple>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "qkt/analysis.hpp"
#include "qkt/classical.hpp"
#include "qkt/config.hpp"
#include "qkt/floquet.hpp"
#include "qkt/qfi.hpp"
#include "qkt/reduction.hpp"
#include "qkt/sweep.hpp"
#include "support/oracles.hpp"

using namespace qkt;
using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

const InitialState& state_named(const std::vector<InitialState>& states, const std::string& label) {
  for (const auto& s : states)
    if (s.label == label) return s;
  throw std::runtime_error("no state labelled " + label);
}

DickeState advance(const Propagator& prop, DickeState s, std::int64_t steps) {
  Stepper stepper(prop);
  for (std::int64_t i = 0; i < steps; ++i) stepper.advance(s);
  return s;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  constexpr double tol = 1e-10;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit;
  double worst = 0.0;
  int compared = 0;
  for (int n = 1; n <= 12; ++n) {
    const SpinBasis basis(n);
    const std::array props{build_propagator(basis, 3.0), build_propagator(basis, 30.0)};
    for (int sample = 0; sample < 10; ++sample) {
      const double theta = std::acos(1.0 - 2.0 * unit(rng));
      auto s = coherent_state(basis, theta, 2.0 * pi * unit(rng));
      Stepper stepper(props[static_cast<std::size_t>(sample % 2)]);
      for (int t = 0; t <= 20; ++t) {
        if (t > 0) stepper.advance(s);
        for (int q = 1; q <= n; ++q) {
          const auto rd = reduce(s, q);
          const Eigen::MatrixXcd rho = oracle::brute_force_cross(s.c, s.c, n, q);
          const Eigen::MatrixXcd drho =
              oracle::brute_force_cross(s.dc, s.c, n, q) + oracle::brute_force_cross(s.c, s.dc, n, q);
          worst = std::max({worst, max_abs(rd.rho - rho), max_abs(rd.drho - drho) / std::max(1.0, max_abs(drho))});
          ++compared;
        }
      }
    }
  }
  return {worst <= tol, fmt::format("max entry error {:.2e} over {} reductions (tol {:.0e})", worst, compared, tol)};
}

Outcome derivative_correctness() {
  constexpr double tol = 1e-5;
  const auto edge = state_named(default_states(), "edge");
  double worst = 0.0;
  for (int n : {100, 1000}) {
    const SpinBasis basis(n);
    const auto s0 = coherent_state(basis, edge.theta, edge.phi);
    for (double kappa : {3.0, 30.0}) {
      for (std::int64_t t : {1, 167, 1024}) {
        // truncation error of the central difference grows like (t j)^2 h^2
        const double h = std::min(1e-5, 1e-3 / (static_cast<double>(t) * basis.j()));
        const auto analytic = advance(build_propagator(basis, kappa), s0, t);
        const auto plus = advance(build_propagator(basis, kappa, kDefaultAlpha + h), s0, t);
        const auto minus = advance(build_propagator(basis, kappa, kDefaultAlpha - h), s0, t);
        const Eigen::VectorXcd fd = (plus.c - minus.c) / (2.0 * h);
        const double err = (analytic.dc - fd).norm() / fd.norm();
        spdlog::debug("dc check N={} kappa={} t={} h={:.1e}: {:.2e}", n, kappa, t, h, err);
        worst = std::max(worst, err);
      }
    }
  }
  return {worst <= tol, fmt::format("max relative l2 error {:.2e} over 12 grid points (tol {:.0e})", worst, tol)};
}

Outcome pure_mixed_consistency() {
  constexpr double tol = 1e-6;
  const SpinBasis basis(100);
  double worst = 0.0;
  for (double kappa : {3.0, 30.0}) {
    const auto prop = build_propagator(basis, kappa);
    for (const auto& st : default_states()) {
      auto s = coherent_state(basis, st.theta, st.phi);
      std::int64_t now = 0;
      for (std::int64_t t : {10, 167, 1024}) {
        s = advance(prop, s, t - now);
        now = t;
        const double pure = pure_qfi(s);
        const double mixed = mixed_qfi(reduce(s, 100));
        worst = std::max(worst, std::abs(mixed - pure) / pure);
      }
    }
  }
  return {worst <= tol, fmt::format("max relative gap {:.2e} over 30 runs (tol {:.0e})", worst, tol)};
}

Outcome qfi_monotone_in_q() {
  constexpr double slack = 1e-6;
  const SpinBasis basis(100);
  const auto prop = build_propagator(basis, 3.0);
  std::vector<int> qs(100);
  for (int q = 1; q <= 100; ++q) qs[static_cast<std::size_t>(q - 1)] = q;
  double worst = -1.0; // largest relative change -(I(Q+1) - I(Q)) / I(Q); negative means strictly increasing
  int violations = 0;
  for (const auto& st : default_states()) {
    auto s = coherent_state(basis, st.theta, st.phi);
    std::int64_t now = 0;
    for (std::int64_t t : {35, 167, 1024}) {
      s = advance(prop, s, t - now);
      now = t;
      const auto qfi = subsystem_qfi(s, qs, kDefaultSpectralTol);
      for (std::size_t i = 0; i + 1 < qfi.size(); ++i) {
        const double drop = (qfi[i] - qfi[i + 1]) / std::max(qfi[i], 1e-300);
        worst = std::max(worst, drop);
        if (drop > slack) ++violations;
      }
    }
  }
  return {violations == 0,
          fmt::format("{} violations, largest relative step down {:.2e} (slack {:.0e}) at kappa 3, 5 states x 3 times",
                      violations, worst, slack)};
}

Outcome one_kick_closed_form() {
  constexpr double tol = 1e-6;
  double worst = 0.0;
  for (int n : {4, 100, 1000}) {
    const SpinBasis basis(n);
    for (double kappa : {3.0, 30.0}) {
      const auto prop = build_propagator(basis, kappa);
      for (const auto& st : default_states()) {
        const auto s1 = advance(prop, coherent_state(basis, st.theta, st.phi), 1);
        const double expected = 2.0 * basis.j() * std::sin(st.theta) * std::sin(st.theta);
        worst = std::max(worst, std::abs(pure_qfi(s1) - expected) / expected);
      }
    }
  }
  return {worst <= tol, fmt::format("max relative error {:.2e} vs 2j sin^2(theta) (tol {:.0e})", worst, tol)};
}

Outcome characteristic_times_anchors() {
  const auto cfg = paper_config();
  const double j = 500.0;
  const auto k3 = characteristic_times(j, cfg.ehrenfest_lyapunov.at(3.0));
  const auto k30 = characteristic_times(j, cfg.ehrenfest_lyapunov.at(30.0));
  const auto s3 = characteristic_sample_times(cfg, 3.0);
  const auto s30 = characteristic_sample_times(cfg, 30.0);
  bool ok = std::abs(k3.ehrenfest - 35.0) <= 1e-9 && std::abs(k30.ehrenfest - 3.0) <= 1e-9;
  ok = ok && std::llround(k3.heisenberg) == 167 && std::abs(k3.heisenberg - j / 3.0) <= 1e-12;
  ok = ok && s3.ehrenfest == 35 && s30.ehrenfest == 3 && s3.heisenberg == 167 && s30.heisenberg == 167;
  return {ok, fmt::format("t_E = {:.12g} (kappa 3), {:.12g} (kappa 30); t_H = {:.4f} -> {}", k3.ehrenfest,
                          k30.ehrenfest, k3.heisenberg, s3.heisenberg)};
}

Outcome lyapunov_gate() {
  constexpr int n_traj = 2000;
  constexpr std::int64_t n_steps = 5000;
  const std::uint64_t seed = paper_config().seed;
  std::map<double, double> lam;
  for (double kappa : {0.5, 2.5, 3.0, 6.0, 30.0}) lam[kappa] = lyapunov(kappa, pi / 2, n_traj, n_steps, seed).lambda_mean;
  const bool weak = std::abs(lam[0.5]) <= 0.01;
  const bool chaotic = lam[3.0] > 0.1;
  const bool trend = lam[30.0] > lam[6.0] && lam[6.0] > lam[3.0] && lam[3.0] > lam[2.5];
  return {weak && chaotic && trend,
          fmt::format("lambda(0.5)={:.4f} [|.|<=0.01 {}], lambda(3)={:.4f} [>0.1 {}], lambda(2.5,3,6,30)="
                      "{:.4f},{:.4f},{:.4f},{:.4f} [increasing {}]",
                      lam[0.5], weak ? "ok" : "no", lam[3.0], chaotic ? "ok" : "no", lam[2.5], lam[3.0], lam[6.0],
                      lam[30.0], trend ? "ok" : "no")};
}

// ---------------------------------------------------------------------------
// Paper-scale data shared by the quantitative criteria.

const std::vector<std::string> kMainStates{"non-equatorial-island", "chaotic-sea", "edge"};

struct PaperData {
  int n = 1000;
  std::vector<int> qs; // scaling grid plus N
  std::map<double, std::int64_t> t_e, t_h;
  std::int64_t late = 0;
  // full QFI per (kappa, label, t)
  std::map<std::tuple<double, std::string, std::int64_t>, double> full;
  // QFI over qs per (kappa, label, t)
  std::map<std::tuple<double, std::string, std::int64_t>, std::vector<double>> by_q;
  std::vector<std::int64_t> fit_times;
  std::vector<std::int64_t> dense_times;
};

std::vector<std::int64_t> log_grid(double lo, double hi, int points) {
  std::set<std::int64_t> out;
  for (int i = 1; i <= points; ++i) {
    out.insert(static_cast<std::int64_t>(std::llround(lo * std::pow(hi / lo, static_cast<double>(i) / points))));
  }
  return {out.begin(), out.end()};
}

PaperData generate_paper_data() {
  const auto cfg = paper_config();
  PaperData d;
  d.n = cfg.n_qubits;
  d.qs = cfg.scaling_subsystems;
  d.qs.push_back(d.n);
  d.late = cfg.late_time;
  const SpinBasis basis(d.n);
  for (double kappa : {3.0, 30.0}) {
    const auto times = characteristic_sample_times(cfg, kappa);
    d.t_e[kappa] = *times.ehrenfest;
    d.t_h[kappa] = times.heisenberg;
  }
  // gated fit uses the production sample grid; a dense log grid is reported alongside
  for (std::int64_t t : cfg.times)
    if (t > d.t_h[3.0] && t <= 10000) d.fit_times.push_back(t);
  d.dense_times = log_grid(static_cast<double>(d.t_h[3.0]), 1e4, 64);

  for (double kappa : {3.0, 30.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto prop = build_propagator(basis, kappa);
    const std::int64_t te = d.t_e[kappa];
    const std::int64_t th = d.t_h[kappa];
    for (const auto& st : cfg.states) {
      const bool main = std::find(kMainStates.begin(), kMainStates.end(), st.label) != kMainStates.end();
      std::set<std::int64_t> sample{te, th};
      if (kappa == 3.0) {
        sample.insert(d.late);
        sample.insert(d.fit_times.begin(), d.fit_times.end());
        sample.insert(d.dense_times.begin(), d.dense_times.end());
      }
      const std::vector<std::int64_t> times(sample.begin(), sample.end());
      evolve(prop, coherent_state(basis, st.theta, st.phi), times, [&](const Snapshot& snap) {
        const auto key = std::tuple{kappa, st.label, snap.t};
        const bool sweep_q = main && (snap.t == te || snap.t == th || (kappa == 3.0 && snap.t == d.late));
        if (sweep_q) {
          d.by_q[key] = subsystem_qfi(snap.state, d.qs, cfg.spectral_tol);
          d.full[key] = d.by_q[key].back();
        } else {
          d.full[key] = pure_qfi(snap.state);
        }
      });
      spdlog::info("paper-scale data: kappa {} {} done ({:.0f} s)", kappa, st.label, seconds_since(t0));
    }
  }
  return d;
}

ScalingFit q_fit(const PaperData& d, double kappa, const std::string& label, std::int64_t t) {
  const auto& qfi = d.by_q.at({kappa, label, t});
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < d.qs.size(); ++i) samples.push_back({static_cast<double>(d.qs[i]), qfi[i]});
  return fit_power_law(samples, {1.0, static_cast<double>(d.n - 1)}, FitAxis::Subsystem);
}

Outcome scaling_exponents(const PaperData& d) {
  std::vector<std::string> parts;
  bool ok = true;
  const auto in_band = [&](double s, double lo, double hi) {
    const bool inside = s >= lo && s <= hi;
    ok = ok && inside;
    return inside ? "" : "!";
  };
  const double th = static_cast<double>(d.t_h.at(3.0));
  const auto time_fit = [&](const std::string& label, const std::vector<std::int64_t>& times) {
    std::vector<Sample> samples;
    for (std::int64_t t : times) samples.push_back({static_cast<double>(t), d.full.at({3.0, label, t})});
    return fit_power_law(samples, {std::nextafter(th, 2 * th), 1e4}, FitAxis::Time).exponent;
  };
  for (const auto& label : kMainStates) {
    const double s = time_fit(label, d.fit_times);
    parts.push_back(fmt::format("{} time s={:.3f}{} (dense grid {:.3f})", label, s, in_band(s, 1.6, 2.9),
                                time_fit(label, d.dense_times)));
  }
  const struct {
    std::int64_t t;
    double lo, hi;
    const char* name;
  } q_bands[] = {{d.t_e.at(3.0), 0.4, 1.6, "t_E"}, {d.t_h.at(3.0), 1.1, 2.1, "t_H"}, {d.late, 0.3, 1.6, "2^15"}};
  for (const auto& band : q_bands) {
    std::vector<std::string> vals;
    for (const auto& label : kMainStates) {
      const double s = q_fit(d, 3.0, label, band.t).exponent;
      vals.push_back(fmt::format("{:.3f}{}", s, in_band(s, band.lo, band.hi)));
    }
    parts.push_back(fmt::format("Q s@{}=[{}]", band.name, fmt::join(vals, ",")));
  }
  return {ok, fmt::format("{} (! = outside band)", fmt::join(parts, "; "))};
}

Outcome state_ordering(const PaperData& d) {
  const auto full = [&](double kappa, const std::string& label, std::int64_t t) {
    return d.full.at({kappa, label, t});
  };
  const std::int64_t late = d.late;
  const double edge = full(3.0, "edge", late);
  const double sea = full(3.0, "chaotic-sea", late);
  const double isl = std::max(full(3.0, "island", late), full(3.0, "non-equatorial-island", late));
  const bool late_order = edge >= sea && sea >= isl;

  const std::int64_t te = d.t_e.at(3.0);
  bool sea_max = true;
  for (const auto& st : default_states()) sea_max = sea_max && full(3.0, "chaotic-sea", te) >= full(3.0, st.label, te);

  const auto spread = [&](double kappa) {
    std::vector<double> v;
    for (const auto& st : default_states()) v.push_back(full(kappa, st.label, d.t_h.at(kappa)));
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x / static_cast<double>(v.size());
    return (*hi - *lo) / mean;
  };
  const double spread3 = spread(3.0);
  const double spread30 = spread(30.0);
  const bool calmer = spread30 < spread3;
  return {late_order && sea_max && calmer,
          fmt::format("t=2^15 edge {:.4g} >= sea {:.4g} >= islands {:.4g} [{}]; sea maximal at t_E [{}]; "
                      "t_H spread kappa 30 {:.3f} < kappa 3 {:.3f} [{}]",
                      edge, sea, isl, late_order ? "ok" : "no", sea_max ? "ok" : "no", spread30, spread3,
                      calmer ? "ok" : "no")};
}

Outcome fractional_transition(const PaperData& d) {
  const double split = paper_config().transition_split;
  bool ok = true;
  std::vector<std::string> parts;
  for (double kappa : {3.0, 30.0}) {
    for (auto [name, t] : {std::pair{"t_E", d.t_e.at(kappa)}, std::pair{"t_H", d.t_h.at(kappa)}}) {
      for (const auto& label : kMainStates) {
        const auto& qfi = d.by_q.at({kappa, label, t});
        const double whole = qfi.back();
        std::vector<Sample> samples;
        for (std::size_t i = 0; i + 1 < d.qs.size(); ++i) {
          samples.push_back({static_cast<double>(d.qs[i]) / d.n, std::min(1.0, qfi[i] / whole)});
        }
        const auto tr = slope_transition(samples, split);
        ok = ok && tr.significant();
        parts.push_back(fmt::format("k{:g} {} {}: {:.3f}+-{:.3f} vs {:.3f}+-{:.3f}{}", kappa, name, label,
                                    tr.below.exponent, tr.below.exponent_stderr, tr.above.exponent,
                                    tr.above.exponent_stderr, tr.significant() ? "" : " !"));
      }
    }
  }
  return {ok, fmt::format("split {:g}: {} (! = not significant)", split, fmt::join(parts, "; "))};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  bool verbose = false;
  app.add_option("--only", only, "criterion numbers to run (default: all)")->check(CLI::Range(1, 10));
  app.add_flag("-v,--verbose", verbose, "progress logging");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  const auto selected = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  struct Criterion {
    int id;
    const char* name;
    double budget_s; // 0: no runtime bound
    std::function<Outcome()> run;
  };
  PaperData paper;
  bool paper_ready = false;
  const auto with_paper = [&](Outcome (*f)(const PaperData&)) {
    return [&, f] {
      if (!paper_ready) {
        paper = generate_paper_data();
        paper_ready = true;
      }
      return f(paper);
    };
  };
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", 60.0, oracle_equivalence},
      {2, "derivative correctness", 300.0, derivative_correctness},
      {3, "pure/mixed consistency", 120.0, pure_mixed_consistency},
      {4, "QFI monotone in Q", 0.0, qfi_monotone_in_q},
      {5, "one-kick closed form", 0.0, one_kick_closed_form},
      {6, "characteristic times", 0.0, characteristic_times_anchors},
      {7, "Lyapunov gate", 600.0, lyapunov_gate},
      {8, "paper-scale scaling exponents", 0.0, with_paper(scaling_exponents)},
      {9, "state ordering", 0.0, with_paper(state_ordering)},
      {10, "fractional-QFI transition", 0.0, with_paper(fractional_transition)},
  };

  const auto total_start = std::chrono::steady_clock::now();
  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double elapsed = seconds_since(start);
    if (c.budget_s > 0.0 && elapsed > c.budget_s) {
      out.pass = false;
      out.detail += fmt::format("; over runtime budget {:.0f} s", c.budget_s);
    }
    failed += out.pass ? 0 : 1;
    std::printf("[%s] %d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), elapsed);
    std::fflush(stdout);
  }
  // criteria 8-10 share one paper-scale data set; its cost is in whichever of them ran first
  const double budget_full = 12.0 * 3600.0;
  const double total = seconds_since(total_start);
  std::printf("total %.1f s%s\n", total, total > budget_full ? " (over the 12 h paper-scale budget)" : "");
  return failed == 0 && total <= budget_full ? 0 : 1;
}
