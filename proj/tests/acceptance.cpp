// Acceptance checks. `acceptance <n>` runs criterion n, no argument runs all of them.
// Each criterion prints one PASS/FAIL line; the exit status is nonzero if any failed.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "sda/composite.hpp"
#include "sda/config.hpp"
#include "sda/io.hpp"
#include "sda/synthesis.hpp"

namespace {

using namespace sda;
using oracle::Rng;
constexpr Real kPiR = kPi<Real>;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string g6(double v) { return format_g6(v); }

// Synthesis runs of the table2 command, shared by criteria 1 and 8.
struct Table2Run {
  Real f_mhz;
  SynthesisResult result;
  DirectivityMatrices<Real> mats;
};

std::vector<Table2Run> table2_runs() {
  const RunConfig cfg;  // 5-sensor UCA, r = 3 m, in-plane look, -25 dB
  const auto array = cfg.array.build();
  std::vector<Table2Run> runs;
  for (Real f : cfg.f_mhz) {
    const auto ctx = CarrierContext<Real>::from_mhz(f);
    const auto sc = cfg.synthesis_config(f);
    auto mats = make_directivity_matrices(array, ctx, sc.look, sc.quadrature);
    auto result = synthesize(array, mats, sc);
    runs.push_back({f, std::move(result), std::move(mats)});
  }
  return runs;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto runs = table2_runs();
  const double elapsed = seconds_since(t0);
  const Real target_d[] = {12.3, 12.9, 13.5, 14.2, 14.7};
  const Real target_g[] = {-24.0, -17.6, -13.4, -10.4, -8.0};
  bool d_ok = true, g_ok = true, d_mono = true, g_mono = true, conv = true;
  std::ostringstream rows;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i].result;
    d_ok = d_ok && std::abs(r.directivity_db - target_d[i]) <= 1.5;
    g_ok = g_ok && std::abs(r.gamma_db - target_g[i]) <= 3.0;
    conv = conv && r.status == SynthesisStatus::converged;
    if (i > 0) {
      d_mono = d_mono && r.directivity_db > runs[i - 1].result.directivity_db;
      g_mono = g_mono && r.gamma_db > runs[i - 1].result.gamma_db;
    }
    rows << " " << g6(runs[i].f_mhz) << "MHz:D=" << g6(r.directivity_db) << "/g=" << g6(r.gamma_db);
  }
  const bool pass = d_ok && g_ok && d_mono && g_mono && conv && elapsed < 120;
  std::ostringstream s;
  s << "D within 1.5 dB " << (d_ok ? "yes" : "no") << ", gamma within 3 dB " << (g_ok ? "yes" : "no")
    << ", D increasing " << (d_mono ? "yes" : "no") << ", gamma increasing " << (g_mono ? "yes" : "no")
    << ", all converged " << (conv ? "yes" : "no") << ", " << g6(elapsed) << " s;" << rows.str();
  return {pass, s.str()};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ctx = CarrierContext<Real>::from_mhz(4);
  const Direction<Real> look(kPiR / 2, 0);
  const auto r7 = radius_for_rein(7, ctx, -30, look);
  const auto r5 = radius_for_rein(5, ctx, -30, look);
  const double elapsed = seconds_since(t0);
  const bool ok7 = std::abs(r7.radius_lambda - 0.13) <= 0.1 * 0.13;
  const bool ok5 = std::abs(r5.radius_lambda - 0.053) <= 0.1 * 0.053;
  std::ostringstream s;
  s << "N=7 r=" << g6(r7.radius_lambda) << " lambda (" << g6(r7.radius_m) << " m), N=5 r=" << g6(r5.radius_lambda)
    << " lambda (" << g6(r5.radius_m) << " m), " << g6(elapsed) << " s";
  return {ok7 && ok5 && elapsed < 30, s.str()};
}

Outcome criterion3() {
  const auto ctx = CarrierContext<Real>::from_mhz(4);
  const Direction<Real> look(kPiR / 2, 0);
  const std::vector<Real> radii = {0.02, 0.05, 0.1, 0.2, 0.3};
  const std::vector<int> ns = {3, 5, 7};
  std::vector<std::vector<MaxDirectivityPoint>> p(ns.size());
  for (std::size_t a = 0; a < ns.size(); ++a)
    for (Real r : radii) p[a].push_back(max_directivity_point(make_uca<Real>(ns[a], r * ctx.lambda), ctx, look));
  const Real slack = 1e-9;
  int violations = 0;
  std::ostringstream first;
  auto note = [&](const std::string& what) {
    if (violations++ == 0) first << "; first: " << what;
  };
  for (std::size_t a = 0; a < ns.size(); ++a)
    for (std::size_t i = 1; i < radii.size(); ++i) {
      if (p[a][i].dmax_db > p[a][i - 1].dmax_db + slack) note("Dmax rises with r at N=" + std::to_string(ns[a]));
      if (p[a][i].gamma_db < p[a][i - 1].gamma_db - slack) note("gamma falls with r at N=" + std::to_string(ns[a]));
    }
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::size_t a = 1; a < ns.size(); ++a) {
      if (p[a][i].dmax_db < p[a - 1][i].dmax_db - slack) note("Dmax falls with N at r=" + g6(radii[i]));
      if (p[a][i].gamma_db > p[a - 1][i].gamma_db + slack) note("gamma rises with N at r=" + g6(radii[i]));
    }
  return {violations == 0, std::to_string(violations) + " violations over 15 points" + first.str()};
}

Outcome criterion4() {
  const auto ctx = CarrierContext<Real>::from_mhz(4);
  auto variation = [&](int n) {
    const auto array = make_uca<Real>(n, 0.1 * ctx.lambda);
    const auto a = compute_A(array, ctx);
    Real lo = 1e300, hi = -1e300;
    for (int j = 0; j < 360; ++j) {
      const Direction<Real> look(kPiR / 2, deg2rad(Real(j)));
      const auto der = steering_derivatives(array, ctx, look);
      const Real d = to_db(max_directivity(a, steering_vector(array, ctx, look), der.dtheta, der.dphi).dmax);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return hi - lo;
  };
  const Real v7 = variation(7), v8 = variation(8);
  return {v7 < 0.5 && v8 > v7, "r=0.1 lambda, 1 degree azimuth sweep: N=7 varies " + g6(v7) + " dB, N=8 varies " +
                                   g6(v8) + " dB"};
}

Outcome criterion5() {
  Rng rng(2024);
  Real worst_eq = 0, worst_ball = 0;
  int ball_instances = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n2 = 2 * (1 + trial % 5);
    const Eigen::Index m = 1 + trial % std::max<Eigen::Index>(1, n2 - 1);
    const RealMatrix<Real> q = oracle::random_matrix(rng, n2, n2).householderQr().householderQ();
    RealVector<Real> spectrum(n2);
    for (Eigen::Index i = 0; i < n2; ++i) spectrum(i) = std::pow(10.0, oracle::uniform(rng, -4, 1));
    const RealMatrix<Real> a = q * spectrum.asDiagonal() * q.transpose();
    EqualityConstraints<Real> cons{oracle::random_matrix(rng, n2, m), oracle::random_matrix(rng, m, 1).col(0)};

    const auto eq = solve_equality_qp(a, cons);
    const auto ref = oracle::nullspace_minimizer(a, cons.C, cons.f);
    const Real ref_obj = ref.dot(a * ref);
    worst_eq = std::max(worst_eq, std::abs(eq.x.dot(a * eq.x) - ref_obj) / ref_obj);

    const Real lo = minimum_norm_feasible(cons).squaredNorm();
    const Real hi = eq.x.squaredNorm();
    if (m >= n2 || hi <= lo * (1 + 1e-6)) continue;
    const Real b = lo + oracle::uniform(rng, 0.1, 0.9) * (hi - lo);
    const auto ball = solve_norm_constrained_qp(a, cons, b);
    const auto grid = oracle::multiplier_grid_search(a, cons.C, cons.f, b);
    const Real grid_obj = grid.dot(a * grid);
    worst_ball = std::max(worst_ball, std::abs(ball.objective - grid_obj) / grid_obj);
    ++ball_instances;
  }
  const bool pass = worst_eq < 1e-8 && worst_ball < 1e-8 && ball_instances > 50;
  return {pass, "equality QP worst relative objective error " + g6(worst_eq) + " (100 instances), norm-ball " +
                    g6(worst_ball) + " (" + std::to_string(ball_instances) + " instances with an active ball)"};
}

Outcome criterion6() {
  Rng rng(6);
  const auto ctx = CarrierContext<Real>::from_mhz(6);
  Real worst_closed = 0, worst_eig = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto array = oracle::random_geometry(rng, 2 + trial % 6, ctx, 0.6, 0.15);
    const auto mats = make_directivity_matrices(array, ctx, oracle::random_direction(rng));
    const auto md = max_directivity(array, mats, false);
    const Real closed = std::real(mats.v0.dot(mats.A.ldlt().solve(mats.v0)));
    Eigen::GeneralizedSelfAdjointEigenSolver<ComplexMatrix<Real>> ges(mats.B, mats.A);
    worst_closed = std::max(worst_closed, std::abs(md.dmax - closed) / closed);
    worst_eig = std::max(worst_eig, std::abs(md.dmax - ges.eigenvalues().maxCoeff()) / closed);
  }
  return {worst_closed < 1e-10 && worst_eig < 1e-10,
          "20 geometries: vs v0^H A^-1 v0 " + g6(worst_closed) + ", vs generalized eigenvalue " + g6(worst_eig)};
}

Outcome criterion7() {
  Rng rng(7);
  Real worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index n = 1 + trial % 10;
    ComplexMatrix<Real> a = oracle::random_hermitian(rng, n, trial % 2 == 0);
    a /= a.norm();
    const ComplexVector<Real> w = oracle::random_complex(rng, n).normalized();
    const ComplexVector<Real> v = oracle::random_complex(rng, n).normalized();
    const auto wt = lift_weight(w);
    const auto lv = lift_steering(v);
    const Complex<Real> ip = v.dot(w);
    worst = std::max({worst, std::abs(wt.dot(lift_matrix(a) * wt) - std::real(w.dot(a * w))),
                      std::abs(lv.tilde.dot(wt) - ip.real()), std::abs(lv.hat.dot(wt) - ip.imag()),
                      std::abs(wt.squaredNorm() - w.squaredNorm())});
  }
  return {worst < 1e-12, "1000 instances, worst identity residual " + g6(worst)};
}

// Every iterate of every synthesis run made here: the table2 frequencies and the composite sub-array.
Outcome criterion8() {
  auto runs = table2_runs();
  {
    const auto ctx = CarrierContext<Real>::from_mhz(4);
    SynthesisConfig sc;
    sc.look = Direction<Real>(kPiR / 2, kPiR / 2);
    const auto array = make_uca<Real>(5, 3.0);
    auto mats = make_directivity_matrices(array, ctx, sc.look);
    auto result = synthesize(array, mats, sc);
    runs.push_back({4, std::move(result), std::move(mats)});
  }
  std::size_t checked = 0, violations = 0;
  Real worst_margin = 1e300;
  for (const auto& run : runs) {
    for (const auto& it : run.result.iterations) {
      const bool unit_gain = std::abs(pattern_response(it.w, run.mats.v0) - Complex<Real>(1)) <= 1e-9;
      const bool in_ball = it.w.squaredNorm() <= it.norm_bound;
      if (!unit_gain || !in_ball) continue;
      ++checked;
      const Real margin = rein(it.w, run.mats.A).ratio - from_db(it.epsilon0_db);
      worst_margin = std::min(worst_margin, margin);
      if (margin < -1e-9) ++violations;
    }
  }
  return {checked > 0 && violations == 0, std::to_string(checked) + " iterates from " + std::to_string(runs.size()) +
                                              " runs, " + std::to_string(violations) +
                                              " below the floor, smallest margin " + g6(worst_margin)};
}

Outcome criterion9() {
  const auto ctx = CarrierContext<Real>::from_mhz(4);
  SynthesisConfig sc;
  sc.look = Direction<Real>(kPiR / 2, kPiR / 2);
  sc.epsilon_db = -30;
  sc.sidelobe_level_db = -25;
  const auto sub = make_uca<Real>(5, 3.0);
  const auto result = synthesize(sub, ctx, sc);
  const auto comp = CompositeArray<Real>::uniform(sub, result.w_opt, 8, 15.0, Vector3<Real>::UnitX());
  const auto flat = flatten(comp);

  auto total = [&](const Direction<Real>& d) { return pattern_response(flat.w_total, steering_vector(flat.array, ctx, d)); };
  const auto grid = sample_pattern(flat.array, ctx, flat.w_total, 1.0);
  Real factor_err = 0;
  for (std::size_t i = 0; i < grid.theta.size(); ++i)
    for (std::size_t j = 0; j < grid.phi.size(); ++j) {
      const Direction<Real> d(grid.theta[i], grid.phi[j]);
      const auto fs = pattern_response(comp.subarray_weights, steering_vector(sub, ctx, d));
      factor_err = std::max(factor_err, std::abs(grid.values(Eigen::Index(i), Eigen::Index(j)) -
                                                 fs * array_factor(comp, ctx, d)));
    }

  // sidelobe region: outside the sub-array's mainlobe cap
  const Real reference = std::abs(total(sc.look));
  const auto peaks = find_sidelobe_peaks(grid, total, sc.look, result.mainlobe_exclusion_rad, 1);
  const Real worst_db = peaks.empty() ? -400 : 20 * std::log10(peaks.front().magnitude / reference);
  const bool converged = result.status == SynthesisStatus::converged;
  const bool pass = factor_err < 1e-10 && converged && worst_db <= sc.sidelobe_level_db + 0.5;
  return {pass, "factorization error " + g6(factor_err) + " on 1 degree grid, sub-array " + to_string(result.status) +
                    ", worst composite sidelobe " + g6(worst_db) + " dB outside the " +
                    g6(rad2deg(result.mainlobe_exclusion_rad)) + " degree mainlobe cap"};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list = {
      {"frequency table", criterion1},       {"radius selection", criterion2},
      {"radius and size trends", criterion3},     {"odd/even rotation", criterion4},
      {"solver oracle equivalence", criterion5},  {"closed-form directivity", criterion6},
      {"real-lift algebra", criterion7},          {"REIN guarantee", criterion8},
      {"composite factorization", criterion9}};
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  } else {
    for (std::size_t i = 1; i <= criteria().size(); ++i) selected.push_back(int(i));
  }
  bool all = true;
  for (int k : selected) {
    if (k < 1 || k > int(criteria().size())) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    const auto& [name, run] = criteria()[std::size_t(k - 1)];
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s: %s\n", k, name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
