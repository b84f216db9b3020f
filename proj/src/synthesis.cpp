#include "sda/synthesis.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace sda {

void SynthesisConfig::validate() const {
  if (!(sidelobe_level_db < 0)) throw ConfigError("sidelobe_db must be negative");
  if (!(delta_db > 0)) throw ConfigError("delta_db must be positive");
  if (!std::isfinite(epsilon_db)) throw ConfigError("epsilon_db must be finite");
  if (max_outer_iterations < 1 || max_pin_iterations < 1) throw ConfigError("iteration limits must be >= 1");
  if (!(grid_deg > 0) || grid_deg > 10) throw ConfigError("grid_deg must be in (0, 10]");
  quadrature.validate();
}

std::string to_string(SynthesisStatus status) {
  switch (status) {
    case SynthesisStatus::converged:
      return "converged";
    case SynthesisStatus::sidelobe_infeasible:
      return "sidelobe-infeasible";
    case SynthesisStatus::rein_infeasible:
      return "rein-infeasible";
  }
  return "unknown";
}

int m_max(int n_sensors, int mainlobe_rows) {
  if (n_sensors < 1 || mainlobe_rows < 1) throw std::invalid_argument("m_max: N and M must be >= 1");
  const int m = mainlobe_rows % 2 == 1 ? n_sensors - (mainlobe_rows + 1) / 2 : n_sensors - mainlobe_rows / 2;
  if (m <= 0)
    throw InfeasibleError("over-constrained design: no sidelobe points can be pinned with N = " +
                          std::to_string(n_sensors) + ", M = " + std::to_string(mainlobe_rows));
  return m;
}

Complex<Real> pin_target(Complex<Real> current, Real level, bool* zero_phase) {
  const Real mag = std::abs(current);
  if (zero_phase) *zero_phase = !(mag > 0);
  if (!(mag > 0)) return {level, 0};
  return level * current / mag;
}

std::vector<Complex<Real>> pin_targets(const std::vector<Complex<Real>>& current, Real level,
                                       std::vector<std::size_t>* zero_phase) {
  std::vector<Complex<Real>> out;
  out.reserve(current.size());
  for (std::size_t i = 0; i < current.size(); ++i) {
    bool zero = false;
    out.push_back(pin_target(current[i], level, &zero));
    if (zero && zero_phase) zero_phase->push_back(i);
  }
  return out;
}

MaxDirectivityPoint max_directivity_point(const SensorArray<Real>& array, const CarrierContext<Real>& ctx,
                                          const Direction<Real>& look, const QuadratureSpec& quad) {
  const auto mats = make_directivity_matrices(array, ctx, look, quad);
  const auto md = max_directivity(array, mats);
  return {to_db(md.dmax), rein(md.w, mats.A).db, md.dropped, md.loading};
}

namespace {

struct PinSolve {
  QPSolution<Real> qp;
  WeightVector<Real> w;
};

void record(SynthesisResult& result, const DirectivityMatrices<Real>& mats, const WeightVector<Real>& w,
            const QPSolution<Real>& qp, int outer, int pin_iteration, Real eps0_db, Real b, std::size_t pinned,
            Real worst_db) {
  IterationRecord rec;
  rec.outer = outer;
  rec.pin_iteration = pin_iteration;
  rec.epsilon0_db = eps0_db;
  rec.norm_bound = b;
  rec.norm2 = w.squaredNorm();
  rec.mu = qp.mu;
  rec.ball_active = qp.active;
  rec.worst_sidelobe_db = worst_db;
  rec.gamma_db = rein(w, mats.A).db;
  rec.directivity_db = directivity(w, mats).db;
  rec.objective = quadratic_form(w, mats.A);
  rec.pinned = pinned;
  rec.w = w;
  result.iterations.push_back(std::move(rec));
  result.loading = std::max(result.loading, qp.loading);
}

}  // namespace

SynthesisResult synthesize(const SensorArray<Real>& array, const CarrierContext<Real>& ctx,
                           const SynthesisConfig& config) {
  config.validate();
  return synthesize(array, make_directivity_matrices(array, ctx, config.look, config.quadrature), config);
}

SynthesisResult synthesize(const SensorArray<Real>& array, const DirectivityMatrices<Real>& mats,
                           const SynthesisConfig& config) {
  config.validate();
  if (angular_distance(mats.look, config.look) > 1e-12 || mats.v0.size() != array.size())
    throw std::invalid_argument("synthesize: directivity matrices were built for another look or array");
  const auto& ctx = mats.ctx;
  const auto& look = config.look;
  const Eigen::Index n = array.size();
  const RealMatrix<Real> a_tilde = lift_matrix(mats.A);

  SynthesisResult result;
  const auto md = max_directivity(array, mats);
  const EqualityConstraints<Real>& mainlobe = md.constraints;
  result.dropped_rows = md.dropped;
  result.loading = md.loading;
  result.dmax_db = to_db(md.dmax);
  result.mainlobe_rows = mainlobe.rows();

  const Real level = std::pow(Real(10), config.sidelobe_level_db / Real(20));
  const Real accept = level * std::pow(Real(10), config.convergence_tol_db / Real(20));
  const Real repin = level * std::pow(Real(10), -config.pin_margin_db / Real(20));
  const Real step = deg2rad(config.grid_deg);

  Real eps0_db = config.epsilon_db;
  SynthesisStatus failure = SynthesisStatus::sidelobe_infeasible;
  WeightVector<Real> last_w = md.w;
  std::vector<PinnedPeak> last_pins;

  for (int outer = 0; outer < config.max_outer_iterations; ++outer) {
    if (outer > 0) eps0_db -= config.epsilon_step_db;
    const Real b = Real(1) / (from_db(eps0_db) * md.dmax);

    std::optional<QPSolution<Real>> qp;
    try {
      qp = solve_norm_constrained_qp(a_tilde, mainlobe, b);
    } catch (const InfeasibleError& e) {
      failure = SynthesisStatus::rein_infeasible;
      result.notes.push_back("outer " + std::to_string(outer) + ": " + e.what());
      continue;
    }
    WeightVector<Real> wc = unlift_weight(qp->w_tilde);
    std::vector<PinnedPeak> pins;
    bool pinned_ok = false;

    for (int it = 0; it < config.max_pin_iterations; ++it) {
      auto response = [&](const Direction<Real>& d) { return pattern_response(wc, steering_vector(array, ctx, d)); };
      const auto grid = sample_pattern(array, ctx, wc, config.grid_deg);
      const Real exclusion = mainlobe_exclusion(response, look, step);
      // a pattern with no null anywhere (one sensor) is all mainlobe
      const auto peaks = exclusion < kPi<Real>
                             ? find_sidelobe_peaks(grid, response, look, exclusion, std::size_t(grid.values.size()))
                             : std::vector<SidelobePeak<Real>>{};
      const Real worst = peaks.empty() ? Real(0) : peaks.front().magnitude;
      const Real worst_db = peaks.empty() ? -std::numeric_limits<Real>::infinity() : Real(20) * std::log10(worst);
      record(result, mats, wc, *qp, outer, it, eps0_db, b, pins.size(), worst_db);
      result.mainlobe_exclusion_rad = exclusion;
      result.worst_sidelobe_db = worst_db;

      if (worst <= accept) {
        pinned_ok = true;
        break;
      }

      // Distinct steering vectors only: mirrored peaks of a planar array share one.
      std::vector<SidelobePeak<Real>> chosen;
      std::vector<ComplexVector<Real>> chosen_v;
      const int cap = m_max(int(n), int(mainlobe.rows()));
      for (const auto& p : peaks) {
        if (p.magnitude <= repin || int(chosen.size()) >= cap) break;
        ComplexVector<Real> v = steering_vector(array, ctx, p.dir);
        bool same = false;
        for (const auto& u : chosen_v) same = same || (u - v).norm() <= Real(1e-9) * std::sqrt(Real(n));
        if (same) continue;
        chosen.push_back(p);
        chosen_v.push_back(std::move(v));
      }

      EqualityConstraints<Real> cons = mainlobe;
      pins.clear();
      for (std::size_t i = 0; i < chosen.size(); ++i) {
        bool zero_phase = false;
        const Complex<Real> f = pin_target(pattern_response(wc, chosen_v[i]), level, &zero_phase);
        if (zero_phase) result.notes.push_back("pinned a peak with zero pattern value at zero phase");
        // F = w^H v = conj(v^H w): Re F = v~^T w~, Im F = -v^^T w~
        const auto lifted = lift_steering(chosen_v[i]);
        cons.append(lifted.tilde, f.real());
        cons.append(lifted.hat, -f.imag());
        pins.push_back({chosen[i].dir, f});
      }
      auto reduced = reduce_constraints(cons);
      if (!reduced.dropped_rows.empty())
        result.notes.push_back("dropped " + std::to_string(reduced.dropped_rows.size()) +
                               " dependent sidelobe rows");
      try {
        qp = solve_norm_constrained_qp(a_tilde, reduced.kept, b);
      } catch (const InfeasibleError& e) {
        failure = SynthesisStatus::rein_infeasible;
        result.notes.push_back("outer " + std::to_string(outer) + ": " + e.what());
        break;
      }
      wc = unlift_weight(qp->w_tilde);
      failure = SynthesisStatus::sidelobe_infeasible;
    }
    last_w = wc;
    last_pins = pins;

    if (pinned_ok) {
      const Real gamma_db = rein(wc, mats.A).db;
      if (gamma_db >= eps0_db || std::abs(gamma_db - eps0_db) <= config.delta_db) {
        result.status = SynthesisStatus::converged;
        result.w_opt = wc;
        result.pinned_peaks = pins;
        result.epsilon_final_db = eps0_db;
        result.gamma_db = gamma_db;
        result.directivity_db = directivity(wc, mats).db;
        return result;
      }
      failure = SynthesisStatus::rein_infeasible;
    }
  }

  result.status = failure;
  result.w_opt = last_w;
  result.pinned_peaks = last_pins;
  result.epsilon_final_db = eps0_db;
  result.gamma_db = rein(last_w, mats.A).db;
  result.directivity_db = directivity(last_w, mats).db;
  return result;
}

RadiusSearch radius_for_rein(int n, const CarrierContext<Real>& ctx, Real epsilon_db, const Direction<Real>& look,
                             const QuadratureSpec& quad, Real tol_db) {
  if (n < 2) throw InfeasibleError("radius_for_rein: REIN does not depend on radius for a single sensor");
  RadiusSearch out;
  auto gamma_at = [&](Real r_lambda) {
    ++out.evaluations;
    return max_directivity_point(make_uca<Real>(n, r_lambda * ctx.lambda), ctx, look, quad);
  };

  Real lo = 0.02, hi = 0.3;
  auto g_lo = gamma_at(lo);
  while (g_lo.gamma_db > epsilon_db) {
    lo /= 2;
    if (lo < 1e-3) throw InfeasibleError("radius_for_rein: bracket failure below 0.001 lambda");
    g_lo = gamma_at(lo);
  }
  auto g_hi = gamma_at(hi);
  while (g_hi.gamma_db < epsilon_db) {
    hi *= 1.5;
    if (hi > 1.0)
      throw InfeasibleError("radius_for_rein: bracket failure, REIN " + std::to_string(epsilon_db) +
                            " dB not reached below 1 lambda");
    g_hi = gamma_at(hi);
  }

  for (int iter = 0; iter < 100; ++iter) {
    const Real mid = std::sqrt(lo * hi);
    const auto g_mid = gamma_at(mid);
    if (g_mid.gamma_db < g_lo.gamma_db - 1e-9 || g_mid.gamma_db > g_hi.gamma_db + 1e-9)
      throw NumericalError("radius_for_rein: REIN not monotone in radius across the bracket");
    if (std::abs(g_mid.gamma_db - epsilon_db) <= tol_db) {
      out.radius_lambda = mid;
      out.radius_m = mid * ctx.lambda;
      out.gamma_db = g_mid.gamma_db;
      out.dmax_db = g_mid.dmax_db;
      return out;
    }
    if (g_mid.gamma_db < epsilon_db) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
      g_hi = g_mid;
    }
  }
  throw NumericalError("radius_for_rein: bisection did not converge");
}

}  // namespace sda
