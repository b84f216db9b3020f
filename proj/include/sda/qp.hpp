#ifndef SDA_QP_HPP
#define SDA_QP_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sda/metrics.hpp"
#include "sda/reallift.hpp"
#include "sda/types.hpp"

namespace sda {

/// Linear equality constraints C^T x = f on a real 2N-vector; C is 2N x M.
template <typename Scalar>
struct EqualityConstraints {
  RealMatrix<Scalar> C;
  RealVector<Scalar> f;

  Eigen::Index rows() const { return C.cols(); }

  void append(const RealVector<Scalar>& normal, Scalar target) {
    if (C.size() == 0) C.resize(normal.size(), 0);
    C.conservativeResize(normal.size(), C.cols() + 1);
    C.col(C.cols() - 1) = normal;
    f.conservativeResize(f.size() + 1);
    f(f.size() - 1) = target;
  }
};

/// Constraint set after removing linearly dependent rows, kept in their original order.
template <typename Scalar>
struct ReducedConstraints {
  EqualityConstraints<Scalar> kept;
  std::vector<Eigen::Index> kept_rows;
  std::vector<Eigen::Index> dropped_rows;
};

/// Greedy rank filter: row j is kept when appending it raises the numerical rank of the kept set
/// (column-pivoted QR, threshold 1e-10 relative to the largest pivot). Dropped rows must be
/// consistent with the kept ones; that is checked on the solution, not here.
template <typename Scalar>
ReducedConstraints<Scalar> reduce_constraints(const EqualityConstraints<Scalar>& cons,
                                              Scalar threshold = Scalar(1e-10)) {
  ReducedConstraints<Scalar> out;
  const Scalar scale = cons.C.size() ? cons.C.norm() : Scalar(0);
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < cons.rows(); ++j) {
    if (cons.C.col(j).norm() <= threshold * std::max(scale, Scalar(1))) {
      out.dropped_rows.push_back(j);
      continue;
    }
    RealMatrix<Scalar> trial(cons.C.rows(), rank + 1);
    for (Eigen::Index k = 0; k < rank; ++k) trial.col(k) = cons.C.col(out.kept_rows[std::size_t(k)]);
    trial.col(rank) = cons.C.col(j);
    Eigen::ColPivHouseholderQR<RealMatrix<Scalar>> qr(trial);
    qr.setThreshold(threshold);
    if (qr.rank() == rank + 1) {
      out.kept_rows.push_back(j);
      ++rank;
    } else {
      out.dropped_rows.push_back(j);
    }
  }
  for (Eigen::Index j : out.kept_rows) out.kept.append(cons.C.col(j), cons.f(j));
  if (out.kept.C.size() == 0) out.kept.C.resize(cons.C.rows(), 0);
  return out;
}

/// Cholesky of a symmetric matrix; when plain factorization fails, retries once with a diagonal
/// load of 1e-12 * trace / n and records the load.
template <typename Scalar>
struct LoadedCholesky {
  Eigen::LLT<RealMatrix<Scalar>> llt;
  Scalar loading{0};

  explicit LoadedCholesky(const RealMatrix<Scalar>& m) {
    llt.compute(m);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > Scalar(0)) return;
    loading = Scalar(1e-12) * m.trace() / Scalar(m.rows());
    llt.compute(m + loading * RealMatrix<Scalar>::Identity(m.rows(), m.cols()));
    if (llt.info() != Eigen::Success)
      throw NumericalError("Cholesky factorization failed even after diagonal loading");
  }
};

template <typename Scalar>
struct EqualityQPSolution {
  RealVector<Scalar> x;
  RealVector<Scalar> multipliers;  // lambda in 2(H)x + C lambda = 0
  Scalar loading{0};
};

namespace detail {

// Range-space solver for the KKT system
//   [2H  C] [x     ]   [g]
//   [C^T 0] [lambda] = [h]
// with H symmetric positive definite.
template <typename Scalar>
class KktSolver {
 public:
  KktSolver(const RealMatrix<Scalar>& h, const RealMatrix<Scalar>& c) : h_(h), c_(c), chol_(h) {
    hinv_c_ = chol_.llt.solve(c) / Scalar(2);
    schur_.compute(c.transpose() * hinv_c_);
    if (schur_.info() != Eigen::Success) throw NumericalError("KKT system numerically singular");
  }

  std::pair<RealVector<Scalar>, RealVector<Scalar>> solve(const RealVector<Scalar>& g,
                                                          const RealVector<Scalar>& rhs_h) const {
    const RealVector<Scalar> hinv_g = chol_.llt.solve(g) / Scalar(2);
    RealVector<Scalar> lambda = schur_.solve(c_.transpose() * hinv_g - rhs_h);
    RealVector<Scalar> x = hinv_g - hinv_c_ * lambda;
    return {std::move(x), std::move(lambda)};
  }

  // Solve with zero gradient term, refining on the residual of the unloaded system.
  std::pair<RealVector<Scalar>, RealVector<Scalar>> solve_refined(const RealVector<Scalar>& f) const {
    const RealVector<Scalar> zero = RealVector<Scalar>::Zero(h_.rows());
    auto [x, lambda] = solve(zero, f);
    for (int pass = 0; pass < 3; ++pass) {
      const RealVector<Scalar> rg = -(Scalar(2) * (h_ * x) + c_ * lambda);
      const RealVector<Scalar> rh = f - c_.transpose() * x;
      auto [dx, dl] = solve(rg, rh);
      x += dx;
      lambda += dl;
    }
    return {std::move(x), std::move(lambda)};
  }

  Scalar loading() const { return chol_.loading; }

 private:
  const RealMatrix<Scalar>& h_;
  const RealMatrix<Scalar>& c_;
  LoadedCholesky<Scalar> chol_;
  RealMatrix<Scalar> hinv_c_;
  Eigen::LDLT<RealMatrix<Scalar>> schur_;
};

template <typename Scalar>
void require_full_rank(const EqualityConstraints<Scalar>& cons) {
  if (cons.C.rows() == 0 || cons.f.size() != cons.C.cols())
    throw std::invalid_argument("EqualityConstraints: C and f dimensions disagree");
  if (cons.C.cols() > cons.C.rows()) throw std::invalid_argument("EqualityConstraints: more rows than unknowns");
  Eigen::ColPivHouseholderQR<RealMatrix<Scalar>> qr(cons.C);
  qr.setThreshold(Scalar(1e-10));
  if (qr.rank() < cons.C.cols()) throw NumericalError("EqualityConstraints: C is rank deficient");
}

}  // namespace detail

/// argmin x^T (A + mu I) x subject to C^T x = f.
template <typename Scalar>
EqualityQPSolution<Scalar> solve_equality_qp(const RealMatrix<Scalar>& a_tilde,
                                             const EqualityConstraints<Scalar>& cons, Scalar mu = Scalar(0)) {
  detail::require_full_rank(cons);
  if (a_tilde.rows() != cons.C.rows() || a_tilde.cols() != cons.C.rows())
    throw std::invalid_argument("solve_equality_qp: dimension mismatch");
  RealMatrix<Scalar> h = a_tilde;
  h.diagonal().array() += mu;
  const detail::KktSolver<Scalar> kkt(h, cons.C);
  auto [x, lambda] = kkt.solve_refined(cons.f);
  const Scalar residual = (cons.C.transpose() * x - cons.f).norm();
  if (!x.allFinite() || residual > Scalar(1e-9) * (Scalar(1) + cons.f.norm()))
    throw NumericalError("solve_equality_qp: constraint residual " + std::to_string(double(residual)));
  return {std::move(x), std::move(lambda), kkt.loading()};
}

/// Minimum-norm point of {x : C^T x = f}.
template <typename Scalar>
RealVector<Scalar> minimum_norm_feasible(const EqualityConstraints<Scalar>& cons) {
  return cons.C * (cons.C.transpose() * cons.C).ldlt().solve(cons.f);
}

template <typename Scalar>
struct QPSolution {
  RealVector<Scalar> w_tilde;
  Scalar mu{0};
  bool active{false};
  Scalar objective{0};
  RealVector<Scalar> multipliers;
  Scalar loading{0};
  int bisection_steps{0};
};

/// argmin x^T A x subject to C^T x = f and x^T x <= b. When the ball binds, the multiplier mu
/// of the norm constraint is found by bisection: ||x(mu)||^2 is strictly decreasing in mu for
/// the equality-constrained minimizer x(mu) of x^T (A + mu I) x, which is checked at every step.
template <typename Scalar>
QPSolution<Scalar> solve_norm_constrained_qp(const RealMatrix<Scalar>& a_tilde,
                                             const EqualityConstraints<Scalar>& cons, Scalar b) {
  if (!(b > 0)) throw std::invalid_argument("solve_norm_constrained_qp: b must be positive");
  auto finish = [&](EqualityQPSolution<Scalar> s, Scalar mu, bool active, int steps) {
    QPSolution<Scalar> out;
    out.objective = s.x.dot(a_tilde * s.x);
    out.w_tilde = std::move(s.x);
    out.multipliers = std::move(s.multipliers);
    out.loading = s.loading;
    out.mu = mu;
    out.active = active;
    out.bisection_steps = steps;
    return out;
  };

  auto free_solution = solve_equality_qp(a_tilde, cons);
  if (free_solution.x.squaredNorm() <= b) return finish(std::move(free_solution), Scalar(0), false, 0);

  const Scalar min_norm = minimum_norm_feasible(cons).squaredNorm();
  if (min_norm > b)
    throw InfeasibleError("solve_norm_constrained_qp: minimum-norm feasible point has |x|^2 = " +
                          std::to_string(double(min_norm)) + " > b = " + std::to_string(double(b)));

  Scalar lo = 0;
  Scalar lo_norm = free_solution.x.squaredNorm();
  Scalar hi = std::max(a_tilde.trace() / Scalar(a_tilde.rows()), std::numeric_limits<Scalar>::min());
  auto hi_solution = solve_equality_qp(a_tilde, cons, hi);
  int growth = 0;
  while (hi_solution.x.squaredNorm() > b) {
    lo = hi;
    lo_norm = hi_solution.x.squaredNorm();
    hi *= Scalar(4);
    hi_solution = solve_equality_qp(a_tilde, cons, hi);
    if (++growth > 200) throw NumericalError("solve_norm_constrained_qp: could not bracket the multiplier");
  }

  const Scalar tol = Scalar(1e-10) * b;
  Scalar hi_norm = hi_solution.x.squaredNorm();
  int steps = 0;
  while (b - hi_norm > tol) {
    if (++steps > 200 || hi - lo <= std::numeric_limits<Scalar>::epsilon() * hi) break;
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    auto mid_solution = solve_equality_qp(a_tilde, cons, mid);
    const Scalar mid_norm = mid_solution.x.squaredNorm();
    const Scalar slack = Scalar(1e-12) * lo_norm;
    if (mid_norm > lo_norm + slack || mid_norm < hi_norm - slack)
      throw NumericalError("solve_norm_constrained_qp: norm not monotone in the multiplier");
    if (mid_norm > b) {
      lo = mid;
      lo_norm = mid_norm;
    } else {
      hi = mid;
      hi_norm = mid_norm;
      hi_solution = std::move(mid_solution);
    }
  }
  if (std::abs(hi_norm - b) > Scalar(1e-9) * b)
    throw NumericalError("solve_norm_constrained_qp: bisection failed to reach the norm bound");
  return finish(std::move(hi_solution), hi, true, steps);
}

/// Mainlobe constraint set in the real lift: unit complex gain at the look direction (two rows)
/// plus zero real part of the theta and phi pattern derivatives (one row each).
template <typename Scalar>
EqualityConstraints<Scalar> mainlobe_constraints(const ComplexVector<Scalar>& v0, const ComplexVector<Scalar>& v_theta,
                                                 const ComplexVector<Scalar>& v_phi, bool with_derivatives = true) {
  EqualityConstraints<Scalar> cons;
  const auto l0 = lift_steering(v0);
  cons.append(l0.tilde, Scalar(1));
  cons.append(l0.hat, Scalar(0));
  if (with_derivatives) {
    cons.append(lift_steering(v_theta).tilde, Scalar(0));
    cons.append(lift_steering(v_phi).tilde, Scalar(0));
  }
  return cons;
}

template <typename Scalar>
struct MaxDirectivity {
  WeightVector<Scalar> w;
  Scalar dmax{0};
  EqualityConstraints<Scalar> constraints;  // after dropping dependent rows
  std::vector<std::string> dropped;
  Scalar loading{0};
};

inline const char* mainlobe_row_name(Eigen::Index row) {
  static const char* names[] = {"unit_gain_re", "unit_gain_im", "d_theta", "d_phi"};
  return row >= 0 && row < 4 ? names[row] : "unknown";
}

/// Maximum-directivity weights: min w^H A w subject to the mainlobe constraints.
/// Returns Dmax = 1 / (w^H A w). Dependent constraint rows (e.g. the theta derivative of a
/// planar array steered into its own plane) are dropped and named in `dropped`.
template <typename Scalar>
MaxDirectivity<Scalar> max_directivity(const ComplexMatrix<Scalar>& a, const ComplexVector<Scalar>& v0,
                                       const ComplexVector<Scalar>& v_theta, const ComplexVector<Scalar>& v_phi,
                                       bool with_derivatives = true) {
  const RealMatrix<Scalar> a_tilde = lift_matrix(a);
  auto reduced = reduce_constraints(mainlobe_constraints(v0, v_theta, v_phi, with_derivatives));
  MaxDirectivity<Scalar> out;
  for (Eigen::Index row : reduced.dropped_rows) {
    if (row < 2) throw NumericalError("max_directivity: look-direction steering vector is zero");
    out.dropped.emplace_back(mainlobe_row_name(row));
  }
  auto sol = solve_equality_qp(a_tilde, reduced.kept);
  const auto full = mainlobe_constraints(v0, v_theta, v_phi, with_derivatives);
  for (Eigen::Index row : reduced.dropped_rows) {
    if (std::abs(full.C.col(row).dot(sol.x) - full.f(row)) > Scalar(1e-8))
      throw NumericalError(std::string("max_directivity: dropped row ") + mainlobe_row_name(row) +
                           " is inconsistent with the kept constraints");
  }
  out.w = unlift_weight(sol.x);
  out.dmax = Scalar(1) / quadratic_form(out.w, a);
  out.constraints = std::move(reduced.kept);
  out.loading = sol.loading;
  return out;
}

template <typename Scalar>
MaxDirectivity<Scalar> max_directivity(const SensorArray<Scalar>& array, const DirectivityMatrices<Scalar>& mats,
                                       bool with_derivatives = true) {
  const auto d = steering_derivatives(array, mats.ctx, mats.look);
  return max_directivity(mats.A, mats.v0, d.dtheta, d.dphi, with_derivatives);
}

}  // namespace sda

#endif  // SDA_QP_HPP
