// Independent reference computations used only by the tests.
#ifndef SDA_TESTS_ORACLES_HPP
#define SDA_TESTS_ORACLES_HPP

#include <cmath>
#include <random>

#include "sda/geometry.hpp"
#include "sda/qp.hpp"

namespace sda {
using Real = double;
}

namespace sda::oracle {

using Rng = std::mt19937_64;

// Closed form of (1/4pi) * integral of exp(j k d.u) over the sphere for isotropic sensors:
// A_kl = sin(k |p_k - p_l|) / (k |p_k - p_l|).
inline ComplexMatrix<Real> isotropic_A(const SensorArray<Real>& array, const CarrierContext<Real>& ctx) {
  const Eigen::Index n = array.size();
  ComplexMatrix<Real> a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Real x = ctx.wavenumber() * (array.position(i) - array.position(j)).norm();
      a(i, j) = x == 0 ? Real(1) : std::sin(x) / x;
    }
  return a;
}

inline Real uniform(Rng& rng, Real lo, Real hi) { return std::uniform_real_distribution<Real>(lo, hi)(rng); }

inline RealMatrix<Real> random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  RealMatrix<Real> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::normal_distribution<Real>(0, 1)(rng);
  return m;
}

inline ComplexVector<Real> random_complex(Rng& rng, Eigen::Index n) {
  ComplexVector<Real> v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = {std::normal_distribution<Real>(0, 1)(rng), std::normal_distribution<Real>(0, 1)(rng)};
  return v;
}

inline ComplexMatrix<Real> random_hermitian(Rng& rng, Eigen::Index n, bool positive_definite) {
  ComplexMatrix<Real> g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) g.col(j) = random_complex(rng, n);
  if (positive_definite) return g * g.adjoint() + Real(0.1) * ComplexMatrix<Real>::Identity(n, n);
  return (g + g.adjoint()) / Real(2);
}

inline RealMatrix<Real> random_spd(Rng& rng, Eigen::Index n) {
  const RealMatrix<Real> g = random_matrix(rng, n, n);
  return g * g.transpose() + Real(0.1) * RealMatrix<Real>::Identity(n, n);
}

// Sensors scattered in a cube of side `extent_lambda` wavelengths, at least `min_sep_lambda` apart.
inline SensorArray<Real> random_geometry(Rng& rng, Eigen::Index n, const CarrierContext<Real>& ctx,
                                         Real extent_lambda = 0.6, Real min_sep_lambda = 0.1) {
  SensorArray<Real>::Positions pos(3, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (int attempt = 0;; ++attempt) {
      Vector3<Real> p;
      for (int d = 0; d < 3; ++d) p(d) = uniform(rng, 0, extent_lambda * ctx.lambda);
      bool ok = true;
      for (Eigen::Index j = 0; j < k; ++j) ok = ok && (pos.col(j) - p).norm() >= min_sep_lambda * ctx.lambda;
      if (ok || attempt > 1000) {
        pos.col(k) = p;
        break;
      }
    }
  }
  return SensorArray<Real>(std::move(pos));
}

inline Direction<Real> random_direction(Rng& rng) {
  return Direction<Real>(std::acos(uniform(rng, -0.95, 0.95)), uniform(rng, 0, 2 * kPi<Real>));
}

/// Dense minimization of x^T H x over {C^T x = f} through the parametrization x = x_p + Z y,
/// with x_p the minimum-norm feasible point and Z an orthonormal basis of null(C^T) taken from a
/// full QR of C.
inline RealVector<Real> nullspace_minimizer(const RealMatrix<Real>& h, const RealMatrix<Real>& c,
                                            const RealVector<Real>& f) {
  const Eigen::Index n = c.rows(), m = c.cols();
  Eigen::HouseholderQR<RealMatrix<Real>> qr(c);
  const RealMatrix<Real> q = qr.householderQ() * RealMatrix<Real>::Identity(n, n);
  const RealMatrix<Real> r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  // C = Q1 R  =>  C^T x = R^T Q1^T x = f  =>  Q1^T x = R^{-T} f
  const RealVector<Real> s = r.transpose().triangularView<Eigen::Lower>().solve(f);
  const RealVector<Real> xp = q.leftCols(m) * s;
  if (m == n) return xp;
  const RealMatrix<Real> z = q.rightCols(n - m);
  const RealMatrix<Real> reduced = z.transpose() * h * z;
  const RealVector<Real> y = reduced.ldlt().solve(-(z.transpose() * h * xp));
  return xp + z * y;
}

/// Reference for the norm-ball problem: walks the multiplier path x(mu) (each point by the
/// nullspace minimizer of A + mu I) on a grid, then zooms the grid around the smallest feasible
/// mu until the bracket is narrower than 1e-10 relative.
inline RealVector<Real> multiplier_grid_search(const RealMatrix<Real>& a, const RealMatrix<Real>& c,
                                               const RealVector<Real>& f, Real b) {
  auto x_at = [&](Real mu) {
    RealMatrix<Real> h = a;
    h.diagonal().array() += mu;
    return nullspace_minimizer(h, c, f);
  };
  if (x_at(0).squaredNorm() <= b) return x_at(0);
  Real hi = 1;
  while (x_at(hi).squaredNorm() > b) hi *= 10;
  Real lo = 0;
  for (int zoom = 0; zoom < 200 && hi - lo > 1e-10 * hi; ++zoom) {
    const int points = 16;
    Real first_feasible = hi;
    Real last_infeasible = lo;
    for (int i = 1; i < points; ++i) {
      const Real mu = lo + (hi - lo) * i / points;
      if (x_at(mu).squaredNorm() <= b) {
        first_feasible = mu;
        break;
      }
      last_infeasible = mu;
    }
    lo = last_infeasible;
    hi = first_feasible;
  }
  return x_at(hi);
}

}  // namespace sda::oracle

#endif  // SDA_TESTS_ORACLES_HPP
