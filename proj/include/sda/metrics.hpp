#ifndef SDA_METRICS_HPP
#define SDA_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sda/geometry.hpp"
#include "sda/quadrature.hpp"
#include "sda/types.hpp"

namespace sda {

template <typename Scalar>
using WeightVector = ComplexVector<Scalar>;

/// Node counts for the spherical integral behind the A matrix: Gauss-Legendre in cos(theta),
/// trapezoid in phi. `compute_A` keeps doubling both counts until successive matrices agree
/// entrywise to `tolerance`.
struct QuadratureSpec {
  Eigen::Index n_theta{64};
  Eigen::Index n_phi{128};
  double tolerance{1e-10};
  int max_doublings{6};

  void validate() const {
    if (n_theta < 8) throw std::invalid_argument("QuadratureSpec: n_theta must be >= 8");
    if (n_phi < 16) throw std::invalid_argument("QuadratureSpec: n_phi must be >= 16");
  }
  QuadratureSpec doubled() const { return {2 * n_theta, 2 * n_phi, tolerance, max_doublings}; }
};

// F = w^H v.
template <typename Scalar>
Complex<Scalar> pattern_response(const WeightVector<Scalar>& w, const ComplexVector<Scalar>& v) {
  if (w.size() != v.size()) throw std::invalid_argument("pattern_response: length mismatch");
  return w.dot(v);
}

// (1/4pi) * integral of v v^H sin(theta) over the sphere, at fixed node counts.
template <typename Scalar>
ComplexMatrix<Scalar> compute_A_fixed(const SensorArray<Scalar>& array, const CarrierContext<Scalar>& ctx,
                                      Eigen::Index n_theta, Eigen::Index n_phi) {
  const auto rule = gauss_legendre<Scalar>(n_theta);
  const Eigen::Index n = array.size();
  ComplexMatrix<Scalar> samples(n, n_theta * n_phi);
  const Scalar dphi = Scalar(2) * kPi<Scalar> / Scalar(n_phi);
  for (Eigen::Index i = 0; i < n_theta; ++i) {
    const Scalar theta = std::acos(std::clamp(rule.nodes(i), Scalar(-1), Scalar(1)));
    // weight_i * dphi / (4 pi), split as a square root over both factors of v v^H
    const Scalar scale = std::sqrt(rule.weights(i) * dphi / (Scalar(4) * kPi<Scalar>));
    for (Eigen::Index j = 0; j < n_phi; ++j) {
      const Direction<Scalar> d(theta, dphi * Scalar(j));
      samples.col(i * n_phi + j) = scale * steering_vector(array, ctx, d);
    }
  }
  ComplexMatrix<Scalar> a = samples * samples.adjoint();
  return (a + a.adjoint()) / Scalar(2);
}

template <typename Scalar>
ComplexMatrix<Scalar> compute_A(const SensorArray<Scalar>& array, const CarrierContext<Scalar>& ctx,
                                const QuadratureSpec& quad = {}, QuadratureSpec* used = nullptr) {
  quad.validate();
  QuadratureSpec current = quad;
  ComplexMatrix<Scalar> coarse = compute_A_fixed(array, ctx, current.n_theta, current.n_phi);
  for (int round = 0; round < quad.max_doublings; ++round) {
    const QuadratureSpec finer = current.doubled();
    ComplexMatrix<Scalar> fine = compute_A_fixed(array, ctx, finer.n_theta, finer.n_phi);
    const Scalar change = (fine - coarse).cwiseAbs().maxCoeff();
    if (change < Scalar(quad.tolerance)) {
      if (used) *used = current;
      return coarse;
    }
    coarse = std::move(fine);
    current = finer;
  }
  throw NumericalError("compute_A: quadrature did not converge after " + std::to_string(quad.max_doublings) +
                       " doublings");
}

template <typename Scalar>
ComplexMatrix<Scalar> compute_B(const SensorArray<Scalar>& array, const CarrierContext<Scalar>& ctx,
                                const Direction<Scalar>& look) {
  const ComplexVector<Scalar> v0 = steering_vector(array, ctx, look);
  return v0 * v0.adjoint();
}

template <typename Scalar>
struct DirectivityMatrices {
  ComplexMatrix<Scalar> A;
  ComplexMatrix<Scalar> B;
  ComplexVector<Scalar> v0;
  CarrierContext<Scalar> ctx;
  Direction<Scalar> look;
  QuadratureSpec quadrature;
};

template <typename Scalar>
DirectivityMatrices<Scalar> make_directivity_matrices(const SensorArray<Scalar>& array,
                                                      const CarrierContext<Scalar>& ctx,
                                                      const Direction<Scalar>& look,
                                                      const QuadratureSpec& quad = {}) {
  DirectivityMatrices<Scalar> m;
  m.A = compute_A(array, ctx, quad, &m.quadrature);
  m.v0 = steering_vector(array, ctx, look);
  m.B = m.v0 * m.v0.adjoint();
  m.ctx = ctx;
  m.look = look;
  return m;
}

template <typename Scalar>
struct Decibels {
  Scalar ratio;
  Scalar db;
};

template <typename Scalar>
Scalar quadratic_form(const WeightVector<Scalar>& w, const ComplexMatrix<Scalar>& m) {
  return std::real(w.dot(m * w));
}

// Generalized Rayleigh quotient (w^H B w) / (w^H A w).
template <typename Scalar>
Decibels<Scalar> directivity(const WeightVector<Scalar>& w, const DirectivityMatrices<Scalar>& mats) {
  if (w.size() == 0 || w.isZero(0)) throw std::invalid_argument("directivity: zero weight vector");
  const Scalar num = std::norm(w.dot(mats.v0));
  const Scalar den = quadratic_form(w, mats.A);
  const Scalar ratio = num / den;
  return {ratio, to_db(ratio)};
}

// REIN: (w^H A w) / (w^H w).
template <typename Scalar>
Decibels<Scalar> rein(const WeightVector<Scalar>& w, const ComplexMatrix<Scalar>& A) {
  if (w.size() == 0 || w.isZero(0)) throw std::invalid_argument("rein: zero weight vector");
  const Scalar gamma = quadratic_form(w, A) / w.squaredNorm();
  return {gamma, to_db(gamma)};
}

/// Pattern samples on a regular (theta, phi) grid. Rows index theta over [0, pi] inclusive,
/// columns index phi over [0, 2pi) exclusive.
template <typename Scalar>
struct PatternGrid {
  std::vector<Scalar> theta;
  std::vector<Scalar> phi;
  ComplexMatrix<Scalar> values;

  Scalar step_theta() const { return theta.size() > 1 ? theta[1] - theta[0] : kPi<Scalar>; }
  Scalar step_phi() const { return phi.size() > 1 ? phi[1] - phi[0] : Scalar(2) * kPi<Scalar>; }
};

template <typename Scalar>
PatternGrid<Scalar> make_grid_axes(Scalar resolution_deg) {
  if (!(resolution_deg > 0) || resolution_deg > Scalar(90))
    throw std::invalid_argument("sample_pattern: resolution must be in (0, 90] degrees");
  const auto n_theta = static_cast<Eigen::Index>(std::llround(Scalar(180) / resolution_deg)) + 1;
  const auto n_phi = static_cast<Eigen::Index>(std::llround(Scalar(360) / resolution_deg));
  PatternGrid<Scalar> grid;
  for (Eigen::Index i = 0; i < n_theta; ++i) grid.theta.push_back(kPi<Scalar> * Scalar(i) / Scalar(n_theta - 1));
  for (Eigen::Index j = 0; j < n_phi; ++j) grid.phi.push_back(Scalar(2) * kPi<Scalar> * Scalar(j) / Scalar(n_phi));
  grid.values.resize(n_theta, n_phi);
  return grid;
}

template <typename Scalar>
PatternGrid<Scalar> sample_pattern(const SensorArray<Scalar>& array, const CarrierContext<Scalar>& ctx,
                                   const WeightVector<Scalar>& w, Scalar resolution_deg = Scalar(1)) {
  PatternGrid<Scalar> grid = make_grid_axes(resolution_deg);
  for (std::size_t i = 0; i < grid.theta.size(); ++i)
    for (std::size_t j = 0; j < grid.phi.size(); ++j)
      grid.values(Eigen::Index(i), Eigen::Index(j)) =
          pattern_response(w, steering_vector(array, ctx, Direction<Scalar>(grid.theta[i], grid.phi[j])));
  return grid;
}

template <typename Scalar>
struct SidelobePeak {
  Direction<Scalar> dir;
  Scalar magnitude;
};

namespace detail {

// Golden-section maximization of f on [a, b].
template <typename Scalar, typename F>
Scalar golden_max(F&& f, Scalar a, Scalar b, Scalar tol) {
  const Scalar g = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar c = b - g * (b - a), d = a + g * (b - a);
  Scalar fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

}  // namespace detail

/// Local ascent of |F| from a grid cell: alternating golden-section searches in theta and phi,
/// each confined to one cell either side of the start, until moves fall below `tol` radians.
template <typename Scalar, typename Response>
SidelobePeak<Scalar> refine_peak(Response&& response, Direction<Scalar> start, Scalar cell_theta,
                                 Scalar cell_phi, Scalar tol = Scalar(1e-3)) {
  Scalar theta = start.theta, phi = start.phi;
  auto mag = [&](Scalar t, Scalar p) { return std::abs(response(Direction<Scalar>(t, p))); };
  Scalar best = mag(theta, phi);
  for (int pass = 0; pass < 8; ++pass) {
    const Scalar lo = std::max(Scalar(0), theta - cell_theta);
    const Scalar hi = std::min(kPi<Scalar>, theta + cell_theta);
    const Scalar t_new = detail::golden_max([&](Scalar t) { return mag(t, phi); }, lo, hi, tol / Scalar(4));
    const Scalar p_new =
        detail::golden_max([&](Scalar p) { return mag(t_new, p); }, phi - cell_phi, phi + cell_phi, tol / Scalar(4));
    const Scalar cand = mag(t_new, p_new);
    if (cand < best) break;
    const Scalar moved = std::max(std::abs(t_new - theta), std::abs(p_new - phi));
    theta = t_new;
    phi = p_new;
    best = cand;
    if (moved < tol) break;
  }
  return {Direction<Scalar>(theta, phi), best};
}

/// Angular radius of the mainlobe: walks the azimuth cut through `look` in both senses until
/// |F| stops decreasing, takes the farther of the two first minima, and floors it at three cells.
template <typename Scalar, typename Response>
Scalar mainlobe_exclusion(Response&& response, const Direction<Scalar>& look, Scalar step) {
  Scalar widest = 0;
  for (const Scalar sense : {Scalar(1), Scalar(-1)}) {
    Scalar prev = std::abs(response(look));
    Direction<Scalar> last = look;
    for (Scalar offset = step; offset <= kPi<Scalar> + step / 2; offset += step) {
      const Direction<Scalar> d(look.theta, look.phi + sense * offset);
      const Scalar cur = std::abs(response(d));
      if (cur > prev) break;
      prev = cur;
      last = d;
    }
    widest = std::max(widest, angular_distance(look, last));
  }
  return std::max(widest, Scalar(3) * step);
}

/// Up to `m` largest local maxima of |F| outside a cap of angular radius `exclusion` around
/// `look`, refined by local ascent and sorted by descending magnitude. A grid node is a local
/// maximum when it is >= all eight neighbours and strictly above at least one; the pole rows
/// are single nodes compared against the whole adjacent ring.
template <typename Scalar, typename Response>
std::vector<SidelobePeak<Scalar>> find_sidelobe_peaks(const PatternGrid<Scalar>& grid, Response&& response,
                                                      const Direction<Scalar>& look, Scalar exclusion,
                                                      std::size_t m) {
  if (m < 1) throw std::invalid_argument("find_sidelobe_peaks: m must be >= 1");
  if (!(exclusion < kPi<Scalar>)) throw std::invalid_argument("find_sidelobe_peaks: empty sidelobe region");
  const Eigen::Index nt = grid.values.rows();
  const Eigen::Index np = grid.values.cols();
  if (nt < 3 || np < 3) throw std::invalid_argument("find_sidelobe_peaks: grid too coarse");
  const RealMatrix<Scalar> mag = grid.values.cwiseAbs();

  std::vector<Direction<Scalar>> candidates;
  auto outside = [&](const Direction<Scalar>& d) { return angular_distance(d, look) > exclusion; };

  for (const Eigen::Index pole : {Eigen::Index(0), nt - 1}) {
    const Eigen::Index ring = pole == 0 ? 1 : nt - 2;
    const Scalar v = mag(pole, 0);
    if (v >= mag.row(ring).maxCoeff() && v > mag.row(ring).minCoeff()) {
      const Direction<Scalar> d(grid.theta[std::size_t(pole)], Scalar(0));
      if (outside(d)) candidates.push_back(d);
    }
  }
  for (Eigen::Index i = 1; i + 1 < nt; ++i) {
    for (Eigen::Index j = 0; j < np; ++j) {
      const Scalar v = mag(i, j);
      bool geq_all = true, gt_any = false;
      for (Eigen::Index di = -1; di <= 1 && geq_all; ++di) {
        for (Eigen::Index dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const Scalar nb = mag(i + di, (j + dj + np) % np);
          if (nb > v) {
            geq_all = false;
            break;
          }
          if (v > nb) gt_any = true;
        }
      }
      if (!geq_all || !gt_any) continue;
      const Direction<Scalar> d(grid.theta[std::size_t(i)], grid.phi[std::size_t(j)]);
      if (outside(d)) candidates.push_back(d);
    }
  }

  std::vector<SidelobePeak<Scalar>> peaks;
  for (const auto& c : candidates) {
    auto p = refine_peak(response, c, grid.step_theta(), grid.step_phi());
    if (!outside(p.dir)) continue;
    // two grid maxima may climb to the same summit
    const bool duplicate = std::any_of(peaks.begin(), peaks.end(), [&](const SidelobePeak<Scalar>& q) {
      return angular_distance(q.dir, p.dir) < Scalar(2e-3);
    });
    if (!duplicate) peaks.push_back(p);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const SidelobePeak<Scalar>& a, const SidelobePeak<Scalar>& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    if (a.dir.theta != b.dir.theta) return a.dir.theta < b.dir.theta;
    return a.dir.phi < b.dir.phi;
  });
  if (peaks.size() > m) peaks.resize(m);
  return peaks;
}

}  // namespace sda

#endif  // SDA_METRICS_HPP
