#ifndef SDA_COMPOSITE_HPP
#define SDA_COMPOSITE_HPP

#include <utility>
#include <vector>

#include "sda/geometry.hpp"
#include "sda/metrics.hpp"

namespace sda {

/// Identical sub-arrays translated by k * spacing along `axis`, k = 0..count-1, each driven by
/// the same sub-array weights scaled by a per-copy complex excitation.
template <typename Scalar>
struct CompositeArray {
  SensorArray<Scalar> subarray;
  WeightVector<Scalar> subarray_weights;
  Eigen::Index count{1};
  Scalar spacing{0};
  Vector3<Scalar> axis{Vector3<Scalar>::UnitX()};
  ComplexVector<Scalar> excitations;

  static CompositeArray uniform(SensorArray<Scalar> sub, WeightVector<Scalar> w, Eigen::Index count,
                                Scalar spacing, Vector3<Scalar> axis = Vector3<Scalar>::UnitX()) {
    CompositeArray c{std::move(sub), std::move(w), count, spacing, axis.normalized(),
                     ComplexVector<Scalar>::Ones(count)};
    c.validate();
    return c;
  }

  void validate() const {
    if (count < 1) throw std::invalid_argument("CompositeArray: count must be >= 1");
    if (subarray_weights.size() != subarray.size())
      throw std::invalid_argument("CompositeArray: sub-array weight length mismatch");
    if (excitations.size() != count) throw std::invalid_argument("CompositeArray: one excitation per copy required");
    if (!(axis.norm() > 0)) throw std::invalid_argument("CompositeArray: zero line axis");
  }

  Vector3<Scalar> offset(Eigen::Index k) const { return Scalar(k) * spacing * axis.normalized(); }
};

template <typename Scalar>
struct FlatArray {
  SensorArray<Scalar> array;
  WeightVector<Scalar> w_total;
};

// Sensor (k, j) -> index k * N + j.
template <typename Scalar>
FlatArray<Scalar> flatten(const CompositeArray<Scalar>& comp) {
  comp.validate();
  const Eigen::Index n = comp.subarray.size();
  typename SensorArray<Scalar>::Positions pos(3, n * comp.count);
  std::vector<ElementPattern<Scalar>> patterns;
  WeightVector<Scalar> w(n * comp.count);
  for (Eigen::Index k = 0; k < comp.count; ++k) {
    const Vector3<Scalar> off = comp.offset(k);
    for (Eigen::Index j = 0; j < n; ++j) {
      pos.col(k * n + j) = comp.subarray.position(j) + off;
      patterns.push_back(comp.subarray.pattern(j));
      w(k * n + j) = comp.excitations(k) * comp.subarray_weights(j);
    }
  }
  return {SensorArray<Scalar>(std::move(pos), std::move(patterns)), std::move(w)};
}

// Line array factor sum_k conj(e_k) exp(j k0 k d axis.u).
template <typename Scalar>
Complex<Scalar> array_factor(const CompositeArray<Scalar>& comp, const CarrierContext<Scalar>& ctx,
                             const Direction<Scalar>& dir) {
  Complex<Scalar> af(0);
  const Scalar proj = comp.axis.normalized().dot(dir.unit());
  for (Eigen::Index k = 0; k < comp.count; ++k)
    af += std::conj(comp.excitations(k)) * std::polar(Scalar(1), ctx.wavenumber() * Scalar(k) * comp.spacing * proj);
  return af;
}

template <typename Scalar>
struct CompositeMetrics {
  Scalar directivity_db;
  Scalar gamma_db;
};

template <typename Scalar>
CompositeMetrics<Scalar> composite_metrics(const CompositeArray<Scalar>& comp, const CarrierContext<Scalar>& ctx,
                                           const Direction<Scalar>& look, const QuadratureSpec& quad = {}) {
  const auto flat = flatten(comp);
  const auto mats = make_directivity_matrices(flat.array, ctx, look, quad);
  return {directivity(flat.w_total, mats).db, rein(flat.w_total, mats.A).db};
}

// Cyclic shift by `shift` sensors: out[k] = w[k - shift]. For a UCA this turns the pattern
// by shift * 2pi/N in azimuth.
template <typename Scalar>
WeightVector<Scalar> rotate_weights(const WeightVector<Scalar>& w, Eigen::Index shift) {
  const Eigen::Index n = w.size();
  WeightVector<Scalar> out(n);
  for (Eigen::Index k = 0; k < n; ++k) out(k) = w(((k - shift) % n + n) % n);
  return out;
}

}  // namespace sda

#endif  // SDA_COMPOSITE_HPP
