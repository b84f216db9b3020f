#ifndef SDA_GEOMETRY_HPP
#define SDA_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sda/types.hpp"

namespace sda {

// Polar angle theta from +z in [0, pi], azimuth phi from +x in [0, 2pi).
template <typename Scalar>
struct Direction {
  Scalar theta{0};
  Scalar phi{0};

  Direction() = default;
  Direction(Scalar theta_rad, Scalar phi_rad) : theta(theta_rad), phi(wrap_azimuth(phi_rad)) {
    if (!(theta >= Scalar(0) && theta <= kPi<Scalar>)) {
      throw std::invalid_argument("Direction: theta outside [0, pi]");
    }
  }

  static Direction from_degrees(Scalar theta_deg, Scalar phi_deg) {
    return Direction(deg2rad(theta_deg), deg2rad(phi_deg));
  }

  static Scalar wrap_azimuth(Scalar phi) {
    const Scalar two_pi = Scalar(2) * kPi<Scalar>;
    Scalar wrapped = std::fmod(phi, two_pi);
    if (wrapped < Scalar(0)) wrapped += two_pi;
    if (wrapped >= two_pi) wrapped = Scalar(0);
    return wrapped;
  }

  Vector3<Scalar> unit() const {
    const Scalar st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
  }
  Vector3<Scalar> unit_dtheta() const {
    const Scalar ct = std::cos(theta);
    return {ct * std::cos(phi), ct * std::sin(phi), -std::sin(theta)};
  }
  Vector3<Scalar> unit_dphi() const {
    const Scalar st = std::sin(theta);
    return {-st * std::sin(phi), st * std::cos(phi), Scalar(0)};
  }
};

// Great-circle angle between two directions.
template <typename Scalar>
Scalar angular_distance(const Direction<Scalar>& a, const Direction<Scalar>& b) {
  const Scalar c = std::clamp(a.unit().dot(b.unit()), Scalar(-1), Scalar(1));
  return std::acos(c);
}

template <typename Scalar>
struct CarrierContext {
  Scalar f0{0};
  Scalar c{kSpeedOfLight<Scalar>};
  Scalar lambda{0};

  CarrierContext() = default;
  explicit CarrierContext(Scalar frequency_hz, Scalar speed = kSpeedOfLight<Scalar>)
      : f0(frequency_hz), c(speed), lambda(speed / frequency_hz) {
    if (!(f0 > 0) || !(c > 0)) throw std::invalid_argument("CarrierContext: f0 and c must be positive");
  }

  static CarrierContext from_mhz(Scalar mhz) { return CarrierContext(mhz * Scalar(1e6)); }

  Scalar wavenumber() const { return Scalar(2) * kPi<Scalar> * f0 / c; }
};

// Per-sensor complex gain g_k(theta, phi). An element without a gain function is isotropic.
template <typename Scalar>
struct ElementPattern {
  using Gain = std::function<Complex<Scalar>(const Direction<Scalar>&)>;
  std::string tag{"isotropic"};
  Gain gain;
  Gain gain_dtheta;
  Gain gain_dphi;

  static ElementPattern isotropic() { return {}; }

  bool is_isotropic() const { return !gain; }

  Complex<Scalar> operator()(const Direction<Scalar>& d) const {
    return gain ? gain(d) : Complex<Scalar>(1);
  }
  Complex<Scalar> dtheta(const Direction<Scalar>& d) const {
    if (!gain) return Complex<Scalar>(0);
    if (!gain_dtheta) throw std::logic_error("ElementPattern '" + tag + "' has no theta derivative");
    return gain_dtheta(d);
  }
  Complex<Scalar> dphi(const Direction<Scalar>& d) const {
    if (!gain) return Complex<Scalar>(0);
    if (!gain_dphi) throw std::logic_error("ElementPattern '" + tag + "' has no phi derivative");
    return gain_dphi(d);
  }
};

template <typename Scalar>
class SensorArray {
 public:
  using Positions = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

  SensorArray() = default;

  explicit SensorArray(Positions positions)
      : positions_(std::move(positions)),
        patterns_(static_cast<std::size_t>(positions_.cols()), ElementPattern<Scalar>::isotropic()) {
    validate();
  }

  SensorArray(Positions positions, std::vector<ElementPattern<Scalar>> patterns)
      : positions_(std::move(positions)), patterns_(std::move(patterns)) {
    validate();
  }

  Eigen::Index size() const { return positions_.cols(); }
  const Positions& positions() const { return positions_; }
  Vector3<Scalar> position(Eigen::Index k) const { return positions_.col(k); }
  const std::vector<ElementPattern<Scalar>>& patterns() const { return patterns_; }
  const ElementPattern<Scalar>& pattern(Eigen::Index k) const {
    return patterns_[static_cast<std::size_t>(k)];
  }

  bool all_isotropic() const {
    for (const auto& p : patterns_)
      if (!p.is_isotropic()) return false;
    return true;
  }

  // Smallest pairwise sensor separation; infinity for a single sensor.
  Scalar min_separation() const {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < size(); ++i)
      for (Eigen::Index j = i + 1; j < size(); ++j)
        best = std::min(best, (positions_.col(i) - positions_.col(j)).norm());
    return best;
  }

  SensorArray translated(const Vector3<Scalar>& offset) const {
    Positions moved = positions_.colwise() + offset;
    return SensorArray(std::move(moved), patterns_);
  }

 private:
  void validate() const {
    if (positions_.cols() < 1) throw std::invalid_argument("SensorArray: at least one sensor required");
    if (static_cast<std::size_t>(positions_.cols()) != patterns_.size())
      throw std::invalid_argument("SensorArray: one element pattern per sensor required");
    if (!positions_.allFinite()) throw std::invalid_argument("SensorArray: non-finite position");
  }

  Positions positions_;
  std::vector<ElementPattern<Scalar>> patterns_;
};

// Uniform circular array in the xy-plane; sensor k sits at azimuth 2*pi*k/n + rotation.
template <typename Scalar>
SensorArray<Scalar> make_uca(Eigen::Index n, Scalar radius, Scalar rotation = Scalar(0)) {
  if (n < 1) throw std::invalid_argument("make_uca: sensor count must be >= 1");
  if (!(radius >= Scalar(0))) throw std::invalid_argument("make_uca: radius must be >= 0");
  typename SensorArray<Scalar>::Positions pos(3, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar a = Scalar(2) * kPi<Scalar> * Scalar(k) / Scalar(n) + rotation;
    pos.col(k) << radius * std::cos(a), radius * std::sin(a), Scalar(0);
  }
  return SensorArray<Scalar>(std::move(pos));
}

// Plane-wave delay of a sensor relative to the origin; 2*pi*f0*tau is its phase advance.
template <typename Scalar>
Scalar propagation_delay(const Vector3<Scalar>& position, const Direction<Scalar>& dir,
                         const CarrierContext<Scalar>& ctx) {
  return position.dot(dir.unit()) / ctx.c;
}

template <typename Scalar>
ComplexVector<Scalar> steering_vector(const SensorArray<Scalar>& array, const CarrierContext<Scalar>& ctx,
                                      const Direction<Scalar>& dir) {
  const Scalar omega = Scalar(2) * kPi<Scalar> * ctx.f0;
  const Vector3<Scalar> u = dir.unit();
  ComplexVector<Scalar> v(array.size());
  for (Eigen::Index k = 0; k < array.size(); ++k) {
    const Scalar phase = omega * array.positions().col(k).dot(u) / ctx.c;
    v(k) = array.pattern(k)(dir) * std::polar(Scalar(1), phase);
  }
  return v;
}

template <typename Scalar>
struct SteeringDerivatives {
  ComplexVector<Scalar> dtheta;
  ComplexVector<Scalar> dphi;
};

template <typename Scalar>
SteeringDerivatives<Scalar> steering_derivatives(const SensorArray<Scalar>& array,
                                                 const CarrierContext<Scalar>& ctx,
                                                 const Direction<Scalar>& dir) {
  const Scalar omega = Scalar(2) * kPi<Scalar> * ctx.f0;
  const Vector3<Scalar> u = dir.unit();
  const Vector3<Scalar> ut = dir.unit_dtheta();
  const Vector3<Scalar> up = dir.unit_dphi();
  const Complex<Scalar> j(0, 1);
  SteeringDerivatives<Scalar> out{ComplexVector<Scalar>(array.size()), ComplexVector<Scalar>(array.size())};
  for (Eigen::Index k = 0; k < array.size(); ++k) {
    const auto p = array.positions().col(k);
    const Complex<Scalar> e = std::polar(Scalar(1), omega * p.dot(u) / ctx.c);
    const Complex<Scalar> g = array.pattern(k)(dir);
    out.dtheta(k) = (array.pattern(k).dtheta(dir) + g * j * omega * p.dot(ut) / ctx.c) * e;
    out.dphi(k) = (array.pattern(k).dphi(dir) + g * j * omega * p.dot(up) / ctx.c) * e;
  }
  return out;
}

}  // namespace sda

#endif  // SDA_GEOMETRY_HPP
