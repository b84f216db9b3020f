#ifndef SDA_TYPES_HPP
#define SDA_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sda {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

// Error taxonomy. The CLI maps each class onto an exit code.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
constexpr Scalar kPi = Scalar(3.141592653589793238462643383279502884L);

template <typename Scalar>
constexpr Scalar kSpeedOfLight = Scalar(299792458.0);

template <typename Scalar>
inline Scalar to_db(Scalar ratio) {
  return Scalar(10) * std::log10(ratio);
}

template <typename Scalar>
inline Scalar from_db(Scalar db) {
  return std::pow(Scalar(10), db / Scalar(10));
}

template <typename Scalar>
inline Scalar deg2rad(Scalar deg) {
  return deg * kPi<Scalar> / Scalar(180);
}

template <typename Scalar>
inline Scalar rad2deg(Scalar rad) {
  return rad * Scalar(180) / kPi<Scalar>;
}

}  // namespace sda

#endif  // SDA_TYPES_HPP
