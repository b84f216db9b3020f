#ifndef SDA_REALLIFT_HPP
#define SDA_REALLIFT_HPP

#include <algorithm>
#include <stdexcept>

#include "sda/types.hpp"

namespace sda {

// Real images of complex quantities, stacked [Re; Im]. With them
//   Re(v^H w) = lift(v)^T lift(w),  Im(v^H w) = lift_hat(v)^T lift(w),
//   w^H A w   = lift(w)^T lift_matrix(A) lift(w)   for Hermitian A.

template <typename Derived>
RealVector<typename Derived::RealScalar> lift_weight(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::RealScalar;
  const Eigen::Index n = w.size();
  RealVector<Scalar> out(2 * n);
  out.head(n) = w.real();
  out.tail(n) = w.imag();
  return out;
}

template <typename Scalar>
ComplexVector<Scalar> unlift_weight(const RealVector<Scalar>& w_tilde) {
  if (w_tilde.size() % 2 != 0) throw std::invalid_argument("unlift_weight: odd length");
  const Eigen::Index n = w_tilde.size() / 2;
  ComplexVector<Scalar> w(n);
  w.real() = w_tilde.head(n);
  w.imag() = w_tilde.tail(n);
  return w;
}

template <typename Scalar>
struct LiftedSteering {
  RealVector<Scalar> tilde;  // [Re v; Im v]
  RealVector<Scalar> hat;    // [-Im v; Re v]
};

template <typename Scalar>
LiftedSteering<Scalar> lift_steering(const ComplexVector<Scalar>& v) {
  const Eigen::Index n = v.size();
  LiftedSteering<Scalar> out{RealVector<Scalar>(2 * n), RealVector<Scalar>(2 * n)};
  out.tilde.head(n) = v.real();
  out.tilde.tail(n) = v.imag();
  out.hat.head(n) = -v.imag();
  out.hat.tail(n) = v.real();
  return out;
}

template <typename Scalar>
RealMatrix<Scalar> lift_matrix(const ComplexMatrix<Scalar>& a, Scalar hermitian_tol = Scalar(1e-9)) {
  if (a.rows() != a.cols()) throw std::invalid_argument("lift_matrix: matrix not square");
  const Scalar scale = std::max(Scalar(1), a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > hermitian_tol * scale)
    throw std::invalid_argument("lift_matrix: matrix not Hermitian");
  const Eigen::Index n = a.rows();
  RealMatrix<Scalar> out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = a.real();
  out.topRightCorner(n, n) = -a.imag();
  out.bottomLeftCorner(n, n) = a.imag();
  out.bottomRightCorner(n, n) = a.real();
  return out;
}

}  // namespace sda

#endif  // SDA_REALLIFT_HPP
