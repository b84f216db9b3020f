#ifndef SDA_QUADRATURE_HPP
#define SDA_QUADRATURE_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sda/types.hpp"

namespace sda {

template <typename Scalar>
struct GaussLegendreRule {
  RealVector<Scalar> nodes;
  RealVector<Scalar> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
template <typename Scalar>
GaussLegendreRule<Scalar> gauss_legendre(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussLegendreRule<Scalar> rule{RealVector<Scalar>(n), RealVector<Scalar>(n)};
  const Eigen::Index half = (n + 1) / 2;
  for (Eigen::Index i = 0; i < half; ++i) {
    Scalar x = std::cos(kPi<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = x;
      for (Eigen::Index k = 2; k <= n; ++k) {
        const Scalar p2 = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
      const Scalar dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
    }
    {
      Scalar p0 = 1, p1 = x;
      for (Eigen::Index k = 2; k <= n; ++k) {
        const Scalar p2 = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
    }
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.nodes(i) = -x;
    rule.nodes(n - 1 - i) = x;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = Scalar(0);
  return rule;
}

}  // namespace sda

#endif  // SDA_QUADRATURE_HPP
