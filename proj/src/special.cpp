#include "arfima/special.hpp"

#include <cmath>
#include <numbers>

namespace arfima {

double digamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return std::nan("");
  if (x < 0.0) return digamma(1.0 - x) - std::numbers::pi / std::tan(std::numbers::pi * x);
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double x2 = 1.0 / (x * x);
  // Bernoulli terms B_{2k}/(2k x^{2k}), k = 1..7
  const double series =
      x2 * (1.0 / 12 -
            x2 * (1.0 / 120 -
                  x2 * (1.0 / 252 -
                        x2 * (1.0 / 240 -
                              x2 * (1.0 / 132 - x2 * (691.0 / 32760 - x2 * (1.0 / 12)))))));
  return acc + std::log(x) - 0.5 / x - series;
}

double fi_variance_ratio(double x) {
  return std::exp(std::lgamma(1.0 - 2.0 * x) - 2.0 * std::lgamma(1.0 - x));
}

}  // namespace arfima
