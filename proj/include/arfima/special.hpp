#pragma once

namespace arfima {

/// Digamma by upward recurrence above 6 and an asymptotic series.
double digamma(double x);

/// Gamma(1-2x)/Gamma(1-x)^2, the variance of ARFIMA(0,x,0) with unit innovations.
double fi_variance_ratio(double x);

}  // namespace arfima
