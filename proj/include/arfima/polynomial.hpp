#pragma once

#include <complex>
#include <vector>

namespace arfima {

/// Polynomial with coefficient vector c where c[k] multiplies z^k.
using Poly = std::vector<double>;

/// 1 + c_1 z + ... from the tail coefficients (c_1, c_2, ...).
Poly unit_poly(const std::vector<double>& tail);

Poly poly_mul(const Poly& a, const Poly& b);

/// First n power-series coefficients of a(z)/b(z); requires b[0] != 0.
std::vector<double> series_div(const Poly& a, const Poly& b, std::size_t n);

/// Truncated convolution of two series, first n terms.
std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b,
                               std::size_t n);

std::complex<double> poly_eval(const Poly& a, std::complex<double> z);

/// |a(e^{i lambda})|^2
double poly_abs2_on_circle(const Poly& a, double lambda);

/// Reciprocal roots r_j with 1 + c_1 z + ... + c_m z^m = prod (1 - r_j z).
/// Trailing zero coefficients reduce the degree.
std::vector<std::complex<double>> reciprocal_roots(const std::vector<double>& tail);

/// Roots of 1 + c_1 z + ... (reciprocals of the above).
std::vector<std::complex<double>> poly_roots(const std::vector<double>& tail);

/// Partial autocorrelations in (-1,1)^m to the tail of a polynomial with all
/// roots outside the unit circle (Durbin-Levinson / Monahan bijection).
std::vector<double> pacf_to_coefficients(const std::vector<double>& pacf);
std::vector<double> coefficients_to_pacf(const std::vector<double>& tail);

}  // namespace arfima
