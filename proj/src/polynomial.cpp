#include "arfima/polynomial.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "arfima/errors.hpp"

namespace arfima {

Poly unit_poly(const std::vector<double>& tail) {
  Poly p(tail.size() + 1);
  p[0] = 1.0;
  for (std::size_t i = 0; i < tail.size(); ++i) p[i + 1] = tail[i];
  return p;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

std::vector<double> series_div(const Poly& a, const Poly& b, std::size_t n) {
  if (b.empty() || b[0] == 0.0) throw Error(ErrorCode::InvalidArgument, "series_div: b[0] == 0");
  std::vector<double> c(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = j < a.size() ? a[j] : 0.0;
    const std::size_t kmax = std::min(j, b.size() - 1);
    for (std::size_t k = 1; k <= kmax; ++k) s -= b[k] * c[j - k];
    c[j] = s / b[0];
  }
  return c;
}

std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b,
                               std::size_t n) {
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < std::min(n, a.size()); ++i) {
    if (a[i] == 0.0) continue;
    const std::size_t jmax = std::min(n - i, b.size());
    for (std::size_t j = 0; j < jmax; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

std::complex<double> poly_eval(const Poly& a, std::complex<double> z) {
  std::complex<double> s = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) s = s * z + a[k];
  return s;
}

double poly_abs2_on_circle(const Poly& a, double lambda) {
  return std::norm(poly_eval(a, std::polar(1.0, lambda)));
}

std::vector<std::complex<double>> reciprocal_roots(const std::vector<double>& tail) {
  std::size_t m = tail.size();
  while (m > 0 && tail[m - 1] == 0.0) --m;
  if (m == 0) return {};
  // z^m + c_1 z^{m-1} + ... + c_m = prod (z - r_j)  <=>  1 + c_1 z + ... = prod (1 - r_j z)
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                               static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) comp(0, static_cast<Eigen::Index>(j)) = -tail[j];
  for (std::size_t i = 1; i < m; ++i)
    comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<std::complex<double>> r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
  return r;
}

std::vector<std::complex<double>> poly_roots(const std::vector<double>& tail) {
  auto r = reciprocal_roots(tail);
  for (auto& z : r) z = 1.0 / z;
  return r;
}

// Tail convention: c_j = -a_j where 1 - a_1 z - ... - a_m z^m is the usual AR operator.
std::vector<double> pacf_to_coefficients(const std::vector<double>& pacf) {
  const std::size_t m = pacf.size();
  std::vector<double> a(m, 0.0), prev(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    prev = a;
    a[k] = pacf[k];
    for (std::size_t j = 0; j < k; ++j) a[j] = prev[j] - pacf[k] * prev[k - 1 - j];
  }
  for (auto& v : a) v = -v;
  return a;
}

std::vector<double> coefficients_to_pacf(const std::vector<double>& tail) {
  const std::size_t m = tail.size();
  std::vector<double> a(m), r(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) a[j] = -tail[j];
  for (std::size_t k = m; k-- > 0;) {
    const double rk = a[k];
    r[k] = rk;
    if (k == 0) break;
    const double den = 1.0 - rk * rk;
    if (den <= 0.0) throw Error(ErrorCode::NonStationary, "coefficients outside the PACF region");
    std::vector<double> b(k);
    for (std::size_t j = 0; j < k; ++j) b[j] = (a[j] + rk * a[k - 1 - j]) / den;
    for (std::size_t j = 0; j < k; ++j) a[j] = b[j];
  }
  return r;
}

}  // namespace arfima
