#include "arfima/arfima_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arfima/errors.hpp"
#include "arfima/polynomial.hpp"
#include "arfima/quadrature.hpp"
#include "arfima/special.hpp"

namespace arfima {

namespace {

constexpr double kRootMargin = 1.0 + 1e-8;
constexpr double kCommonRootTol = 1e-6;
constexpr double kCloseRootTol = 1e-4;
constexpr double kNearUnitRoot = 1.0 - 1e-4;
constexpr double kSmallD = 1e-5;

std::vector<double> trimmed(const std::vector<double>& v) {
  std::size_t m = v.size();
  while (m > 0 && v[m - 1] == 0.0) --m;
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m)};
}

// psi(l) = sum_k theta_k theta_{k+l}, l = 0..q
std::vector<double> ma_products(const std::vector<double>& theta) {
  const Poly t = unit_poly(theta);
  const int q = static_cast<int>(theta.size());
  std::vector<double> psi(q + 1, 0.0);
  for (int l = 0; l <= q; ++l)
    for (int k = 0; k + l <= q; ++k) psi[l] += t[k] * t[k + l];
  return psi;
}

// r(h) = Gamma(1-2d)Gamma(d+h) / (Gamma(1-d+h)Gamma(1-d)Gamma(d)), h = 0..H
std::vector<double> fi_ratios(double d, int H) {
  std::vector<double> r(H + 1);
  r[0] = fi_variance_ratio(d);
  for (int h = 1; h <= H; ++h) r[h] = r[h - 1] * (d + h - 1) / (h - d);
  return r;
}

std::vector<double> sowell_core(const std::vector<double>& phi, double d,
                                const std::vector<double>& theta, double sigma2, int m) {
  const int q = static_cast<int>(theta.size());
  const auto psi = ma_products(theta);

  if (phi.empty()) {
    const auto r = fi_ratios(d, m + q);
    std::vector<double> g(m + 1, 0.0);
    for (int s = 0; s <= m; ++s) {
      double acc = psi[0] * r[s];
      for (int l = 1; l <= q; ++l) acc += psi[l] * (r[std::abs(s - l)] + r[s + l]);
      g[s] = sigma2 * acc;
    }
    return g;
  }

  const auto rho = reciprocal_roots(phi);
  const int p = static_cast<int>(rho.size());
  for (int i = 0; i < p; ++i) {
    if (std::abs(rho[i]) >= kNearUnitRoot)
      throw Error(ErrorCode::RepeatedArRoots, "AR root too close to the unit circle");
    for (int j = i + 1; j < p; ++j)
      if (std::abs(rho[i] - rho[j]) < kCloseRootTol)
        throw Error(ErrorCode::RepeatedArRoots, "AR roots closer than 1e-4");
  }

  const int H = m + p + q + 1;
  const auto r = fi_ratios(d, H);
  auto ridx = [&](int h) { return r[std::abs(h)]; };

  std::vector<std::complex<double>> acc(m + 1, 0.0);
  std::vector<std::complex<double>> G(2 * H + 1);
  for (int j = 0; j < p; ++j) {
    const std::complex<double> rj = rho[j];
    std::complex<double> den = 1.0;
    for (int i = 0; i < p; ++i) {
      den *= 1.0 - rho[i] * rj;
      if (i != j) den *= rj - rho[i];
    }
    const std::complex<double> zeta = 1.0 / den;

    // G(H) = (F(d+H,1;1-d+H;rho) - 1)/rho by series, then backward recursion
    {
      const double a = d + H, c = 1.0 - d + H;
      std::complex<double> u = a / c, sum = u;
      for (int k = 0; k < 2000000; ++k) {
        u *= rj * (a + k + 1) / (c + k + 1);
        sum += u;
        if (std::abs(u) < 1e-17 * std::abs(sum)) break;
      }
      G[2 * H] = sum;
      for (int h = H; h > -H; --h)
        G[h - 1 + H] = (d + h - 1) / (h - d) * (1.0 + rj * G[h + H]);
    }
    const std::complex<double> r2p = std::pow(rj, 2 * p);
    const std::complex<double> r2p1 = std::pow(rj, 2 * p - 1);
    auto Cterm = [&](int h) { return ridx(h) * (r2p * G[h + H] + r2p1 + G[-h + H]); };

    for (int s = 0; s <= m; ++s) {
      std::complex<double> t = psi[0] * Cterm(p - s);
      for (int l = 1; l <= q; ++l) t += psi[l] * (Cterm(p + l - s) + Cterm(p - l - s));
      acc[s] += zeta * t;
    }
  }
  std::vector<double> g(m + 1);
  for (int s = 0; s <= m; ++s) g[s] = sigma2 * acc[s].real();
  return g;
}

}  // namespace

bool roots_outside_unit_circle(const std::vector<double>& tail) {
  for (const auto& rr : reciprocal_roots(tail))
    if (std::abs(rr) * kRootMargin >= 1.0) return false;
  return true;
}

ArfimaSpec validate_spec(const ArfimaSpec& spec, const ValidateOptions& opts) {
  const double lo = opts.require_positive_d ? 0.0 : -0.5;
  if (!(spec.d > lo && spec.d < 0.5) || !std::isfinite(spec.d))
    throw Error(ErrorCode::DOutOfRange, "d = " + std::to_string(spec.d));
  if (!(spec.sigma2 > 0.0) || !std::isfinite(spec.sigma2))
    throw Error(ErrorCode::InvalidArgument, "sigma2 must be positive");
  for (double v : spec.phi)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite phi");
  for (double v : spec.theta)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite theta");
  if (!roots_outside_unit_circle(spec.phi))
    throw Error(ErrorCode::NonStationary, "AR root on or inside the unit circle");
  if (!roots_outside_unit_circle(spec.theta))
    throw Error(ErrorCode::NonInvertible, "MA root on or inside the unit circle");
  const auto ra = poly_roots(spec.phi);
  const auto rm = poly_roots(spec.theta);
  for (const auto& a : ra)
    for (const auto& b : rm)
      if (std::abs(a - b) <= kCommonRootTol)
        throw Error(ErrorCode::CommonRoot, "AR and MA polynomials share a root");
  return spec;
}

double arma_shape(const ArfimaSpec& spec, double lambda) {
  return poly_abs2_on_circle(unit_poly(spec.theta), lambda) /
         poly_abs2_on_circle(unit_poly(spec.phi), lambda);
}

double spectral_density(const ArfimaSpec& spec, double lambda) {
  if (!(lambda <= std::numbers::pi * (1 + 1e-14)) || lambda < 0.0 ||
      (lambda == 0.0 && spec.d > 0.0))
    throw Error(ErrorCode::LambdaOutOfRange, "lambda = " + std::to_string(lambda));
  const double two_sin = 2.0 * std::sin(lambda / 2.0);
  return spec.sigma2 / (2.0 * std::numbers::pi) * arma_shape(spec, lambda) *
         std::pow(two_sin, -2.0 * spec.d);
}

std::vector<double> autocovariance_sowell(const ArfimaSpec& spec, int max_lag) {
  if (max_lag < 0) throw Error(ErrorCode::InvalidArgument, "max_lag < 0");
  const auto phi = trimmed(spec.phi);
  const auto theta = trimmed(spec.theta);
  if (phi.empty() || std::abs(spec.d) >= kSmallD)
    return sowell_core(phi, spec.d, theta, spec.sigma2, max_lag);
  // d = 0 is a removable singularity of the decomposition; interpolate across it
  const auto lo = sowell_core(phi, -kSmallD, theta, spec.sigma2, max_lag);
  const auto hi = sowell_core(phi, kSmallD, theta, spec.sigma2, max_lag);
  const double w = (spec.d + kSmallD) / (2 * kSmallD);
  std::vector<double> g(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) g[k] = (1 - w) * lo[k] + w * hi[k];
  return g;
}

std::vector<double> autocovariance_numeric(const ArfimaSpec& spec, int max_lag) {
  std::vector<double> g(max_lag + 1);
  QuadratureOptions qo;
  qo.tol = 1e-11;
  for (int k = 0; k <= max_lag; ++k) {
    auto f = [&](double lam) { return 2.0 * spectral_density(spec, lam) * std::cos(k * lam); };
    g[k] = integrate_singular_oscillatory(f, 2.0 * spec.d, k, qo);
  }
  return g;
}

AutocovResult autocovariance_detailed(const ArfimaSpec& spec, int max_lag) {
  AutocovResult res;
  const bool pure_fi = trimmed(spec.phi).empty() && trimmed(spec.theta).empty();
  try {
    res.gamma = autocovariance_sowell(spec, max_lag);
    res.method = pure_fi ? AutocovMethod::FractionalNoise : AutocovMethod::Sowell;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RepeatedArRoots) throw;
    res.gamma = autocovariance_numeric(spec, max_lag);
    res.method = AutocovMethod::NumericIntegration;
  }
  return res;
}

std::vector<double> autocovariance(const ArfimaSpec& spec, int max_lag) {
  return autocovariance_detailed(spec, max_lag).gamma;
}

std::vector<double> fractional_coefficients(double d, int n) {
  std::vector<double> c(std::max(n, 0));
  if (n <= 0) return c;
  c[0] = 1.0;
  for (int j = 1; j < n; ++j) c[j] = c[j - 1] * (j - 1 - d) / j;
  return c;
}

std::vector<double> fractional_coefficients_dd(double d, int n) {
  std::vector<double> c(std::max(n, 0)), dc(std::max(n, 0));
  if (n <= 0) return dc;
  c[0] = 1.0;
  dc[0] = 0.0;
  for (int j = 1; j < n; ++j) {
    c[j] = c[j - 1] * (j - 1 - d) / j;
    dc[j] = dc[j - 1] * (j - 1 - d) / j - c[j - 1] / j;
  }
  return dc;
}

std::vector<double> ar_inf_coefficients(const EtaVector& eta, const FamilySpec& family, int n) {
  const ArfimaSpec s = spec_from_eta(eta, family);
  const auto alpha = series_div(unit_poly(s.phi), unit_poly(s.theta), static_cast<std::size_t>(n));
  return series_mul(alpha, fractional_coefficients(eta.d, n), static_cast<std::size_t>(n));
}

}  // namespace arfima
