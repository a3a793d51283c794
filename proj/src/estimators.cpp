#include "arfima/estimators.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>

#include "arfima/arfima_model.hpp"
#include "arfima/errors.hpp"
#include "arfima/optimize.hpp"
#include "arfima/polynomial.hpp"

namespace arfima {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// f_1 at the Fourier frequencies of a length-n series.
std::vector<double> mm_shape_grid(const EtaVector& eta, const FamilySpec& family, int n,
                                  std::size_t m) {
  const ArfimaSpec s = spec_from_eta(eta, family);
  const Poly a = unit_poly(s.phi), b = unit_poly(s.theta);
  std::vector<double> f(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double lam = 2 * kPi * static_cast<double>(j + 1) / n;
    double g = 1.0;
    if (!s.phi.empty() || !s.theta.empty())
      g = poly_abs2_on_circle(b, lam) / poly_abs2_on_circle(a, lam);
    f[j] = g * std::exp(-2 * eta.d * std::log(2 * std::sin(lam / 2)));
  }
  return f;
}

void check_periodogram(const std::vector<double>& I, int n) {
  if (n < 2 || static_cast<std::size_t>(n / 2) != I.size())
    throw Error(ErrorCode::InvalidArgument, "periodogram length must be floor(n/2)");
}

}  // namespace

std::vector<double> periodogram(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "periodogram needs n >= 2");
  std::vector<double> in(y);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> I(n / 2);
  for (int j = 1; j <= n / 2; ++j) I[j - 1] = std::norm(out[j]) / (2 * kPi * n);
  return I;
}

std::vector<double> periodogram_direct(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  std::vector<double> I(n / 2);
  for (int j = 1; j <= n / 2; ++j) {
    std::complex<double> s = 0.0;
    for (int t = 0; t < n; ++t) s += y[t] * std::polar(1.0, -2 * kPi * j * (t + 1) / n);
    I[j - 1] = std::norm(s) / (2 * kPi * n);
  }
  return I;
}

double mm_shape(const EtaVector& eta, const FamilySpec& family, double lambda) {
  ArfimaSpec s = spec_from_eta(eta, family);
  return arma_shape(s, lambda) * std::pow(2 * std::sin(lambda / 2), -2 * eta.d);
}

double fml_objective(const EtaVector& eta, const FamilySpec& family, const std::vector<double>& I,
                     int n) {
  check_periodogram(I, n);
  const auto f = mm_shape_grid(eta, family, n, I.size());
  double s = 0.0;
  for (std::size_t j = 0; j < I.size(); ++j) s += I[j] / f[j];
  return 2 * kPi / n * s;
}

double whittle_objective(const EtaVector& eta, double sigma2, const FamilySpec& family,
                         const std::vector<double>& I, int n) {
  check_periodogram(I, n);
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma2 must be positive");
  const auto f = mm_shape_grid(eta, family, n, I.size());
  double sl = 0.0, sr = 0.0;
  for (std::size_t j = 0; j < I.size(); ++j) {
    sl += std::log(sigma2 * f[j] / (2 * kPi));
    sr += I[j] / f[j];
  }
  return 4.0 / n * sl + 8 * kPi / (sigma2 * n) * sr;
}

double whittle_sigma2_hat(const EtaVector& eta, const FamilySpec& family,
                          const std::vector<double>& I, int n) {
  check_periodogram(I, n);
  const auto f = mm_shape_grid(eta, family, n, I.size());
  double sr = 0.0;
  for (std::size_t j = 0; j < I.size(); ++j) sr += I[j] / f[j];
  return 2 * kPi * sr / static_cast<double>(I.size());
}

double whittle_concentrated(const EtaVector& eta, const FamilySpec& family,
                            const std::vector<double>& I, int n) {
  return whittle_objective(eta, whittle_sigma2_hat(eta, family, I, n), family, I, n);
}

TmlParts tml_parts_from_acov(const std::vector<double>& g, const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (g.size() < n) throw Error(ErrorCode::InvalidArgument, "autocovariance too short");
  TmlParts out;
  std::vector<double> a(n, 0.0), prev(n, 0.0);  // a[k-1] = phi_{t,k}
  double v = g[0];
  if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveDefinite, "gamma(0) <= 0");
  out.log_det = std::log(v);
  out.quad = y[0] * y[0] / v;
  for (std::size_t t = 1; t < n; ++t) {
    double num = g[t];
    for (std::size_t k = 1; k < t; ++k) num -= a[k - 1] * g[t - k];
    const double ptt = num / v;
    if (!(std::abs(ptt) < 1.0)) throw Error(ErrorCode::NonPositiveDefinite, "|phi_tt| >= 1");
    for (std::size_t k = 1; k < t; ++k) prev[k - 1] = a[k - 1];
    for (std::size_t k = 1; k < t; ++k) a[k - 1] = prev[k - 1] - ptt * prev[t - k - 1];
    a[t - 1] = ptt;
    v *= (1.0 - ptt * ptt);
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveDefinite, "prediction variance <= 0");
    double pred = 0.0;
    for (std::size_t k = 1; k <= t; ++k) pred += a[k - 1] * y[t - k];
    const double e = y[t] - pred;
    out.log_det += std::log(v);
    out.quad += e * e / v;
  }
  return out;
}

TmlParts tml_parts(const EtaVector& eta, const FamilySpec& family, const std::vector<double>& y) {
  const auto g = autocovariance(spec_from_eta(eta, family, 1.0), static_cast<int>(y.size()) - 1);
  return tml_parts_from_acov(g, y);
}

double tml_objective(const EtaVector& eta, double sigma2, const FamilySpec& family,
                     const std::vector<double>& y) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma2 must be positive");
  const auto t = tml_parts(eta, family, y);
  const double n = static_cast<double>(y.size());
  return std::log(sigma2) + t.log_det / n + t.quad / (n * sigma2);
}

double tml_concentrated(const EtaVector& eta, const FamilySpec& family,
                        const std::vector<double>& y) {
  const auto t = tml_parts(eta, family, y);
  const double n = static_cast<double>(y.size());
  return std::log(t.quad / n) + t.log_det / n + 1.0;
}

std::vector<double> css_residuals(const EtaVector& eta, const FamilySpec& family,
                                  const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  const auto tau = ar_inf_coefficients(eta, family, n);
  std::vector<double> e(n);
  for (int t = 0; t < n; ++t) {
    double s = 0.0;
    for (int i = 0; i <= t; ++i) s += tau[i] * y[t - i];
    e[t] = s;
  }
  return e;
}

double css_objective(const EtaVector& eta, const FamilySpec& family, const std::vector<double>& y) {
  const auto e = css_residuals(eta, family, y);
  double s = 0.0;
  for (double v : e) s += v * v;
  return s / static_cast<double>(y.size());
}

double profile_objective(EstimatorKind kind, const EtaVector& eta, const FamilySpec& family,
                         const std::vector<double>& y, const std::vector<double>& I) {
  const int n = static_cast<int>(y.size());
  switch (kind) {
    case EstimatorKind::FML: return fml_objective(eta, family, I, n);
    case EstimatorKind::WHITTLE: return whittle_concentrated(eta, family, I, n);
    case EstimatorKind::TML: return tml_concentrated(eta, family, y);
    case EstimatorKind::CSS: return css_objective(eta, family, y);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

EtaVector eta_from_unconstrained(const std::vector<double>& x, const FamilySpec& family) {
  EtaVector e;
  e.d = x[0];
  std::vector<double> ra(x.begin() + 1, x.begin() + 1 + family.p);
  std::vector<double> rm(x.begin() + 1 + family.p, x.end());
  e.beta = pacf_to_coefficients(ra);
  const auto th = pacf_to_coefficients(rm);
  e.beta.insert(e.beta.end(), th.begin(), th.end());
  return e;
}

}  // namespace

EstimationResult estimate(EstimatorKind kind, const FamilySpec& family, const std::vector<double>& y,
                          const EstimateOptions& opts) {
  const int n = static_cast<int>(y.size());
  if (n < 20) throw Error(ErrorCode::InvalidArgument, "estimate() needs n >= 20");
  if (family.p < 0 || family.q < 0) throw Error(ErrorCode::InvalidArgument, "negative order");
  if (!(opts.d_lo < opts.d_hi)) throw Error(ErrorCode::InvalidArgument, "empty d interval");

  const std::size_t dim = 1 + family.l();
  std::vector<double> I;
  if (kind == EstimatorKind::FML || kind == EstimatorKind::WHITTLE) I = periodogram(y);

  std::vector<double> lo(dim, -opts.pacf_bound), hi(dim, opts.pacf_bound);
  lo[0] = opts.d_lo;
  hi[0] = opts.d_hi;

  auto obj = [&](const std::vector<double>& x) {
    return profile_objective(kind, eta_from_unconstrained(x, family), family, y, I);
  };

  NelderMeadOptions nmo;
  nmo.max_iter = opts.max_iter;
  nmo.xtol = opts.xtol;
  nmo.ftol = opts.ftol;

  EstimationResult best;
  best.kind = kind;
  double fbest = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  std::vector<double> xbest;
  int total_iter = 0;
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    std::vector<double> x0(dim, 0.0);
    if (s == 0) {
      x0[0] = 0.5 * (lo[0] + hi[0]);
    } else {
      const auto h = halton_point(s, static_cast<int>(dim));
      for (std::size_t k = 0; k < dim; ++k) {
        const double a = lo[k] + 0.1 * (hi[k] - lo[k]), b = hi[k] - 0.1 * (hi[k] - lo[k]);
        x0[k] = a + h[k] * (b - a);
      }
    }
    const auto r = nelder_mead(obj, x0, lo, hi, nmo);
    total_iter += r.iterations;
    if (!r.converged) continue;
    any_converged = true;
    if (r.f < fbest) {
      fbest = r.f;
      xbest = r.x;
      best.restarts_used = s;
    }
  }
  if (!any_converged || !std::isfinite(fbest))
    throw Error(ErrorCode::NoConvergence, "no start met the simplex tolerance");

  best.eta_hat = eta_from_unconstrained(xbest, family);
  best.objective = fbest;
  best.iterations = total_iter;
  best.converged = true;
  switch (kind) {
    case EstimatorKind::WHITTLE:
      best.sigma2_hat = whittle_sigma2_hat(best.eta_hat, family, I, n);
      break;
    case EstimatorKind::TML:
      best.sigma2_hat = tml_parts(best.eta_hat, family, y).quad / n;
      break;
    default:
      best.sigma2_hat = 2.0 * fbest;
  }
  return best;
}

}  // namespace arfima
