#include "arfima/pseudo_true.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "arfima/arfima_model.hpp"
#include "arfima/errors.hpp"
#include "arfima/optimize.hpp"
#include "arfima/polynomial.hpp"
#include "arfima/special.hpp"

namespace arfima {

namespace {

constexpr int kMaxTruncation = 100000;
constexpr int kPilot = 400;

void check_dstar(double dstar) {
  if (!(std::abs(dstar) < 0.5))
    throw Error(ErrorCode::DStarOutOfRange, "|d0 - d| must be below 0.5, got " + std::to_string(dstar));
}

void split_beta(const FamilySpec& fam, const std::vector<double>& beta, std::vector<double>& phi,
                std::vector<double>& theta) {
  if (beta.size() != fam.l()) throw Error(ErrorCode::InvalidArgument, "beta length != p+q");
  phi.assign(beta.begin(), beta.begin() + fam.p);
  theta.assign(beta.begin() + fam.p, beta.end());
}

Poly numerator(const MisSpecPair& pair, const std::vector<double>& phi) {
  return poly_mul(unit_poly(pair.tdgp.theta), unit_poly(phi));
}

Poly denominator(const MisSpecPair& pair, const std::vector<double>& theta) {
  return poly_mul(unit_poly(pair.tdgp.phi), unit_poly(theta));
}

std::size_t degree(const Poly& p) {
  std::size_t m = p.size();
  while (m > 1 && p[m - 1] == 0.0) --m;
  return m - 1;
}

// w_h = sum_k c_{k+h} c_k
std::vector<double> lagged_products(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t h = 0; h < n; ++h) {
    double s = 0.0;
    for (std::size_t k = 0; k + h < n; ++k) s += a[k + h] * b[k];
    w[h] = s;
  }
  return w;
}

double combine(const std::vector<double>& w, const std::vector<double>& r) {
  double s = w[0] * r[0];
  for (std::size_t h = 1; h < w.size(); ++h) s += 2.0 * w[h] * r[h];
  return s;
}

}  // namespace

double rho(int h, double dstar) {
  double r = 1.0;
  for (int i = 1; i <= h; ++i) r *= (dstar + i - 1) / (i - dstar);
  return r;
}

std::vector<double> rho_table(int N, double dstar) {
  std::vector<double> r(N + 1);
  r[0] = 1.0;
  for (int h = 1; h <= N; ++h) r[h] = r[h - 1] * (dstar + h - 1) / (h - dstar);
  return r;
}

std::vector<double> rho_table_ddstar(int N, double dstar) {
  std::vector<double> r(N + 1), dr(N + 1);
  r[0] = 1.0;
  dr[0] = 0.0;
  for (int h = 1; h <= N; ++h) {
    const double f = (dstar + h - 1) / (h - dstar);
    const double df = (2.0 * h - 1) / ((h - dstar) * (h - dstar));
    r[h] = r[h - 1] * f;
    dr[h] = dr[h - 1] * f + r[h - 1] * df;
  }
  return dr;
}

std::vector<double> c_coefficients(const MisSpecPair& pair, const std::vector<double>& beta, int N) {
  std::vector<double> phi, theta;
  split_beta(pair.family, beta, phi, theta);
  return series_div(numerator(pair, phi), denominator(pair, theta), static_cast<std::size_t>(N + 1));
}

int choose_truncation(const MisSpecPair& pair, const std::vector<double>& beta, double tol) {
  std::vector<double> phi, theta;
  split_beta(pair.family, beta, phi, theta);
  const Poly A = numerator(pair, phi), B = denominator(pair, theta);
  const int degA = static_cast<int>(degree(A));
  const std::vector<double> btail(B.begin() + 1, B.end());
  double zeta = 0.0;
  for (const auto& r : reciprocal_roots(btail)) zeta = std::max(zeta, std::abs(r));
  if (zeta == 0.0) return degA;
  if (zeta >= 1.0) return kMaxTruncation;
  const auto pilot = series_div(A, B, kPilot);
  double C = 0.0;
  for (double c : pilot) C += std::abs(c);
  // C zeta^{N+1} / (1 - zeta) < tol
  const double n = std::log(tol * (1.0 - zeta) / C) / std::log(zeta) - 1.0;
  int N = static_cast<int>(std::ceil(std::max(n, 0.0)));
  if (C * std::pow(zeta, N + 1) / (1.0 - zeta) >= tol) ++N;
  return std::clamp(std::max(N, degA), 0, kMaxTruncation);
}

double K_value(const MisSpecPair& pair, const EtaVector& eta, int N) {
  const double dstar = pair.tdgp.d - eta.d;
  check_dstar(dstar);
  const auto c = c_coefficients(pair, eta.beta, N);
  return combine(lagged_products(c, c), rho_table(N, dstar));
}

std::vector<double> K_gradient(const MisSpecPair& pair, const EtaVector& eta, int N) {
  const double dstar = pair.tdgp.d - eta.d;
  check_dstar(dstar);
  std::vector<double> phi, theta;
  split_beta(pair.family, eta.beta, phi, theta);
  const std::size_t len = static_cast<std::size_t>(N + 1);
  const Poly A = numerator(pair, phi), B = denominator(pair, theta);
  const auto c = series_div(A, B, len);
  const auto r = rho_table(N, dstar);
  const auto dr = rho_table_ddstar(N, dstar);

  std::vector<double> g(1 + pair.family.l(), 0.0);
  g[0] = -combine(lagged_products(c, c), dr);

  auto shifted = [&](const std::vector<double>& s, int k, double sign) {
    std::vector<double> out(len, 0.0);
    for (std::size_t j = static_cast<std::size_t>(k); j < len; ++j) out[j] = sign * s[j - k];
    return out;
  };
  // dC/dphi_r = z^r theta_0 / B ; dC/dtheta_r = -z^r C / theta
  if (pair.family.p > 0) {
    const auto D = series_div(unit_poly(pair.tdgp.theta), B, len);
    for (int k = 1; k <= pair.family.p; ++k) {
      const auto dc = shifted(D, k, 1.0);
      const auto w1 = lagged_products(dc, c), w2 = lagged_products(c, dc);
      std::vector<double> w(len);
      for (std::size_t h = 0; h < len; ++h) w[h] = w1[h] + w2[h];
      g[k] = combine(w, r);
    }
  }
  if (pair.family.q > 0) {
    const auto E = series_div(c, unit_poly(theta), len);
    for (int k = 1; k <= pair.family.q; ++k) {
      const auto dc = shifted(E, k, -1.0);
      const auto w1 = lagged_products(dc, c), w2 = lagged_products(c, dc);
      std::vector<double> w(len);
      for (std::size_t h = 0; h < len; ++h) w[h] = w1[h] + w2[h];
      g[pair.family.p + k] = combine(w, r);
    }
  }
  return g;
}

double q_prefactor(double dstar) {
  check_dstar(dstar);
  return std::numbers::pi * fi_variance_ratio(dstar);
}

double limiting_Q(const MisSpecPair& pair, double sigma2, const EtaVector& eta, int N) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma2 must be positive");
  const double dstar = pair.tdgp.d - eta.d;
  return pair.tdgp.sigma2 / sigma2 * q_prefactor(dstar) * K_value(pair, eta, N);
}

std::vector<double> foc_residual(const MisSpecPair& pair, const EtaVector& eta, int N) {
  const double dstar = pair.tdgp.d - eta.d;
  check_dstar(dstar);
  auto g = K_gradient(pair, eta, N);
  const double K = K_value(pair, eta, N);
  g[0] += 2.0 * (digamma(1.0 - 2.0 * dstar) - digamma(1.0 - dstar)) * K;
  return g;
}

std::pair<double, double> admissible_d(const MisSpecPair& pair) {
  const double d0 = pair.tdgp.d;
  return {std::max(-0.5, d0 - 0.5), std::min(0.5, d0 + 0.5)};
}

namespace {

struct Candidate {
  EtaVector eta;
  double logq;
  double grad_norm;
  int iters;
};

bool admissible(const MisSpecPair& pair, const EtaVector& eta, double lo, double hi) {
  if (!(eta.d > lo && eta.d < hi)) return false;
  std::vector<double> phi, theta;
  split_beta(pair.family, eta.beta, phi, theta);
  return roots_outside_unit_circle(phi) && roots_outside_unit_circle(theta);
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

EtaVector from_vec(const std::vector<double>& v) { return {v[0], {v.begin() + 1, v.end()}}; }

double log_q(const MisSpecPair& pair, const EtaVector& eta, double tol) {
  const int N = choose_truncation(pair, eta.beta, tol);
  return std::log(q_prefactor(pair.tdgp.d - eta.d) * K_value(pair, eta, N));
}

}  // namespace

PseudoTrueSolution solve_pseudo_true(const MisSpecPair& pair, const PseudoTrueOptions& opts) {
  validate_spec(pair.tdgp, {true});
  const std::size_t dim = 1 + pair.family.l();
  auto [dlo, dhi] = admissible_d(pair);
  const double edge = 1e-7;
  dlo += edge;
  dhi -= edge;

  auto residual = [&](const std::vector<double>& x) {
    const EtaVector e = from_vec(x);
    return foc_residual(pair, e, choose_truncation(pair, e.beta, opts.truncation_tol));
  };
  auto inside = [&](const std::vector<double>& x) { return admissible(pair, from_vec(x), dlo, dhi); };

  std::vector<Candidate> found;
  int total_iters = 0;

  // start grid: 5 d values across the admissible interval x PACF grid {-0.6, 0, 0.6}^l
  std::vector<std::vector<double>> starts;
  const int l = static_cast<int>(pair.family.l());
  int combos = 1;
  for (int i = 0; i < l; ++i) combos *= 3;
  for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (int c = 0; c < combos; ++c) {
      std::vector<double> ra, rm;
      int code = c;
      for (int i = 0; i < l; ++i) {
        const double v = -0.6 + 0.6 * (code % 3);
        code /= 3;
        (i < pair.family.p ? ra : rm).push_back(v);
      }
      std::vector<double> x{dlo + frac * (dhi - dlo)};
      for (double v : pacf_to_coefficients(ra)) x.push_back(v);
      for (double v : pacf_to_coefficients(rm)) x.push_back(v);
      starts.push_back(x);
    }
  }

  for (auto x : starts) {
    std::vector<double> F;
    try {
      F = residual(x);
    } catch (const Error&) {
      continue;
    }
    double fn = norm(F);
    int it = 0;
    bool ok = fn < opts.grad_tol;
    for (; it < opts.max_newton && !ok; ++it) {
      Eigen::MatrixXd J(dim, dim);
      bool jac_ok = true;
      for (std::size_t k = 0; k < dim && jac_ok; ++k) {
        const double h = 1e-6;
        auto xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        try {
          const auto Fp = residual(xp), Fm = residual(xm);
          for (std::size_t i = 0; i < dim; ++i) J(i, k) = (Fp[i] - Fm[i]) / (2 * h);
        } catch (const Error&) {
          jac_ok = false;
        }
      }
      if (!jac_ok) break;
      Eigen::VectorXd Fv = Eigen::Map<const Eigen::VectorXd>(F.data(), dim);
      const Eigen::VectorXd step = J.fullPivLu().solve(-Fv);
      if (!step.allFinite()) break;
      double t = 1.0;
      bool improved = false;
      for (int half = 0; half < 40; ++half, t *= 0.5) {
        std::vector<double> xn(x);
        for (std::size_t k = 0; k < dim; ++k) xn[k] += t * step[k];
        if (!inside(xn)) continue;
        std::vector<double> Fn;
        try {
          Fn = residual(xn);
        } catch (const Error&) {
          continue;
        }
        const double nn = norm(Fn);
        if (nn < fn) {
          x = xn;
          F = Fn;
          fn = nn;
          improved = true;
          break;
        }
      }
      if (!improved) break;
      ok = fn < opts.grad_tol;
    }
    if (!ok) {
      // derivative-free fallback on |F|^2, then one more Newton-free check
      std::vector<double> lo(dim, -1.0), hi(dim, 1.0);
      lo[0] = dlo;
      hi[0] = dhi;
      for (std::size_t k = 1; k < dim; ++k) {
        lo[k] = -4.0;
        hi[k] = 4.0;
      }
      auto obj = [&](const std::vector<double>& z) {
        if (!inside(z)) return std::numeric_limits<double>::infinity();
        const double v = norm(residual(z));
        return v * v;
      };
      NelderMeadOptions nmo;
      nmo.xtol = 1e-12;
      nmo.ftol = 1e-24;
      nmo.max_iter = 5000;
      nmo.initial_step = 0.02;
      const auto r = nelder_mead(obj, x, lo, hi, nmo);
      if (std::isfinite(r.f) && std::sqrt(r.f) < opts.grad_tol) {
        x = r.x;
        fn = std::sqrt(r.f);
        ok = true;
      }
    }
    total_iters += it;
    if (!ok) continue;

    // second-order check: log Q does not decrease along any coordinate
    const EtaVector e = from_vec(x);
    const double lq = log_q(pair, e, opts.truncation_tol);
    bool is_min = true;
    for (std::size_t k = 0; k < dim && is_min; ++k) {
      for (double h : {1e-4, -1e-4}) {
        auto xp = x;
        xp[k] += h;
        if (!inside(xp)) continue;
        if (log_q(pair, from_vec(xp), opts.truncation_tol) < lq - 1e-14) is_min = false;
      }
    }
    if (!is_min) continue;
    found.push_back({e, lq, fn, it});
  }

  if (found.empty()) throw Error(ErrorCode::NoRoot, "no start converged to a minimum of Q");

  // cluster distinct roots
  std::vector<Candidate> distinct;
  for (const auto& c : found) {
    bool dup = false;
    for (const auto& d : distinct) {
      double dist = std::abs(c.eta.d - d.eta.d);
      for (std::size_t k = 0; k < c.eta.beta.size(); ++k)
        dist = std::max(dist, std::abs(c.eta.beta[k] - d.eta.beta[k]));
      if (dist < 1e-5) dup = true;
    }
    if (!dup) distinct.push_back(c);
  }
  if (distinct.size() > 1) {
    std::ostringstream os;
    os << distinct.size() << " distinct roots:";
    for (const auto& d : distinct) os << " (d=" << d.eta.d << ", logQ=" << d.logq << ")";
    throw Error(ErrorCode::NoRoot, os.str());
  }

  const auto& best = distinct.front();
  PseudoTrueSolution sol;
  sol.eta1 = best.eta;
  sol.d_star = pair.tdgp.d - best.eta.d;
  sol.truncation_N = choose_truncation(pair, best.eta.beta, opts.truncation_tol);
  sol.K = K_value(pair, best.eta, sol.truncation_N);
  sol.grad_norm = best.grad_norm;
  sol.newton_iters = total_iters;
  sol.starts_converged = static_cast<int>(found.size());
  if (best.eta.d - dlo < 1e-6 || dhi - best.eta.d < 1e-6)
    throw Error(ErrorCode::BoundaryRoot, "d_1 at the edge of the admissible interval");
  if (opts.require_positive_d1 && !(sol.eta1.d > 0.0 && sol.eta1.d < 0.5))
    throw Error(ErrorCode::BoundaryRoot, "d_1 outside (0, 0.5)");
  return sol;
}

ContourGrid q_contour_grid(const MisSpecPair& pair, const std::vector<double>& d_grid,
                           const std::vector<double>& beta_grid, ExecPolicy policy) {
  if (pair.family.l() > 1)
    throw Error(ErrorCode::InvalidArgument, "contour grids support families with at most one beta");
  ContourGrid g;
  g.d_grid = d_grid;
  g.beta_grid = pair.family.l() == 1 ? beta_grid : std::vector<double>{};
  const std::size_t cols = pair.family.l() == 1 ? beta_grid.size() : 1;
  g.Q.assign(d_grid.size(), std::vector<double>(cols, std::numeric_limits<double>::quiet_NaN()));
  auto row = [&](std::size_t i) {
    for (std::size_t k = 0; k < cols; ++k) {
      EtaVector e{d_grid[i], {}};
      if (pair.family.l() == 1) e.beta = {beta_grid[k]};
      const double dstar = pair.tdgp.d - e.d;
      if (!(std::abs(dstar) < 0.5) || !(std::abs(e.d) < 0.5)) continue;
      std::vector<double> phi, theta;
      split_beta(pair.family, e.beta, phi, theta);
      if (!roots_outside_unit_circle(phi) || !roots_outside_unit_circle(theta)) continue;
      const int N = choose_truncation(pair, e.beta, 1e-12);
      g.Q[i][k] = limiting_Q(pair, pair.tdgp.sigma2, e, N);
    }
  };
  const long rows = static_cast<long>(d_grid.size());
  if (policy == ExecPolicy::Serial) {
    for (long i = 0; i < rows; ++i) row(static_cast<std::size_t>(i));
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < rows; ++i) row(static_cast<std::size_t>(i));
  }
  return g;
}

}  // namespace arfima
