#include "arfima/asymptotics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "arfima/arfima_model.hpp"
#include "arfima/errors.hpp"
#include "arfima/estimators.hpp"
#include "arfima/polynomial.hpp"
#include "arfima/pseudo_true.hpp"
#include "arfima/rng.hpp"
#include "arfima/special.hpp"

namespace arfima {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxExpectationN = 2000;

double two_sin_half(double lam) { return 2.0 * std::sin(lam / 2.0); }

// Ratio of spectral shapes f0/f1 (equal innovation variances), gradient and Hessian
// of log f1 with respect to (d, phi, theta).
struct LogDerivs {
  double ratio = 0.0;
  std::vector<double> g;
  Eigen::MatrixXd H;
};

LogDerivs log_derivs(const MisSpecPair& pair, const EtaVector& eta, double lam) {
  const FamilySpec& fam = pair.family;
  const std::size_t dim = 1 + fam.l();
  const ArfimaSpec mm = spec_from_eta(eta, fam);
  LogDerivs out;
  const double dstar = pair.tdgp.d - eta.d;
  out.ratio = arma_shape(pair.tdgp, lam) / arma_shape(mm, lam) *
              std::exp(-2.0 * dstar * std::log(two_sin_half(lam)));
  out.g.assign(dim, 0.0);
  out.H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.g[0] = -2.0 * std::log(two_sin_half(lam));
  const std::complex<double> z = std::polar(1.0, lam);
  if (fam.p > 0) {
    const auto A = poly_eval(unit_poly(mm.phi), z);
    for (int r = 1; r <= fam.p; ++r) {
      out.g[r] = -2.0 * std::real(std::pow(z, r) / A);
      for (int s = 1; s <= fam.p; ++s) out.H(r, s) = 2.0 * std::real(std::pow(z, r + s) / (A * A));
    }
  }
  if (fam.q > 0) {
    const auto T = poly_eval(unit_poly(mm.theta), z);
    for (int r = 1; r <= fam.q; ++r) {
      out.g[fam.p + r] = 2.0 * std::real(std::pow(z, r) / T);
      for (int s = 1; s <= fam.q; ++s)
        out.H(fam.p + r, fam.p + s) = -2.0 * std::real(std::pow(z, r + s) / (T * T));
    }
  }
  return out;
}

QuadratureOptions checked_quadrature() {
  QuadratureOptions q;
  q.tol = 1e-10;
  q.richardson_check = true;
  return q;
}

Eigen::MatrixXd toeplitz(const std::vector<double>& g, int n) {
  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = g[static_cast<std::size_t>(std::abs(i - j))];
  return S;
}

// D_h = sum of entries of M with |a - b| = h
std::vector<double> diagonal_sums(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.rows();
  std::vector<double> D(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) D[static_cast<std::size_t>(std::abs(i - j))] += M(i, j);
  return D;
}

EtaVector perturbed(const EtaVector& eta, std::size_t k, double h) {
  EtaVector e = eta;
  if (k == 0)
    e.d += h;
  else
    e.beta[k - 1] += h;
  return e;
}

void check_n(int n) {
  if (n < 4 || n > kMaxExpectationN)
    throw Error(ErrorCode::UnsupportedN, "expected gradient needs 4 <= n <= 2000, got " + std::to_string(n));
}

std::vector<double> fml_expected(const MisSpecPair& pair, const EtaVector& eta, int n,
                                 const std::vector<double>& EI) {
  const std::size_t dim = 1 + pair.family.l();
  std::vector<double> out(dim, 0.0);
  for (std::size_t j = 0; j < EI.size(); ++j) {
    const double lam = 2 * kPi * static_cast<double>(j + 1) / n;
    const auto L = log_derivs(pair, eta, lam);
    const double f1 = mm_shape(eta, pair.family, lam);
    for (std::size_t k = 0; k < dim; ++k) out[k] -= EI[j] * L.g[k] / f1;
  }
  for (auto& v : out) v *= 2 * kPi / n;
  return out;
}

std::vector<double> whittle_expected(const MisSpecPair& pair, const EtaVector& eta, int n,
                                     const std::vector<double>& EI) {
  const std::size_t dim = 1 + pair.family.l();
  const double s2 = pseudo_true_sigma2(pair, eta);
  auto out = fml_expected(pair, eta, n, EI);
  for (auto& v : out) v *= 4.0 / s2;
  for (std::size_t j = 0; j < EI.size(); ++j) {
    const double lam = 2 * kPi * static_cast<double>(j + 1) / n;
    const auto L = log_derivs(pair, eta, lam);
    for (std::size_t k = 0; k < dim; ++k) out[k] += 4.0 / n * L.g[k];
  }
  return out;
}

std::vector<double> tml_expected(const MisSpecPair& pair, const EtaVector& eta, int n) {
  const std::size_t dim = 1 + pair.family.l();
  const double s2 = pseudo_true_sigma2(pair, eta);
  auto acov = [&](const EtaVector& e) { return autocovariance(spec_from_eta(e, pair.family, 1.0), n - 1); };
  const Eigen::MatrixXd S = toeplitz(acov(eta), n);
  const Eigen::MatrixXd S0 = toeplitz(autocovariance(pair.tdgp, n - 1), n);
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::CholeskyFailure, "model covariance not PD");
  const Eigen::MatrixXd Sinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd M = Sinv * S0 * Sinv;
  const auto DS = diagonal_sums(Sinv), DM = diagonal_sums(M);

  std::vector<double> out(dim, 0.0);
  const double h = 1e-3;
  for (std::size_t k = 0; k < dim; ++k) {
    const auto p2 = acov(perturbed(eta, k, 2 * h)), p1 = acov(perturbed(eta, k, h));
    const auto m1 = acov(perturbed(eta, k, -h)), m2 = acov(perturbed(eta, k, -2 * h));
    double a = 0.0, b = 0.0;
    for (int lag = 0; lag < n; ++lag) {
      const std::size_t u = static_cast<std::size_t>(lag);
      const double dg = (-p2[u] + 8 * p1[u] - 8 * m1[u] + m2[u]) / (12 * h);
      a += dg * DS[u];
      b += dg * DM[u];
    }
    out[k] = a / n - b / (n * s2);
  }
  return out;
}

std::vector<double> css_expected(const MisSpecPair& pair, const EtaVector& eta, int n) {
  const std::size_t dim = 1 + pair.family.l();
  const auto tau = ar_inf_coefficients(eta, pair.family, n);
  const auto dtau = ar_inf_gradient(eta, pair.family, n);
  const auto g0 = autocovariance(pair.tdgp, n - 1);
  std::vector<double> out(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s += (n - std::max(i, j)) * tau[i] * dtau[k][j] * g0[static_cast<std::size_t>(std::abs(i - j))];
    out[k] = 2.0 * s / n;
  }
  return out;
}

// int_0^1 u^a h(u) du with a = 2 d0 - 1 in (-1, 0); h oscillates at frequency c.
double singular_unit_integral(const std::function<double(double)>& h, double d0, double c) {
  // w = u^{2 d0} turns u^a du into dw / (2 d0) on the first piece
  const double p = 1.0 / (2.0 * d0);
  QuadratureOptions q;
  q.tol = 1e-12;
  q.max_depth = 15;
  const double u1 = std::min(1.0, 1.0 / (2.0 * std::max(c, 0.5)));
  auto g = [&](double w) { return w <= 0.0 ? h(0.0) : h(std::pow(w, p)); };
  double s = integrate(g, 0.0, std::pow(u1, 2.0 * d0), q) / (2.0 * d0);
  if (u1 < 1.0) {
    // half-period panels away from 0 are analytic well beyond their width; a fixed
    // 20-point rule is at roundoff there, where an adaptive rule would chase it
    using boost::math::quadrature::gauss;
    const double a = 2.0 * d0 - 1.0;
    auto f = [&](double u) { return std::pow(u, a) * h(u); };
    const int panels = static_cast<int>(std::ceil((1.0 - u1) * 2.0 * c));
    const double w = (1.0 - u1) / panels;
    for (int i = 0; i < panels; ++i) s += gauss<double, 20>::integrate(f, u1 + i * w, u1 + (i + 1) * w);
  }
  return s;
}

}  // namespace

Eigen::MatrixXd B_matrix(const MisSpecPair& pair, const EtaVector& eta1) {
  const double dstar = pair.tdgp.d - eta1.d;
  const Eigen::Index dim = static_cast<Eigen::Index>(1 + pair.family.l());
  Eigen::MatrixXd B(dim, dim);
  const double e = std::max(2.0 * dstar, 0.2);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = a; b < dim; ++b) {
      auto f = [&](double lam) {
        const auto L = log_derivs(pair, eta1, lam);
        return 2.0 * L.ratio * (L.H(a, b) - L.g[a] * L.g[b]);
      };
      B(a, b) = B(b, a) = integrate_singular(f, e, checked_quadrature());
    }
  return 0.5 * (B + B.transpose());
}

double pseudo_true_sigma2(const MisSpecPair& pair, const EtaVector& eta) {
  const int N = choose_truncation(pair, eta.beta, 1e-14);
  return pair.tdgp.sigma2 * fi_variance_ratio(pair.tdgp.d - eta.d) * K_value(pair, eta, N);
}

std::vector<double> expected_periodogram(const ArfimaSpec& tdgp, int n) {
  const auto g = autocovariance(tdgp, n - 1);
  std::vector<double> cosines(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) cosines[static_cast<std::size_t>(r)] = std::cos(2 * kPi * r / n);
  std::vector<double> EI(static_cast<std::size_t>(n / 2));
  for (int j = 1; j <= n / 2; ++j) {
    double s = g[0];
    for (int k = 1; k < n; ++k)
      s += 2.0 * (1.0 - static_cast<double>(k) / n) * g[k] *
           cosines[static_cast<std::size_t>((static_cast<long>(j) * k) % n)];
    EI[static_cast<std::size_t>(j - 1)] = s / (2 * kPi);
  }
  return EI;
}

std::vector<std::vector<double>> ar_inf_gradient(const EtaVector& eta, const FamilySpec& family,
                                                 int n) {
  const ArfimaSpec s = spec_from_eta(eta, family);
  const std::size_t len = static_cast<std::size_t>(n);
  const Poly phi = unit_poly(s.phi), theta = unit_poly(s.theta);
  const auto pi = fractional_coefficients(eta.d, n);
  const auto alpha = series_div(phi, theta, len);
  std::vector<std::vector<double>> out;
  out.push_back(series_mul(alpha, fractional_coefficients_dd(eta.d, n), len));
  auto shifted = [&](const std::vector<double>& v, int r, double sign) {
    std::vector<double> o(len, 0.0);
    for (std::size_t j = static_cast<std::size_t>(r); j < len; ++j) o[j] = sign * v[j - r];
    return o;
  };
  // d alpha / d phi_r = z^r / theta ; d alpha / d theta_r = -z^r alpha / theta
  const auto inv_theta = series_div({1.0}, theta, len);
  const auto alpha_over_theta = series_div(alpha, theta, len);
  for (int r = 1; r <= family.p; ++r) out.push_back(series_mul(shifted(inv_theta, r, 1.0), pi, len));
  for (int r = 1; r <= family.q; ++r)
    out.push_back(series_mul(shifted(alpha_over_theta, r, -1.0), pi, len));
  return out;
}

std::vector<double> expected_gradient(EstimatorKind kind, const MisSpecPair& pair,
                                      const EtaVector& eta, int n) {
  check_n(n);
  switch (kind) {
    case EstimatorKind::FML: return fml_expected(pair, eta, n, expected_periodogram(pair.tdgp, n));
    case EstimatorKind::WHITTLE:
      return whittle_expected(pair, eta, n, expected_periodogram(pair.tdgp, n));
    case EstimatorKind::TML: return tml_expected(pair, eta, n);
    case EstimatorKind::CSS: return css_expected(pair, eta, n);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown estimator");
}

namespace {

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& B) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  if (!B.allFinite() || !lu.isInvertible()) throw Error(ErrorCode::SingularB, "B is singular");
  const Eigen::MatrixXd inv = lu.inverse();
  if (!inv.allFinite()) throw Error(ErrorCode::SingularB, "B is singular");
  return inv;
}

}  // namespace

std::vector<double> mu_n(EstimatorKind kind, const MisSpecPair& pair, const EtaVector& eta1, int n) {
  const auto g = expected_gradient(kind, pair, eta1, n);
  const Eigen::MatrixXd Binv = checked_inverse(B_matrix(pair, eta1));
  const Eigen::VectorXd v = Binv * Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
  return {v.data(), v.data() + v.size()};
}

CovUVTable::CovUVTable(int m, double d0) : m_(m), d0_(d0) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "cov table needs m >= 1");
  if (!(d0 > 0.0 && d0 < 0.5)) throw Error(ErrorCode::DOutOfRange, "cov_UV needs d0 in (0, 0.5)");
  ms_.resize(static_cast<std::size_t>(m) + 1);
  mc_.resize(ms_.size());
  m1c_.resize(ms_.size());
  for (int c = 1; c <= m; ++c) {
    const double w = 2 * kPi * c;
    ms_[c] = singular_unit_integral([w](double u) { return std::sin(w * u); }, d0, c);
    mc_[c] = singular_unit_integral([w](double u) { return std::cos(w * u); }, d0, c);
    m1c_[c] = singular_unit_integral([w](double u) { return u * std::cos(w * u); }, d0, c);
  }
}

double CovUVTable::operator()(int j, int k) const {
  if (j < 1 || k < 1 || j > m_ || k > m_) throw Error(ErrorCode::InvalidArgument, "cov_UV index out of range");
  // cov = J(j,-k) - J(j,k) with J(a,b) = int int cos(2pi(ax+by)) |x-y|^a
  const double Jplus = -(ms_[j] + ms_[k]) / (kPi * (j + k));
  const double Jminus = j == k ? 2.0 * (mc_[j] - m1c_[j]) : -(ms_[j] - ms_[k]) / (kPi * (j - k));
  return Jminus - Jplus;
}

Eigen::MatrixXd CovUVTable::matrix(int s) const {
  Eigen::MatrixXd C(s, s);
  for (int j = 1; j <= s; ++j)
    for (int k = j; k <= s; ++k) C(j - 1, k - 1) = C(k - 1, j - 1) = (*this)(j, k);
  return C;
}

double cov_UV(int j, int k, double d0) { return CovUVTable(std::max(j, k), d0)(j, k); }

double w_constant(const MisSpecPair& pair, const EtaVector& eta1, WConstVariant variant) {
  const ArfimaSpec mm = spec_from_eta(eta1, pair.family);
  const double g1 = arma_shape(mm, 0.0);
  if (variant == WConstVariant::General) return arma_shape(pair.tdgp, 0.0) / g1;
  ArfimaSpec arma = pair.tdgp;
  arma.d = 0.0;
  arma.sigma2 = 1.0;
  return autocovariance(arma, 0)[0] / g1;
}

double w_weight(int j, double dstar, double theta_const) {
  return std::pow(2 * kPi, 1.0 - 2.0 * dstar) * theta_const / std::pow(static_cast<double>(j), 2.0 * dstar);
}

WMoments w_moments(const CovUVTable& C, int j, int k, double dstar, double theta_const) {
  const double aj = w_weight(j, dstar, theta_const), ak = w_weight(k, dstar, theta_const);
  const double cjj = C(j, j), cjk = C(j, k);
  return {8.0 * aj * aj * cjj * cjj, 8.0 * aj * ak * cjk * cjk};
}

WMoments w_moments(int j, int k, double d0, double dstar, double theta_const) {
  return w_moments(CovUVTable(std::max(j, k), d0), j, k, dstar, theta_const);
}

WMoments w_moments_printed(const CovUVTable& C, int j, int k, double dstar, double theta_const) {
  const double aj = w_weight(j, dstar, theta_const), ak = w_weight(k, dstar, theta_const);
  return {8.0 * aj * aj * C(j, j) * C(j, j), 4.0 * aj * ak * (C(j, j) * C(k, k) + 2.0 * C(j, k))};
}

std::vector<double> omega_table(const CovUVTable& C, int M, double dstar, double theta_const) {
  std::vector<double> a(static_cast<std::size_t>(M) + 1);
  for (int j = 1; j <= M; ++j) a[j] = w_weight(j, dstar, theta_const);
  std::vector<double> out(static_cast<std::size_t>(M));
  double acc = 0.0;
  for (int m = 1; m <= M; ++m) {
    const double cmm = C(m, m);
    double add = 8.0 * a[m] * a[m] * cmm * cmm;
    for (int k = 1; k < m; ++k) {
      const double c = C(m, k);
      add += 2.0 * 8.0 * a[m] * a[k] * c * c;
    }
    acc += add;
    out[static_cast<std::size_t>(m - 1)] = acc;
  }
  return out;
}

std::vector<double> omega_table_printed(const CovUVTable& C, int M, double dstar,
                                        double theta_const) {
  std::vector<double> out(static_cast<std::size_t>(M));
  double acc = 0.0;
  for (int m = 1; m <= M; ++m) {
    acc += w_moments_printed(C, m, m, dstar, theta_const).var_j;
    // 2 sum over ordered pairs j != k: each new unordered pair contributes 4 Cov
    for (int k = 1; k < m; ++k) acc += 4.0 * w_moments_printed(C, m, k, dstar, theta_const).cov_jk;
    out[static_cast<std::size_t>(m - 1)] = acc;
  }
  return out;
}

double omega_m(int m, double d0, double dstar, double theta_const) {
  return omega_table(CovUVTable(m, d0), m, dstar, theta_const).back();
}

int select_truncation_s(double S_n, int n, const std::vector<double>& omega, double binv2) {
  const int upper = n / 2 - 1;
  if (upper < 1) throw Error(ErrorCode::InvalidArgument, "n too small for truncation selection");
  if (static_cast<int>(omega.size()) < upper) throw Error(ErrorCode::InvalidArgument, "omega table too short");
  int best = 1;
  double bv = std::abs(S_n - binv2 * omega[0]);
  for (int m = 2; m <= upper; ++m) {
    const double v = std::abs(S_n - binv2 * omega[static_cast<std::size_t>(m - 1)]);
    if (v < bv) {
      bv = v;
      best = m;
    }
  }
  return best;
}

int select_truncation_s(double S_n, int n, double d0, double dstar, double theta_const,
                        double binv2) {
  const int upper = std::max(1, n / 2 - 1);
  return select_truncation_s(S_n, n, omega_table(CovUVTable(upper, d0), upper, dstar, theta_const), binv2);
}

WSumSamplerSpec make_w_sampler(int s, double d0, double dstar, double scale_const) {
  WSumSamplerSpec w;
  w.s = s;
  w.d0 = d0;
  w.dstar = dstar;
  w.scale_const = scale_const;
  const Eigen::MatrixXd C = CovUVTable(s, d0).matrix(s);
  Eigen::MatrixXd big(2 * s, 2 * s);
  big << C, C, C, C;
  w.centers.resize(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) w.centers[static_cast<std::size_t>(j)] = 2.0 * C(j, j);
  const double scale = big.diagonal().maxCoeff();
  // (U, V) has a singular covariance (U = V), so a diagonal jitter is usually needed
  for (double jit = 0.0; jit <= 1e-6 * scale; jit = jit == 0.0 ? 1e-12 * scale : jit * 10.0) {
    Eigen::MatrixXd A = big;
    A.diagonal().array() += jit;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
      w.cov_chol = llt.matrixL();
      w.jitter = jit;
      return w;
    }
  }
  throw Error(ErrorCode::CholeskyFailure, "cannot factor the (U, V) covariance");
}

std::vector<double> sample_w_sum(const WSumSamplerSpec& spec, int count, std::uint64_t seed,
                                 ExecPolicy policy) {
  const int s = spec.s;
  std::vector<double> a(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) a[static_cast<std::size_t>(j)] = w_weight(j + 1, spec.dstar, spec.scale_const);
  std::vector<double> out(static_cast<std::size_t>(count));
  auto one = [&](long i) {
    NormalStream ns(seed, static_cast<std::uint64_t>(i));
    Eigen::VectorXd z(2 * s);
    for (int k = 0; k < 2 * s; ++k) z[k] = ns.normal();
    const Eigen::VectorXd x = spec.cov_chol.triangularView<Eigen::Lower>() * z;
    double acc = 0.0;
    for (int j = 0; j < s; ++j) acc += a[static_cast<std::size_t>(j)] * (x[j] * x[j] + x[s + j] * x[s + j] - spec.centers[static_cast<std::size_t>(j)]);
    out[static_cast<std::size_t>(i)] = acc;
  };
  if (policy == ExecPolicy::Serial) {
    for (long i = 0; i < count; ++i) one(i);
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) one(i);
  }
  return out;
}

double lambda_bar_dd(const MisSpecPair& pair, const EtaVector& eta1, int n) {
  double s = 0.0;
  for (int j = 1; j <= n / 2; ++j) {
    const double lam = 2 * kPi * j / n;
    const auto L = log_derivs(pair, eta1, lam);
    const double v = L.ratio * L.g[0];
    s += v * v;
  }
  return s / n;
}

Eigen::MatrixXd lambda_matrix(const MisSpecPair& pair, const EtaVector& eta1) {
  const double dstar = pair.tdgp.d - eta1.d;
  if (!(dstar < 0.25)) throw Error(ErrorCode::QuadratureFailure, "Lambda diverges for d* >= 0.25");
  const Eigen::Index dim = static_cast<Eigen::Index>(1 + pair.family.l());
  Eigen::MatrixXd L(dim, dim);
  const double e = std::max(4.0 * dstar, 0.2);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = a; b < dim; ++b) {
      auto f = [&](double lam) {
        const auto D = log_derivs(pair, eta1, lam);
        return 2 * kPi * D.ratio * D.ratio * D.g[a] * D.g[b];
      };
      L(a, b) = L(b, a) = integrate_singular(f, e, checked_quadrature());
    }
  return L;
}

Eigen::MatrixXd xi_matrix(const MisSpecPair& pair, const EtaVector& eta1) {
  const Eigen::MatrixXd Binv = checked_inverse(B_matrix(pair, eta1));
  const Eigen::MatrixXd X = Binv * lambda_matrix(pair, eta1) * Binv;
  return 0.5 * (X + X.transpose());
}

LimitCase classify_dstar(double dstar) {
  if (dstar > 0.25 + 1e-9) return LimitCase::Case1;
  if (dstar < 0.25 - 1e-9) return LimitCase::Case3;
  return LimitCase::Case2;
}

LimitLaw build_limit_law(const MisSpecPair& pair, const EtaVector& eta1, int n, EstimatorKind kind,
                         const LimitLawOptions& opts) {
  LimitLaw law;
  law.kind = kind;
  law.n = n;
  law.d0 = pair.tdgp.d;
  law.dstar = pair.tdgp.d - eta1.d;
  law.which = classify_dstar(law.dstar);
  law.B = B_matrix(pair, eta1);
  const Eigen::MatrixXd Binv = checked_inverse(law.B);
  const double nn = static_cast<double>(n);
  switch (law.which) {
    case LimitCase::Case1: {
      Case1Law c;
      c.mu_n = mu_n(kind, pair, eta1, n);
      c.g_ratio_const = w_constant(pair, eta1, opts.variant);
      const double binv2 = Binv(0, 0) * Binv(0, 0);
      if (opts.S_n > 0.0)
        c.s = select_truncation_s(opts.S_n, n, law.d0, law.dstar, c.g_ratio_const, binv2);
      else if (opts.s_override > 0)
        c.s = opts.s_override;
      else
        c.s = std::max(1, n / 2 - 1);
      c.sampler = make_w_sampler(c.s, law.d0, law.dstar, c.g_ratio_const);
      law.rate = std::pow(nn, 1.0 - 2.0 * law.dstar) / std::log(nn);
      law.rate_label = "n^(1-2d*)/log n";
      law.detail = std::move(c);
      break;
    }
    case LimitCase::Case2: {
      Case2Law c;
      c.lambda_bar_dd = lambda_bar_dd(pair, eta1, n);
      law.rate = std::sqrt(nn / c.lambda_bar_dd);
      law.rate_label = "n^(1/2) Lambda_dd^(-1/2)";
      law.detail = c;
      break;
    }
    case LimitCase::Case3: {
      Case3Law c;
      c.Xi = xi_matrix(pair, eta1);
      law.rate = std::sqrt(nn);
      law.rate_label = "n^(1/2)";
      law.detail = std::move(c);
      break;
    }
  }
  return law;
}

std::vector<double> sample_limit(const LimitLaw& law, int count, std::uint64_t seed,
                                 ExecPolicy policy) {
  const double binv00 = checked_inverse(law.B)(0, 0);
  if (const auto* c1 = std::get_if<Case1Law>(&law.detail)) {
    auto w = sample_w_sum(c1->sampler, count, seed, policy);
    for (auto& v : w) v *= binv00;
    return w;
  }
  double sd = std::abs(binv00);
  if (const auto* c3 = std::get_if<Case3Law>(&law.detail)) sd = std::sqrt(std::max(c3->Xi(0, 0), 0.0));
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = sd * NormalStream(seed, static_cast<std::uint64_t>(i)).normal();
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& s, double p) {
  const double h = (static_cast<double>(s.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

double silverman_bandwidth(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  if (samples.size() < 2) throw Error(ErrorCode::DegenerateSample, "need at least two samples");
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw Error(ErrorCode::DegenerateSample, "zero sample variance");
  auto sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(n, -0.2);
}

std::vector<double> kernel_density(const std::vector<double>& samples,
                                   const std::vector<double>& grid, ExecPolicy policy) {
  if (samples.size() < 30) throw Error(ErrorCode::DegenerateSample, "kernel density needs >= 30 samples");
  const double h = silverman_bandwidth(samples);
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2 * kPi));
  std::vector<double> out(grid.size());
  auto one = [&](long g) {
    double s = 0.0;
    for (double x : samples) {
      const double u = (grid[static_cast<std::size_t>(g)] - x) / h;
      s += std::exp(-0.5 * u * u);
    }
    out[static_cast<std::size_t>(g)] = s * norm;
  };
  const long G = static_cast<long>(grid.size());
  if (policy == ExecPolicy::Serial) {
    for (long g = 0; g < G; ++g) one(g);
  } else {
#pragma omp parallel for schedule(static)
    for (long g = 0; g < G; ++g) one(g);
  }
  return out;
}

}  // namespace arfima
