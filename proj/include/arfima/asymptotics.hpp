#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "arfima/parallel.hpp"
#include "arfima/quadrature.hpp"
#include "arfima/types.hpp"

namespace arfima {

/**
 * B = 2 int_0^pi (f0/f1) [d2 log f1 - d log f1 d log f1^T] dlambda at eta1.
 *
 * f0/f1 is the ratio of spectral shapes with equal innovation variances, so for
 * the FI-MA(1) vs FI example the scalar reduces to
 * -2 int (1 + th^2 + 2 th cos) (2 sin(l/2))^{-2d*} (2 log(2 sin(l/2)))^2.
 * B is negative definite and equals -2 times the Hessian of limiting_Q.
 */
Eigen::MatrixXd B_matrix(const MisSpecPair& pair, const EtaVector& eta1);

/// Innovation variance that minimizes the limiting Whittle / TML criterion at eta:
/// sigma0^2 Gamma(1-2d*) / Gamma(1-d*)^2 K.
double pseudo_true_sigma2(const MisSpecPair& pair, const EtaVector& eta);

/// E_0(I(lambda_j)) for j = 1..floor(n/2), from the TDGP autocovariances.
std::vector<double> expected_periodogram(const ArfimaSpec& tdgp, int n);

/// d tau_j / d eta for j < n; row 0 is d/dd, then beta components.
std::vector<std::vector<double>> ar_inf_gradient(const EtaVector& eta, const FamilySpec& family,
                                                 int n);

/**
 * E_0(d Q_n / d eta) at eta for the criterion that defines each estimator.
 *
 * FML uses E I = (1/2pi) sum (1-|k|/n) gamma0(k) e^{ik lambda}; Whittle and TML
 * take sigma^2 at pseudo_true_sigma2. TML derivatives of Sigma_eta come from a
 * five-point difference of the exact autocovariances. Throws UnsupportedN for
 * n > 2000 or n < 4.
 */
std::vector<double> expected_gradient(EstimatorKind kind, const MisSpecPair& pair,
                                      const EtaVector& eta, int n);

/// B^{-1} E_0(d Q_n / d eta). Throws SingularB.
std::vector<double> mu_n(EstimatorKind kind, const MisSpecPair& pair, const EtaVector& eta1, int n);

/**
 * Kernel of the (U, V) covariances:
 * int int {sin(2pi j x) sin(2pi k y) + sin(2pi k x) sin(2pi j y)} |x-y|^{2 d0 - 1} dx dy.
 *
 * Reduced analytically to one-dimensional integrals M_s(c) = int_0^1 u^a sin(2 pi c u) du,
 * M_c(c) and M1_c(c) = int_0^1 u^{a+1} cos(2 pi c u) du with a = 2 d0 - 1.
 */
double cov_UV(int j, int k, double d0);

/// Table of cov_UV(j, k) for 1 <= j, k <= m sharing the one-dimensional integrals.
class CovUVTable {
public:
  CovUVTable(int m, double d0);

  int size() const { return m_; }
  double d0() const { return d0_; }
  double operator()(int j, int k) const;
  /// s x s matrix C with C(j-1, k-1) = cov_UV(j, k).
  Eigen::MatrixXd matrix(int s) const;

private:
  int m_;
  double d0_;
  std::vector<double> ms_, mc_, m1c_;
};

/// How the constant in W_j is formed.
enum class WConstVariant {
  /// g0(0) / g1(beta, 0), the general form of the limit theorem.
  General,
  /// gamma_ARMA0(0)/sigma0^2 over g1(beta,0); (1 + theta0^2) for the FI-MA(1) example.
  ArmaVariance,
};

double w_constant(const MisSpecPair& pair, const EtaVector& eta1, WConstVariant variant);

/// a_j = (2pi)^{1-2d*} c / j^{2d*}
double w_weight(int j, double dstar, double theta_const);

struct WMoments {
  double var_j = 0.0;
  double cov_jk = 0.0;
};

/**
 * Var(W_j) and Cov(W_j, W_k) by Isserlis' theorem. Because Cov(U,U) = Cov(U,V) =
 * Cov(V,V), U_j = V_j almost surely and Cov(W_j, W_k) = 8 a_j a_k C_jk^2.
 */
WMoments w_moments(int j, int k, double d0, double dstar, double theta_const);
WMoments w_moments(const CovUVTable& C, int j, int k, double dstar, double theta_const);

/// The textbook-style expressions: 8 a_j^2 C_jj^2 and 4 a_j a_k (C_jj C_kk + 2 C_jk). Diagnostic only.
WMoments w_moments_printed(const CovUVTable& C, int j, int k, double dstar, double theta_const);

/// Var(sum_{j<=m} W_j).
double omega_m(int m, double d0, double dstar, double theta_const);

/// Omega_1..Omega_M (index 0 holds Omega_1).
std::vector<double> omega_table(const CovUVTable& C, int M, double dstar, double theta_const);

/// sum Var + 2 sum_{j != k} Cov with the printed moments. Diagnostic only.
std::vector<double> omega_table_printed(const CovUVTable& C, int M, double dstar,
                                        double theta_const);

/**
 * argmin over 1 <= m < floor(n/2) of |S_n - binv2 Omega_m|, smallest m on ties.
 * binv2 is the squared (0,0) entry of B^{-1} (b^{-2} in the scalar case).
 */
int select_truncation_s(double S_n, int n, double d0, double dstar, double theta_const,
                        double binv2);
int select_truncation_s(double S_n, int n, const std::vector<double>& omega, double binv2);

struct WSumSamplerSpec {
  int s = 0;
  double d0 = 0.0;
  double dstar = 0.0;
  double scale_const = 0.0;
  /// Lower factor of the 2s x 2s covariance of (U_1..U_s, V_1..V_s).
  Eigen::MatrixXd cov_chol;
  /// E(U_j^2 + V_j^2) = 2 C_jj.
  std::vector<double> centers;
  /// Diagonal jitter that was needed for the factorization (0 if none).
  double jitter = 0.0;
};

WSumSamplerSpec make_w_sampler(int s, double d0, double dstar, double scale_const);

/// Draws of sum_{j<=s} W_j; draw i uses NormalStream(seed, i).
std::vector<double> sample_w_sum(const WSumSamplerSpec& spec, int count, std::uint64_t seed,
                                 ExecPolicy policy = ExecPolicy::Parallel);

/// (1/n) sum_{j=1}^{floor(n/2)} (f0/f1 d log f1 / dd)^2 at the Fourier frequencies.
double lambda_bar_dd(const MisSpecPair& pair, const EtaVector& eta1, int n);

/// 2pi int_0^pi (f0/f1)^2 d log f1 d log f1^T. Requires d* < 0.25.
Eigen::MatrixXd lambda_matrix(const MisSpecPair& pair, const EtaVector& eta1);

/// B^{-1} Lambda B^{-1}
Eigen::MatrixXd xi_matrix(const MisSpecPair& pair, const EtaVector& eta1);

enum class LimitCase { Case1 = 1, Case2 = 2, Case3 = 3 };

/// d* above 0.25 + 1e-9 is Case 1, below 0.25 - 1e-9 is Case 3.
LimitCase classify_dstar(double dstar);

struct Case1Law {
  std::vector<double> mu_n;
  double g_ratio_const = 0.0;
  int s = 0;
  WSumSamplerSpec sampler;
};

struct Case2Law {
  double lambda_bar_dd = 0.0;
};

struct Case3Law {
  Eigen::MatrixXd Xi;
};

struct LimitLaw {
  LimitCase which = LimitCase::Case3;
  EstimatorKind kind = EstimatorKind::FML;
  int n = 0;
  double d0 = 0.0;
  double dstar = 0.0;
  Eigen::MatrixXd B;
  /// Multiplier of (d_hat - d_1 [- mu_n]) in the standardized statistic.
  double rate = 0.0;
  std::string rate_label;
  std::variant<Case1Law, Case2Law, Case3Law> detail;
};

struct LimitLawOptions {
  /// Case 1: S_n from an FML run picks s; otherwise s_override; otherwise floor(n/2) - 1.
  double S_n = -1.0;
  int s_override = 0;
  WConstVariant variant = WConstVariant::ArmaVariance;
};

LimitLaw build_limit_law(const MisSpecPair& pair, const EtaVector& eta1, int n, EstimatorKind kind,
                         const LimitLawOptions& opts = {});

/// Draws of the d-component of the limit: (B^{-1})_00 sum W, (B^{-1})_00 Z, or N(0, Xi_00).
std::vector<double> sample_limit(const LimitLaw& law, int count, std::uint64_t seed,
                                 ExecPolicy policy = ExecPolicy::Parallel);

/// 0.9 min(sd, IQR/1.34) n^{-1/5}; sd alone when the IQR is zero.
double silverman_bandwidth(const std::vector<double>& samples);

/// Gaussian kernel density on grid. Throws DegenerateSample for zero variance or < 30 samples.
std::vector<double> kernel_density(const std::vector<double>& samples,
                                   const std::vector<double>& grid,
                                   ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace arfima
