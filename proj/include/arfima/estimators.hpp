#pragma once

#include <vector>

#include "arfima/types.hpp"

namespace arfima {

/// I(lambda_j) = |sum_t y_t e^{-i lambda_j t}|^2 / (2 pi n), lambda_j = 2 pi j / n,
/// j = 1..floor(n/2), via FFTW.
std::vector<double> periodogram(const std::vector<double>& y);

/// O(n^2) direct DFT; reference for periodogram().
std::vector<double> periodogram_direct(const std::vector<double>& y);

/// f_1(eta, lambda) = g_1(beta, lambda) (2 sin(lambda/2))^{-2d}, without sigma^2/2pi.
double mm_shape(const EtaVector& eta, const FamilySpec& family, double lambda);

/// (2 pi / n) sum_j I_j / f_1.  n is the series length (the periodogram has floor(n/2) entries).
double fml_objective(const EtaVector& eta, const FamilySpec& family, const std::vector<double>& I,
                     int n);

/// (4/n) sum log(sigma2 f_1 / 2pi) + (8 pi / (sigma2 n)) sum I / f_1
double whittle_objective(const EtaVector& eta, double sigma2, const FamilySpec& family,
                         const std::vector<double>& I, int n);

/// Minimizer over sigma2 of whittle_objective: 2 pi sum(I/f_1) / floor(n/2).
double whittle_sigma2_hat(const EtaVector& eta, const FamilySpec& family,
                          const std::vector<double>& I, int n);

/// whittle_objective at whittle_sigma2_hat.
double whittle_concentrated(const EtaVector& eta, const FamilySpec& family,
                            const std::vector<double>& I, int n);

struct TmlParts {
  double log_det = 0.0;  ///< log |Sigma_eta|
  double quad = 0.0;     ///< y' Sigma_eta^{-1} y
};

/// Durbin-Levinson innovations decomposition of Sigma_eta (unit innovation variance).
TmlParts tml_parts(const EtaVector& eta, const FamilySpec& family, const std::vector<double>& y);

/// Same from an explicit autocovariance sequence gamma(0..n-1).
TmlParts tml_parts_from_acov(const std::vector<double>& gamma, const std::vector<double>& y);

/// log sigma2 + (1/n) log|Sigma_eta| + y' Sigma_eta^{-1} y / (n sigma2)
double tml_objective(const EtaVector& eta, double sigma2, const FamilySpec& family,
                     const std::vector<double>& y);

/// tml_objective at sigma2 = y' Sigma_eta^{-1} y / n.
double tml_concentrated(const EtaVector& eta, const FamilySpec& family,
                        const std::vector<double>& y);

/// Residuals e_t = sum_{i<t} tau_i y_{t-i}, t = 1..n (no presample values).
std::vector<double> css_residuals(const EtaVector& eta, const FamilySpec& family,
                                  const std::vector<double>& y);

/// (1/n) sum e_t^2
double css_objective(const EtaVector& eta, const FamilySpec& family, const std::vector<double>& y);

struct EstimateOptions {
  double delta = 1e-3;
  /// d search interval; defaults to (-0.5 + delta, 0.5 - delta).
  double d_lo = -0.5 + 1e-3;
  double d_hi = 0.5 - 1e-3;
  /// Partial autocorrelations of the AR and MA parts are kept in [-pacf_bound, pacf_bound].
  double pacf_bound = 0.999;
  int starts = 5;
  int max_iter = 2000;
  double xtol = 1e-6;
  double ftol = 1e-10;
};

struct EstimationResult {
  EstimatorKind kind = EstimatorKind::FML;
  EtaVector eta_hat;
  double sigma2_hat = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  int restarts_used = 0;
};

/// The criterion minimized by estimate() for a kind (sigma2 concentrated out for
/// WHITTLE and TML).
double profile_objective(EstimatorKind kind, const EtaVector& eta, const FamilySpec& family,
                         const std::vector<double>& y, const std::vector<double>& I);

EstimationResult estimate(EstimatorKind kind, const FamilySpec& family, const std::vector<double>& y,
                          const EstimateOptions& opts = {});

}  // namespace arfima
