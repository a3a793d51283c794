#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "arfima/asymptotics.hpp"
#include "arfima/estimators.hpp"
#include "arfima/parallel.hpp"
#include "arfima/pseudo_true.hpp"
#include "arfima/types.hpp"

namespace arfima {

struct CaseFlags {
  WConstVariant w_const_variant = WConstVariant::ArmaVariance;
  /// Build the limit law per (method, n) and store standardized draws.
  bool report_standardized = true;

  bool operator==(const CaseFlags&) const = default;
};

struct ExperimentConfig {
  MisSpecPair pair;
  std::vector<EstimatorKind> methods{EstimatorKind::FML, EstimatorKind::WHITTLE, EstimatorKind::TML,
                                     EstimatorKind::CSS};
  std::vector<int> n_list;
  int replications = 1000;
  std::uint64_t seed = 0;
  std::string outputs = "out";
  CaseFlags case_flags;
  /// Draws of the limit law kept per n for density plots.
  int limit_draws = 10000;
  /// Largest tolerated share of failed replications per (method, n).
  double max_failure_rate = 0.02;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws InvalidArgument unless replications >= 2, n_list is nonempty with n >= 8,
/// and methods is nonempty without repeats.
void validate_config(const ExperimentConfig& cfg);

struct CellReport {
  EstimatorKind kind = EstimatorKind::FML;
  int n = 0;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  /// MSE over the FML MSE at the same n; NaN when FML was not run.
  double rel_eff_vs_fml = 0.0;
  int failures = 0;
  std::vector<double> d_hat_samples;
  std::vector<double> standardized_samples;
  /// d component of mu_n (Case 1 only, else 0).
  double mu_n = 0.0;

  bool operator==(const CellReport&) const = default;
};

/// Per-n quantities shared by all methods.
struct SizeReport {
  int n = 0;
  LimitCase which = LimitCase::Case3;
  double rate = 0.0;
  /// Case 1: S_n from the FML run and the truncation point chosen from it.
  double S_n = 0.0;
  int s = 0;
  std::vector<double> limit_samples;

  bool operator==(const SizeReport&) const = default;
};

struct MonteCarloReport {
  ExperimentConfig config;
  PseudoTrueSolution pseudo_true;
  std::vector<SizeReport> sizes;
  std::vector<CellReport> cells;

  const CellReport& cell(EstimatorKind kind, int n) const;
  const SizeReport& size(int n) const;

  bool operator==(const MonteCarloReport&) const = default;
};

/// Mean and population variance (1/R) with Neumaier-compensated sums.
struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
};
SampleMoments sample_moments(const std::vector<double>& x);

/// FNV-1a over the bytes of a series; used to check the paired design.
std::uint64_t series_hash(const std::vector<double>& y);

/**
 * Paired Monte Carlo: replication r at size n is GaussianSimulator::draw(mix_seed(seed, n), r),
 * and the same series feeds every method. Failed fits are dropped and counted. Throws
 * FailureThreshold when a (method, n) cell loses more than max_failure_rate of its replications.
 */
MonteCarloReport run_monte_carlo(const ExperimentConfig& cfg, ExecPolicy policy = ExecPolicy::Parallel);

/// Case-specific standardization of each d_hat. Throws CaseMismatch when the law was built
/// for another n, method, or pair.
std::vector<double> standardized_samples(const MonteCarloReport& report, EstimatorKind kind,
                                         const LimitLaw& law, int n);

struct TrueValueCell {
  EstimatorKind kind = EstimatorKind::FML;
  int n = 0;
  double bias = 0.0;
  double mse = 0.0;
};

/// Bias_d0 = Bias_d1 - d*, MSE_d0 = MSE_d1 + d*^2 - 2 d* Bias_d1.
std::vector<TrueValueCell> bias_mse_to_true(const MonteCarloReport& report);

nlohmann::json to_json(const MonteCarloReport& report);
MonteCarloReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Writes table.csv (d*, theta0, n, then bias/MSE per method), table_true.csv (against d0),
/// rel_eff.csv, report.json and, when standardized draws exist, density_n<n>.csv with a
/// Limit column. Returns the paths written. Throws IoError.
std::vector<std::string> emit_report(const MonteCarloReport& report, const std::string& dir);

}  // namespace arfima
