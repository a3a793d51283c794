#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "arfima/parallel.hpp"
#include "arfima/types.hpp"

namespace arfima {

struct SimulationPlan {
  ArfimaSpec spec;
  int n = 0;
  std::uint64_t seed = 0;
  int replications = 1;
};

/**
 * Holds the Cholesky factor of the n x n Toeplitz covariance of a spec.
 *
 * Above dense_limit the factor is not stored: each draw runs the Levinson
 * recursion y_t = sum_k a_{t,k} y_{t-k} + sqrt(v_t) z_t, which is the same
 * lower-triangular map L = (I - A)^{-1} V^{1/2}.
 */
class GaussianSimulator {
public:
  static constexpr int dense_limit = 4000;

  GaussianSimulator(const ArfimaSpec& spec, int n);

  bool dense() const { return n_ <= dense_limit; }

  int n() const { return n_; }
  const ArfimaSpec& spec() const { return spec_; }
  const Eigen::MatrixXd& factor() const { return L_; }

  /// y = L z with z from NormalStream(seed, r).
  std::vector<double> draw(std::uint64_t seed, std::uint64_t r) const;

  /// Replications 0..count-1; column r of the result is draw(seed, r).
  std::vector<std::vector<double>> draw_batch(std::uint64_t seed, int count,
                                              ExecPolicy policy = ExecPolicy::Parallel) const;

private:
  ArfimaSpec spec_;
  int n_;
  Eigen::MatrixXd L_;
  std::vector<double> gamma_;
};

/// Exact draw for replication r. The factor for the most recent (spec, n) is cached.
std::vector<double> simulate_gaussian(const SimulationPlan& plan, int r);

std::shared_ptr<const GaussianSimulator> cached_simulator(const ArfimaSpec& spec, int n);

}  // namespace arfima
