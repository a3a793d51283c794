#pragma once

#include <vector>

#include "arfima/parallel.hpp"
#include "arfima/types.hpp"

namespace arfima {

/// prod_{i=1}^{h} (dstar + i - 1) / (i - dstar); rho(0) = 1.
double rho(int h, double dstar);

/// rho(0..N), built incrementally.
std::vector<double> rho_table(int N, double dstar);

/// d rho(h) / d dstar for h = 0..N, by differentiating the incremental product.
std::vector<double> rho_table_ddstar(int N, double dstar);

/// Power series of A/B with A = theta_0(z) phi(z), B = phi_0(z) theta(z); c_0 = 1.
std::vector<double> c_coefficients(const MisSpecPair& pair, const std::vector<double>& beta, int N);

/// Smallest N with C zeta^{N+1} / (1 - zeta) < tol, zeta the largest reciprocal root
/// modulus of B and C = sum |c_j| over a pilot expansion; N = deg A when B == 1.
int choose_truncation(const MisSpecPair& pair, const std::vector<double>& beta, double tol);

/// K_N = sum c_j^2 + 2 sum_{j>k} c_j c_k rho(j - k), dstar = d_0 - d.
double K_value(const MisSpecPair& pair, const EtaVector& eta, int N);

/// (dK/dd, dK/dbeta_1, ..., dK/dbeta_l). Note dK/dd = -dK/ddstar.
std::vector<double> K_gradient(const MisSpecPair& pair, const EtaVector& eta, int N);

/// pi Gamma(1 - 2 dstar) / Gamma(1 - dstar)^2
double q_prefactor(double dstar);

/// (sigma0^2 / sigma2) q_prefactor(dstar) K_N(eta)
double limiting_Q(const MisSpecPair& pair, double sigma2, const EtaVector& eta, int N);

/// The first-order system: (2(Psi(1-2d*) - Psi(1-d*)) K + dK/dd, dK/dbeta).
std::vector<double> foc_residual(const MisSpecPair& pair, const EtaVector& eta, int N);

struct PseudoTrueOptions {
  double truncation_tol = 1e-14;
  double grad_tol = 1e-9;
  int max_newton = 50;
  /// Enforce d_1 in (0, 0.5); off by default since Example-1 pairs have d_1 < 0.
  bool require_positive_d1 = false;
};

struct PseudoTrueSolution {
  EtaVector eta1;
  double d_star = 0.0;
  double K = 0.0;
  double grad_norm = 0.0;
  int truncation_N = 0;
  int newton_iters = 0;
  int starts_converged = 0;

  bool operator==(const PseudoTrueSolution&) const = default;
};

/// Admissible d interval for the fitted model: |d| < 0.5 and |d_0 - d| < 0.5.
std::pair<double, double> admissible_d(const MisSpecPair& pair);

PseudoTrueSolution solve_pseudo_true(const MisSpecPair& pair, const PseudoTrueOptions& opts = {});

struct ContourGrid {
  std::vector<double> d_grid;
  std::vector<double> beta_grid;
  /// Q[i][k] at d_grid[i], beta_grid[k]; one column when the family has no beta.
  std::vector<std::vector<double>> Q;
};

/// Q with sigma2 = sigma0^2 over a (d, beta_1) grid; families with l <= 1.
/// Cells outside the admissible region are NaN.
ContourGrid q_contour_grid(const MisSpecPair& pair, const std::vector<double>& d_grid,
                           const std::vector<double>& beta_grid,
                           ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace arfima
