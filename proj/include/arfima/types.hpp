#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace arfima {

/**
 * Full ARFIMA(p,d,q) parameterization.
 *
 * Plus-sign convention: phi(z) = 1 + phi_1 z + ... + phi_p z^p and
 * theta(z) = 1 + theta_1 z + ... + theta_q z^q. The process mean is fixed at 0.
 */
struct ArfimaSpec {
  std::vector<double> phi;
  double d = 0.0;
  std::vector<double> theta;
  double sigma2 = 1.0;

  int p() const { return static_cast<int>(phi.size()); }
  int q() const { return static_cast<int>(theta.size()); }

  bool operator==(const ArfimaSpec&) const = default;
};

struct FamilySpec {
  int p = 0;
  int q = 0;

  std::size_t l() const { return static_cast<std::size_t>(p + q); }

  bool operator==(const FamilySpec&) const = default;
};

/// eta = (d, beta) with beta = (phi_1..phi_p, theta_1..theta_q).
struct EtaVector {
  double d = 0.0;
  std::vector<double> beta;

  bool operator==(const EtaVector&) const = default;
};

/// MM spectral shape of eta under a family, with unit innovation variance.
ArfimaSpec spec_from_eta(const EtaVector& eta, const FamilySpec& family, double sigma2 = 1.0);
EtaVector eta_from_spec(const ArfimaSpec& spec);

enum class EstimatorKind { FML, WHITTLE, TML, CSS };

std::string_view to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(std::string_view name);

/// TDGP paired with the orders of the fitted (possibly mis-specified) model.
struct MisSpecPair {
  ArfimaSpec tdgp;
  FamilySpec family;

  bool operator==(const MisSpecPair&) const = default;
};

}  // namespace arfima
