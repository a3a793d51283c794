#pragma once

#include <complex>
#include <vector>

#include "arfima/types.hpp"

namespace arfima {

struct ValidateOptions {
  /// TDGP and MM constructors use (0, 0.5); general specs use (-0.5, 0.5).
  bool require_positive_d = false;
};

/// Returns spec unchanged or throws NonStationary, NonInvertible, CommonRoot, DOutOfRange.
ArfimaSpec validate_spec(const ArfimaSpec& spec, const ValidateOptions& opts = {});

/// True when every root of 1 + c_1 z + ... has modulus > 1 + 1e-8.
bool roots_outside_unit_circle(const std::vector<double>& tail);

/// (sigma2 / 2pi) |theta|^2 / |phi|^2 (2 sin(lambda/2))^{-2d} on (0, pi].
double spectral_density(const ArfimaSpec& spec, double lambda);

/// |theta(e^{i lambda})|^2 / |phi(e^{i lambda})|^2
double arma_shape(const ArfimaSpec& spec, double lambda);

enum class AutocovMethod { Sowell, FractionalNoise, NumericIntegration };

struct AutocovResult {
  std::vector<double> gamma;
  AutocovMethod method = AutocovMethod::Sowell;
};

/// gamma(0..max_lag). Falls back to spectral integration for repeated or close AR roots.
std::vector<double> autocovariance(const ArfimaSpec& spec, int max_lag);
AutocovResult autocovariance_detailed(const ArfimaSpec& spec, int max_lag);

/// Hypergeometric decomposition only; throws RepeatedArRoots when the AR roots are
/// within 1e-4 of each other.
std::vector<double> autocovariance_sowell(const ArfimaSpec& spec, int max_lag);

/// 2 * int_0^pi f(lambda) cos(k lambda) d lambda for k = 0..max_lag.
std::vector<double> autocovariance_numeric(const ArfimaSpec& spec, int max_lag);

/// Coefficients of (1-z)^d: pi_0 = 1, pi_j = pi_{j-1} (j-1-d)/j.
std::vector<double> fractional_coefficients(double d, int n);

/// d pi_j / d d, same length.
std::vector<double> fractional_coefficients_dd(double d, int n);

/// tau_0..tau_{n-1} of phi(z)(1-z)^d / theta(z).
std::vector<double> ar_inf_coefficients(const EtaVector& eta, const FamilySpec& family, int n);

}  // namespace arfima
