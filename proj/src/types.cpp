#include "arfima/types.hpp"

#include "arfima/errors.hpp"

namespace arfima {

ArfimaSpec spec_from_eta(const EtaVector& eta, const FamilySpec& family, double sigma2) {
  if (eta.beta.size() != family.l())
    throw Error(ErrorCode::InvalidArgument, "beta length does not match family p+q");
  ArfimaSpec s;
  s.d = eta.d;
  s.phi.assign(eta.beta.begin(), eta.beta.begin() + family.p);
  s.theta.assign(eta.beta.begin() + family.p, eta.beta.end());
  s.sigma2 = sigma2;
  return s;
}

EtaVector eta_from_spec(const ArfimaSpec& spec) {
  EtaVector e;
  e.d = spec.d;
  e.beta = spec.phi;
  e.beta.insert(e.beta.end(), spec.theta.begin(), spec.theta.end());
  return e;
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::FML: return "fml";
    case EstimatorKind::WHITTLE: return "whittle";
    case EstimatorKind::TML: return "tml";
    case EstimatorKind::CSS: return "css";
  }
  return "?";
}

EstimatorKind estimator_from_string(std::string_view name) {
  std::string s(name);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "fml") return EstimatorKind::FML;
  if (s == "whittle") return EstimatorKind::WHITTLE;
  if (s == "tml") return EstimatorKind::TML;
  if (s == "css") return EstimatorKind::CSS;
  throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + s + "'");
}

}  // namespace arfima
