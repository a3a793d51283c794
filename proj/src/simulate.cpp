#include "arfima/simulate.hpp"

#include <cmath>
#include <mutex>

#include "arfima/arfima_model.hpp"
#include "arfima/errors.hpp"
#include "arfima/rng.hpp"

namespace arfima {

GaussianSimulator::GaussianSimulator(const ArfimaSpec& spec, int n) : spec_(spec), n_(n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "n must be at least 2");
  validate_spec(spec);
  gamma_ = autocovariance(spec, n - 1);
  const auto& g = gamma_;
  if (!dense()) {
    // probe the recursion once so a non-PD covariance fails at construction
    double v = g[0];
    std::vector<double> a, prev;
    for (int t = 1; t < n && v > 0.0; ++t) {
      double num = g[t];
      for (int k = 1; k < t; ++k) num -= a[k - 1] * g[t - k];
      const double ptt = num / v;
      prev = a;
      a.resize(t);
      for (int k = 1; k < t; ++k) a[k - 1] = prev[k - 1] - ptt * prev[t - k - 1];
      a[t - 1] = ptt;
      v *= 1.0 - ptt * ptt;
    }
    if (!(v > 0.0)) throw Error(ErrorCode::CholeskyFailure, "Toeplitz covariance is not positive definite");
    return;
  }
  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = g[std::abs(i - j)];
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::CholeskyFailure, "Toeplitz covariance is not numerically positive definite");
  L_ = llt.matrixL();
}

std::vector<double> GaussianSimulator::draw(std::uint64_t seed, std::uint64_t r) const {
  NormalStream ns(seed, r);
  Eigen::VectorXd z(n_);
  for (int i = 0; i < n_; ++i) z[i] = ns.normal();
  if (dense()) {
    const Eigen::VectorXd y = L_.triangularView<Eigen::Lower>() * z;
    return {y.data(), y.data() + n_};
  }
  const auto& g = gamma_;
  std::vector<double> y(n_), a, prev;
  double v = g[0];
  y[0] = std::sqrt(v) * z[0];
  for (int t = 1; t < n_; ++t) {
    double num = g[t];
    for (int k = 1; k < t; ++k) num -= a[k - 1] * g[t - k];
    const double ptt = num / v;
    prev = a;
    a.resize(t);
    for (int k = 1; k < t; ++k) a[k - 1] = prev[k - 1] - ptt * prev[t - k - 1];
    a[t - 1] = ptt;
    v *= 1.0 - ptt * ptt;
    double pred = 0.0;
    for (int k = 1; k <= t; ++k) pred += a[k - 1] * y[t - k];
    y[t] = pred + std::sqrt(v) * z[t];
  }
  return y;
}

std::vector<std::vector<double>> GaussianSimulator::draw_batch(std::uint64_t seed, int count,
                                                               ExecPolicy policy) const {
  std::vector<std::vector<double>> out(count);
  if (policy == ExecPolicy::Serial) {
    for (int r = 0; r < count; ++r) out[r] = draw(seed, static_cast<std::uint64_t>(r));
  } else {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < count; ++r) out[r] = draw(seed, static_cast<std::uint64_t>(r));
  }
  return out;
}

namespace {

bool same_spec(const ArfimaSpec& a, const ArfimaSpec& b) {
  return a.phi == b.phi && a.theta == b.theta && a.d == b.d && a.sigma2 == b.sigma2;
}

}  // namespace

std::shared_ptr<const GaussianSimulator> cached_simulator(const ArfimaSpec& spec, int n) {
  static std::mutex mu;
  static std::shared_ptr<const GaussianSimulator> last;
  std::lock_guard<std::mutex> lock(mu);
  if (!last || last->n() != n || !same_spec(last->spec(), spec))
    last = std::make_shared<const GaussianSimulator>(spec, n);
  return last;
}

std::vector<double> simulate_gaussian(const SimulationPlan& plan, int r) {
  if (plan.replications < 1 || r < 0 || r >= plan.replications)
    throw Error(ErrorCode::InvalidArgument, "replication index out of range");
  return cached_simulator(plan.spec, plan.n)->draw(plan.seed, static_cast<std::uint64_t>(r));
}

}  // namespace arfima
