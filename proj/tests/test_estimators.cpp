#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <numeric>

#include "arfima/arfima_model.hpp"
#include "arfima/estimators.hpp"
#include "arfima/optimize.hpp"
#include "arfima/simulate.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace arfima;

namespace {

const double kPi = std::numbers::pi;

std::vector<double> noise(int n, unsigned long long seed) {
  oracle::SpecGen g(seed);
  std::vector<double> y(n);
  for (auto& v : y) v = g.uniform(-1, 1);
  return y;
}

std::vector<double> fn_series(double d, std::vector<double> theta, int n, std::uint64_t seed) {
  ArfimaSpec s;
  s.d = d;
  s.theta = std::move(theta);
  return GaussianSimulator(s, n).draw(seed, 0);
}

}  // namespace

TEST_CASE("periodogram examples") {
  auto z = periodogram(std::vector<double>(16, 0.0));
  for (double v : z) CHECK(v == 0.0);
  auto I = periodogram({1, -1, 1, -1});
  REQUIRE(I.size() == 2u);
  CHECK(std::abs(I[0]) < 1e-15);
  CHECK(I[1] == doctest::Approx(2 / kPi).epsilon(1e-14));
}

TEST_CASE("periodogram matches direct DFT and Parseval") {
  for (int n : {128, 129, 50}) {
    auto y = noise(n, static_cast<unsigned long long>(n));
    auto I = periodogram(y);
    auto J = periodogram_direct(y);
    for (std::size_t j = 0; j < I.size(); ++j) CHECK(std::abs(I[j] - J[j]) < 1e-10);
    if (n % 2 == 0) {
      const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
      double ms = 0;
      for (double v : y) ms += v * v;
      ms /= n;
      double s = I[n / 2 - 1];
      for (int j = 0; j < n / 2 - 1; ++j) s += 2 * I[j];
      CHECK(std::abs(2 * kPi / n * s + mean * mean - ms) < 1e-10);
    }
  }
}

TEST_CASE("fml_objective examples") {
  auto y = noise(101, 4);
  auto I = periodogram(y);
  const FamilySpec f00{0, 0};
  CHECK(fml_objective({0.0, {}}, f00, I, 101) ==
        doctest::Approx(2 * kPi / 101 * std::accumulate(I.begin(), I.end(), 0.0)).epsilon(1e-14));
  EtaVector e{0.17, {0.3}};
  auto I3 = I;
  for (auto& v : I3) v *= 3.5;
  CHECK(fml_objective(e, {1, 0}, I3, 101) ==
        doctest::Approx(3.5 * fml_objective(e, {1, 0}, I, 101)).epsilon(1e-13));
  // two-term hand computation, n = 5
  const std::vector<double> I2{0.3, 0.7};
  const double hand = 2 * kPi / 5 *
                      (0.3 * std::pow(2 * std::sin(kPi / 5), 0.4) +
                       0.7 * std::pow(2 * std::sin(2 * kPi / 5), 0.4));
  CHECK(fml_objective({0.2, {}}, f00, I2, 5) == doctest::Approx(hand).epsilon(1e-14));
}

TEST_CASE("whittle identities") {
  for (int n : {200, 201}) {
    auto y = fn_series(0.25, {0.3}, n, 8);
    auto I = periodogram(y);
    const FamilySpec fam{1, 1};
    EtaVector e{0.21, {-0.3, 0.45}};
    const double fml = fml_objective(e, fam, I, n);
    const double s2 = 1.7;
    double logs = 0;
    for (int j = 1; j <= n / 2; ++j) logs += std::log(mm_shape(e, fam, 2 * kPi * j / n));
    const double m = n / 2;
    // (8pi/(s2 n)) sum I/f = (4/s2) fml
    const double w = whittle_objective(e, s2, fam, I, n);
    CHECK(w == doctest::Approx(4.0 / n * (logs + m * std::log(s2 / (2 * kPi))) + 4 / s2 * fml)
                   .epsilon(1e-12));
    const double sh = whittle_sigma2_hat(e, fam, I, n);
    if (n % 2 == 0) CHECK(sh == doctest::Approx(2 * fml).epsilon(1e-13));
    CHECK(whittle_objective(e, sh * 1.001, fam, I, n) > whittle_objective(e, sh, fam, I, n));
    CHECK(whittle_objective(e, sh * 0.999, fam, I, n) > whittle_objective(e, sh, fam, I, n));
    // concentrated form
    const double conc = whittle_concentrated(e, fam, I, n);
    const double rhs = 4 * m / n * std::log(n * fml / (2 * kPi * m)) + 4 * m / n;
    CHECK(std::abs(conc - 4.0 / n * logs - rhs) < 1e-10);
  }
  // flat model, even n: 2 log(fml/pi) + 2
  auto y = noise(256, 3);
  auto I = periodogram(y);
  const double fml = fml_objective({0.0, {}}, {0, 0}, I, 256);
  CHECK(std::abs(whittle_concentrated({0.0, {}}, {0, 0}, I, 256) - (2 * std::log(fml / kPi) + 2)) <
        1e-10);
}

TEST_CASE("tml objective") {
  auto y = noise(60, 12);
  double ms = 0;
  for (double v : y) ms += v * v;
  CHECK(tml_objective({0.0, {}}, 1.0, {0, 0}, y) == doctest::Approx(ms / 60).epsilon(1e-13));

  oracle::SpecGen gen(77);
  for (int t = 0; t < 10; ++t) {
    ArfimaSpec s = gen.spec(1, 1, 0.0, 0.45);
    const FamilySpec fam{s.p(), s.q()};
    auto x = GaussianSimulator(s, 50).draw(t, 0);
    const EtaVector e = eta_from_spec(s);
    const double s2 = 1.3;
    const double dl = tml_objective(e, s2, fam, x);
    // dense oracle
    const auto g = autocovariance(spec_from_eta(e, fam, 1.0), 49);
    Eigen::MatrixXd S(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) S(i, j) = g[std::abs(i - j)];
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    Eigen::Map<const Eigen::VectorXd> yv(x.data(), 50);
    const double logdet = 2 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double quad = yv.dot(llt.solve(yv));
    const double ref = std::log(s2) + logdet / 50 + quad / (50 * s2);
    CHECK(dl == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("css objective") {
  auto y = noise(40, 5);
  double ms = 0;
  for (double v : y) ms += v * v;
  CHECK(css_objective({0.0, {}}, {0, 0}, y) == doctest::Approx(ms / 40).epsilon(1e-14));
  const double d = 0.5 - 1e-3;
  auto e = css_residuals({d, {}}, {0, 0}, {1, 0, 0});
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[1] == doctest::Approx(-d));
  CHECK(e[2] == doctest::Approx(-d * (1 - d) / 2));
  CHECK(css_objective({d, {}}, {0, 0}, {1, 0, 0}) ==
        doctest::Approx((1 + d * d + d * d * (1 - d) * (1 - d) / 4) / 3));
  std::vector<double> y2(y);
  for (auto& v : y2) v *= 2;
  EtaVector eta{0.3, {0.2, -0.4}};
  CHECK(css_objective(eta, {1, 1}, y2) == doctest::Approx(4 * css_objective(eta, {1, 1}, y)));
}

TEST_CASE("nelder-mead on a box") {
  auto f = [](const std::vector<double>& x) {
    return (x[0] - 0.3) * (x[0] - 0.3) + 10 * (x[1] + 0.2) * (x[1] + 0.2);
  };
  auto r = nelder_mead(f, {0, 0}, {-1, -1}, {1, 1});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(-0.2).epsilon(1e-5));
  // optimum outside the box lands on the boundary
  auto r2 = nelder_mead(f, {0, 0}, {-1, 0}, {0.1, 1});
  CHECK(r2.x[0] == doctest::Approx(0.1));
  CHECK(r2.x[1] == doctest::Approx(0.0));
}

TEST_CASE("argmin invariance under scaling") {
  auto y = fn_series(0.2, {-0.3}, 300, 21);
  std::vector<double> y3(y);
  for (auto& v : y3) v *= 3;
  for (auto k : {EstimatorKind::FML, EstimatorKind::CSS, EstimatorKind::WHITTLE}) {
    auto a = estimate(k, {0, 0}, y);
    auto b = estimate(k, {0, 0}, y3);
    CHECK(std::abs(a.eta_hat.d - b.eta_hat.d) < 1e-5);
  }
}

TEST_CASE("estimators recover d on correctly specified data") {
  auto y = fn_series(0.2, {}, 1000, 31);
  for (auto k : {EstimatorKind::FML, EstimatorKind::WHITTLE, EstimatorKind::TML, EstimatorKind::CSS}) {
    auto r = estimate(k, {0, 0}, y);
    CHECK(r.converged);
    CHECK(std::abs(r.eta_hat.d - 0.2) < 0.1);
    CHECK(r.sigma2_hat > 0);
  }
  ArfimaSpec s;
  s.d = 0.3;
  s.phi = {-0.5};
  auto x = GaussianSimulator(s, 800).draw(4, 0);
  auto r = estimate(EstimatorKind::TML, {1, 0}, x);
  CHECK(std::abs(r.eta_hat.d - 0.3) < 0.15);
  CHECK(std::abs(r.eta_hat.beta[0] + 0.5) < 0.2);
  CHECK(r.sigma2_hat == doctest::Approx(1.0).epsilon(0.15));
}
