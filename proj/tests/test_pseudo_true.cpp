#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <chrono>
#include <cmath>
#include <limits>

#include "arfima/errors.hpp"
#include "arfima/polynomial.hpp"
#include "arfima/pseudo_true.hpp"
#include "arfima/special.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace arfima;

namespace {

MisSpecPair example1(double theta0, double d0 = 0.2) {
  MisSpecPair p;
  p.tdgp.d = d0;
  p.tdgp.theta = {theta0};
  p.family = {0, 0};
  return p;
}

MisSpecPair example2(double theta0, double d0 = 0.2) {
  auto p = example1(theta0, d0);
  p.family = {1, 0};
  return p;
}

// int_0^pi f0/f1 with equal innovation variances, by tanh-sinh on panels
double q_oracle(const MisSpecPair& pair, const EtaVector& eta) {
  const ArfimaSpec mm = spec_from_eta(eta, pair.family, pair.tdgp.sigma2);
  boost::math::quadrature::tanh_sinh<double> ts(15);
  auto f = [&](double lam) {
    if (lam <= 0) return 0.0;
    return oracle::spec_density(pair.tdgp, lam) / oracle::spec_density(mm, lam);
  };
  double acc = 0;
  for (int i = 0; i < 4; ++i) acc += ts.integrate(f, oracle::pi() * i / 4, oracle::pi() * (i + 1) / 4, 1e-14);
  return acc;
}

// random admissible (pair, eta) with separated real roots everywhere
std::pair<MisSpecPair, EtaVector> random_case(oracle::SpecGen& g) {
  MisSpecPair pair;
  pair.tdgp = g.spec(1, 2, 0.05, 0.45);
  pair.family = {g.integer(0, 1), g.integer(0, 1)};
  EtaVector eta;
  const double dstar = g.uniform(-0.35, 0.4);
  eta.d = pair.tdgp.d - dstar;
  const auto ra = g.separated_roots(pair.family.p, 0.7);
  const auto rm = g.separated_roots(pair.family.q, 0.7);
  for (double v : oracle::tail_from_reciprocal_roots(ra)) eta.beta.push_back(v);
  for (double v : oracle::tail_from_reciprocal_roots(rm)) eta.beta.push_back(v);
  return {pair, eta};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("rho examples and gamma-ratio form") {
  CHECK(rho(0, 0.3) == 1.0);
  CHECK(rho(1, 0.3) == doctest::Approx(0.3 / 0.7).epsilon(1e-15));
  for (int h = 1; h < 10; ++h) CHECK(rho(h, 0.0) == 0.0);
  const double d = 0.37;
  const auto t = rho_table(60, d);
  for (int h : {2, 7, 33, 60}) {
    const double lg = std::lgamma(h + d) + std::lgamma(1 - d) - std::lgamma(h - d + 1) - std::lgamma(d);
    CHECK(rel(t[h], std::exp(lg)) < 1e-12);
    CHECK(t[h] == doctest::Approx(rho(h, d)).epsilon(1e-14));
  }
}

TEST_CASE("rho derivative matches central differences") {
  for (double d : {-0.3, 0.05, 0.25, 0.42}) {
    const auto dr = rho_table_ddstar(40, d);
    const auto rp = rho_table(40, d + 1e-6), rm = rho_table(40, d - 1e-6);
    for (int h = 1; h <= 40; ++h) CHECK(std::abs(dr[h] - (rp[h] - rm[h]) / 2e-6) < 1e-7 * (1 + std::abs(dr[h])));
  }
}

TEST_CASE("c coefficients") {
  auto pair = example2(-0.7);
  auto c = c_coefficients(pair, {0.3}, 6);
  REQUIRE(c.size() == 7u);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == doctest::Approx(-0.4));
  CHECK(c[2] == doctest::Approx(-0.21));
  for (int j = 3; j <= 6; ++j) CHECK(c[j] == 0.0);

  // B c = A for an MA family and a TDGP with AR part
  MisSpecPair q;
  q.tdgp.d = 0.3;
  q.tdgp.phi = {-0.5};
  q.tdgp.theta = {0.2};
  q.family = {1, 1};
  const std::vector<double> beta{0.4, -0.6};
  const auto cc = c_coefficients(q, beta, 30);
  const Poly A = poly_mul({1, 0.2}, {1, 0.4});
  const Poly B = poly_mul({1, -0.5}, {1, -0.6});
  for (int j = 0; j <= 30; ++j) {
    double s = 0;
    for (int k = 0; k < static_cast<int>(B.size()) && k <= j; ++k) s += B[k] * cc[j - k];
    const double a = j < static_cast<int>(A.size()) ? A[j] : 0.0;
    CHECK(std::abs(s - a) < 1e-13);
  }
}

TEST_CASE("K closed form for a fractional-noise fit to FI-MA(1)") {
  for (double th : {-0.7, -0.3, 0.5}) {
    auto pair = example1(th);
    for (double d : {-0.2, 0.0, 0.15}) {
      const double ds = 0.2 - d;
      const double K = 1 + th * th + 2 * th * ds / (1 - ds);
      CHECK(K_value(pair, {d, {}}, 5) == doctest::Approx(K).epsilon(1e-14));
      const auto g = K_gradient(pair, {d, {}}, 5);
      CHECK(g[0] == doctest::Approx(-2 * th / ((1 - ds) * (1 - ds))).epsilon(1e-12));
    }
  }
}

TEST_CASE("K gradient matches central differences on random pairs") {
  oracle::SpecGen g(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto [pair, eta] = random_case(g);
    const int N = choose_truncation(pair, eta.beta, 1e-15);
    const auto grad = K_gradient(pair, eta, N);
    const double h = 1e-6;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      auto ep = eta, em = eta;
      if (k == 0) {
        ep.d += h;
        em.d -= h;
      } else {
        ep.beta[k - 1] += h;
        em.beta[k - 1] -= h;
      }
      const double fd = (K_value(pair, ep, N) - K_value(pair, em, N)) / (2 * h);
      CHECK(std::abs(grad[k] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("limiting Q series form agrees with spectral quadrature") {
  oracle::SpecGen g(2024);
  for (int trial = 0; trial < 50; ++trial) {
    auto [pair, eta] = random_case(g);
    const int N = choose_truncation(pair, eta.beta, 1e-15);
    const double series = limiting_Q(pair, pair.tdgp.sigma2, eta, N);
    const double quad = q_oracle(pair, eta);
    CHECK_MESSAGE(rel(series, quad) < 1e-8, "trial " << trial << " d=" << eta.d);
  }
}

TEST_CASE("limiting Q scales inversely with sigma2") {
  auto pair = example2(-0.7);
  pair.tdgp.sigma2 = 2.5;
  const EtaVector e{0.0, {0.2}};
  CHECK(limiting_Q(pair, 5.0, e, 10) == doctest::Approx(0.5 * limiting_Q(pair, 2.5, e, 10)).epsilon(1e-14));
  CHECK_THROWS_AS(limiting_Q(pair, 0.0, e, 10), Error);
}

TEST_CASE("truncation for an MA(1) fit with root modulus ratio one half") {
  MisSpecPair pair = example1(-0.7);
  pair.family = {0, 1};
  const std::vector<double> beta{0.5};
  const EtaVector eta{0.0, beta};
  const int N = choose_truncation(pair, beta, 1e-14);
  CHECK(N > 20);
  CHECK(N < 80);
  CHECK(std::abs(K_value(pair, eta, 2 * N) - K_value(pair, eta, N)) < 1e-12);
  for (int M : {15, 20, 25}) {
    const double a = std::abs(K_value(pair, eta, M + 1) - K_value(pair, eta, M));
    const double b = std::abs(K_value(pair, eta, M) - K_value(pair, eta, M - 1));
    CHECK(std::abs(a / b - 0.5) < 0.05);
  }
  // finite numerator only: N = deg A
  CHECK(choose_truncation(example2(-0.7), {0.3}, 1e-14) == 2);
}

TEST_CASE("pseudo-true d* for a fractional-noise fit") {
  const double want[] = {0.3723, 0.2500, 0.1736};
  const double th[] = {-0.7, -0.444978, -0.3};
  for (int i = 0; i < 3; ++i) {
    const auto s = solve_pseudo_true(example1(th[i]));
    CHECK(std::abs(s.d_star - want[i]) < 1e-3);
    CHECK(s.grad_norm < 1e-9);
    const auto F = foc_residual(example1(th[i]), s.eta1, s.truncation_N);
    CHECK(std::abs(F[0]) < 1e-8);
  }
}

TEST_CASE("pseudo-true d* does not depend on d0") {
  const double a = solve_pseudo_true(example1(-0.5, 0.1)).d_star;
  const double b = solve_pseudo_true(example1(-0.5, 0.35)).d_star;
  CHECK(std::abs(a - b) < 1e-7);
  const auto s2a = solve_pseudo_true(example2(-0.5, 0.1));
  const auto s2b = solve_pseudo_true(example2(-0.5, 0.4));
  CHECK(std::abs(s2a.d_star - s2b.d_star) < 1e-7);
  CHECK(std::abs(s2a.eta1.beta[0] - s2b.eta1.beta[0]) < 1e-7);
}

TEST_CASE("correctly specified pair returns the true parameters") {
  MisSpecPair pair;
  pair.tdgp.d = 0.3;
  pair.tdgp.phi = {0.4};
  pair.family = {1, 0};
  const auto s = solve_pseudo_true(pair);
  CHECK(std::abs(s.eta1.d - 0.3) < 1e-7);
  CHECK(std::abs(s.eta1.beta[0] - 0.4) < 1e-7);
  CHECK(std::abs(s.d_star) < 1e-7);
  CHECK(s.K == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pseudo-true is a minimum of Q and runs quickly") {
  for (double th : {-0.7, -0.637014, -0.3}) {
    const auto pair = example2(th);
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = solve_pseudo_true(pair);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 1.0);
    const double q = limiting_Q(pair, 1.0, s.eta1, s.truncation_N);
    for (double dd : {-1e-3, 1e-3})
      for (double db : {-1e-3, 0.0, 1e-3}) {
        EtaVector e{s.eta1.d + dd, {s.eta1.beta[0] + db}};
        CHECK(limiting_Q(pair, 1.0, e, s.truncation_N) > q);
      }
  }
  // design point of the second example
  CHECK(std::abs(solve_pseudo_true(example2(-0.637014)).d_star - 0.25) < 1e-4);
}

TEST_CASE("pseudo-true input validation") {
  CHECK_THROWS_AS(solve_pseudo_true(example1(-0.7, 0.0)), Error);
  CHECK_THROWS_AS(solve_pseudo_true(example1(-1.2)), Error);
  CHECK_THROWS_AS(K_value(example1(-0.7), {-0.4, {}}, 5), Error);
}

TEST_CASE("contour grid") {
  const auto pair = example2(-0.7);
  std::vector<double> dg, bg;
  for (int i = 0; i <= 40; ++i) dg.push_back(-0.45 + 0.02 * i);
  for (int k = 0; k <= 30; ++k) bg.push_back(-1.2 + 0.08 * k);
  const auto par = q_contour_grid(pair, dg, bg, ExecPolicy::Parallel);
  const auto ser = q_contour_grid(pair, dg, bg, ExecPolicy::Serial);
  REQUIRE(par.Q.size() == dg.size());
  double best = std::numeric_limits<double>::infinity();
  double bd = 0, bb = 0;
  for (std::size_t i = 0; i < dg.size(); ++i)
    for (std::size_t k = 0; k < bg.size(); ++k) {
      const double a = par.Q[i][k], b = ser.Q[i][k];
      CHECK((std::isnan(a) ? std::isnan(b) : a == b));
      if (std::abs(bg[k]) >= 1.0) CHECK(std::isnan(a));
      if (!std::isnan(a) && a < best) {
        best = a;
        bd = dg[i];
        bb = bg[k];
      }
    }
  const auto s = solve_pseudo_true(pair);
  CHECK(std::abs(bd - s.eta1.d) < 0.02);
  CHECK(std::abs(bb - s.eta1.beta[0]) < 0.08);
  CHECK_THROWS_AS(q_contour_grid(MisSpecPair{pair.tdgp, {1, 1}}, dg, bg), Error);
}

TEST_CASE("digamma and variance ratio against reference values") {
  for (double x : {-2.5, -0.3, 0.01, 0.5, 1.0, 3.7, 12.0, 150.0})
    CHECK(rel(digamma(x), boost::math::digamma(x)) < 1e-12);
  CHECK(fi_variance_ratio(0.2) == doctest::Approx(std::tgamma(0.6) / std::pow(std::tgamma(0.8), 2)).epsilon(1e-13));
  CHECK(q_prefactor(0.0) == doctest::Approx(oracle::pi()).epsilon(1e-15));
}
