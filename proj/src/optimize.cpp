#include "arfima/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace arfima {

namespace {

double safe_eval(const std::function<double(const std::vector<double>&)>& f,
                 const std::vector<double>& x) {
  double v;
  try {
    v = f(x);
  } catch (...) {
    return std::numeric_limits<double>::infinity();
  }
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

void project(std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& lo,
                             const std::vector<double>& hi, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  project(x0, lo, hi);
  std::vector<std::vector<double>> sx(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    double step = opts.initial_step;
    if (x0[i] + step > hi[i]) step = -step;
    sx[i + 1][i] += step;
    project(sx[i + 1], lo, hi);
  }
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fx[i] = safe_eval(f, sx[i]);

  std::vector<std::size_t> order(n + 1);
  NelderMeadResult res;
  auto point = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = c[k] + t * (w[k] - c[k]);
    project(p, lo, hi);
    return p;
  };

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
    const std::size_t best = order.front(), worst = order.back();
    const std::size_t second = order[n > 0 ? n - 1 : 0];

    double diam = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) diam = std::max(diam, std::abs(sx[i][k] - sx[best][k]));
    const double spread = fx[worst] - fx[best];
    if (diam < opts.xtol && spread < opts.ftol) {
      res.converged = true;
      break;
    }
    if (n == 0) {
      res.converged = true;
      break;
    }

    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < n; ++k) c[k] += sx[i][k] / n;

    const auto xr = point(c, sx[worst], -1.0);
    const double fr = safe_eval(f, xr);
    if (fr < fx[best]) {
      const auto xe = point(c, sx[worst], -2.0);
      const double fe = safe_eval(f, xe);
      if (fe < fr) {
        sx[worst] = xe;
        fx[worst] = fe;
      } else {
        sx[worst] = xr;
        fx[worst] = fr;
      }
      continue;
    }
    if (fr < fx[second]) {
      sx[worst] = xr;
      fx[worst] = fr;
      continue;
    }
    const bool outside = fr < fx[worst];
    const auto xc = outside ? point(c, xr, 0.5) : point(c, sx[worst], 0.5);
    const double fc = safe_eval(f, xc);
    if (fc < (outside ? fr : fx[worst])) {
      sx[worst] = xc;
      fx[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      sx[i] = point(sx[best], sx[i], 0.5);
      fx[i] = safe_eval(f, sx[i]);
    }
  }
  const auto bi = static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  res.x = sx[bi];
  res.f = fx[bi];
  res.iterations = it;
  return res;
}

std::vector<double> halton_point(int index, int dim) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  std::vector<double> p(dim);
  for (int k = 0; k < dim; ++k) {
    const int b = primes[k % 16];
    double f = 1.0, r = 0.0;
    for (int i = index; i > 0; i /= b) {
      f /= b;
      r += f * (i % b);
    }
    p[k] = r;
  }
  return p;
}

}  // namespace arfima
