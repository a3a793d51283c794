// Serial reference vs OpenMP kernels: wall time and result equality.
// Thread count comes from OMP_NUM_THREADS.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "arfima/asymptotics.hpp"
#include "arfima/experiment.hpp"
#include "arfima/parallel.hpp"
#include "arfima/pseudo_true.hpp"
#include "arfima/rng.hpp"
#include "arfima/simulate.hpp"

using namespace arfima;

namespace {

template <class F>
double seconds(F&& f, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

template <class Make>
void compare(const char* name, Make make, int reps = 3) {
  decltype(make(ExecPolicy::Serial)) a, b;
  const double ts = seconds([&] { a = make(ExecPolicy::Serial); }, reps);
  const double tp = seconds([&] { b = make(ExecPolicy::Parallel); }, reps);
  std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  identical %s\n", name, ts, tp,
              ts / tp, a == b ? "yes" : "NO");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", max_threads());

  ArfimaSpec fi;
  fi.d = 0.2;
  fi.theta = {-0.7};
  const GaussianSimulator sim(fi, 500);
  compare("simulate draw_batch n=500", [&](ExecPolicy p) { return sim.draw_batch(1, 400, p); });

  MisSpecPair pair;
  pair.tdgp = fi;
  pair.family = {1, 0};
  std::vector<double> dg, bg;
  for (int i = 0; i < 41; ++i) dg.push_back(-0.29 + 0.78 * i / 40);
  for (int i = 0; i < 41; ++i) bg.push_back(-0.9 + 1.8 * i / 40);
  compare("contour grid 41x41", [&](ExecPolicy p) { return q_contour_grid(pair, dg, bg, p).Q; });

  const auto spec = make_w_sampler(40, 0.2, 0.3723, 1.49);
  compare("W-sum sampler s=40", [&](ExecPolicy p) { return sample_w_sum(spec, 20000, 9, p); });

  std::vector<double> x(50000), grid(512);
  for (int i = 0; i < 50000; ++i) x[i] = NormalStream(3, i).normal();
  for (int i = 0; i < 512; ++i) grid[i] = -5 + 10.0 * i / 511;
  compare("kernel density 5e4 x 512", [&](ExecPolicy p) { return kernel_density(x, grid, p); });

  ExperimentConfig cfg;
  cfg.pair.tdgp = fi;
  cfg.pair.family = {0, 0};
  cfg.n_list = {200};
  cfg.replications = 100;
  cfg.seed = 5;
  cfg.limit_draws = 1000;
  compare("monte carlo n=200 R=100", [&](ExecPolicy p) { return run_monte_carlo(cfg, p); }, 1);
  return 0;
}
