#pragma once

#include <functional>
#include <vector>

namespace arfima {

struct NelderMeadOptions {
  int max_iter = 2000;
  double xtol = 1e-6;   ///< simplex diameter (max-norm distance to the best vertex)
  double ftol = 1e-10;  ///< spread of objective values over the simplex
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead on a box; trial points are projected onto [lo, hi].
/// Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& lo,
                             const std::vector<double>& hi, const NelderMeadOptions& opts = {});

/// i-th point (1-based) of the Halton sequence in [0,1)^dim.
std::vector<double> halton_point(int index, int dim);

}  // namespace arfima
