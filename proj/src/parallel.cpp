#include "arfima/parallel.hpp"

#include <omp.h>

namespace arfima {

int max_threads() { return omp_get_max_threads(); }

}  // namespace arfima
