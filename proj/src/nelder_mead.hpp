#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace tradenet::detail {

struct SimplexOptions {
  std::size_t max_iterations = 2000;
  double relative_tolerance = 1e-8;  // on the spread of objective values
  double initial_step = 0.5;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options = {});

}  // namespace tradenet::detail
