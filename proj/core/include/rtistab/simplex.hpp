#pragma once

#include <functional>
#include <vector>

namespace rtistab {

struct SimplexOptions {
  int max_iters = 2000;
  double diameter_tol = 1e-9;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

// Called once per iteration with the best objective value seen so far.
using SimplexTrace = std::function<void(int iteration, double best_value)>;

// Standard reflection/expansion/contraction/shrink simplex minimization.
// Returns the best vertex once the simplex diameter falls below
// diameter_tol or the iteration cap is reached. Throws InvalidInput if the
// objective is non-finite at the start point.
[[nodiscard]] std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const SimplexOptions& opts = {},
    const SimplexTrace& trace = nullptr);

}  // namespace rtistab
