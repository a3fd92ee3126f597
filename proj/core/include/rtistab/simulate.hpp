#pragma once

#include "rtistab/design.hpp"
#include "rtistab/plant.hpp"

namespace rtistab {

struct StepSeries {
  std::vector<double> t;
  std::vector<double> y;
  bool settled = false;
  double final_value = 0.0;  // s -> 0 limit of the simulated map
};

// Pole-zero-gain form used to realize high-order closed loops without
// expanding them into a single ill-conditioned polynomial ratio.
struct ZpkModel {
  std::vector<Complex> zeros;
  std::vector<Complex> poles;
  double gain = 1.0;
};

// Unit-step response by classical fixed-step RK4. The transfer function is
// converted to controllable-canonical state space (a cascade of low-order
// sections is used instead above order 12, where the single companion form
// is numerically untenable). Throws on an unstable map, on dt coarser than
// 0.1/max|pole|, or when the end value misses the final-value theorem by
// more than 2%.
[[nodiscard]] StepSeries step_response(const RationalTF& tf, double t_final, double dt);

[[nodiscard]] StepSeries step_response_zpk(const ZpkModel& model, double t_final,
                                           double dt);

// Default grid: dt = min(1e-3, 0.1/max|pole|), t_final = 10/|slowest pole
// real part| clamped to [1, 1000] seconds.
struct TimeGrid {
  double t_final = 10.0;
  double dt = 1e-3;
};
[[nodiscard]] TimeGrid default_time_grid(const std::vector<Complex>& poles);

// Closed-loop maps in factored form. The disturbance map is N/U; the
// tracking map P C/(1 + P C) equals 1 - D/U and is simulated as such.
[[nodiscard]] ZpkModel disturbance_loop_zpk(const CoprimeFactorization& cf,
                                            const UProduct& u);

[[nodiscard]] StepSeries simulate_closed_loop(const CoprimeFactorization& cf,
                                              const UProduct& u, bool tracking,
                                              double t_final = 0.0, double dt = 0.0);

}  // namespace rtistab
