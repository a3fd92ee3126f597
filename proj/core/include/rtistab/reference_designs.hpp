#pragma once

#include <optional>
#include <string>

#include "rtistab/plant.hpp"
#include "rtistab/realize.hpp"

namespace rtistab {

// Built-in reference designs (the published worked examples), used by the
// paper-suite command and the regression tests. Each entry carries the
// original N/D choice, the initial and adjusted parameter vectors and the
// exponents they produce, so the interpolation solve and the realized
// controllers can be regression-checked without re-running the search.
struct ReferenceExample {
  std::string id;
  std::string description;
  RationalTF plant;
  RationalTF N;
  RationalTF D;
  int relative_degree = 0;
  std::optional<double> M;              // relative-degree-2 entries
  std::vector<double> initial_a;
  std::vector<double> initial_m;        // solve at initial_a (4+ decimals)
  std::vector<double> adjusted_a;       // published adjusted parameters
  std::vector<double> integer_m;        // exponents at adjusted_a
  std::optional<RationalTF> controller; // published closed-form controllers
  double fixed_cancel_tol = 1e-4;       // realization tolerance, loosened for
                                        // the repeated-zero entries
  double sim_t_final = 0.0;             // 0 = automatic horizon
};

// The large-integer construction: prescribed targets, limit-system solution
// and the published epsilon values before and after refinement.
struct AsymptoticReference {
  RationalTF plant;
  RationalTF N;
  RationalTF D;
  std::vector<double> centers;
  std::vector<long long> targets;
  std::vector<double> published_x;
  std::vector<double> published_eps;
  std::vector<double> published_refined_eps;
  std::vector<double> published_achieved_m;
};

[[nodiscard]] const std::vector<ReferenceExample>& reference_examples();
[[nodiscard]] const ReferenceExample& reference_example(const std::string& id);
[[nodiscard]] const AsymptoticReference& asymptotic_reference();

// One pass/fail line of a suite run.
struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Deterministic regression of one entry: adjusted parameters must reproduce
// the published integers, initial parameters the published real exponents,
// published controllers must match, and the realized design must strongly
// stabilize (sigma < 0, closed-loop poles in the LHP, settled step
// response).
[[nodiscard]] std::vector<CheckOutcome> run_fixed_mode(const ReferenceExample& ex);

// Full search from the published initial parameters; any integerized design
// that verifies counts as a pass.
[[nodiscard]] std::vector<CheckOutcome> run_search_mode(const ReferenceExample& ex,
                                                        std::uint64_t seed);

}  // namespace rtistab
