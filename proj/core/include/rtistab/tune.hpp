#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rtistab/design.hpp"

namespace rtistab {

struct TuneConfig {
  int max_iters_simplex = 2000;  // per stage
  int restarts = 8;
  double fd_step = 1e-6;
  double newton_tol = 1e-10;  // on |sin(m pi)|_inf
  int newton_max_iters = 200;
  double snap_tol = 1e-7;
  double penalty_large = 10.0;
  double penalty_small_coeff = 0.01;
  std::uint64_t rng_seed = 0;
};

struct TraceEntry {
  int stage = 0;  // 1: |m| preconditioning, 2: trig objective, 3: Newton
  int iteration = 0;
  double value = 0.0;
};

struct TuneState {
  std::vector<double> a_tilde;  // unconstrained variables
  std::vector<double> a;        // a_k = 1 + a_tilde_k^2, always >= 1
  std::vector<double> m;        // exact solve at the current a
  std::vector<TraceEntry> trace;
  bool integerized = false;
};

class TuneFailure : public Error {
public:
  TuneFailure(const std::string& what, TuneState best)
      : Error(what), best_state(std::move(best)) {}
  TuneState best_state;
};

[[nodiscard]] inline double map_parameter(double a_tilde) {
  return 1.0 + a_tilde * a_tilde;
}

[[nodiscard]] std::vector<double> map_parameters(const std::vector<double>& a_tilde);

// Preconditioning objective: sum |m_k| plus a large penalty when the
// smallest |m_k| drops below 1 and a small quadratic penalty on the a's.
// Formula value for already-solved exponents.
[[nodiscard]] double f1_value(const std::vector<double>& m,
                              const std::vector<double>& a, const TuneConfig& cfg);

// Trig objective: sum sin^2(m_k pi), zero iff every exponent is an integer.
[[nodiscard]] double f2_value(const std::vector<double>& m);

// Objective wrappers over the interpolation solve; solver failures are
// encoded as a large value so the simplex retreats.
[[nodiscard]] double objective_F1(const SystemBuilder& builder,
                                  const std::vector<double>& a_tilde,
                                  const TuneConfig& cfg);
[[nodiscard]] double objective_F2(const SystemBuilder& builder,
                                  const std::vector<double>& a_tilde);

// Minimal-norm solution of an underdetermined B y = c through the KKT
// system [[I, B^T], [B, 0]] [y; lambda] = [0; c]. Requires B with full row
// rank (zero columns are fine); rank deficiency throws NumericsError.
[[nodiscard]] Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& B,
                                             const Eigen::VectorXd& c);

// Modified Newton-Raphson taking sin(m pi) to zero with minimal-norm
// parameter updates; on convergence snaps the exponents to integers and
// re-verifies the interpolation residuals. Requires a near-integer start
// (F2 < 0.25).
[[nodiscard]] TuneState newton_refine(const SystemBuilder& builder,
                                      const TuneState& state, const TuneConfig& cfg);

// Full adjustment: F1 preconditioning, F2 trig minimization, Newton
// refinement, with seeded perturbation restarts on stagnation.
[[nodiscard]] TuneState tune_pipeline(const SystemBuilder& builder,
                                      const std::vector<double>& a0,
                                      const TuneConfig& cfg);

[[nodiscard]] TuneState tune_pipeline(const CoprimeFactorization& cf,
                                      const std::vector<double>& a0,
                                      const TuneConfig& cfg);

}  // namespace rtistab
