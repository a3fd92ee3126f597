#pragma once

#include <optional>

#include "rtistab/design.hpp"
#include "rtistab/tune.hpp"

namespace rtistab {

struct VerificationReport {
  double sigma = 0.0;  // max real part of controller poles
  int nu = 0;          // controller denominator degree
  std::vector<Complex> closed_loop_poles;
  std::vector<double> interpolation_residuals;
  bool passed = false;
};

struct DesignResult {
  RationalTF controller;
  RationalTF u_rational;
  UProduct u_product;
  VerificationReport verification;
  std::optional<TuneState> tune_trace;
  CoprimeFactorization factorization;
  PipReport pip;
};

struct DesignConfig {
  TuneConfig tune;
  double cancel_tol = 1e-4;
  bool force_pip = false;
  std::optional<std::vector<double>> initial_a;
  std::optional<double> M;
  int expansion_degree_guard = 200;
};

// Expands an integerized U into a rational transfer function by exact
// polynomial powers. Throws on non-integer exponents or when the expanded
// degree exceeds the guard.
[[nodiscard]] RationalTF expand_u(const UProduct& u, int degree_guard = 200);

// C = (U - D)/N with the mandated cancellation of every finite RHP zero of
// N (nearest-pair matched, failure is an error) followed by a general
// minimal realization. The result is checked proper and stable.
[[nodiscard]] DesignResult synthesize_controller(const CoprimeFactorization& cf,
                                                 const UProduct& u,
                                                 double cancel_tol = 1e-4,
                                                 int degree_guard = 200);

// Stability report: controller sigma and order, closed-loop poles of
// D + N C after clearing stable common factors, and the interpolation
// residuals of U at the RHP zero groups. Never throws; failures show up in
// the flags.
[[nodiscard]] VerificationReport verify(const CoprimeFactorization& cf,
                                        const DesignResult& result);

// analyze -> parity check -> factorize -> tune (or trivial U) -> synthesize
// -> verify.
[[nodiscard]] DesignResult design_pipeline(const RationalTF& plant,
                                           const DesignConfig& cfg = {});

// Default initial parameters a_k = 1 + 9^(k-1)/100, k = 1..count.
[[nodiscard]] std::vector<double> default_initial_parameters(int count);

}  // namespace rtistab
