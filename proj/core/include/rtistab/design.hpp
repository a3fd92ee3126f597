#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "rtistab/plant.hpp"

namespace rtistab {

// One ((s+a_num)/(s+a_den))^m factor. Both parameters strictly positive so
// the branch cut (-a_den, -a_num) stays in the open left half plane.
struct FactorPair {
  double a_num = 1.0;
  double a_den = 1.0;
  double m = 0.0;
};

// First-order premultiplier (s+shift)/(s+M) used for relative degree 2.
struct Premultiplier {
  double shift = 1.0;  // b1 - c1 + M
  double M = 1.0;
};

// The unit under design: optional premultiplier times a product of factor
// pairs with real (during tuning) or integer (at the end) exponents.
// Tends to 1 as s -> infinity by construction.
struct UProduct {
  std::optional<Premultiplier> premultiplier;
  std::vector<FactorPair> factors;
  bool integerized = false;

  [[nodiscard]] std::vector<double> parameter_vector() const;
  [[nodiscard]] std::vector<double> exponents() const;
};

[[nodiscard]] UProduct make_uproduct(std::span<const double> a,
                                     std::span<const double> m,
                                     std::optional<Premultiplier> premultiplier,
                                     bool integerized);

// Principal-branch evaluation. Throws InvalidInput at a factor pole.
[[nodiscard]] Complex u_eval(const UProduct& u, Complex s);

struct RowTag {
  enum class Kind { Value, Derivative, InfinityConstraint };
  enum class Part { Whole, Real, Imag };
  Kind kind = Kind::Value;
  Part part = Part::Whole;
  Complex z{0.0, 0.0};
  int derivative_order = 0;
};

// Square real linear system whose solution is the exponent vector m.
struct InterpolationSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  std::vector<RowTag> row_tags;
};

// Assembles the interpolation rows once per factorization: the right-hand
// side and row layout depend only on the plant data, so repeated assembly
// during tuning only rebuilds the matrix.
class SystemBuilder {
public:
  // M must be given exactly when the factorization has relative degree 2.
  SystemBuilder(const CoprimeFactorization& cf, std::optional<double> M);

  struct Row {
    RowTag tag;
    double rhs;
  };

  [[nodiscard]] const std::vector<Row>& rows() const { return rows_; }
  [[nodiscard]] int num_exponents() const { return num_exponents_; }
  [[nodiscard]] int num_parameters() const { return 2 * num_exponents_; }
  [[nodiscard]] bool has_premultiplier() const { return premultiplier_.has_value(); }
  [[nodiscard]] const std::optional<Premultiplier>& premultiplier() const {
    return premultiplier_;
  }

  // Builds the system for the given strictly positive parameter vector
  // (length num_parameters()). Throws NumericsError if the matrix condition
  // estimate exceeds 1e12.
  [[nodiscard]] InterpolationSystem build(std::span<const double> a) const;

  // build + dense LU solve with a residual check.
  [[nodiscard]] std::vector<double> solve(std::span<const double> a) const;

  // Row-wise residuals |A m - b| of the zero-interpolation rows (the
  // infinity-constraint row is excluded), each normalized by 1 + |b_row|.
  [[nodiscard]] std::vector<double> interpolation_residuals(
      std::span<const double> a, std::span<const double> m) const;

private:
  std::vector<Row> rows_;
  std::optional<Premultiplier> premultiplier_;
  int num_exponents_ = 0;
};

// One-shot assembly of the linear system (Eq. rows for every RHP zero group,
// derivative rows for multiplicities, and the s^-1 constraint row for
// relative degree 2).
[[nodiscard]] InterpolationSystem build_system(const CoprimeFactorization& cf,
                                               std::span<const double> a,
                                               std::optional<double> M = {});

// Dense LU solve of a square interpolation system. Residual above
// 1e-10*(1+|b|_inf) or a singular matrix throws NumericsError.
[[nodiscard]] std::vector<double> solve_exponents(const InterpolationSystem& sys);

// U for q = 0: identity for relative degree <= 1, bare premultiplier for
// relative degree 2.
[[nodiscard]] UProduct trivial_u(const CoprimeFactorization& cf,
                                 std::optional<double> M = {});

// Smallest convenient premultiplier pole: max(1, ceil|b1-c1| + 1), which
// always keeps b1 - c1 + M positive.
[[nodiscard]] double choose_M(const CoprimeFactorization& cf);

// Asymptotic predictor: with a_{2k-1} = b_k - eps_k and a_{2k} = b_k + eps_k,
// the eps-free limit system yields x_k = 2 eps_k m_k, so prescribing integer
// targets N_k gives eps_k = x_k / (2 N_k).
struct AsymptoticRequest {
  std::vector<double> centers;       // b_k, distinct and positive
  std::vector<long long> targets;    // N_k
};

struct AsymptoticResult {
  std::vector<double> x;             // limit-system solution
  std::vector<double> eps;           // x_k / (2 N_k)
  std::vector<double> achieved_m;    // exact solve at the predicted eps
  std::vector<double> refined_eps;   // Newton-refined to hit the targets
  std::vector<double> refined_m;     // exact solve at the refined eps
};

[[nodiscard]] AsymptoticResult asymptotic_epsilons(const CoprimeFactorization& cf,
                                                   const AsymptoticRequest& req);

}  // namespace rtistab
