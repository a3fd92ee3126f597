#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rtistab/errors.hpp"
#include "rtistab/rational.hpp"

namespace rtistab {

// A root is treated as RHP iff re >= kRhpThreshold (extended right half
// plane with a guard band for rounding).
inline constexpr double kRhpThreshold = -1e-9;

// Relative radius for merging clustered roots into multiplicities.
inline constexpr double kClusterRadius = 1e-6;

struct RootGroup {
  Complex value;
  int multiplicity = 1;
};

struct PoleZeroData {
  std::vector<Complex> zeros;
  std::vector<Complex> poles;
  double gain = 1.0;
  int relative_degree = 0;  // count of zeros at infinity
  std::vector<RootGroup> rhp_zeros;
  std::vector<RootGroup> rhp_poles;
};

struct PipReport {
  bool satisfied = true;
  // First pair of real non-negative zeros with an odd pole count between
  // them; +infinity stands for the zero at infinity.
  std::optional<std::pair<double, double>> witness;
  int witness_pole_count = 0;
  std::vector<double> real_rhp_zero_list;  // sorted, +inf marker appended
  std::vector<int> pole_counts_between;
};

class PipViolation : public Error {
public:
  explicit PipViolation(PipReport r);
  PipReport report;
};

struct CoprimeFactorization {
  RationalTF N;
  RationalTF D;
  bool sign_flipped = false;
  int q = 0;  // finite RHP zeros of N, counted with multiplicity
  // One representative per conjugate pair (im >= 0).
  std::vector<RootGroup> zero_groups;
  int relative_degree = 0;
};

// Clusters nearby roots (relative radius) into multiplicity groups,
// replacing each cluster by its mean.
[[nodiscard]] std::vector<RootGroup> cluster_roots(const std::vector<Complex>& roots,
                                                   double relative_radius = kClusterRadius);

// Pole-zero classification of a proper plant. Throws InvalidInput on an
// improper transfer function.
[[nodiscard]] PoleZeroData analyze(const RationalTF& plant);

// Parity interlacing check: between consecutive real non-negative zeros
// (the zero at infinity included when the relative degree is positive) the
// count of real positive poles must be even.
[[nodiscard]] PipReport check_pip(const PoleZeroData& pz);

// The -1 multiplier applies exactly when the plant is biproper, has at
// least one real RHP zero, and an odd number of real poles lies to the
// right of its rightmost real RHP zero.
[[nodiscard]] bool sign_rule_applies(const PoleZeroData& pz);

// Stable-proper coprime factorization P = N/D: N keeps P's RHP zeros and
// LHP poles, D's zeros are exactly P's RHP poles, both denominators padded
// with fresh (s + c) factors until D is biproper and N is proper. Throws
// PipViolation unless the plant passes the parity check or force is set.
[[nodiscard]] CoprimeFactorization coprime_factorize(const RationalTF& plant,
                                                     bool force = false);

// Builds the factorization record from externally supplied N and D
// (zero groups, q and the sign flag are derived from them).
[[nodiscard]] CoprimeFactorization coprime_from_parts(const RationalTF& N,
                                                      const RationalTF& D);

}  // namespace rtistab
