#include "rtistab/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtistab/errors.hpp"

namespace rtistab {

RationalTF::RationalTF(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) {
    throw InvalidInput("rational function with zero denominator");
  }
}

RationalTF rf_add(const RationalTF& x, const RationalTF& y) {
  return RationalTF(x.num() * y.den() + y.num() * x.den(), x.den() * y.den());
}

RationalTF rf_sub(const RationalTF& x, const RationalTF& y) {
  return RationalTF(x.num() * y.den() - y.num() * x.den(), x.den() * y.den());
}

RationalTF rf_mul(const RationalTF& x, const RationalTF& y) {
  return RationalTF(x.num() * y.num(), x.den() * y.den());
}

namespace {

// Greedy nearest-pair cancellation working on conjugate-safe groups: real
// roots match real roots, conjugate pairs match conjugate pairs, so the
// surviving sets stay symmetric and rebuild to real coefficients.
struct RootGroups {
  std::vector<double> reals;
  std::vector<Complex> pairs;  // im > 0 representative
};

RootGroups to_groups(const std::vector<Complex>& roots) {
  detail::GroupedRoots g = detail::group_conjugate_roots(roots, RootTolerances{});
  return RootGroups{std::move(g.real_roots), std::move(g.pair_reps)};
}

template <typename T>
void cancel_nearest(std::vector<T>& num_roots, std::vector<T>& den_roots,
                    double tol) {
  bool progress = true;
  while (progress && !num_roots.empty() && !den_roots.empty()) {
    progress = false;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < num_roots.size(); ++i) {
      for (std::size_t j = 0; j < den_roots.size(); ++j) {
        const double d = std::abs(Complex(num_roots[i]) - Complex(den_roots[j]));
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    const double scale =
        1.0 + std::max(std::abs(Complex(num_roots[bi])), std::abs(Complex(den_roots[bj])));
    if (best <= tol * scale) {
      num_roots.erase(num_roots.begin() + static_cast<std::ptrdiff_t>(bi));
      den_roots.erase(den_roots.begin() + static_cast<std::ptrdiff_t>(bj));
      progress = true;
    }
  }
}

std::vector<Complex> flatten(const RootGroups& g) {
  std::vector<Complex> out;
  out.reserve(g.reals.size() + 2 * g.pairs.size());
  for (double r : g.reals) {
    out.emplace_back(r, 0.0);
  }
  for (const Complex& z : g.pairs) {
    out.push_back(z);
    out.push_back(std::conj(z));
  }
  return out;
}

}  // namespace

RationalTF rf_cancel(const RationalTF& x, double tol) {
  if (tol <= 0.0) {
    throw InvalidInput("rf_cancel tolerance must be positive");
  }
  if (x.num().degree() < 1 || x.den().degree() < 1 || x.num().is_zero()) {
    return x;
  }
  RootGroups num_g = to_groups(poly_roots(x.num()));
  RootGroups den_g = to_groups(poly_roots(x.den()));
  const std::size_t before =
      num_g.reals.size() + num_g.pairs.size() + den_g.reals.size() + den_g.pairs.size();

  cancel_nearest(num_g.reals, den_g.reals, tol);
  cancel_nearest(num_g.pairs, den_g.pairs, tol);

  const std::size_t after =
      num_g.reals.size() + num_g.pairs.size() + den_g.reals.size() + den_g.pairs.size();
  if (after == before) {
    return x;
  }
  return RationalTF(poly_from_roots(flatten(num_g), x.num().leading()),
                    poly_from_roots(flatten(den_g), x.den().leading()));
}

double rf_inv_s_coefficient(const RationalTF& x) {
  if (!x.is_biproper()) {
    throw InvalidInput("s^-1 coefficient requires a biproper function");
  }
  const double ln = x.num().leading();
  const double ld = x.den().leading();
  if (std::abs(ln - ld) > 1e-9 * std::max(std::abs(ln), std::abs(ld))) {
    throw InvalidInput("s^-1 coefficient requires equal leading coefficients");
  }
  return x.num().monic_subleading() - x.den().monic_subleading();
}

}  // namespace rtistab
