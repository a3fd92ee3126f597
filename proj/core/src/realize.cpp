#include "rtistab/realize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

namespace rtistab {

namespace {

long long integer_exponent(double m) {
  const double r = std::round(m);
  if (std::abs(m - r) > 1e-9) {
    throw InvalidInput("U has a non-integer exponent; run the tuning stage first");
  }
  return static_cast<long long>(r);
}

// Removes leading coefficients that exact arithmetic would cancel: U - D
// has a zero of multiplicity >= k at infinity, so its numerator degree must
// fall k below the denominator's. A dropped coefficient that is not tiny
// against the remaining ones signals a genuine zero-at-infinity deficit.
Polynomial trim_infinity_zeros(const Polynomial& num, int den_degree, int k) {
  std::vector<double> c = num.coeffs();
  while (static_cast<int>(c.size()) - 1 > den_degree - k && c.size() > 1) {
    double rest = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      rest = std::max(rest, std::abs(c[i]));
    }
    if (std::abs(c[0]) > 1e-3 * rest) {
      throw NumericsError(
          "zero-at-infinity deficit: controller would be improper (s^-1 "
          "coefficient of U - D is not negligible)");
    }
    c.erase(c.begin());
  }
  return Polynomial(std::move(c));
}

void erase_nearest(std::vector<Complex>& roots, Complex target, double tol,
                   const char* what) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double d = std::abs(roots[i] - target);
    if (d < best) {
      best = d;
      bi = i;
    }
  }
  if (roots.empty() || best > tol * (1.0 + std::abs(target))) {
    throw NumericsError(std::string("interpolation residual too large for realization: "
                                    "no ") +
                        what + " root matches a mandated RHP zero");
  }
  roots.erase(roots.begin() + static_cast<std::ptrdiff_t>(bi));
}

}  // namespace

RationalTF expand_u(const UProduct& u, int degree_guard) {
  long long total_degree = u.premultiplier ? 1 : 0;
  double log10_coeff_bound = 0.0;
  std::vector<long long> exps;
  exps.reserve(u.factors.size());
  for (const FactorPair& f : u.factors) {
    if (!u.integerized && f.m != 0.0) {
      throw InvalidInput("U must be integerized before expansion");
    }
    const long long m = integer_exponent(f.m);
    exps.push_back(m);
    total_degree += std::abs(m);
    log10_coeff_bound += static_cast<double>(std::abs(m)) *
                         std::log10(1.0 + std::max(f.a_num, f.a_den));
  }
  if (total_degree > degree_guard) {
    throw InvalidInput("expanded U degree " + std::to_string(total_degree) +
                       " exceeds the guard (" + std::to_string(degree_guard) + ")");
  }
  if (log10_coeff_bound > 280.0) {
    throw InvalidInput(
        "expanded U coefficients would overflow double precision; exponents too "
        "large");
  }

  Polynomial num({1.0});
  Polynomial den({1.0});
  if (u.premultiplier) {
    num = num * Polynomial({1.0, u.premultiplier->shift});
    den = den * Polynomial({1.0, u.premultiplier->M});
  }
  for (std::size_t k = 0; k < u.factors.size(); ++k) {
    const FactorPair& f = u.factors[k];
    const long long m = exps[k];
    if (m == 0) {
      continue;
    }
    const Polynomial pn({1.0, f.a_num});
    const Polynomial pd({1.0, f.a_den});
    const int p = static_cast<int>(std::abs(m));
    if (m > 0) {
      num = num * pn.pow(p);
      den = den * pd.pow(p);
    } else {
      num = num * pd.pow(p);
      den = den * pn.pow(p);
    }
  }
  return RationalTF(std::move(num), std::move(den));
}

DesignResult synthesize_controller(const CoprimeFactorization& cf, const UProduct& u,
                                   double cancel_tol, int degree_guard) {
  if (cancel_tol <= 0.0) {
    throw InvalidInput("cancel tolerance must be positive");
  }
  DesignResult result;
  result.factorization = cf;
  result.u_product = u;
  result.u_rational = expand_u(u, degree_guard);

  const RationalTF diff = rf_sub(result.u_rational, cf.D);
  const Polynomial num_diff =
      trim_infinity_zeros(diff.num(), diff.den().degree(), cf.relative_degree);

  if (num_diff.is_zero()) {
    result.controller = RationalTF(Polynomial(), Polynomial({1.0}));
    return result;
  }

  Polynomial num_c = num_diff * cf.N.den();
  Polynomial den_c = diff.den() * cf.N.num();

  std::vector<Complex> num_roots, den_roots;
  if (num_c.degree() >= 1) num_roots = poly_roots(num_c);
  if (den_c.degree() >= 1) den_roots = poly_roots(den_c);

  // Mandated cancellations first, matched zero-by-zero, so a failed
  // interpolation cannot hide behind the generic minimal realization.
  for (const RootGroup& g : cf.zero_groups) {
    for (int i = 0; i < g.multiplicity; ++i) {
      erase_nearest(den_roots, g.value, cancel_tol, "denominator");
      erase_nearest(num_roots, g.value, cancel_tol, "numerator");
      if (g.value.imag() != 0.0) {
        erase_nearest(den_roots, std::conj(g.value), cancel_tol, "denominator");
        erase_nearest(num_roots, std::conj(g.value), cancel_tol, "numerator");
      }
    }
  }

  RationalTF reduced(poly_from_roots(num_roots, num_c.leading()),
                     poly_from_roots(den_roots, den_c.leading()));
  result.controller = rf_cancel(reduced, cancel_tol);

  if (!result.controller.is_proper()) {
    throw NumericsError("realized controller is improper (zero-at-infinity deficit)");
  }
  if (result.controller.den().degree() >= 1) {
    for (const Complex& p : poly_roots(result.controller.den())) {
      if (p.real() >= 0.0) {
        throw NumericsError(
            "realized controller has an RHP pole: mandated cancellation left a "
            "residual");
      }
    }
  }
  return result;
}

namespace {

// Zeros of U straight from the factored form (exact, no expansion).
std::vector<Complex> u_zero_list(const UProduct& u) {
  std::vector<Complex> zeros;
  if (u.premultiplier) {
    zeros.emplace_back(-u.premultiplier->shift, 0.0);
  }
  for (const FactorPair& f : u.factors) {
    const long long m = std::llround(f.m);
    const double at = m > 0 ? f.a_num : f.a_den;
    for (long long i = 0; i < std::llabs(m); ++i) {
      zeros.emplace_back(-at, 0.0);
    }
  }
  return zeros;
}

// Phase increment along the sweep, bisected until each step stays well
// below pi so the winding cannot slip by a full turn.
double phase_delta(const std::function<Complex(double)>& r_at, double w0, Complex r0,
                   double w1, Complex r1, int depth) {
  const double d = std::arg(r1 / r0);
  if (std::abs(d) <= 1.0 || depth <= 0) {
    return d;
  }
  const double wm = 0.5 * (w0 + w1);
  const Complex rm = r_at(wm);
  return phase_delta(r_at, w0, r0, wm, rm, depth - 1) +
         phase_delta(r_at, wm, rm, w1, r1, depth - 1);
}

// Number of RHP zeros of R = D + N C by the argument principle along the
// imaginary axis. Valid when R has no RHP poles (D, N and C all stable), in
// which case the Nyquist winding counts the RHP zeros directly. Returns -1
// when the check is inconclusive.
int rhp_zero_count_by_winding(const CoprimeFactorization& cf,
                              const RationalTF& controller) {
  const auto r_of = [&](double w) {
    const Complex s(0.0, w);
    return cf.D.eval(s) + cf.N.eval(s) * controller.eval(s);
  };

  double r_inf = cf.D.num().leading() / cf.D.den().leading();
  if (cf.N.relative_degree() == 0 && controller.is_biproper()) {
    r_inf += (cf.N.num().leading() / cf.N.den().leading()) *
             (controller.num().leading() / controller.den().leading());
  }
  const Complex r0 = r_of(0.0);
  if (std::abs(r_inf) < 1e-6 || std::abs(r0) == 0.0) {
    return -1;
  }

  const int n_pts = 4000;
  double total = 0.0;
  double w_prev = 0.0;
  Complex prev = r0;
  for (int i = 0; i <= n_pts; ++i) {
    const double w = std::pow(10.0, -7.0 + 14.0 * i / n_pts);
    const Complex cur = r_of(w);
    if (!std::isfinite(cur.real()) || !std::isfinite(cur.imag()) ||
        std::abs(cur) == 0.0) {
      return -1;
    }
    total += phase_delta(r_of, w_prev, prev, w, cur, 24);
    w_prev = w;
    prev = cur;
  }
  total += std::arg(Complex(r_inf, 0.0) / prev);
  // Conjugate symmetry doubles the upper-half sweep; each zero adds 2 pi.
  const double winding = total / std::numbers::pi;
  return static_cast<int>(std::lround(winding));
}

}  // namespace

VerificationReport verify(const CoprimeFactorization& cf, const DesignResult& result) {
  VerificationReport report;
  const Polynomial& cden = result.controller.den();
  report.nu = cden.degree();
  report.sigma = -std::numeric_limits<double>::max();
  if (cden.degree() >= 1) {
    for (const Complex& p : poly_roots(cden)) {
      report.sigma = std::max(report.sigma, p.real());
    }
  }

  // Closed-loop poles are the zeros of D + N C after cancellation, which
  // equal the zeros of U up to the realization residual. The expanded
  // numerator of D + N C is not a usable source for them: repeated U
  // factors turn its root clusters into rounding noise (spurious RHP roots
  // appear already at degree ~15 with a 7-fold factor). The pole list is
  // therefore taken from the factored form, and loop stability is verified
  // independently by a Nyquist winding count of D + N C, which applies
  // whenever the controller itself is stable.
  bool winding_unstable = false;
  report.closed_loop_poles = u_zero_list(result.u_product);
  if (report.sigma < 0.0) {
    const int rhp_zeros = rhp_zero_count_by_winding(cf, result.controller);
    winding_unstable = rhp_zeros > 0;
  }

  if (!result.u_product.factors.empty()) {
    std::optional<double> m_opt;
    if (result.u_product.premultiplier) {
      m_opt = result.u_product.premultiplier->M;
    }
    try {
      const SystemBuilder builder(cf, m_opt);
      report.interpolation_residuals = builder.interpolation_residuals(
          result.u_product.parameter_vector(), result.u_product.exponents());
    } catch (const Error&) {
      report.interpolation_residuals.assign(1, std::numeric_limits<double>::infinity());
    }
  }

  bool stable_loop = !winding_unstable;
  for (const Complex& p : report.closed_loop_poles) {
    stable_loop = stable_loop && p.real() < 0.0;
  }
  bool residuals_ok = true;
  for (double r : report.interpolation_residuals) {
    residuals_ok = residuals_ok && r < 1e-8;
  }
  report.passed = report.sigma < 0.0 && stable_loop && residuals_ok;
  return report;
}

std::vector<double> default_initial_parameters(int count) {
  std::vector<double> a(static_cast<std::size_t>(count));
  double step = 1.0;  // 9^(k-1)
  for (int k = 0; k < count; ++k) {
    a[static_cast<std::size_t>(k)] = 1.0 + step / 100.0;
    step *= 9.0;
  }
  return a;
}

DesignResult design_pipeline(const RationalTF& plant, const DesignConfig& cfg) {
  const PoleZeroData pz = analyze(plant);
  if (pz.relative_degree > 2) {
    throw UnsupportedRelativeDegree(pz.relative_degree);
  }
  const PipReport pip = check_pip(pz);
  if (!pip.satisfied && !cfg.force_pip) {
    throw PipViolation(pip);
  }

  const CoprimeFactorization cf = coprime_factorize(plant, /*force=*/true);

  std::optional<double> M = cfg.M;
  if (cf.relative_degree == 2 && !M) {
    M = choose_M(cf);
  }

  DesignResult result;
  if (cf.q == 0) {
    const UProduct u = trivial_u(cf, M);
    result = synthesize_controller(cf, u, cfg.cancel_tol, cfg.expansion_degree_guard);
  } else {
    const SystemBuilder builder(cf, M);
    const std::vector<double> a0 =
        cfg.initial_a ? *cfg.initial_a
                      : default_initial_parameters(builder.num_parameters());

    // A tuned design can still be unrealizable (exponents too large to
    // expand); retry the search from a perturbed start when that happens.
    const int realization_attempts = 4;
    std::string last_failure;
    bool done = false;
    for (int attempt = 0; attempt < realization_attempts && !done; ++attempt) {
      std::vector<double> a_start = a0;
      TuneConfig tc = cfg.tune;
      if (attempt > 0) {
        tc.rng_seed = cfg.tune.rng_seed + 7777ULL * static_cast<std::uint64_t>(attempt);
        std::mt19937_64 rng(tc.rng_seed ^ 0x1d872b41ULL);
        std::normal_distribution<double> noise(0.0, 0.3);
        for (double& v : a_start) {
          v = 1.0 + (v - 1.0) * std::exp(noise(rng));
        }
      }
      TuneState state = tune_pipeline(builder, a_start, tc);
      const UProduct u = make_uproduct(state.a, state.m, builder.premultiplier(), true);
      try {
        result = synthesize_controller(cf, u, cfg.cancel_tol,
                                       cfg.expansion_degree_guard);
        result.tune_trace = std::move(state);
        done = true;
      } catch (const Error& e) {
        last_failure = e.what();
      }
    }
    if (!done) {
      throw NumericsError("controller realization failed after " +
                          std::to_string(realization_attempts) +
                          " tuning attempts: " + last_failure);
    }
  }
  result.pip = pip;
  result.verification = verify(cf, result);
  return result;
}

}  // namespace rtistab
