#include "rtistab/reference_designs.hpp"

#include <cmath>
#include <sstream>

#include "rtistab/simulate.hpp"
#include "rtistab/tune.hpp"

namespace rtistab {

namespace {

Polynomial lin(double root) { return Polynomial({1.0, -root}); }

// (s^2 + b s + c)
Polynomial quad(double b, double c) { return Polynomial({1.0, b, c}); }

std::vector<ReferenceExample> build_examples() {
  std::vector<ReferenceExample> ex;

  {
    ReferenceExample e;
    e.id = "ex5";
    e.description = "relative degree 0, q = 1";
    e.plant = RationalTF(lin(3) * lin(-2), lin(4) * lin(5));
    e.N = RationalTF(lin(3), lin(-3));
    e.D = RationalTF(lin(4) * lin(5), lin(-2) * lin(-3));
    e.relative_degree = 0;
    e.initial_a = {1, 17};
    e.initial_m = {1.68261};
    e.adjusted_a = {1.000000000, 57.00000000};
    e.integer_m = {1};
    ex.push_back(e);
  }
  {
    ReferenceExample e;
    e.id = "ex6";
    e.description = "relative degree 1, q = 0";
    e.plant = RationalTF({1, 1}, {1, -1, 5});
    e.N = RationalTF({1, 1}, {1, 1, 5});
    e.D = RationalTF({1, -1, 5}, {1, 1, 5});
    e.relative_degree = 1;
    e.controller = RationalTF({2, 0}, {1, 1});
    ex.push_back(e);
  }
  {
    ReferenceExample e;
    e.id = "ex7";
    e.description = "relative degree 1, q = 2 (complex zero pair)";
    e.plant = RationalTF(quad(-2, 5), lin(2.5) * quad(2, 5));
    e.N = RationalTF(quad(-2, 5), lin(-2.5) * quad(2, 5));
    e.D = RationalTF(lin(2.5), lin(-2.5));
    e.relative_degree = 1;
    e.initial_a = {5, 101, 226, 901};
    e.initial_m = {5.8606, -11.4661};
    e.adjusted_a = {1.000000000, 12.65454035, 14.62249082, 132.6597271};
    e.integer_m = {3, -2};
    e.sim_t_final = 30.0;  // triple closed-loop pole at -1
    ex.push_back(e);
  }
  {
    ReferenceExample e;
    e.id = "ex8";
    e.description = "relative degree 1, real zero of multiplicity 2";
    e.plant = RationalTF(lin(2) * lin(2), lin(-6) * lin(3) * lin(4));
    e.N = RationalTF(lin(2) * lin(2), lin(-6) * lin(-3) * lin(-4));
    e.D = RationalTF(lin(3) * lin(4), lin(-3) * lin(-4));
    e.relative_degree = 1;
    e.initial_a = {5, 101, 226, 901};
    e.initial_m = {-14.7788, 30.8386};
    e.adjusted_a = {1.000000000, 9.207908073, 12.31517239, 261.8400886};
    e.integer_m = {-9, 5};
    e.fixed_cancel_tol = 1e-2;
    e.sim_t_final = 15.0;
    ex.push_back(e);
  }
  {
    ReferenceExample e;
    e.id = "ex9";
    e.description = "relative degree 1, complex zero pair of multiplicity 2";
    const Polynomial zeros = quad(-4, 40) * quad(-4, 40);
    const Polynomial stable_poles = lin(-2) * lin(-6) * lin(-8) * lin(-10);
    e.plant = RationalTF(zeros, stable_poles * lin(4));
    e.N = RationalTF(zeros, stable_poles * lin(-4));
    e.D = RationalTF(lin(4), lin(-4));
    e.relative_degree = 1;
    e.initial_a = {1.01, 1.09, 1.81, 8.29, 66.61, 577, 5185, 46657};
    e.initial_m = {186.9702, -2.7053, 5.4911, -5.0108};
    e.adjusted_a = {1.000000000, 3.125685736, 3.020123314, 11.00083916,
                    13.14342623, 67.80945410, 383.9773935, 77.84899459};
    e.integer_m = {12, -7, 5, 3};
    e.fixed_cancel_tol = 1e-2;
    e.sim_t_final = 80.0;  // twelvefold pole cluster at -1 settles slowly
    ex.push_back(e);
  }
  {
    ReferenceExample e;
    e.id = "ex10";
    e.description = "relative degree 2, q = 0";
    e.plant = RationalTF({1, 1}, quad(-1, 4) * lin(-3));
    e.N = RationalTF({1, 1}, quad(1, 7) * lin(-3));
    e.D = RationalTF(quad(-1, 4), quad(1, 7));
    e.relative_degree = 2;
    e.M = 3.0;
    e.controller = RationalTF({7, -5}, {1, 1});
    ex.push_back(e);
  }
  {
    ReferenceExample e;
    e.id = "ex11";
    e.description = "relative degree 2, q = 2";
    e.plant = RationalTF(lin(5) * lin(2), lin(3) * lin(4) * lin(-2.5) * lin(-1.5));
    e.N = RationalTF(lin(5) * lin(2), lin(-3) * lin(-4) * lin(-2.5) * lin(-1.5));
    e.D = RationalTF(lin(3) * lin(4), lin(-3) * lin(-4));
    e.relative_degree = 2;
    e.M = 15.0;
    e.initial_a = {2, 10, 82, 730, 6562, 57601};
    e.initial_m = {-4.4306, 2.7321, -0.0340};
    e.adjusted_a = {1.000000000, 8.488509423, 9.252626592,
                    94.36909940, 405.8562852, 102.8329410};
    e.integer_m = {-5, 4, 1};
    ex.push_back(e);
  }
  {
    ReferenceExample e;
    e.id = "ex12";
    e.description = "relative degree 1, q = 2, earlier factorization completed";
    e.plant = RationalTF(quad(-3, 7) * lin(-3), quad(4, 8) * lin(2) * lin(3));
    e.N = RationalTF(quad(-3, 7), quad(4, 8) * lin(-11));
    e.D = RationalTF(lin(2) * lin(3), lin(-3) * lin(-11));
    e.relative_degree = 1;
    e.initial_a = {10, 37, 82, 145};
    e.initial_m = {-27.9055, 63.4279};
    e.adjusted_a = {1.000000000, 8.565360692, 12.05378853, 178.9280213};
    e.integer_m = {-7, 4};
    ex.push_back(e);
  }
  {
    ReferenceExample e;
    e.id = "ex13";
    e.description = "relative degree 2, complex zero pair of multiplicity 2";
    const Polynomial zeros = quad(-4, 40) * quad(-4, 40);
    const Polynomial stable_poles =
        lin(-2) * lin(-6) * lin(-8) * lin(-10) * lin(-12);
    e.plant = RationalTF(zeros, stable_poles * lin(4));
    e.N = RationalTF(zeros, stable_poles * lin(-4));
    e.D = RationalTF(lin(4), lin(-4));
    e.relative_degree = 2;
    e.M = 9.0;
    e.initial_a = {1, 5, 17, 37, 65, 101, 145, 197, 257, 325};
    e.initial_m = {3.6973, -38.9268, 319.3825, -601.2791, 301.9484};
    e.adjusted_a = {1.000006671, 2.936514430, 2.664991202, 241.2744419,
                    12.86646544, 78.89989125, 64.17384002, 210.3103283,
                    221.8268170, 689.1918246};
    e.integer_m = {12, -7, 13, -1, 2};
    e.fixed_cancel_tol = 1e-2;
    e.sim_t_final = 80.0;
    ex.push_back(e);
  }
  {
    // The motivating construction: a single squared factor whose pole was
    // slid until the exponent became 2, with the implied third-order
    // controller.
    ReferenceExample e;
    e.id = "motivating";
    e.description = "single squared factor, biproper plant";
    e.N = RationalTF(lin(1), lin(-7));
    e.D = RationalTF(lin(-5), lin(-11));
    e.plant = RationalTF(lin(1) * lin(-11), lin(-7) * lin(-5));
    e.relative_degree = 0;
    e.adjusted_a = {12.0, 17.38477631085};
    e.integer_m = {2};
    e.controller = RationalTF({-4.769552, -106.234631, -509.934342},
                              {1, 45.769553, 684.695526, 3324.534921});
    ex.push_back(e);
  }
  return ex;
}

AsymptoticReference build_asymptotic() {
  AsymptoticReference r;
  const Polynomial z1 = quad(-4.1, 5.9);
  const Polynomial z2 = quad(-2.6, 5.3);
  const Polynomial p1 = quad(4.1, 5.9);
  const Polynomial p2 = quad(2.6, 5.3);
  r.plant = RationalTF(z1 * z2, lin(5.8) * p1 * p2);
  r.N = RationalTF(z1 * z2, lin(-5.8) * p1 * p2);
  r.D = RationalTF(lin(5.8), lin(-5.8));
  r.centers = {2, 4, 8, 16};
  r.targets = {6000, 32000, 75000, 65000};
  r.published_x = {598.6609674630, -3220.323300969, 7469.405659544,
                   -6450.310943517};
  r.published_eps = {0.049888413955255, -0.050317551577652, 0.049796037730294,
                     -0.049617776488599};
  r.published_refined_eps = {0.049849885843271, -0.050283869393989,
                             0.049768282530780, -0.049593895055261};
  r.published_achieved_m = {5995.358742, 31978.54572, 74958.13240, 64968.66745};
  return r;
}

std::string vec_to_string(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(10);
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    os << (i ? ", " : "") << v[i];
  }
  os << "]";
  return os.str();
}

CheckOutcome check(const std::string& name, bool ok, const std::string& detail) {
  return CheckOutcome{name, ok, detail};
}

bool coeffs_close(const Polynomial& a, const Polynomial& b, double rel_tol) {
  if (a.degree() != b.degree()) {
    return false;
  }
  double scale = 0.0;
  for (double c : b.coeffs()) scale = std::max(scale, std::abs(c));
  for (int i = 0; i <= a.degree(); ++i) {
    if (std::abs(a.coeffs()[static_cast<std::size_t>(i)] -
                 b.coeffs()[static_cast<std::size_t>(i)]) > rel_tol * scale) {
      return false;
    }
  }
  return true;
}

}  // namespace

const std::vector<ReferenceExample>& reference_examples() {
  static const std::vector<ReferenceExample> examples = build_examples();
  return examples;
}

const ReferenceExample& reference_example(const std::string& id) {
  for (const ReferenceExample& e : reference_examples()) {
    if (e.id == id) {
      return e;
    }
  }
  throw InvalidInput("unknown reference example: " + id);
}

const AsymptoticReference& asymptotic_reference() {
  static const AsymptoticReference ref = build_asymptotic();
  return ref;
}

std::vector<CheckOutcome> run_fixed_mode(const ReferenceExample& ex) {
  std::vector<CheckOutcome> outcomes;
  const CoprimeFactorization cf = coprime_from_parts(ex.N, ex.D);

  UProduct u;
  if (!ex.adjusted_a.empty()) {
    const SystemBuilder builder(cf, ex.M);

    if (!ex.initial_a.empty()) {
      bool ok = true;
      std::vector<double> m0;
      try {
        m0 = builder.solve(ex.initial_a);
        for (std::size_t i = 0; i < ex.initial_m.size(); ++i) {
          ok = ok && std::abs(m0[i] - ex.initial_m[i]) < 1e-4;
        }
      } catch (const Error&) {
        ok = false;
      }
      outcomes.push_back(check(ex.id + "/initial-exponents", ok,
                               "solved " + vec_to_string(m0) + " expected " +
                                   vec_to_string(ex.initial_m)));
    }

    bool ok = true;
    std::vector<double> m;
    try {
      m = builder.solve(ex.adjusted_a);
      for (std::size_t i = 0; i < ex.integer_m.size(); ++i) {
        ok = ok && std::abs(m[i] - ex.integer_m[i]) < 1e-6;
      }
    } catch (const Error&) {
      ok = false;
    }
    outcomes.push_back(check(ex.id + "/integer-exponents", ok,
                             "solved " + vec_to_string(m) + " expected " +
                                 vec_to_string(ex.integer_m)));

    u = make_uproduct(ex.adjusted_a, ex.integer_m, builder.premultiplier(), true);
  } else {
    std::optional<double> m_opt = ex.M;
    u = trivial_u(cf, m_opt);
  }

  DesignResult result;
  try {
    result = synthesize_controller(cf, u, ex.fixed_cancel_tol);
  } catch (const Error& e) {
    outcomes.push_back(check(ex.id + "/realization", false, e.what()));
    return outcomes;
  }
  result.verification = verify(cf, result);

  if (ex.controller) {
    const Polynomial want_den = ex.controller->den().monic();
    const double scale = 1.0 / result.controller.den().leading();
    const Polynomial got_den = result.controller.den().monic();
    const Polynomial got_num = result.controller.num().scaled(scale);
    const bool ok = coeffs_close(got_num, ex.controller->num(), 1e-4) &&
                    coeffs_close(got_den, want_den, 1e-4);
    outcomes.push_back(check(ex.id + "/controller", ok,
                             "realized " + vec_to_string(got_num.coeffs()) + " / " +
                                 vec_to_string(got_den.coeffs())));
  }

  const VerificationReport& v = result.verification;
  double max_cl = -std::numeric_limits<double>::max();
  for (const Complex& p : v.closed_loop_poles) {
    max_cl = std::max(max_cl, p.real());
  }
  {
    std::ostringstream os;
    os.precision(6);
    os << "sigma = " << v.sigma << ", nu = " << v.nu
       << ", max closed-loop re = " << max_cl;
    outcomes.push_back(check(ex.id + "/strong-stabilization",
                             v.sigma < 0.0 && max_cl < -1e-6, os.str()));
  }

  try {
    StepSeries series =
        simulate_closed_loop(cf, u, /*tracking=*/false, ex.sim_t_final, 0.0);
    std::ostringstream os;
    os.precision(6);
    os << "final value " << series.final_value << ", settled "
       << (series.settled ? "yes" : "no");
    outcomes.push_back(check(ex.id + "/step-response", series.settled, os.str()));
  } catch (const Error& e) {
    outcomes.push_back(check(ex.id + "/step-response", false, e.what()));
  }
  return outcomes;
}

std::vector<CheckOutcome> run_search_mode(const ReferenceExample& ex,
                                          std::uint64_t seed) {
  std::vector<CheckOutcome> outcomes;
  DesignConfig cfg;
  cfg.tune.rng_seed = seed;
  if (!ex.initial_a.empty()) {
    cfg.initial_a = ex.initial_a;
  }
  try {
    const DesignResult result = design_pipeline(ex.plant, cfg);
    std::ostringstream os;
    os.precision(6);
    os << "m = " << vec_to_string(result.u_product.exponents())
       << ", sigma = " << result.verification.sigma;
    outcomes.push_back(
        check(ex.id + "/search", result.verification.passed, os.str()));
  } catch (const Error& e) {
    outcomes.push_back(check(ex.id + "/search", false, e.what()));
  }
  return outcomes;
}

}  // namespace rtistab
