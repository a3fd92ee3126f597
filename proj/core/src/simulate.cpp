#include "rtistab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtistab/errors.hpp"

namespace rtistab {

namespace {

struct Section {
  int order = 0;
  std::vector<double> denrev;  // [d_n, ..., d_1] of the monic denominator
  std::vector<double> crev;    // strictly-proper numerator, lowest power first
  double d = 0.0;              // feedthrough
};

Section make_section(const Polynomial& num, const Polynomial& den_monic) {
  Section sec;
  sec.order = den_monic.degree();
  const std::vector<double>& dc = den_monic.coeffs();
  sec.denrev.resize(static_cast<std::size_t>(sec.order));
  for (int i = 0; i < sec.order; ++i) {
    sec.denrev[static_cast<std::size_t>(i)] = dc[static_cast<std::size_t>(sec.order - i)];
  }

  std::vector<double> nc(static_cast<std::size_t>(sec.order) + 1, 0.0);
  const std::vector<double>& src = num.coeffs();
  std::copy(src.begin(), src.end(), nc.end() - static_cast<std::ptrdiff_t>(src.size()));
  sec.d = nc[0];
  sec.crev.resize(static_cast<std::size_t>(sec.order));
  for (int i = 0; i < sec.order; ++i) {
    // numstrict = num - d * den, stored lowest power first
    sec.crev[static_cast<std::size_t>(i)] =
        nc[static_cast<std::size_t>(sec.order - i)] -
        sec.d * dc[static_cast<std::size_t>(sec.order - i)];
  }
  return sec;
}

struct Chain {
  std::vector<Section> sections;
  double gain = 1.0;
  int state_dim = 0;
};

double chain_output(const Chain& chain, const double* x, double u) {
  for (const Section& s : chain.sections) {
    double y = s.d * u;
    for (int i = 0; i < s.order; ++i) {
      y += s.crev[static_cast<std::size_t>(i)] * x[i];
    }
    x += s.order;
    u = y;
  }
  return chain.gain * u;
}

void chain_deriv(const Chain& chain, const double* x, double* xdot, double u) {
  for (const Section& s : chain.sections) {
    double y = s.d * u;
    for (int i = 0; i < s.order; ++i) {
      y += s.crev[static_cast<std::size_t>(i)] * x[i];
    }
    for (int i = 0; i + 1 < s.order; ++i) {
      xdot[i] = x[i + 1];
    }
    double last = u;
    for (int i = 0; i < s.order; ++i) {
      last -= s.denrev[static_cast<std::size_t>(i)] * x[i];
    }
    if (s.order > 0) {
      xdot[s.order - 1] = last;
    }
    x += s.order;
    xdot += s.order;
    u = y;
  }
}

StepSeries integrate(const Chain& chain, double final_value, double t_final,
                     double dt) {
  if (dt <= 0.0) {
    throw InvalidInput("dt must be positive");
  }
  if (t_final < 100.0 * dt) {
    throw InvalidInput("t_final must be at least 100*dt");
  }

  const int n = chain.state_dim;
  const std::size_t steps = static_cast<std::size_t>(std::llround(t_final / dt));
  StepSeries out;
  out.t.reserve(steps + 1);
  out.y.reserve(steps + 1);
  out.final_value = final_value;

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<double> k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size()),
      tmp(x.size());

  out.t.push_back(0.0);
  out.y.push_back(chain_output(chain, x.data(), 1.0));
  for (std::size_t step = 1; step <= steps; ++step) {
    chain_deriv(chain, x.data(), k1.data(), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    chain_deriv(chain, tmp.data(), k2.data(), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    chain_deriv(chain, tmp.data(), k3.data(), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + dt * k3[i];
    chain_deriv(chain, tmp.data(), k4.data(), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out.t.push_back(static_cast<double>(step) * dt);
    out.y.push_back(chain_output(chain, x.data(), 1.0));
  }

  const double band = 0.01 * std::max(1.0, std::abs(out.final_value));
  out.settled = true;
  const std::size_t tail_start = out.y.size() - std::max<std::size_t>(out.y.size() / 10, 1);
  for (std::size_t i = tail_start; i < out.y.size(); ++i) {
    if (std::abs(out.y[i] - out.final_value) > band) {
      out.settled = false;
      break;
    }
  }

  const double fvt_err = std::abs(out.y.back() - out.final_value);
  if (fvt_err > 0.02 * std::max(1.0, std::abs(out.final_value))) {
    throw NumericsError(
        "step response end value misses the final-value theorem by more than 2%; "
        "increase t_final or check the model");
  }
  return out;
}

void check_poles_and_dt(const std::vector<Complex>& poles, double dt) {
  double max_abs = 0.0;
  for (const Complex& p : poles) {
    if (p.real() >= 0.0) {
      throw InvalidInput("cannot simulate an unstable transfer function");
    }
    max_abs = std::max(max_abs, std::abs(p));
  }
  if (max_abs > 0.0 && dt > 0.1 / max_abs) {
    throw InvalidInput("dt too coarse for the fastest pole (need dt <= 0.1/max|pole|)");
  }
}

// Greedy nearest-assignment of zeros to denominator sections, classic
// series-of-sections pairing.
Chain build_chain_from_roots(std::vector<Complex> zeros, std::vector<Complex> poles,
                             double gain) {
  detail::GroupedRoots zg = detail::group_conjugate_roots(zeros, RootTolerances{});
  detail::GroupedRoots pg = detail::group_conjugate_roots(poles, RootTolerances{});

  struct DenSection {
    Polynomial den;
    Complex rep;
    bool quad;
  };
  std::vector<DenSection> dens;
  std::sort(pg.real_roots.begin(), pg.real_roots.end());
  std::sort(pg.pair_reps.begin(), pg.pair_reps.end(), [](Complex a, Complex b) {
    return std::abs(a) < std::abs(b);
  });
  for (const Complex& z : pg.pair_reps) {
    dens.push_back({Polynomial({1.0, -2.0 * z.real(), std::norm(z)}), z, true});
  }
  for (std::size_t i = 0; i + 1 < pg.real_roots.size(); i += 2) {
    const double r1 = pg.real_roots[i];
    const double r2 = pg.real_roots[i + 1];
    dens.push_back({Polynomial({1.0, -(r1 + r2), r1 * r2}),
                    Complex(0.5 * (r1 + r2), 0.0), true});
  }
  if (pg.real_roots.size() % 2 == 1) {
    const double r = pg.real_roots.back();
    dens.push_back({Polynomial({1.0, -r}), Complex(r, 0.0), false});
  }

  Chain chain;
  chain.gain = gain;
  for (const DenSection& ds : dens) {
    Polynomial num({1.0});
    int capacity = ds.quad ? 2 : 1;
    if (ds.quad && !zg.pair_reps.empty()) {
      // nearest zero pair
      std::size_t bi = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < zg.pair_reps.size(); ++i) {
        const double d = std::abs(zg.pair_reps[i] - ds.rep);
        if (d < best) {
          best = d;
          bi = i;
        }
      }
      const Complex z = zg.pair_reps[bi];
      num = Polynomial({1.0, -2.0 * z.real(), std::norm(z)});
      zg.pair_reps.erase(zg.pair_reps.begin() + static_cast<std::ptrdiff_t>(bi));
      capacity = 0;
    }
    while (capacity > 0 && !zg.real_roots.empty()) {
      std::size_t bi = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < zg.real_roots.size(); ++i) {
        const double d = std::abs(Complex(zg.real_roots[i], 0.0) - ds.rep);
        if (d < best) {
          best = d;
          bi = i;
        }
      }
      num = num * Polynomial({1.0, -zg.real_roots[bi]});
      zg.real_roots.erase(zg.real_roots.begin() + static_cast<std::ptrdiff_t>(bi));
      --capacity;
    }
    chain.sections.push_back(make_section(num, ds.den));
    chain.state_dim += ds.den.degree();
  }
  if (!zg.real_roots.empty() || !zg.pair_reps.empty()) {
    throw InvalidInput("more zeros than poles: improper model");
  }
  return chain;
}

}  // namespace

TimeGrid default_time_grid(const std::vector<Complex>& poles) {
  TimeGrid grid;
  double max_abs = 0.0;
  double slowest = std::numeric_limits<double>::infinity();
  for (const Complex& p : poles) {
    max_abs = std::max(max_abs, std::abs(p));
    slowest = std::min(slowest, std::abs(p.real()));
  }
  if (max_abs > 0.0) {
    grid.dt = std::min(1e-3, 0.1 / max_abs);
  }
  if (std::isfinite(slowest) && slowest > 0.0) {
    grid.t_final = std::clamp(10.0 / slowest, 1.0, 1000.0);
  } else {
    grid.t_final = 1.0;
  }
  grid.t_final = std::max(grid.t_final, 100.0 * grid.dt);
  return grid;
}

StepSeries step_response(const RationalTF& tf, double t_final, double dt) {
  if (!tf.is_proper()) {
    throw InvalidInput("cannot simulate an improper transfer function");
  }
  const int n = tf.den().degree();
  const double final_value =
      poly_eval(tf.num(), 0.0).real() / poly_eval(tf.den(), 0.0).real();

  if (n == 0) {
    // Pure gain: constant output from t = 0+.
    Chain chain;
    chain.gain = final_value;
    chain.sections.push_back(Section{0, {}, {}, 1.0});
    return integrate(chain, final_value, t_final, dt);
  }

  const std::vector<Complex> poles = poly_roots(tf.den());
  check_poles_and_dt(poles, dt);

  if (n <= 12) {
    // Single controllable-canonical realization.
    Chain chain;
    chain.gain = 1.0 / tf.den().leading();
    chain.sections.push_back(make_section(tf.num(), tf.den().monic()));
    chain.state_dim = n;
    return integrate(chain, final_value, t_final, dt);
  }

  std::vector<Complex> zeros;
  if (tf.num().degree() >= 1) {
    zeros = poly_roots(tf.num());
  }
  const double gain = tf.num().leading() / tf.den().leading();
  Chain chain = build_chain_from_roots(zeros, poles, gain);
  return integrate(chain, final_value, t_final, dt);
}

StepSeries step_response_zpk(const ZpkModel& model, double t_final, double dt) {
  check_poles_and_dt(model.poles, dt);
  Complex fv(model.gain, 0.0);
  for (const Complex& z : model.zeros) fv *= -z;
  for (const Complex& p : model.poles) fv /= -p;
  Chain chain = build_chain_from_roots(model.zeros, model.poles, model.gain);
  return integrate(chain, fv.real(), t_final, dt);
}

ZpkModel disturbance_loop_zpk(const CoprimeFactorization& cf, const UProduct& u) {
  ZpkModel model;  // N/U
  if (cf.N.num().degree() >= 1) {
    model.zeros = poly_roots(cf.N.num());
  }
  if (cf.N.den().degree() >= 1) {
    model.poles = poly_roots(cf.N.den());
  }
  model.gain = cf.N.num().leading() / cf.N.den().leading();
  if (u.premultiplier) {
    model.zeros.emplace_back(-u.premultiplier->M, 0.0);
    model.poles.emplace_back(-u.premultiplier->shift, 0.0);
  }
  for (const FactorPair& f : u.factors) {
    const long long m = std::llround(f.m);
    const double zero_at = m > 0 ? f.a_den : f.a_num;  // roots of 1/U factor
    const double pole_at = m > 0 ? f.a_num : f.a_den;
    for (long long i = 0; i < std::llabs(m); ++i) {
      model.zeros.emplace_back(-zero_at, 0.0);
      model.poles.emplace_back(-pole_at, 0.0);
    }
  }
  return model;
}

namespace {

// With an automatic horizon, repeated slow poles or large residues can
// leave the default 10/|sigma_slow| window short of the final value; extend
// it geometrically up to the 1000 s cap before giving up.
StepSeries integrate_with_auto_horizon(const ZpkModel& model, double t_final,
                                       double dt) {
  const bool auto_horizon = t_final <= 0.0;
  if (t_final <= 0.0 || dt <= 0.0) {
    const TimeGrid grid = default_time_grid(model.poles);
    if (t_final <= 0.0) t_final = grid.t_final;
    if (dt <= 0.0) dt = grid.dt;
  }
  for (;;) {
    try {
      return step_response_zpk(model, t_final, dt);
    } catch (const NumericsError&) {
      if (!auto_horizon || t_final >= 1000.0) {
        throw;
      }
      t_final = std::min(1000.0, 4.0 * t_final);
    }
  }
}

}  // namespace

StepSeries simulate_closed_loop(const CoprimeFactorization& cf, const UProduct& u,
                                bool tracking, double t_final, double dt) {
  if (!tracking) {
    const ZpkModel model = disturbance_loop_zpk(cf, u);
    return integrate_with_auto_horizon(model, t_final, dt);
  }

  // Tracking map P C/(1 + P C) = 1 - D/U: simulate D/U and subtract from
  // the unit step.
  ZpkModel du;
  if (cf.D.num().degree() >= 1) du.zeros = poly_roots(cf.D.num());
  if (cf.D.den().degree() >= 1) du.poles = poly_roots(cf.D.den());
  du.gain = cf.D.num().leading() / cf.D.den().leading();
  if (u.premultiplier) {
    du.zeros.emplace_back(-u.premultiplier->M, 0.0);
    du.poles.emplace_back(-u.premultiplier->shift, 0.0);
  }
  for (const FactorPair& f : u.factors) {
    const long long m = std::llround(f.m);
    const double zero_at = m > 0 ? f.a_den : f.a_num;
    const double pole_at = m > 0 ? f.a_num : f.a_den;
    for (long long i = 0; i < std::llabs(m); ++i) {
      du.zeros.emplace_back(-zero_at, 0.0);
      du.poles.emplace_back(-pole_at, 0.0);
    }
  }
  // D's zeros are the plant's RHP poles: D/U has RHP *zeros*, which is fine
  // to simulate; only the poles must be stable.
  StepSeries series = integrate_with_auto_horizon(du, t_final, dt);
  for (double& v : series.y) {
    v = 1.0 - v;
  }
  series.final_value = 1.0 - series.final_value;
  return series;
}

}  // namespace rtistab
