#include "rtistab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rtistab/errors.hpp"

namespace rtistab {

namespace {

double vertex_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

}  // namespace

std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const SimplexOptions& opts,
    const SimplexTrace& trace) {
  const std::size_t n = x0.size();
  if (n == 0) {
    throw InvalidInput("empty start point");
  }
  const double f0 = f(x0);
  if (!std::isfinite(f0)) {
    throw InvalidInput("objective is not finite at the start point");
  }

  // fminsearch-style initial simplex: 5% displacement per coordinate,
  // a small absolute step where the coordinate is zero.
  std::vector<std::vector<double>> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  fs[0] = f0;
  for (std::size_t i = 0; i < n; ++i) {
    double& c = xs[i + 1][i];
    c = (c != 0.0) ? 1.05 * c : 0.00025;
    fs[i + 1] = f(xs[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&fs](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order[0];
    const std::size_t worst = order[n];
    const std::size_t second_worst = order[n - 1];

    if (trace) {
      trace(iter, fs[best]);
    }

    double diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      diameter = std::max(diameter, vertex_distance(xs[order[i]], xs[best]));
    }
    if (diameter < opts.diameter_tol) {
      break;
    }

    // Centroid of all but the worst vertex.
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) {
        centroid[k] += xs[i][k];
      }
    }
    for (double& c : centroid) {
      c /= static_cast<double>(n);
    }

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k) {
        p[k] = centroid[k] + t * (centroid[k] - xs[worst][k]);
      }
      return p;
    };

    const std::vector<double> reflected = blend(opts.reflection);
    const double fr = f(reflected);

    if (fr < fs[best]) {
      const std::vector<double> expanded = blend(opts.expansion);
      const double fe = f(expanded);
      if (fe < fr) {
        xs[worst] = expanded;
        fs[worst] = fe;
      } else {
        xs[worst] = reflected;
        fs[worst] = fr;
      }
    } else if (fr < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      const std::vector<double> contracted =
          blend(outside ? opts.contraction : -opts.contraction);
      const double fc = f(contracted);
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = contracted;
        fs[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k) {
            xs[i][k] = xs[best][k] + opts.shrink * (xs[i][k] - xs[best][k]);
          }
          fs[i] = f(xs[i]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (fs[i] < fs[best]) best = i;
  }
  return xs[best];
}

}  // namespace rtistab
