#include "rtistab/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rtistab {

namespace {

bool is_real(const Complex& z) { return z.imag() == 0.0; }

bool is_rhp(const Complex& z) { return z.real() >= kRhpThreshold; }

// Real non-negative zeros participate in the parity check; counted poles
// are strictly positive reals.
bool counts_as_pip_zero(const Complex& z) {
  return is_real(z) && z.real() >= kRhpThreshold;
}

bool counts_as_pip_pole(const Complex& z) {
  return is_real(z) && z.real() > 1e-9;
}

std::vector<Complex> expand_groups(const std::vector<RootGroup>& groups) {
  std::vector<Complex> out;
  for (const RootGroup& g : groups) {
    for (int i = 0; i < g.multiplicity; ++i) {
      out.push_back(g.value);
    }
  }
  return out;
}

}  // namespace

PipViolation::PipViolation(PipReport r)
    : Error([&r] {
        std::ostringstream os;
        os << "plant violates the parity interlacing property";
        if (r.witness) {
          os << ": " << r.witness_pole_count << " real positive pole(s) between zeros "
             << r.witness->first << " and " << r.witness->second;
        }
        return os.str();
      }()),
      report(std::move(r)) {}

std::vector<RootGroup> cluster_roots(const std::vector<Complex>& roots,
                                     double relative_radius) {
  std::vector<RootGroup> groups;
  std::vector<Complex> sums;  // running sums for cluster means
  for (const Complex& r : roots) {
    bool merged = false;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const Complex rep = groups[i].value;
      if (std::abs(r - rep) <= relative_radius * (1.0 + std::abs(rep))) {
        sums[i] += r;
        groups[i].multiplicity += 1;
        groups[i].value = sums[i] / static_cast<double>(groups[i].multiplicity);
        merged = true;
        break;
      }
    }
    if (!merged) {
      groups.push_back({r, 1});
      sums.push_back(r);
    }
  }
  // Snap near-real cluster means and keep deterministic order.
  for (RootGroup& g : groups) {
    if (std::abs(g.value.imag()) < 1e-9 * (1.0 + std::abs(g.value.real()))) {
      g.value = Complex(g.value.real(), 0.0);
    }
  }
  std::sort(groups.begin(), groups.end(), [](const RootGroup& a, const RootGroup& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return groups;
}

PoleZeroData analyze(const RationalTF& plant) {
  if (!plant.is_proper()) {
    throw InvalidInput("relative degree negative: plant must be proper");
  }
  PoleZeroData pz;
  pz.gain = plant.num().leading() / plant.den().leading();
  pz.relative_degree = plant.relative_degree();
  if (plant.num().degree() >= 1) {
    pz.zeros = poly_roots(plant.num());
  }
  if (plant.den().degree() >= 1) {
    pz.poles = poly_roots(plant.den());
  }

  std::vector<Complex> rhp_z, rhp_p;
  std::copy_if(pz.zeros.begin(), pz.zeros.end(), std::back_inserter(rhp_z), is_rhp);
  std::copy_if(pz.poles.begin(), pz.poles.end(), std::back_inserter(rhp_p), is_rhp);
  pz.rhp_zeros = cluster_roots(rhp_z);
  pz.rhp_poles = cluster_roots(rhp_p);
  return pz;
}

PipReport check_pip(const PoleZeroData& pz) {
  PipReport report;
  for (const Complex& z : pz.zeros) {
    if (counts_as_pip_zero(z)) {
      report.real_rhp_zero_list.push_back(z.real());
    }
  }
  std::sort(report.real_rhp_zero_list.begin(), report.real_rhp_zero_list.end());
  if (pz.relative_degree > 0) {
    report.real_rhp_zero_list.push_back(std::numeric_limits<double>::infinity());
  }

  report.satisfied = true;
  for (std::size_t i = 0; i + 1 < report.real_rhp_zero_list.size(); ++i) {
    const double lo = report.real_rhp_zero_list[i];
    const double hi = report.real_rhp_zero_list[i + 1];
    int count = 0;
    for (const Complex& p : pz.poles) {
      if (counts_as_pip_pole(p) && p.real() > lo && p.real() < hi) {
        ++count;
      }
    }
    report.pole_counts_between.push_back(count);
    if (count % 2 != 0 && report.satisfied) {
      report.satisfied = false;
      report.witness = std::make_pair(lo, hi);
      report.witness_pole_count = count;
    }
  }
  return report;
}

bool sign_rule_applies(const PoleZeroData& pz) {
  if (pz.relative_degree != 0) {
    return false;
  }
  double rightmost_real_zero = -std::numeric_limits<double>::infinity();
  bool has_real_rhp_zero = false;
  for (const Complex& z : pz.zeros) {
    if (counts_as_pip_zero(z)) {
      has_real_rhp_zero = true;
      rightmost_real_zero = std::max(rightmost_real_zero, z.real());
    }
  }
  if (!has_real_rhp_zero) {
    return false;
  }
  int poles_to_the_right = 0;
  for (const Complex& p : pz.poles) {
    if (is_real(p) && p.real() > rightmost_real_zero) {
      ++poles_to_the_right;
    }
  }
  return poles_to_the_right % 2 != 0;
}

CoprimeFactorization coprime_factorize(const RationalTF& plant, bool force) {
  const PoleZeroData pz = analyze(plant);
  const PipReport pip = check_pip(pz);
  if (!pip.satisfied && !force) {
    throw PipViolation(pip);
  }

  // Padding root well clear of the plant dynamics, reproducible.
  double max_re = 0.0;
  for (const Complex& r : pz.zeros) max_re = std::max(max_re, std::abs(r.real()));
  for (const Complex& r : pz.poles) max_re = std::max(max_re, std::abs(r.real()));
  const double pad_c = std::ceil(1.0 + max_re);

  // Partition clustered roots. Complex groups are kept as conjugate-pair
  // representatives so every rebuilt polynomial stays real.
  const std::vector<RootGroup> zero_groups_all = cluster_roots(pz.zeros);
  const std::vector<RootGroup> pole_groups_all = cluster_roots(pz.poles);

  std::vector<Complex> z_rhp, z_lhp_real, pd_rhp, pd_lhp;
  std::vector<Complex> z_lhp_pairs;  // one member each; mate added on use
  std::vector<RootGroup> rep_groups;
  for (const RootGroup& g : zero_groups_all) {
    const bool complex_pair = g.value.imag() != 0.0;
    if (complex_pair && g.value.imag() < 0.0) {
      continue;  // conjugate mate of an already-seen group
    }
    for (int i = 0; i < g.multiplicity; ++i) {
      if (is_rhp(g.value)) {
        z_rhp.push_back(g.value);
        if (complex_pair) z_rhp.push_back(std::conj(g.value));
      } else if (complex_pair) {
        z_lhp_pairs.push_back(g.value);
      } else {
        z_lhp_real.push_back(g.value);
      }
    }
    if (is_rhp(g.value)) {
      rep_groups.push_back(g);
    }
  }
  for (const RootGroup& g : pole_groups_all) {
    for (int i = 0; i < g.multiplicity; ++i) {
      if (is_rhp(g.value)) {
        pd_rhp.push_back(g.value);
      } else {
        pd_lhp.push_back(g.value);
      }
    }
  }

  // D's denominator takes plant LHP zeros (real ones first, whole conjugate
  // pairs while they fit), topped up with the padding root. Leftover LHP
  // zeros stay in N's numerator.
  const std::size_t p_r = pd_rhp.size();
  std::vector<Complex> d_den_roots, n_extra_zeros;
  for (const Complex& r : z_lhp_real) {
    if (d_den_roots.size() < p_r) {
      d_den_roots.push_back(r);
    } else {
      n_extra_zeros.push_back(r);
    }
  }
  for (const Complex& z : z_lhp_pairs) {
    if (d_den_roots.size() + 2 <= p_r) {
      d_den_roots.push_back(z);
      d_den_roots.push_back(std::conj(z));
    } else {
      n_extra_zeros.push_back(z);
      n_extra_zeros.push_back(std::conj(z));
    }
  }
  const std::size_t pad_count = p_r - d_den_roots.size();
  for (std::size_t i = 0; i < pad_count; ++i) {
    d_den_roots.emplace_back(-pad_c, 0.0);
  }

  const bool flip = sign_rule_applies(pz);
  const double sgn = flip ? -1.0 : 1.0;

  CoprimeFactorization cf;
  cf.D = RationalTF(poly_from_roots(pd_rhp, sgn), poly_from_roots(d_den_roots, 1.0));

  std::vector<Complex> n_num_roots = z_rhp;
  n_num_roots.insert(n_num_roots.end(), n_extra_zeros.begin(), n_extra_zeros.end());
  std::vector<Complex> n_den_roots = pd_lhp;
  const int n_pad = static_cast<int>(n_num_roots.size()) + pz.relative_degree -
                    static_cast<int>(pd_lhp.size());
  for (int i = 0; i < n_pad; ++i) {
    n_den_roots.emplace_back(-pad_c, 0.0);
  }
  cf.N = RationalTF(poly_from_roots(n_num_roots, sgn * pz.gain),
                    poly_from_roots(n_den_roots, 1.0));

  cf.sign_flipped = flip;
  cf.relative_degree = pz.relative_degree;
  cf.zero_groups = rep_groups;
  cf.q = 0;
  for (const RootGroup& g : rep_groups) {
    cf.q += g.multiplicity * (g.value.imag() != 0.0 ? 2 : 1);
  }
  return cf;
}

CoprimeFactorization coprime_from_parts(const RationalTF& N, const RationalTF& D) {
  if (!N.is_proper() || !D.is_biproper()) {
    throw InvalidInput("coprime factorization needs proper N and biproper D");
  }
  CoprimeFactorization cf;
  cf.N = N;
  cf.D = D;
  cf.relative_degree = N.relative_degree();
  cf.sign_flipped = (D.num().leading() / D.den().leading()) < 0.0;
  cf.q = 0;
  if (N.num().degree() >= 1) {
    for (const RootGroup& g : cluster_roots(poly_roots(N.num()))) {
      if (!is_rhp(g.value) || g.value.imag() < 0.0) {
        continue;
      }
      cf.zero_groups.push_back(g);
      cf.q += g.multiplicity * (g.value.imag() != 0.0 ? 2 : 1);
    }
  }
  return cf;
}

}  // namespace rtistab
