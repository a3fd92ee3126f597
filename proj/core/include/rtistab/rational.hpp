#pragma once

#include "rtistab/polynomial.hpp"

namespace rtistab {

// Ratio of real-coefficient polynomials. The denominator is never the zero
// polynomial. No cancellation happens implicitly; see rf_cancel.
class RationalTF {
public:
  RationalTF() : num_({1.0}), den_({1.0}) {}
  RationalTF(Polynomial num, Polynomial den);

  static RationalTF constant(double c) {
    return RationalTF(Polynomial::constant(c), Polynomial::constant(1.0));
  }
  static RationalTF one() { return constant(1.0); }

  [[nodiscard]] const Polynomial& num() const { return num_; }
  [[nodiscard]] const Polynomial& den() const { return den_; }

  // deg(den) - deg(num); >= 0 means proper, == 0 biproper.
  [[nodiscard]] int relative_degree() const {
    return den_.degree() - num_.degree();
  }
  [[nodiscard]] bool is_proper() const { return relative_degree() >= 0; }
  [[nodiscard]] bool is_biproper() const { return relative_degree() == 0; }

  [[nodiscard]] Complex eval(Complex s) const {
    return poly_eval(num_, s) / poly_eval(den_, s);
  }

  [[nodiscard]] RationalTF scaled(double k) const {
    return RationalTF(num_.scaled(k), den_);
  }
  [[nodiscard]] RationalTF inverse() const { return RationalTF(den_, num_); }

private:
  Polynomial num_;
  Polynomial den_;
};

// Common-denominator arithmetic; no cancellation is performed.
[[nodiscard]] RationalTF rf_add(const RationalTF& x, const RationalTF& y);
[[nodiscard]] RationalTF rf_sub(const RationalTF& x, const RationalTF& y);
[[nodiscard]] RationalTF rf_mul(const RationalTF& x, const RationalTF& y);

// Minimal realization: greedily cancels numerator roots against nearby
// denominator roots (nearest pair first, within tol*(1+|root|)) and rebuilds
// from the surviving roots with the original gain ratio. Never changes the
// value of the function away from the cancelled points. Constant/constant
// inputs are returned unchanged.
[[nodiscard]] RationalTF rf_cancel(const RationalTF& x, double tol = 1e-4);

// Coefficient of s^-1 in the large-s expansion of a biproper x with equal
// leading coefficients, i.e. b1 - c1 for monic-normalized numerator and
// denominator. Throws InvalidInput otherwise.
[[nodiscard]] double rf_inv_s_coefficient(const RationalTF& x);

}  // namespace rtistab
