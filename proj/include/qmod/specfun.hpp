#pragma once

#include "qmod/numeric.hpp"

namespace qmod::specfun {

// Result of a certified series evaluation of L_nu(t) = sum t^n/(n! Gamma(n+nu+1)).
struct LEvalResult {
  Real value;
  Real abs_error;   // certified: |value - L_nu(t)| <= abs_error
  long terms_used = 0;

  Enc enc() const { return Enc(value, abs_error); }
  Real upper() const { return add_up(value, abs_error); }
  Real lower() const { return sub_down(value, abs_error); }
};

// L_nu(t) for t >= 0 with |value - L_nu(t)| <= abs_error <= target_abs_err.
// The series is summed directly; the truncation tail is bounded
// geometrically once the term ratio t/((n+1)(n+nu+1)) drops below 1/2,
// and rounding error is accounted for explicitly.  Working precision
// escalates (x2, capped) until the target is met.
// t may carry an uncertainty t_err; that requires nu >= 1/2 (then
// L_{nu+1} <= L_nu bounds the derivative).
LEvalResult eval_L(const Rat& nu, const Real& t, const Real& target_abs_err);
LEvalResult eval_L(const Rat& nu, const Real& t, const Real& t_err,
                   const Real& target_abs_err);
LEvalResult eval_L(const Rat& nu, double t, double target_abs_err);

// Majorant variant with |Gamma| in the denominators; >= |L_nu| pointwise
// on t >= 0 and increasing in t.
LEvalResult eval_L_tilde(const Rat& nu, const Real& t, const Real& target_abs_err);
LEvalResult eval_L_tilde(const Rat& nu, double t, double target_abs_err);

// Leading asymptotic t^{-(2nu+1)/4} e^{2 sqrt t} / sqrt(4 pi); diagnostic
// only, carries no error bound.
Real asymptotic_L(const Rat& nu, const Real& t, mpfr_prec_t prec = 128);

// Smallest-found t0 such that L_nu(t*alpha')/L_nu(t*alpha) < target for
// all t >= t0.  Requires 0 < alpha' < alpha, nu >= 0 (so the ratio is
// non-increasing and tends to 0) and 0 < target < 1.  The returned t0 is
// certified: the ratio's rigorous upper bound at t0 is below target.
struct RatioThresholdResult {
  Real t0;
  Real ratio_upper;  // certified upper bound of the ratio at t0
  Real target;
};
RatioThresholdResult ratio_threshold(const Rat& nu, const Real& alpha,
                                     const Real& alpha_prime, const Real& target);

// certified ratio upper/lower bound L_nu(t*alpha')/L_nu(t*alpha)
std::pair<Real, Real> ratio_bounds(const Rat& nu, const Real& alpha,
                                   const Real& alpha_prime, const Real& t);

// Riemann zeta at rational s > 1 and Gamma at rational s (not a
// non-positive integer); correctly rounded at the requested precision.
Real zeta_value(const Rat& s, mpfr_prec_t prec);
Real gamma_value(const Rat& s, mpfr_prec_t prec);

// true iff s is a pole of Gamma (integer <= 0)
bool gamma_pole(const Rat& s);

}  // namespace qmod::specfun
