#pragma once

#include <iosfwd>
#include <vector>

#include "qmod/numeric.hpp"

namespace qmod::exactq {

// Exact truncated q-expansion  sum_n coeffs[n] * q^{offset+n},
// 0 <= n < order().  Coefficients are exact integers; only the offset
// may be a non-integer rational.
struct QSeries {
  Rat offset;
  std::vector<Int> coeffs;

  long order() const { return long(coeffs.size()); }
  const Int& at(long n) const { return coeffs.at(size_t(n)); }
  Rat exponent(long n) const { return offset + Rat(n); }
};

QSeries one(long order);

// Cauchy product truncated at the smaller operand order.
QSeries series_mul(const QSeries& a, const QSeries& b);

// a^e for e >= 0 (binary powering, truncation preserved)
QSeries series_pow(const QSeries& a, unsigned long e);

// multiplicative inverse; requires coeffs[0] to be +-1
QSeries series_inverse(const QSeries& a);

QSeries series_div(const QSeries& a, const QSeries& b);

// q^{r/24} * prod_{n>=1} (1-q^n)^r, truncated at order T.
// Negative r is computed as the inverse of the positive power.
QSeries eta_quotient(long r, long T);

// Euler product prod (1-q^n) with offset 0 (pentagonal number theorem)
QSeries euler_product(long T);

// exact p(n) by the pentagonal-number recurrence
Int partition_oracle(long n);

// Eisenstein series E4, E6 (integer q-series, offset 0)
QSeries eisenstein_e4(long T);
QSeries eisenstein_e6(long T);

// j = E4^3 / Delta, offset -1
QSeries j_expansion(long T);

// line-oriented text form: "offset p/q" header, then "n<TAB>coeff" lines
void write_series(std::ostream& os, const QSeries& s);

// numeric value of the truncated series at q (Horner); no tail bound
Cplx eval_truncated(const QSeries& s, const Cplx& q, mpfr_prec_t p);

// numeric value of sum coeffs[n] e^{2 pi i (offset+n) z}
Cplx eval_at_z(const QSeries& s, const Cplx& z, mpfr_prec_t p);

}  // namespace qmod::exactq
