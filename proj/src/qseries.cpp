#include "qmod/qseries.hpp"

#include <mutex>
#include <ostream>
#include <stdexcept>

namespace qmod::exactq {

QSeries one(long order) {
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  QSeries s;
  s.offset = 0;
  s.coeffs.assign(size_t(order), Int(0));
  s.coeffs[0] = 1;
  return s;
}

QSeries series_mul(const QSeries& a, const QSeries& b) {
  long T = std::min(a.order(), b.order());
  if (T < 1) throw std::invalid_argument("empty series");
  QSeries out;
  out.offset = a.offset + b.offset;
  out.coeffs.assign(size_t(T), Int(0));
  // iterate the sparser operand on the outside and skip zero terms
  const QSeries& s = [&]() -> const QSeries& {
    long nza = 0, nzb = 0;
    for (long i = 0; i < T; i++) {
      if (a.coeffs[size_t(i)] != 0) nza++;
      if (b.coeffs[size_t(i)] != 0) nzb++;
    }
    return nza <= nzb ? a : b;
  }();
  const QSeries& d = (&s == &a) ? b : a;
  for (long i = 0; i < T; i++) {
    const Int& ci = s.coeffs[size_t(i)];
    if (ci == 0) continue;
    long jmax = T - i;
    for (long j = 0; j < jmax; j++) {
      const Int& cj = d.coeffs[size_t(j)];
      if (cj == 0) continue;
      out.coeffs[size_t(i + j)] += ci * cj;
    }
  }
  return out;
}

QSeries series_pow(const QSeries& a, unsigned long e) {
  QSeries acc = one(a.order());
  if (e == 0) return acc;
  QSeries base = a;
  while (true) {
    if (e & 1) acc = series_mul(acc, base);
    e >>= 1;
    if (e == 0) break;
    base = series_mul(base, base);
  }
  return acc;
}

QSeries series_inverse(const QSeries& a) {
  if (a.order() < 1) throw std::invalid_argument("empty series");
  const Int& a0 = a.coeffs[0];
  if (a0 != 1 && a0 != -1)
    throw std::domain_error("series_inverse: leading coefficient is not a unit");
  long T = a.order();
  QSeries out;
  out.offset = -a.offset;
  out.coeffs.assign(size_t(T), Int(0));
  out.coeffs[0] = a0;  // 1/a0 = a0 for a0 = +-1
  for (long n = 1; n < T; n++) {
    Int s = 0;
    for (long j = 1; j <= n; j++) {
      const Int& aj = a.coeffs[size_t(j)];
      if (aj == 0) continue;
      s += aj * out.coeffs[size_t(n - j)];
    }
    out.coeffs[size_t(n)] = -a0 * s;
  }
  return out;
}

QSeries series_div(const QSeries& a, const QSeries& b) {
  return series_mul(a, series_inverse(b));
}

QSeries euler_product(long T) {
  if (T < 1) throw std::invalid_argument("T must be >= 1");
  QSeries s;
  s.offset = 0;
  s.coeffs.assign(size_t(T), Int(0));
  // pentagonal number theorem: sum_j (-1)^j q^{j(3j-1)/2}, j in Z
  for (long j = 0;; j++) {
    long e1 = j * (3 * j - 1) / 2;
    long e2 = j * (3 * j + 1) / 2;
    if (e1 >= T && e2 >= T) break;
    Int sgn = (j % 2 == 0) ? 1 : -1;
    if (e1 < T) s.coeffs[size_t(e1)] += sgn;
    if (j > 0 && e2 < T) s.coeffs[size_t(e2)] += sgn;
  }
  return s;
}

QSeries eta_quotient(long r, long T) {
  if (T < 1) throw std::invalid_argument("T must be >= 1");
  if (r == 0) {
    QSeries s = one(T);
    return s;
  }
  unsigned long ar = r < 0 ? (unsigned long)(-r) : (unsigned long)r;
  QSeries core = series_pow(euler_product(T), ar);
  if (r < 0) core = series_inverse(core);
  core.offset = Rat(r, 24);
  core.offset.canonicalize();
  return core;
}

Int partition_oracle(long n) {
  if (n < 0) throw std::invalid_argument("partition_oracle: n must be >= 0");
  static std::vector<Int> table{Int(1)};
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (long(table.size()) <= n) {
    long m = long(table.size());
    Int p = 0;
    for (long j = 1;; j++) {
      long g1 = j * (3 * j - 1) / 2;
      long g2 = j * (3 * j + 1) / 2;
      if (g1 > m && g2 > m) break;
      Int term = 0;
      if (g1 <= m) term += table[size_t(m - g1)];
      if (g2 <= m) term += table[size_t(m - g2)];
      if (j % 2 == 1)
        p += term;
      else
        p -= term;
    }
    table.push_back(p);
  }
  return table[size_t(n)];
}

static QSeries eisenstein(long T, long weight_coeff, long sigma_pow, bool plus) {
  QSeries s;
  s.offset = 0;
  s.coeffs.assign(size_t(T), Int(0));
  s.coeffs[0] = 1;
  // divisor-power sums by sieving
  std::vector<Int> sig(size_t(T), Int(0));
  for (long d = 1; d < T; d++) {
    Int dp = 1;
    for (long k = 0; k < sigma_pow; k++) dp *= d;
    for (long m = d; m < T; m += d) sig[size_t(m)] += dp;
  }
  for (long n = 1; n < T; n++) {
    Int t = Int(weight_coeff) * sig[size_t(n)];
    s.coeffs[size_t(n)] = plus ? t : -t;
  }
  return s;
}

QSeries eisenstein_e4(long T) { return eisenstein(T, 240, 3, true); }
QSeries eisenstein_e6(long T) { return eisenstein(T, 504, 5, false); }

QSeries j_expansion(long T) {
  if (T < 2) throw std::invalid_argument("j_expansion: T must be >= 2");
  QSeries e4 = eisenstein_e4(T);
  QSeries num = series_pow(e4, 3);
  QSeries delta = eta_quotient(24, T);
  QSeries j = series_div(num, delta);
  // offset: 0 - 1 = -1
  return j;
}

void write_series(std::ostream& os, const QSeries& s) {
  os << "offset " << s.offset.get_num() << "/" << s.offset.get_den() << "\n";
  for (long n = 0; n < s.order(); n++) {
    os << n << "\t" << s.coeffs[size_t(n)] << "\n";
  }
}

Cplx eval_truncated(const QSeries& s, const Cplx& q, mpfr_prec_t p) {
  Cplx acc(p);
  for (long n = s.order() - 1; n >= 0; n--) {
    acc = cmul(acc, q, p);
    const Int& c = s.coeffs[size_t(n)];
    if (c != 0) {
      acc.re = add(acc.re, Real::of(c, p), p);
    }
  }
  return acc;
}

Cplx eval_at_z(const QSeries& s, const Cplx& z, mpfr_prec_t p) {
  // q = e^{2 pi i z}; value = q^{offset} * (truncated series in q)
  Real two_pi = mul_2si(Real::pi(p), 1);
  // e^{2 pi i z} = e^{-2 pi Im z} (cos(2 pi Re z) + i sin(2 pi Re z))
  Real mag = exp(neg(mul(two_pi, z.im, p)), p);
  Real ang = mul(two_pi, z.re, p);
  Cplx q = cscale(cis(ang, p), mag, p);
  Cplx head = eval_truncated(s, q, p);
  // q^{offset}: magnitude e^{-2 pi off Im z}, angle 2 pi off Re z
  Real off = Real::of(s.offset, p);
  Real m0 = exp(neg(mul(mul(two_pi, off, p), z.im, p)), p);
  Real a0 = mul(mul(two_pi, off, p), z.re, p);
  Cplx qoff = cscale(cis(a0, p), m0, p);
  return cmul(head, qoff, p);
}

}  // namespace qmod::exactq
