#pragma once

// shared helpers for the unit and acceptance suites: independent oracles
// and numeric utilities kept deliberately separate from the library code

#include <numeric>
#include <random>

#include "qmod/multiplier.hpp"

namespace qmod::testutil {

using multiplier::Mat;

// independent oracle: s(d, c) by the defining sawtooth sum
inline Rat sawtooth(const Rat& x) {
  if (x.get_den() == 1) return Rat(0);
  Rat f = x - Rat(rat_floor(x));
  Rat r = f - Rat(1, 2);
  r.canonicalize();
  return r;
}

inline Rat dedekind_direct(long d, long c) {
  Rat s = 0;
  for (long j = 1; j < c; j++) {
    Rat a(j, c), b(j * d, c);
    a.canonicalize();
    b.canonicalize();
    s += sawtooth(a) * sawtooth(b);
  }
  s.canonicalize();
  return s;
}

inline Cplx cexp(const Cplx& w, mpfr_prec_t p) {
  Real m = exp(w.re, p);
  return cscale(cis(w.im, p), m, p);
}

// eta(z) by the sparse pentagonal series with adaptive truncation
inline Cplx eta_eval(const Cplx& z, mpfr_prec_t p) {
  Real two_pi = mul_2si(Real::pi(p), 1);
  Cplx w{neg(mul(two_pi, z.im, p)), mul(two_pi, z.re, p)};  // log q
  double decay = 2.0 * M_PI * z.im.d();
  long need = long((double(p) * 0.70 + 24.0) / decay) + 8;
  long jmax = long(std::sqrt(2.0 * double(need) / 3.0)) + 2;
  Cplx acc(p);
  acc.re = Real::of(1L, p);
  for (long j = 1; j <= jmax; j++) {
    long g1 = j * (3 * j - 1) / 2, g2 = j * (3 * j + 1) / 2;
    Cplx t1 = cexp(cscale(w, Real::of(g1, p), p), p);
    Cplx t2 = cexp(cscale(w, Real::of(g2, p), p), p);
    Cplx s = cadd(t1, t2, p);
    acc = (j % 2 == 1) ? csub(acc, s, p) : cadd(acc, s, p);
  }
  Cplx off = cexp(cscale(w, Real::of(Rat(1, 24), p), p), p);
  return cmul(acc, off, p);
}

inline Cplx cpow_int(const Cplx& a, long e, mpfr_prec_t p) {
  if (e < 0) {
    Cplx one(p);
    one.re = Real::of(1L, p);
    return cdiv(one, cpow_int(a, -e, p), p);
  }
  Cplx acc(p);
  acc.re = Real::of(1L, p);
  Cplx base = a;
  while (e > 0) {
    if (e & 1) acc = cmul(acc, base, p);
    base = cmul(base, base, p);
    e >>= 1;
  }
  return acc;
}

inline Cplx moebius(const Mat& g, const Cplx& z, mpfr_prec_t p) {
  Real ar = Real::of(g.a, p), br = Real::of(g.b, p);
  Real cr = Real::of(g.c, p), dr = Real::of(g.d, p);
  Cplx num{add(mul(ar, z.re, p), br, p), mul(ar, z.im, p)};
  Cplx den{add(mul(cr, z.re, p), dr, p), mul(cr, z.im, p)};
  return cdiv(num, den, p);
}

inline Mat random_gamma(std::mt19937_64& rng, long cmax) {
  std::uniform_int_distribution<long> cd(1, cmax);
  for (;;) {
    long c = cd(rng);
    std::uniform_int_distribution<long> dd(0, 5 * c - 1);
    long d = dd(rng);
    Int g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), Int(d).get_mpz_t(),
               Int(c).get_mpz_t());
    if (g != 1) continue;
    Mat m{s, -t, Int(c), Int(d)};
    std::uniform_int_distribution<long> sh(-2, 2);
    long u = sh(rng);
    m.a += u * m.c;
    m.b += u * m.d;
    return m;
  }
}

inline double cabs_d(const Cplx& x) { return cabs(x, 64).d(); }

}  // namespace qmod::testutil
