#include "qmod/numeric.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

namespace qmod {

Rat rat_mod(const Rat& x, unsigned long m) {
  // x - m*floor(x/m)
  Rat q = x / Rat(m);
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  Rat r = x - Rat(m) * Rat(fl);
  r.canonicalize();
  return r;
}

Int rat_floor(const Rat& x) {
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return fl;
}

Real Real::of(double x, mpfr_prec_t prec) {
  Real r(prec);
  mpfr_set_d(r.v_, x, MPFR_RNDN);
  return r;
}

Real Real::of(long x, mpfr_prec_t prec) {
  Real r(prec);
  mpfr_set_si(r.v_, x, MPFR_RNDN);
  return r;
}

Real Real::of(const Int& z, mpfr_prec_t prec) {
  Real r(prec);
  mpfr_set_z(r.v_, z.get_mpz_t(), MPFR_RNDN);
  return r;
}

Real Real::of(const Rat& q, mpfr_prec_t prec, mpfr_rnd_t rnd) {
  Real r(prec);
  mpfr_set_q(r.v_, q.get_mpq_t(), rnd);
  return r;
}

Real Real::pi(mpfr_prec_t prec) {
  Real r(prec);
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

Real Real::pow2(long e) {
  Real r(kErrPrec);
  mpfr_set_si_2exp(r.v_, 1, e, MPFR_RNDN);
  return r;
}

Int Real::round_to_int() const {
  mpfr_t t;
  mpfr_init2(t, std::max(prec(), mpfr_prec_t(64)));
  mpfr_rint(t, v_, MPFR_RNDN);
  Int z;
  mpfr_get_z(z.get_mpz_t(), t, MPFR_RNDN);
  mpfr_clear(t);
  return z;
}

std::string Real::str(int digits) const {
  char fmt[32];
  std::snprintf(fmt, sizeof fmt, "%%.%dRe", digits);
  char* out = nullptr;
  mpfr_asprintf(&out, fmt, v_);
  std::string s(out);
  mpfr_free_str(out);
  return s;
}

#define QMOD_BINOP(name, call)                                          \
  Real name(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r) { \
    Real out(p);                                                        \
    call(out.raw(), a.raw(), b.raw(), r);                               \
    return out;                                                         \
  }
QMOD_BINOP(add, mpfr_add)
QMOD_BINOP(sub, mpfr_sub)
QMOD_BINOP(mul, mpfr_mul)
QMOD_BINOP(div, mpfr_div)
QMOD_BINOP(pow, mpfr_pow)
QMOD_BINOP(atan2, mpfr_atan2)
#undef QMOD_BINOP

#define QMOD_UNOP(name, call)                                 \
  Real name(const Real& a, mpfr_prec_t p, mpfr_rnd_t r) {     \
    Real out(p);                                              \
    call(out.raw(), a.raw(), r);                              \
    return out;                                               \
  }
QMOD_UNOP(sqrt, mpfr_sqrt)
QMOD_UNOP(exp, mpfr_exp)
QMOD_UNOP(log, mpfr_log)
QMOD_UNOP(sin, mpfr_sin)
QMOD_UNOP(cos, mpfr_cos)
QMOD_UNOP(sinh, mpfr_sinh)
QMOD_UNOP(cosh, mpfr_cosh)
QMOD_UNOP(gamma, mpfr_gamma)
QMOD_UNOP(zeta, mpfr_zeta)
#undef QMOD_UNOP

Real abs(const Real& a, mpfr_prec_t p, mpfr_rnd_t r) {
  Real out(p == 0 ? a.prec() : p);
  mpfr_abs(out.raw(), a.raw(), r);
  return out;
}

Real neg(const Real& a) {
  Real out(a.prec());
  mpfr_neg(out.raw(), a.raw(), MPFR_RNDN);
  return out;
}

Real mul_2si(const Real& a, long e) {
  Real out(a.prec());
  mpfr_mul_2si(out.raw(), a.raw(), e, MPFR_RNDN);
  return out;
}

int cmp(const Real& a, const Real& b) { return mpfr_cmp(a.raw(), b.raw()); }

static mpfr_prec_t pmax(const Real& a, const Real& b) {
  return std::max(a.prec(), b.prec());
}

Real operator+(const Real& a, const Real& b) { return add(a, b, pmax(a, b)); }
Real operator-(const Real& a, const Real& b) { return sub(a, b, pmax(a, b)); }
Real operator*(const Real& a, const Real& b) { return mul(a, b, pmax(a, b)); }
Real operator/(const Real& a, const Real& b) { return div(a, b, pmax(a, b)); }
Real operator-(const Real& a) { return neg(a); }

Real add_up(const Real& a, const Real& b) { return add(a, b, kErrPrec, MPFR_RNDU); }
Real mul_up(const Real& a, const Real& b) { return mul(a, b, kErrPrec, MPFR_RNDU); }
Real div_up(const Real& a, const Real& b) { return div(a, b, kErrPrec, MPFR_RNDU); }
Real sub_down(const Real& a, const Real& b) { return sub(a, b, kErrPrec, MPFR_RNDD); }
Real div_down(const Real& a, const Real& b) { return div(a, b, kErrPrec, MPFR_RNDD); }

Real ulp_bound(const Real& a) {
  if (a.is_zero()) return Real::of(0.0, kErrPrec);
  Real m = abs(a, kErrPrec, MPFR_RNDU);
  return mul_2si(m, 1 - long(a.prec()));
}

Cplx cadd(const Cplx& a, const Cplx& b, mpfr_prec_t p) {
  return {add(a.re, b.re, p), add(a.im, b.im, p)};
}

Cplx csub(const Cplx& a, const Cplx& b, mpfr_prec_t p) {
  return {sub(a.re, b.re, p), sub(a.im, b.im, p)};
}

Cplx cmul(const Cplx& a, const Cplx& b, mpfr_prec_t p) {
  Real re = sub(mul(a.re, b.re, p), mul(a.im, b.im, p), p);
  Real im = add(mul(a.re, b.im, p), mul(a.im, b.re, p), p);
  return {std::move(re), std::move(im)};
}

Cplx cdiv(const Cplx& a, const Cplx& b, mpfr_prec_t p) {
  Real n = add(mul(b.re, b.re, p), mul(b.im, b.im, p), p);
  Cplx conj{b.re, neg(b.im)};
  Cplx t = cmul(a, conj, p);
  return {div(t.re, n, p), div(t.im, n, p)};
}

Cplx cscale(const Cplx& a, const Real& s, mpfr_prec_t p) {
  return {mul(a.re, s, p), mul(a.im, s, p)};
}

Cplx cneg(const Cplx& a) { return {neg(a.re), neg(a.im)}; }

Real cabs(const Cplx& a, mpfr_prec_t p) {
  Real out(p);
  mpfr_hypot(out.raw(), a.re.raw(), a.im.raw(), MPFR_RNDN);
  return out;
}

Cplx cpow_real(const Cplx& a, const Real& s, mpfr_prec_t p) {
  Real r = cabs(a, p);
  Real th = atan2(a.im, a.re, p);
  Real lr = log(r, p);
  Real m = exp(mul(s, lr, p), p);
  Real ang = mul(s, th, p);
  return {mul(m, cos(ang, p), p), mul(m, sin(ang, p), p)};
}

Cplx cis(const Real& theta, mpfr_prec_t p) {
  Cplx out(p);
  mpfr_sin_cos(out.im.raw(), out.re.raw(), theta.raw(), MPFR_RNDN);
  return out;
}

Enc enc_of(const Rat& q, mpfr_prec_t p) {
  Real v = Real::of(q, p);
  return {v, ulp_bound(v)};
}

Enc enc_exact(Real v) { return Enc(std::move(v)); }

Enc enc_rounded(Real v, int k_ulps) {
  Real e = ulp_bound(v);
  e = mul(e, Real::of(long(k_ulps), kErrPrec), kErrPrec, MPFR_RNDU);
  return {std::move(v), std::move(e)};
}

Enc enc_add(const Enc& a, const Enc& b, mpfr_prec_t p) {
  Real v = add(a.v, b.v, p);
  Real e = add_up(a.e, b.e);
  e = add_up(e, ulp_bound(v));
  return {std::move(v), std::move(e)};
}

Enc enc_sub(const Enc& a, const Enc& b, mpfr_prec_t p) {
  Real v = sub(a.v, b.v, p);
  Real e = add_up(a.e, b.e);
  e = add_up(e, ulp_bound(v));
  return {std::move(v), std::move(e)};
}

Enc enc_mul(const Enc& a, const Enc& b, mpfr_prec_t p) {
  Real v = mul(a.v, b.v, p);
  // |da*b| + |a*db| + da*db + rounding
  Real e = mul_up(abs(a.v, kErrPrec, MPFR_RNDU), b.e);
  e = add_up(e, mul_up(abs(b.v, kErrPrec, MPFR_RNDU), a.e));
  e = add_up(e, mul_up(a.e, b.e));
  e = add_up(e, ulp_bound(v));
  return {std::move(v), std::move(e)};
}

CEnc cenc_add(const CEnc& a, const CEnc& b, mpfr_prec_t p) {
  CEnc out;
  out.v = cadd(a.v, b.v, p);
  out.er = add_up(add_up(a.er, b.er), ulp_bound(out.v.re));
  out.ei = add_up(add_up(a.ei, b.ei), ulp_bound(out.v.im));
  return out;
}

CEnc cenc_mul(const CEnc& a, const CEnc& b, mpfr_prec_t p) {
  CEnc out;
  out.v = cmul(a.v, b.v, p);
  Real A = abs(a.v.re, kErrPrec, MPFR_RNDU), B = abs(a.v.im, kErrPrec, MPFR_RNDU);
  Real C = abs(b.v.re, kErrPrec, MPFR_RNDU), D = abs(b.v.im, kErrPrec, MPFR_RNDU);
  // re = ac - bd, im = ad + bc; propagate box errors plus second order
  Real cross = add_up(mul_up(a.er, add_up(C, D)), mul_up(a.ei, add_up(C, D)));
  cross = add_up(cross, mul_up(add_up(a.er, a.ei), add_up(b.er, b.ei)));
  Real re_e = add_up(mul_up(A, b.er), mul_up(B, b.ei));
  Real im_e = add_up(mul_up(A, b.ei), mul_up(B, b.er));
  out.er = add_up(add_up(re_e, cross), mul_2si(ulp_bound(out.v.re), 2));
  out.ei = add_up(add_up(im_e, cross), mul_2si(ulp_bound(out.v.im), 2));
  return out;
}

CEnc cenc_scale(const CEnc& a, const Enc& s, mpfr_prec_t p) {
  CEnc out;
  out.v = cscale(a.v, s.v, p);
  Real S = abs(s.v, kErrPrec, MPFR_RNDU);
  out.er = add_up(mul_up(S, a.er), mul_up(s.e, add_up(abs(a.v.re, kErrPrec, MPFR_RNDU), a.er)));
  out.er = add_up(out.er, ulp_bound(out.v.re));
  out.ei = add_up(mul_up(S, a.ei), mul_up(s.e, add_up(abs(a.v.im, kErrPrec, MPFR_RNDU), a.ei)));
  out.ei = add_up(out.ei, ulp_bound(out.v.im));
  return out;
}

CEnc unit_phase(const Rat& half_turns, mpfr_prec_t p) {
  // reduce mod 2 exactly, then evaluate cos/sin of pi*h
  Rat h = rat_mod(half_turns, 2);
  Real hp = Real::of(h, p);  // <= 2, error <= 2^{1-p}
  Real theta = mul(Real::pi(p), hp, p);
  CEnc out;
  out.v = cis(theta, p);
  // |theta rounding| <= (pi + 2 + 4) 2^{1-p} < 16 * 2^{-p}; the Lipschitz
  // constant of sin/cos is 1 and their own rounding adds one more ulp
  Real e = mul_2si(Real::of(1.0, kErrPrec), 5 - long(p));
  out.er = e;
  out.ei = e;
  return out;
}

}  // namespace qmod
