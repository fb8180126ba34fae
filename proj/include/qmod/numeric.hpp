#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <stdexcept>
#include <string>
#include <utility>

namespace qmod {

using Int = mpz_class;
using Rat = mpq_class;

// Thrown when a requested certified error cannot be met within the
// precision escalation cap.
struct TargetUnreachable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an operation requiring a polar part is applied to a
// function that is finite at the cusps.
struct CuspFinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr mpfr_prec_t kPrecCap = mpfr_prec_t(1) << 20;
inline constexpr mpfr_prec_t kErrPrec = 64;  // precision of error bounds

// mod-m reduction of a rational into [0, m)
Rat rat_mod(const Rat& x, unsigned long m);

// floor(x) as Int
Int rat_floor(const Rat& x);

// Arbitrary-precision real scalar.  Each value carries its own working
// precision; binary operations round the result at the larger of the two
// operand precisions unless an explicit precision is given.
class Real {
 public:
  Real() { mpfr_init2(v_, kErrPrec); mpfr_set_zero(v_, 1); }
  explicit Real(mpfr_prec_t prec) {
    mpfr_init2(v_, clamp(prec));
    mpfr_set_zero(v_, 1);
  }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, kErrPrec);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  static Real of(double x, mpfr_prec_t prec = 64);
  static Real of(long x, mpfr_prec_t prec = 64);
  static Real of(const Int& z, mpfr_prec_t prec);
  static Real of(const Rat& q, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN);
  static Real pi(mpfr_prec_t prec);
  // 2^e
  static Real pow2(long e);

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  double d() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long si() const { return mpfr_get_si(v_, MPFR_RNDN); }

  // nearest integer
  Int round_to_int() const;

  // "%.<digits>Re" rendering (deterministic)
  std::string str(int digits = 17) const;

  static mpfr_prec_t clamp(mpfr_prec_t p) {
    if (p < MPFR_PREC_MIN) return kErrPrec;
    if (p > kPrecCap) return kPrecCap;
    return p;
  }

 private:
  mpfr_t v_;
};

// three-address helpers with explicit destination precision
Real add(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real sub(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real mul(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real div(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real sqrt(const Real& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real exp(const Real& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real log(const Real& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real pow(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real sin(const Real& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real cos(const Real& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real sinh(const Real& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real cosh(const Real& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real atan2(const Real& y, const Real& x, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real gamma(const Real& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real zeta(const Real& a, mpfr_prec_t p, mpfr_rnd_t r = MPFR_RNDN);
Real abs(const Real& a, mpfr_prec_t p = 0, mpfr_rnd_t r = MPFR_RNDN);
Real neg(const Real& a);
Real mul_2si(const Real& a, long e);

int cmp(const Real& a, const Real& b);
inline bool operator<(const Real& a, const Real& b) { return cmp(a, b) < 0; }
inline bool operator<=(const Real& a, const Real& b) { return cmp(a, b) <= 0; }
inline bool operator>(const Real& a, const Real& b) { return cmp(a, b) > 0; }
inline bool operator>=(const Real& a, const Real& b) { return cmp(a, b) >= 0; }

// convenience operators; destination precision = max of the operands
Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator-(const Real& a);

// directed helpers for bound arithmetic (result precision kErrPrec, round up)
Real add_up(const Real& a, const Real& b);
Real mul_up(const Real& a, const Real& b);
Real div_up(const Real& a, const Real& b);
Real sub_down(const Real& a, const Real& b);
Real div_down(const Real& a, const Real& b);

// |a| * 2^{1-prec(a)}: one-ulp style bound on the rounding of a
Real ulp_bound(const Real& a);

// Complex scalar on two Reals.
struct Cplx {
  Real re, im;

  Cplx() = default;
  explicit Cplx(mpfr_prec_t p) : re(p), im(p) {}
  Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  mpfr_prec_t prec() const { return std::max(re.prec(), im.prec()); }
};

Cplx cadd(const Cplx& a, const Cplx& b, mpfr_prec_t p);
Cplx csub(const Cplx& a, const Cplx& b, mpfr_prec_t p);
Cplx cmul(const Cplx& a, const Cplx& b, mpfr_prec_t p);
Cplx cdiv(const Cplx& a, const Cplx& b, mpfr_prec_t p);
Cplx cscale(const Cplx& a, const Real& s, mpfr_prec_t p);
Cplx cneg(const Cplx& a);
Real cabs(const Cplx& a, mpfr_prec_t p);
// principal power a^s for a off the closed negative real axis
Cplx cpow_real(const Cplx& a, const Real& s, mpfr_prec_t p);
// e^{i*theta}
Cplx cis(const Real& theta, mpfr_prec_t p);

// Real value with a certified absolute error bound: represents the
// interval [v - e, v + e].
struct Enc {
  Real v;
  Real e;  // >= 0, kErrPrec, maintained with upward rounding

  Enc() : v(), e() {}
  explicit Enc(Real value) : v(std::move(value)), e(Real::of(0.0, kErrPrec)) {}
  Enc(Real value, Real err) : v(std::move(value)), e(std::move(err)) {}

  Real upper() const { return add_up(abs(v), e); }  // bound on |x|
  Real hi() const { return add_up(v, e); }          // upper end of interval
  Real lo() const { return sub_down(v, e); }        // lower end
};

Enc enc_of(const Rat& q, mpfr_prec_t p);
Enc enc_exact(Real v);
Enc enc_add(const Enc& a, const Enc& b, mpfr_prec_t p);
Enc enc_sub(const Enc& a, const Enc& b, mpfr_prec_t p);
Enc enc_mul(const Enc& a, const Enc& b, mpfr_prec_t p);
// value computed by a correctly rounded mpfr call; error = k ulps
Enc enc_rounded(Real v, int k_ulps = 2);

// Complex value with per-component certified error bounds.
struct CEnc {
  Cplx v;
  Real er, ei;  // |Delta re| <= er, |Delta im| <= ei

  CEnc() = default;
  explicit CEnc(mpfr_prec_t p)
      : v(p), er(Real::of(0.0, kErrPrec)), ei(Real::of(0.0, kErrPrec)) {}
};

CEnc cenc_add(const CEnc& a, const CEnc& b, mpfr_prec_t p);
CEnc cenc_mul(const CEnc& a, const CEnc& b, mpfr_prec_t p);
CEnc cenc_scale(const CEnc& a, const Enc& s, mpfr_prec_t p);

// e^{i pi h} for an exact rational number h of half-turns.
// Component error <= 2^{-p+3}.
CEnc unit_phase(const Rat& half_turns, mpfr_prec_t p);

}  // namespace qmod
