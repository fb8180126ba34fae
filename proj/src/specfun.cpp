#include "qmod/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace qmod::specfun {

bool gamma_pole(const Rat& s) {
  if (s > 0) return false;
  return s.get_den() == 1;
}

Real gamma_value(const Rat& s, mpfr_prec_t prec) {
  if (gamma_pole(s)) throw std::invalid_argument("gamma_value: pole");
  return gamma(Real::of(s, prec), prec);
}

Real zeta_value(const Rat& s, mpfr_prec_t prec) {
  if (s <= 1) throw std::invalid_argument("zeta_value: need s > 1");
  return zeta(Real::of(s, prec), prec);
}

namespace {

// 1/Gamma(arg) (or 1/|Gamma(arg)|), with the exact zero at the poles
Real inv_gamma(const Rat& arg, mpfr_prec_t p, bool absolute) {
  if (gamma_pole(arg)) return Real::of(0.0, p);
  Real g = gamma(Real::of(arg, p), p);
  if (absolute) g = abs(g);
  return div(Real::of(1L, p), g, p);
}

struct CoreResult {
  Real sum, abs_error;
  long terms;
};

// shared series loop for L and the |Gamma| majorant
CoreResult eval_core(const Rat& nu, const Real& t_mid, const Real& t_err,
                     const Real& target, bool abs_gamma) {
  if (!(t_mid.sign() >= 0) || !t_mid.is_finite())
    throw std::invalid_argument("eval_L: t must be finite and >= 0");
  if (!(target.sign() > 0)) throw std::invalid_argument("eval_L: target must be > 0");
  if (t_err.sign() > 0 && nu < Rat(1, 2))
    throw std::invalid_argument("eval_L: t uncertainty needs nu >= 1/2");
  if (t_err > Real::of(0.5, kErrPrec))
    throw std::invalid_argument("eval_L: t uncertainty too large");

  // first index where n + nu + 1 >= 2 (recurrence regime; all Gamma
  // arguments positive from here on)
  Rat thr = Rat(1) - nu;
  Int ns_z;
  mpz_cdiv_q(ns_z.get_mpz_t(), thr.get_num().get_mpz_t(), thr.get_den().get_mpz_t());
  long n_switch = std::max(0L, long(mpz_get_si(ns_z.get_mpz_t())));

  double td = t_mid.d();
  double tb = target.d();
  long mag_bits = long(std::ceil(2.0 * std::sqrt(std::max(td, 0.0)) * 1.4427)) + 8;
  long tgt_bits = (tb > 0 && std::isfinite(tb)) ? std::max(0L, long(std::ceil(-std::log2(tb)))) : 64;
  mpfr_prec_t prec = Real::clamp(std::max<mpfr_prec_t>(96, mag_bits + tgt_bits + 64));

  Real quarter_target = mul(target, Real::of(0.25, kErrPrec), kErrPrec, MPFR_RNDD);

  for (;; prec = Real::clamp(prec * 2)) {
    const Real& t = t_mid;
    Real nu_r = Real::of(nu, prec);
    Real sum(prec), abs_sum(prec);
    Real term(prec);
    long n = 0;
    long terms = 0;
    Real trunc = Real::of(0.0, kErrPrec);
    bool ok = false;

    auto direct_term = [&](long idx) {
      // t^idx / idx! * 1/Gamma(idx+nu+1)
      Real tp(prec);
      mpfr_pow_ui(tp.raw(), t.raw(), (unsigned long)idx, MPFR_RNDN);
      Real fact(prec);
      mpfr_fac_ui(fact.raw(), (unsigned long)idx, MPFR_RNDN);
      Rat arg = Rat(idx) + nu + 1;
      Real ig = inv_gamma(arg, prec, abs_gamma);
      return mul(div(tp, fact, prec), ig, prec);
    };

    // head: direct evaluation below the recurrence regime
    for (n = 0; n < n_switch; n++) {
      term = direct_term(n);
      sum = add(sum, term, prec);
      abs_sum = add(abs_sum, abs(term), prec);
      terms++;
    }
    // recurrence regime
    term = direct_term(n_switch);
    n = n_switch;
    const long kMaxTerms = 40'000'000;
    while (true) {
      sum = add(sum, term, prec);
      abs_sum = add(abs_sum, abs(term), prec);
      terms++;
      // next term and the geometric stop test
      Real den = mul(Real::of(n + 1, prec), add(Real::of(n + 1, prec), nu_r, prec), prec);
      Real f = div(t, den, prec);
      Real next = mul(term, f, prec);
      if (f <= Real::of(0.49, kErrPrec)) {
        Real bound = mul_2si(abs(next, kErrPrec, MPFR_RNDU), 1);  // 2|next|
        if (bound <= quarter_target || terms > kMaxTerms) {
          trunc = bound;
          ok = terms <= kMaxTerms;
          break;
        }
      }
      term = next;
      n++;
      if (terms > kMaxTerms) break;
    }

    if (ok) {
      // rounding: each term carries O(terms) ulps relative error
      Real rnd = mul_up(abs(abs_sum, kErrPrec, MPFR_RNDU),
                        Real::of(8 * terms + 64, kErrPrec));
      rnd = mul_2si(rnd, -long(prec));
      Real prop = Real::of(0.0, kErrPrec);
      if (t_err.sign() > 0) {
        // |L(t+-e) - L(t)| <= e * sup L_{nu+1} <= 2 e L_nu(t+e) for nu >= 1/2
        Real mag = add_up(abs(abs_sum, kErrPrec, MPFR_RNDU), trunc);
        prop = mul_2si(mul_up(t_err, mag), 1);
      }
      Real err = add_up(add_up(trunc, rnd), prop);
      if (err <= target) return {sum, err, terms};
    }
    if (prec >= kPrecCap)
      throw TargetUnreachable("eval_L: target unreachable at precision cap");
  }
}

}  // namespace

LEvalResult eval_L(const Rat& nu, const Real& t, const Real& t_err, const Real& target) {
  CoreResult c = eval_core(nu, t, t_err, target, false);
  return {c.sum, c.abs_error, c.terms};
}

LEvalResult eval_L(const Rat& nu, const Real& t, const Real& target) {
  return eval_L(nu, t, Real::of(0.0, kErrPrec), target);
}

LEvalResult eval_L(const Rat& nu, double t, double target) {
  return eval_L(nu, Real::of(t, 64), Real::of(target, 64));
}

LEvalResult eval_L_tilde(const Rat& nu, const Real& t, const Real& target) {
  CoreResult c = eval_core(nu, t, Real::of(0.0, kErrPrec), target, true);
  return {c.sum, c.abs_error, c.terms};
}

LEvalResult eval_L_tilde(const Rat& nu, double t, double target) {
  return eval_L_tilde(nu, Real::of(t, 64), Real::of(target, 64));
}

Real asymptotic_L(const Rat& nu, const Real& t, mpfr_prec_t prec) {
  if (!(t.sign() > 0)) throw std::invalid_argument("asymptotic_L: t must be > 0");
  Real ex = exp(mul_2si(sqrt(t, prec), 1), prec);
  Rat expo = -(2 * nu + 1) / 4;
  expo.canonicalize();
  Real tp = pow(t, Real::of(expo, prec), prec);
  Real den = sqrt(mul_2si(Real::pi(prec), 2), prec);
  return div(mul(ex, tp, prec), den, prec);
}

std::pair<Real, Real> ratio_bounds(const Rat& nu, const Real& alpha,
                                   const Real& alpha_prime, const Real& t) {
  // exact products (destination wide enough for the full mantissas)
  Real tn = mul(t, alpha_prime, t.prec() + alpha_prime.prec() + 4);
  Real td = mul(t, alpha, t.prec() + alpha.prec() + 4);
  // absolute eval targets scaled from quick magnitude estimates
  double dnum = 2.0 * std::sqrt(std::max(tn.d(), 0.0)) * 1.4427;
  double dden = 2.0 * std::sqrt(std::max(td.d(), 0.0)) * 1.4427;
  Real tol_n = mul_2si(Real::of(1.0, kErrPrec), long(dnum) - 60);
  Real tol_d = mul_2si(Real::of(1.0, kErrPrec), long(dden) - 60);
  LEvalResult num = eval_L(nu, tn, tol_n);
  LEvalResult den = eval_L(nu, td, tol_d);
  Real lo_den = den.lower();
  if (!(lo_den.sign() > 0)) throw std::runtime_error("ratio_bounds: denominator not positive");
  Real up = div_up(num.upper(), lo_den);
  Real lo = div_down(num.lower(), den.upper());
  return {up, lo};
}

RatioThresholdResult ratio_threshold(const Rat& nu, const Real& alpha,
                                     const Real& alpha_prime, const Real& target) {
  if (nu < 0) throw std::invalid_argument("ratio_threshold: nu must be >= 0");
  if (!(alpha_prime.sign() > 0) || !(alpha_prime < alpha))
    throw std::invalid_argument("ratio_threshold: need 0 < alpha' < alpha");
  if (!(target.sign() > 0) || !(target < Real::of(1.0, kErrPrec)))
    throw std::invalid_argument("ratio_threshold: need 0 < target < 1");

  // bracket [lo, hi] with ratio(lo) >= target > ratio(hi) by doubling or
  // halving from t = 1
  Real t = Real::of(1.0, 64);
  Real up = ratio_bounds(nu, alpha, alpha_prime, t).first;
  Real lo(64), hi(64), hi_up(64);
  int iters = 0;
  if (up < target) {
    hi = t;
    hi_up = up;
    while (true) {
      Real half = mul_2si(t, -1);
      if (half < Real::pow2(-40)) {  // threshold is at (or below) numeric floor
        return {hi, hi_up, target};
      }
      Real u = ratio_bounds(nu, alpha, alpha_prime, half).first;
      if (!(u < target)) {
        lo = half;
        break;
      }
      t = half;
      hi = half;
      hi_up = u;
      if (++iters > 200) throw TargetUnreachable("ratio_threshold: no convergence");
    }
  } else {
    while (!(up < target)) {
      t = mul_2si(t, 1);
      up = ratio_bounds(nu, alpha, alpha_prime, t).first;
      if (++iters > 200) throw TargetUnreachable("ratio_threshold: no convergence");
    }
    lo = mul_2si(t, -1);
    hi = t;
    hi_up = up;
  }
  for (int i = 0; i < 60; i++) {
    Real mid = mul_2si(add(lo, hi, 64), -1);
    Real mu = ratio_bounds(nu, alpha, alpha_prime, mid).first;
    if (mu < target) {
      hi = mid;
      hi_up = mu;
    } else {
      lo = mid;
    }
  }
  return {hi, hi_up, target};
}

}  // namespace qmod::specfun
