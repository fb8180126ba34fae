#include "qmod/circle.hpp"

#include <cmath>
#include <stdexcept>

#include "qmod/parallel.hpp"
#include "qmod/qseries.hpp"

namespace qmod::circle {

using multiplier::PolarTerm;
using specfun::eval_L;
using specfun::LEvalResult;

namespace {

long rat_ceil_long(const Rat& x) {
  Int z;
  mpz_cdiv_q(z.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return long(mpz_get_si(z.get_mpz_t()));
}

// first index m with lambda_min + m >= 0
long first_nonneg_index(const ModularSpec& spec) {
  return std::max(0L, rat_ceil_long(-spec.lambda_min));
}

// rough bits of L_{1-k}(4 pi^2 lambda delta), for precision budgeting
long magnitude_bits(const Rat& lambda, const Rat& delta) {
  double ld = Rat(lambda * delta).get_d();
  if (ld <= 0) return 8;
  if (!std::isfinite(ld) || ld > 1e12)
    throw std::invalid_argument("coefficient index out of supported range");
  return long(std::ceil(4.0 * M_PI * std::sqrt(ld) * 1.4427)) + 8;
}

Real pi_up(mpfr_prec_t p) {
  Real r(p);
  mpfr_const_pi(r.raw(), MPFR_RNDU);
  return r;
}

Real pi_down(mpfr_prec_t p) {
  Real r(p);
  mpfr_const_pi(r.raw(), MPFR_RNDD);
  return r;
}

// loose absolute evaluation target matched to the size of L(t)
Real loose_L_target(double t, long slack_bits = 48) {
  if (!std::isfinite(t)) throw std::invalid_argument("argument out of range");
  long mag = (t > 0) ? long(std::ceil(2.0 * std::sqrt(t) * 1.4427)) : 0;
  return mul_2si(Real::of(1.0, kErrPrec), mag - slack_bits);
}

struct PartialSum {
  Cplx total;
  Real err_re, err_im;
};

// sum over 1 <= c <= cmax of
//   (2pi)^{2-k} c^{k-2} sum_mu a(mu)|mu|^{1-k} A_c(lambda,mu) L_{1-k}(4pi^2 lambda |mu| c^{-2})
// evaluated with enclosure tracking; deterministic across thread counts
// (per-c slots, sequential fold).  err_budget is the absolute error
// allowance for the whole L-evaluation layer; each eval gets its share
// scaled down by the prefactor it will be multiplied with
// (c^{k-2} phi(c) <= 1 for k <= 1 absorbs the c-dependence).
PartialSum rademacher_partial(const ModularSpec& spec, const Rat& lambda,
                              long cmax, mpfr_prec_t prec, const Real& err_budget,
                              int threads) {
  const Rat k = spec.weight;
  const Rat nu = spec.nu();
  const size_t P = spec.polar.size();

  Real two_pi = mul_2si(Real::pi(prec), 1);
  Real wk_front = Real::of(Rat(2) - k, prec);  // exact dyadic
  // the relative error of x^e from a correctly rounded base scales with e
  int esens = 8 + int(rat_ceil_long(Rat(2) - k));
  Enc front = enc_rounded(pow(two_pi, wk_front, prec), esens);
  Real wk_c = Real::of(k - Rat(2), prec);

  // per-polar-term data
  std::vector<Enc> coefw(P);
  std::vector<Real> targ(P), targ_err(P), l_target(P);
  std::vector<Rat> mus(P);
  mpfr_prec_t pt = prec + 32;
  Real pi2 = mul(Real::pi(pt), Real::pi(pt), pt);
  Real budget_each = div(err_budget, Real::of(2 * cmax * long(P), kErrPrec),
                         kErrPrec, MPFR_RNDD);
  for (size_t j = 0; j < P; j++) {
    const PolarTerm& pterm = spec.polar[j];
    mus[j] = pterm.mu;
    Rat absmu = -pterm.mu;
    Real mw = pow(Real::of(absmu, prec), Real::of(Rat(1) - k, prec), prec);
    Enc mwe{mw, mul_up(Real::of(long(4 * esens), kErrPrec),
                       mul_2si(abs(mw, kErrPrec, MPFR_RNDU), 1 - long(prec)))};
    coefw[j] = enc_mul(enc_exact(Real::of(pterm.a, prec)), mwe, prec);
    Rat lm = lambda * absmu;
    lm.canonicalize();
    targ[j] = mul(mul_2si(pi2, 2), Real::of(lm, pt), pt);  // 4 pi^2 lambda |mu|
    targ_err[j] = mul_2si(abs(targ[j], kErrPrec, MPFR_RNDU), 4 - long(pt));
    // L error times (2pi)^{2-k} |a(mu)| |mu|^{1-k} must stay within budget
    Real scale = mul_up(front.upper(), coefw[j].upper());
    l_target[j] = div(budget_each, scale, kErrPrec, MPFR_RNDD);
  }

  std::vector<CEnc> slots(size_t(cmax + 1), CEnc(prec));
  parallel_for(1, cmax + 1, threads, [&](long c) {
    Real c2 = Real::of(Int(Int(c) * Int(c)), pt);
    CEnc inner(prec);
    std::vector<CEnc> A = multiplier::kloosterman_A_multi(spec, lambda, mus, c, prec);
    for (size_t j = 0; j < P; j++) {
      Real t = div(targ[j], c2, pt);
      Real terr = add_up(div_up(targ_err[j], c2), ulp_bound(t));
      LEvalResult L = eval_L(nu, t, terr, l_target[j]);
      Enc w = enc_mul(coefw[j], L.enc(), prec);
      inner = cenc_add(inner, cenc_scale(A[j], w, prec), prec);
    }
    Enc cpw = enc_rounded(pow(Real::of(c, prec), wk_c, prec), 4);
    slots[size_t(c)] = cenc_scale(inner, enc_mul(front, cpw, prec), prec);
  });

  PartialSum out;
  out.total = Cplx(prec);
  CEnc acc(prec);
  for (long c = 1; c <= cmax; c++) acc = cenc_add(acc, slots[size_t(c)], prec);
  out.total = acc.v;
  out.err_re = acc.er;
  out.err_im = acc.ei;
  return out;
}

// certified upper bound S(y) >= sum_{j>=1} y^j / (j (1-y^j)), 0 < y < 1
Real log_euler_bound(const Real& y, mpfr_prec_t p) {
  Real s(p);
  Real yj = Real::of(1L, p);
  const long J = 64;
  for (long j = 1; j <= J; j++) {
    yj = mul(yj, y, p, MPFR_RNDU);
    Real den = mul(Real::of(j, p), sub(Real::of(1L, p), yj, p, MPFR_RNDD), p, MPFR_RNDD);
    s = add(s, div(yj, den, p, MPFR_RNDU), p, MPFR_RNDU);
  }
  // tail: sum_{j>J} y^j/(j(1-y^j)) <= y^{J+1} / ((J+1)(1-y)^2)
  Real ynext = mul(yj, y, p, MPFR_RNDU);
  Real omy = sub(Real::of(1L, p), y, p, MPFR_RNDD);
  Real tail = div(ynext, mul(Real::of(J + 1, p), mul(omy, omy, p, MPFR_RNDD), p, MPFR_RNDD), p, MPFR_RNDU);
  return add(s, tail, p, MPFR_RNDU);
}

// certified upper bound on sum_m |a_m| y^m for the core coefficient
// sequence (offset factored out)
Real core_abs_value_bound(const ModularSpec& spec, const Real& y, mpfr_prec_t p) {
  Real s = log_euler_bound(y, p);
  if (spec.kind == ModularSpec::Kind::JFunction) {
    // E4^3 * 1/Delta-core; sigma_3(n) <= zeta(3) n^3 and
    // sum n^3 y^n = y(1+4y+y^2)/(1-y)^4
    Real z3 = zeta(Real::of(Rat(3), p), p, MPFR_RNDU);
    Real y2 = mul(y, y, p, MPFR_RNDU);
    Real num = mul(y, add(add(Real::of(1L, p), mul_2si(y, 2), p, MPFR_RNDU), y2, p, MPFR_RNDU), p, MPFR_RNDU);
    Real omy = sub(Real::of(1L, p), y, p, MPFR_RNDD);
    Real omy4 = mul(mul(omy, omy, p, MPFR_RNDD), mul(omy, omy, p, MPFR_RNDD), p, MPFR_RNDD);
    Real cube = add(Real::of(1L, p),
                    mul(mul(Real::of(240L, p), z3, p, MPFR_RNDU), div(num, omy4, p, MPFR_RNDU), p, MPFR_RNDU),
                    p, MPFR_RNDU);
    Real e4b = mul(mul(cube, cube, p, MPFR_RNDU), cube, p, MPFR_RNDU);
    Real invd = exp(mul(Real::of(24L, p), s, p, MPFR_RNDU), p, MPFR_RNDU);
    return mul(e4b, invd, p, MPFR_RNDU);
  }
  long ar = spec.r < 0 ? -spec.r : spec.r;
  return exp(mul(Real::of(ar, p), s, p, MPFR_RNDU), p, MPFR_RNDU);
}

const exactq::QSeries& spec_series(const ModularSpec& spec, long T,
                                   exactq::QSeries& storage) {
  storage = (spec.kind == ModularSpec::Kind::JFunction) ? exactq::j_expansion(T)
                                                        : exactq::eta_quotient(spec.r, T);
  return storage;
}

}  // namespace

DominanceData dominance_data(const ModularSpec& spec) {
  if (spec.polar.empty())
    throw CuspFinite("dominance_data: " + spec.name() +
                     " is finite at the cusps (no polar part)");
  DominanceData d;
  d.M = 0;
  bool first = true;
  for (const PolarTerm& p : spec.polar) {
    Rat am = -p.mu;
    Int aa;
    mpz_abs(aa.get_mpz_t(), p.a.get_mpz_t());
    d.M += aa;
    if (first || am > d.delta) {
      d.delta = am;
      d.mu0 = p.mu;
      first = false;
    }
  }
  // best value strictly below delta contributed by each mu; the per-mu
  // candidates |mu| c^{-2} are decreasing in c, so only the first
  // qualifying c matters
  bool have = false;
  for (const PolarTerm& p : spec.polar) {
    Rat am = -p.mu;
    for (long c = 1;; c++) {
      Rat v = am / Rat(Int(c) * Int(c));
      v.canonicalize();
      if (v < d.delta) {
        if (!have || v > d.delta_prime) d.delta_prime = v;
        have = true;
        break;
      }
    }
  }
  // multiplicity of delta_prime across (mu, c) pairs
  int count = 0;
  for (const PolarTerm& p : spec.polar) {
    Rat am = -p.mu;
    Rat ratio = am / d.delta_prime;
    ratio.canonicalize();
    if (ratio.get_den() == 1) {
      Int c2 = ratio.get_num();
      if (mpz_perfect_square_p(c2.get_mpz_t())) count++;
    }
  }
  d.tie = count > 1;
  return d;
}

Real g_k(const Rat& k, const Rat& mu, mpfr_prec_t p) {
  if (mu >= 0) throw std::invalid_argument("g_k: mu must be < 0");
  Rat absmu = -mu;
  Real am = Real::of(absmu, p);
  Real twopim = mul(mul_2si(Real::pi(p), 1), am, p);
  Real e2pm = exp(twopim, p);
  Real val(p);
  if (k >= 2) {
    Real a = mul(e2pm, add(Real::of(1L, p), div(Real::of(1L, p), twopim, p), p), p);
    Real gk1 = gamma(Real::of(k - 1, p), p);
    Real b = div(gk1, pow(twopim, Real::of(k - 1, p), p), p);
    Real p2 = pow(Real::of(2L, p), Real::of(k / 2, p), p);
    val = mul(p2, add(a, b, p), p);
  } else {
    Real pim = mul(Real::pi(p), am, p);
    val = mul(e2pm, add(Real::of(4L, p), div(Real::of(1L, p), pim, p), p), p);
  }
  // upper bound: inflate past the handful of correctly rounded ops
  return add(val, mul_2si(abs(val), 40 - long(p)), kErrPrec, MPFR_RNDU);
}

Real constant_M2(const ModularSpec& spec) {
  Real s = Real::of(0.0, kErrPrec);
  for (const PolarTerm& p : spec.polar) {
    Int aa;
    mpz_abs(aa.get_mpz_t(), p.a.get_mpz_t());
    s = add_up(s, mul_up(Real::of(aa, kErrPrec), g_k(spec.weight, p.mu, 128)));
  }
  return s;
}

Real coeff_tail_at_boundary(const ModularSpec& spec, long T, long m0) {
  mpfr_prec_t p = 128;
  Real y = exp(neg(pi_down(p)), p, MPFR_RNDU);  // e^{-pi}, rounded up
  Real U = core_abs_value_bound(spec, y, p);
  // sum_{m>T} |a_m| x^{m-m0} <= e^{2 pi m0} e^{-pi(T+1)} U(e^{-pi}),  x = e^{-2 pi}
  Real e1 = exp(mul(pi_up(p), Real::of(2 * m0, p), p, MPFR_RNDU), p, MPFR_RNDU);
  Real e2 = exp(neg(mul(pi_down(p), Real::of(T + 1, p), p, MPFR_RNDD)), p, MPFR_RNDU);
  return mul(mul(U, e1, p, MPFR_RNDU), e2, kErrPrec, MPFR_RNDU);
}

Real constant_M1(const ModularSpec& spec, long grid, long T) {
  mpfr_prec_t p = 160;
  exactq::QSeries storage;
  const exactq::QSeries& s = spec_series(spec, T + 2, storage);
  long m0 = first_nonneg_index(spec);
  Rat lam_first = spec.lambda_min + Rat(m0);  // in [0, 1)
  long Jt = s.order() - 1 - m0;               // h has coefficients a_{m0..m0+Jt}

  Real x = exp(neg(mul_2si(Real::pi(p), 1)), p);  // e^{-2 pi}
  // grid maximum of |h| on |q| = x
  Real maxabs(p);
  for (long l = 0; l < grid; l++) {
    Real ang = div(mul(mul_2si(Real::pi(p), 1), Real::of(l, p), p), Real::of(grid, p), p);
    Cplx q = cscale(cis(ang, p), x, p);
    Cplx acc(p);
    for (long j = Jt; j >= 0; j--) {
      acc = cmul(acc, q, p);
      const Int& c = s.coeffs[size_t(m0 + j)];
      if (c != 0) acc.re = add(acc.re, Real::of(c, p), p);
    }
    Real m = cabs(acc, p);
    if (m > maxabs) maxabs = m;
  }
  // derivative bound D >= sup |dH/dtheta| for the grid-gap pad
  Real D(p);
  Real xj = Real::of(1L, p);
  for (long j = 1; j <= Jt; j++) {
    xj = mul(xj, x, p, MPFR_RNDU);
    const Int& c = s.coeffs[size_t(m0 + j)];
    if (c == 0) continue;
    Int aa;
    mpz_abs(aa.get_mpz_t(), c.get_mpz_t());
    D = add(D, mul(Real::of(Int(aa * j), p), xj, p, MPFR_RNDU), p, MPFR_RNDU);
  }
  // tails beyond the truncation
  Real tail_h = coeff_tail_at_boundary(spec, m0 + Jt, m0);
  Real piu = pi_up(64);
  Real dj = mul_up(Real::of(Jt + 1, kErrPrec),
                   exp(neg(mul(pi_down(64), Real::of(Rat(Jt + 1, 2), 64), 64, MPFR_RNDD)), 64, MPFR_RNDU));
  Real ym = exp(neg(pi_down(64)), 64, MPFR_RNDU);
  Real Um = core_abs_value_bound(spec, ym, 96);
  Real em0 = exp(mul(piu, Real::of(Rat(3 * m0, 2), 64), 64, MPFR_RNDU), 64, MPFR_RNDU);
  Real tail_D = mul_up(dj, mul_up(em0, Um));

  Real pad = mul_up(div_up(piu, Real::of(grid, kErrPrec)), add_up(D, tail_D));
  Real total = add_up(add_up(maxabs, mul_2si(abs(maxabs, kErrPrec, MPFR_RNDU), -100)),
                      add_up(pad, tail_h));
  // e^{-2 pi lambda'} factor, rounded up
  Real damp = exp(neg(mul(pi_down(96), Real::of(2 * lam_first, 96), 96, MPFR_RNDD)), 96, MPFR_RNDU);
  return mul_up(total, damp);
}

NonnegConstants nonneg_constants(const ModularSpec& spec) {
  return {constant_M1(spec), constant_M2(spec)};
}

Real main_term(const ModularSpec& spec, long n, mpfr_prec_t prec) {
  DominanceData dom = dominance_data(spec);
  Rat lambda = spec.lambda(n);
  if (lambda < 0) throw std::invalid_argument("main_term: lambda must be >= 0");
  Rat k = spec.weight;
  Real two_pi = mul_2si(Real::pi(prec), 1);
  Real front = pow(two_pi, Real::of(Rat(2) - k, prec), prec);
  Real dpow = pow(Real::of(dom.delta, prec), Real::of(Rat(1) - k, prec), prec);
  Rat ld = lambda * dom.delta;
  ld.canonicalize();
  Real t = mul(mul(two_pi, two_pi, prec), Real::of(ld, prec), prec);
  // evaluation slack scales with the working precision
  LEvalResult L = eval_L(spec.nu(), t, ulp_bound(t), loose_L_target(t.d(), long(prec) / 2));
  Int a0 = 0;
  for (const PolarTerm& pt : spec.polar)
    if (pt.mu == dom.mu0) a0 = pt.a;
  Real v = mul(mul(mul(front, Real::of(a0, prec), prec), dpow, prec), L.value, prec);
  if (spec.epsilon < 0) v = neg(v);
  return v;
}

ErrorBudget coefficient_negative_weight(const ModularSpec& spec, long n,
                                        const Real& target,
                                        const EngineOptions& opts) {
  if (!(spec.weight < 0))
    throw std::domain_error("coefficient_negative_weight: weight must be < 0");
  Rat lambda = spec.lambda(n);
  if (lambda < 0)
    throw std::invalid_argument("coefficient_negative_weight: lambda must be >= 0");
  if (!(target.sign() > 0)) throw std::invalid_argument("target must be > 0");
  DominanceData dom = dominance_data(spec);
  const Rat k = spec.weight;
  const Rat nu = spec.nu();

  // S = sum |a(mu)| |mu|^{1-k}, upper
  mpfr_prec_t bp = 96;
  Real S(bp);
  for (const PolarTerm& p : spec.polar) {
    Int aa;
    mpz_abs(aa.get_mpz_t(), p.a.get_mpz_t());
    Real mw = pow(Real::of(-p.mu, bp, MPFR_RNDU), Real::of(Rat(1) - k, bp), bp, MPFR_RNDU);
    S = add(S, mul(Real::of(aa, bp), mw, bp, MPFR_RNDU), bp, MPFR_RNDU);
  }
  Real front_up = pow(mul_2si(pi_up(bp), 1), Real::of(Rat(2) - k, bp), bp, MPFR_RNDU);
  Real negk = Real::of(-k, bp);

  auto tail_up = [&](long C) {
    // (2pi)^{2-k} S L_{1-k}(4pi^2 lambda delta (C+1)^{-2}) C^k / (-k)
    Rat argr = lambda * dom.delta / Rat(Int(C + 1) * Int(C + 1));
    argr.canonicalize();
    Real arg = mul(mul(mul_2si(pi_up(bp), 1), mul_2si(pi_up(bp), 1), bp, MPFR_RNDU),
                   Real::of(argr, bp, MPFR_RNDU), bp, MPFR_RNDU);
    Real Lup = eval_L(nu, arg, ulp_bound(arg), loose_L_target(arg.d(), 40)).upper();
    Real csum = div(pow(Real::of(C, bp), Real::of(k, bp), bp, MPFR_RNDU), negk, bp, MPFR_RNDU);
    return mul_up(mul_up(front_up, S), mul_up(Lup, csum));
  };

  Real half = mul(target, Real::of(0.5, kErrPrec), kErrPrec, MPFR_RNDD);
  long C = 4;
  while (tail_up(C) > half) {
    C *= 2;
    if (C > (1L << 26))
      throw TargetUnreachable("coefficient_negative_weight: tail will not close");
  }
  Real tail = tail_up(C);

  long magb = magnitude_bits(lambda, dom.delta);
  double tb = target.d();
  long tbits = (tb > 0 && std::isfinite(tb)) ? std::max(0L, long(std::ceil(-std::log2(tb)))) : 64;
  mpfr_prec_t prec = Real::clamp(std::max<mpfr_prec_t>(
      {mpfr_prec_t(192), opts.min_prec, mpfr_prec_t(magb + tbits + 96)}));

  PartialSum ps;
  for (;; prec = Real::clamp(prec * 2)) {
    ps = rademacher_partial(spec, lambda, C, prec, half, opts.threads);
    if (ps.err_re <= half) break;
    if (prec >= kPrecCap)
      throw TargetUnreachable("coefficient_negative_weight: precision cap");
  }

  // with real coefficients the exact partial sum has |Im| <= tail
  if (abs(ps.total.im, kErrPrec, MPFR_RNDU) > add_up(ps.err_im, tail))
    throw std::logic_error("coefficient_negative_weight: imaginary part out of bounds");

  ErrorBudget out;
  out.lambda = lambda;
  out.main = ps.total.re;
  out.breakdown.push_back({"series-tail", tail});
  out.breakdown.push_back({"evaluation-rounding", ps.err_re});
  out.bound = add_up(tail, ps.err_re);
  out.cutoff = C;
  out.prec = prec;
  if (spec.integer_coeffs && out.bound < Real::of(0.5, kErrPrec))
    out.snapped = out.main.round_to_int();
  return out;
}

ErrorBudget coefficient_nonneg_weight(const ModularSpec& spec, long n,
                                      std::optional<long> N,
                                      const EngineOptions& opts,
                                      const NonnegConstants* cached) {
  if (spec.weight < 0)
    throw std::domain_error("coefficient_nonneg_weight: weight must be >= 0");
  Rat lambda = spec.lambda(n);
  if (lambda < 0)
    throw std::invalid_argument("coefficient_nonneg_weight: lambda must be >= 0");
  DominanceData dom = dominance_data(spec);
  const Rat k = spec.weight;
  long NN;
  if (N) {
    NN = *N;
    if (NN < 1) throw std::invalid_argument("N must be >= 1");
  } else {
    if (lambda < 1)
      throw std::invalid_argument("auto cutoff requires lambda >= 1");
    Int fl = rat_floor(lambda);
    Int r;
    mpz_sqrt(r.get_mpz_t(), fl.get_mpz_t());
    NN = long(mpz_get_si(r.get_mpz_t()));
  }

  NonnegConstants local;
  if (!cached) {
    local = nonneg_constants(spec);
    cached = &local;
  }

  long magb = magnitude_bits(lambda, dom.delta);
  mpfr_prec_t prec = Real::clamp(std::max<mpfr_prec_t>(
      {mpfr_prec_t(192), opts.min_prec, mpfr_prec_t(magb + 128)}));
  Real eval_budget = mul_2si(Real::of(1.0, kErrPrec), magb - 100);
  PartialSum ps = rademacher_partial(spec, lambda, NN, prec, eval_budget, opts.threads);

  mpfr_prec_t bp = 96;
  // e^{4 pi lambda / (N+1)^2}, upper
  Rat er = lambda / Rat(Int(NN + 1) * Int(NN + 1));
  er.canonicalize();
  Real E = exp(mul(mul_2si(pi_up(bp), 2), Real::of(er, bp, MPFR_RNDU), bp, MPFR_RNDU), bp, MPFR_RNDU);
  Real Nk = pow(Real::of(NN, bp), Real::of(k, bp), bp, MPFR_RNDU);
  Real branch(bp);
  if (k > 2) {
    Real twoN2 = mul_2si(Real::of(Int(Int(NN) * Int(NN)), bp), 1);
    branch = mul(pow(twoN2, Real::of(k - 1, bp), bp, MPFR_RNDU),
                 zeta(Real::of(k - 1, bp), bp, MPFR_RNDU), bp, MPFR_RNDU);
  } else if (k == 2) {
    Real lnN = log(Real::of(NN, bp), bp, MPFR_RNDU);
    branch = mul(mul_2si(Real::of(Int(Int(NN) * Int(NN)), bp), 1),
                 add(Real::of(1L, bp), lnN, bp, MPFR_RNDU), bp, MPFR_RNDU);
  } else {
    Real c = div(Real::of(4L, bp), Real::of(Rat(2) - k, bp), bp, MPFR_RNDU);
    branch = mul(c, Nk, bp, MPFR_RNDU);
  }
  Real polar_cmp = mul_up(mul_up(pi_up(bp), cached->M1), mul_up(branch, E));
  Real contour_cmp = mul_up(mul_up(cached->M2, Nk), E);

  ErrorBudget out;
  out.lambda = lambda;
  out.main = ps.total.re;
  out.breakdown.push_back({"polar-part-comparison", polar_cmp});
  out.breakdown.push_back({"contour-comparison", contour_cmp});
  out.breakdown.push_back({"evaluation-rounding", ps.err_re});
  out.bound = add_up(add_up(polar_cmp, contour_cmp), ps.err_re);
  out.cutoff = NN;
  out.prec = prec;
  if (spec.integer_coeffs && out.bound < Real::of(0.5, kErrPrec))
    out.snapped = out.main.round_to_int();
  return out;
}

ErrorBudget coefficient(const ModularSpec& spec, long n, const Real& target,
                        const EngineOptions& opts) {
  Rat lambda = spec.lambda(n);
  if (lambda < 0) {
    // polar coefficients are exact inputs
    ErrorBudget out;
    out.lambda = lambda;
    Int a = 0;
    for (const PolarTerm& p : spec.polar)
      if (p.mu == lambda) a = p.a;
    out.main = Real::of(a, 64);
    out.bound = Real::of(0.0, kErrPrec);
    out.exact = true;
    out.snapped = a;
    return out;
  }
  if (spec.weight < 0) return coefficient_negative_weight(spec, n, target, opts);
  if (lambda >= 1) return coefficient_nonneg_weight(spec, n, std::nullopt, opts);
  return coefficient_nonneg_weight(spec, n, 1, opts);
}

Lambda0Certificate effective_lambda0(const ModularSpec& spec,
                                     const EngineOptions&) {
  DominanceData dom = dominance_data(spec);
  const Rat k = spec.weight;
  const Rat nu = spec.nu();
  mpfr_prec_t p = 128;

  if (k < 0) {
    // ratio target zeta(1-k)^{-1} |a(mu0)| / M(f), rounded down
    Real zv = zeta(Real::of(Rat(1) - k, p), p, MPFR_RNDU);
    Int a0abs = 1;
    for (const PolarTerm& pt : spec.polar)
      if (pt.mu == dom.mu0) mpz_abs(a0abs.get_mpz_t(), pt.a.get_mpz_t());
    Real target = div(div(Real::of(a0abs, p), Real::of(dom.M, p), p, MPFR_RNDD), zv,
                      kErrPrec, MPFR_RNDD);
    // alpha = 4 pi^2 delta (lower), alpha' = 4 pi^2 delta' (upper)
    Real pd = pi_down(p), pu = pi_up(p);
    Real alpha = mul(mul_2si(mul(pd, pd, p, MPFR_RNDD), 2), Real::of(dom.delta, p, MPFR_RNDD), p, MPFR_RNDD);
    Real alpha_p = mul(mul_2si(mul(pu, pu, p, MPFR_RNDU), 2), Real::of(dom.delta_prime, p, MPFR_RNDU), p, MPFR_RNDU);
    specfun::RatioThresholdResult rt = specfun::ratio_threshold(nu, alpha, alpha_p, target);
    return {rt.t0, rt.ratio_upper, rt.target, "ratio"};
  }

  if (!(k == 0))
    throw std::domain_error("effective_lambda0: k >= 0 supported only at k = 0");

  NonnegConstants cst = nonneg_constants(spec);
  Real pd = pi_down(p), pu = pi_up(p);
  // K = (2pi)^{2-k} |a(mu0)| delta^{1-k}, lower bound (k = 0)
  Int a0abs = 1;
  for (const PolarTerm& pt : spec.polar)
    if (pt.mu == dom.mu0) mpz_abs(a0abs.get_mpz_t(), pt.a.get_mpz_t());
  Real K = mul(mul_2si(mul(pd, pd, p, MPFR_RNDD), 2),
               mul(Real::of(a0abs, p), Real::of(dom.delta, p, MPFR_RNDD), p, MPFR_RNDD), p, MPFR_RNDD);
  // C0 = e^{4 pi}(pi M1 (4/(2-k)) + M2), upper
  Real C0 = mul_up(exp(mul_2si(pu, 2), 96, MPFR_RNDU),
                   add_up(mul_up(mul_up(pu, cst.M1),
                                 div(Real::of(4L, 96), Real::of(Rat(2) - k, 96), 96, MPFR_RNDU)),
                          cst.M2));
  // M' = sum |a(mu)| |mu|^{1-k}, upper
  Real Mp(96);
  for (const PolarTerm& pt : spec.polar) {
    Int aa;
    mpz_abs(aa.get_mpz_t(), pt.a.get_mpz_t());
    Real mw = pow(Real::of(-pt.mu, 96, MPFR_RNDU), Real::of(Rat(1) - k, 96), 96, MPFR_RNDU);
    Mp = add(Mp, mul(Real::of(aa, 96), mw, 96, MPFR_RNDU), 96, MPFR_RNDU);
  }
  Real beta_d = mul(mul_2si(mul(pd, pd, p, MPFR_RNDD), 2), Real::of(dom.delta, p, MPFR_RNDD), p, MPFR_RNDD);
  Real betap_u = mul(mul_2si(mul(pu, pu, p, MPFR_RNDU), 2), Real::of(dom.delta_prime, p, MPFR_RNDU), p, MPFR_RNDU);

  Real lhs(64), rhs(64);
  auto cond = [&](const Real& lam) {
    Real t_main = mul(lam, beta_d, lam.prec() + beta_d.prec() + 4);
    Real t_riv = mul(lam, betap_u, lam.prec() + betap_u.prec() + 4);
    Real main_low =
        mul(K, eval_L(nu, t_main, loose_L_target(t_main.d(), 48)).lower(), kErrPrec, MPFR_RNDD);
    Real rival_up =
        add_up(C0, mul_up(Mp, eval_L(nu, t_riv, loose_L_target(t_riv.d(), 48)).upper()));
    lhs = main_low;
    rhs = rival_up;
    return main_low > rival_up;
  };

  Real lam = Real::of(1.0, 64);
  int iters = 0;
  while (!cond(lam)) {
    lam = mul_2si(lam, 1);
    if (++iters > 64) throw TargetUnreachable("effective_lambda0: no dominance reached");
  }
  if (!(lam > Real::of(1.0, 64))) {
    cond(lam);  // refresh lhs/rhs at the returned point
    return {lam, lhs, rhs, "margin"};
  }
  Real lo = mul_2si(lam, -1), hi = lam;
  for (int i = 0; i < 50; i++) {
    Real mid = mul_2si(add(lo, hi, 64), -1);
    if (mid < Real::of(1.0, 64)) break;
    if (cond(mid))
      hi = mid;
    else
      lo = mid;
  }
  cond(hi);
  return {hi, lhs, rhs, "margin"};
}

}  // namespace qmod::circle
