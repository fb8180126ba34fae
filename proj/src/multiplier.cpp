#include "qmod/multiplier.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

#include "qmod/qseries.hpp"

namespace qmod::multiplier {

ModularSpec ModularSpec::eta_power(long r) {
  if (r == 0) throw std::invalid_argument("eta exponent must be nonzero");
  ModularSpec s;
  s.kind = Kind::EtaPower;
  s.r = r;
  s.weight = Rat(r, 2);
  s.weight.canonicalize();
  s.lambda_min = Rat(r, 24);
  s.lambda_min.canonicalize();
  if (r < 0) {
    // negative exponents lambda_min + m < 0, coefficients from the
    // exact expansion
    Rat bound = -s.lambda_min;
    Int mcount;
    mpz_cdiv_q(mcount.get_mpz_t(), bound.get_num().get_mpz_t(), bound.get_den().get_mpz_t());
    long M = long(mpz_get_si(mcount.get_mpz_t()));
    exactq::QSeries q = exactq::eta_quotient(r, std::max(2L, M + 1));
    for (long m = 0; m < M; m++) {
      Rat mu = s.lambda_min + Rat(m);
      if (mu >= 0) break;
      if (q.coeffs[size_t(m)] != 0) s.polar.push_back({mu, q.coeffs[size_t(m)]});
    }
  }
  return s;
}

ModularSpec ModularSpec::j_function() {
  ModularSpec s;
  s.kind = Kind::JFunction;
  s.r = 0;
  s.weight = 0;
  s.lambda_min = -1;
  s.polar.push_back({Rat(-1), Int(1)});
  return s;
}

std::string ModularSpec::name() const {
  if (kind == Kind::JFunction) return "j";
  return "eta^" + std::to_string(r);
}

Rat dedekind_sum(const Int& d_in, const Int& c_in) {
  if (c_in < 1) throw std::invalid_argument("dedekind_sum: c must be >= 1");
  Int g;
  mpz_gcd(g.get_mpz_t(), d_in.get_mpz_t(), c_in.get_mpz_t());
  if (g != 1) throw std::invalid_argument("dedekind_sum: gcd(d, c) != 1");
  // s(d mod c, c) = s(d, c); then the reciprocity reduction
  //   s(d, c) = (d^2 + c^2 + 1)/(12 d c) - 1/4 - s(c mod d, d)
  Int c = c_in;
  Int d;
  mpz_mod(d.get_mpz_t(), d_in.get_mpz_t(), c.get_mpz_t());
  Rat acc = 0;
  int sign = 1;
  while (d != 0) {
    Rat term = Rat(d * d + c * c + 1) / Rat(12 * d * c) - Rat(1, 4);
    term.canonicalize();
    if (sign > 0)
      acc += term;
    else
      acc -= term;
    sign = -sign;
    Int nd;
    mpz_mod(nd.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
    c = d;
    d = nd;
  }
  acc.canonicalize();
  return acc;
}

Rat eta_epsilon_exponent(long r, const Int& a, const Int& c, const Int& d) {
  Rat rho = Rat(a + d) / Rat(12 * c) - dedekind_sum(d, c);
  rho *= Rat(r);
  rho.canonicalize();
  return rat_mod(rho, 2);
}

Rat alpha_exponent(const ModularSpec& spec, const Rat& lambda, const Rat& mu,
                   const Int& a, const Int& c, const Int& d) {
  Rat rho = 0;
  if (spec.kind == ModularSpec::Kind::EtaPower)
    rho = eta_epsilon_exponent(spec.r, a, c, d);
  rho -= 2 * (lambda * Rat(a) + mu * Rat(d)) / Rat(c);
  rho.canonicalize();
  return rat_mod(rho, 2);
}

static void require_lattice(const ModularSpec& spec, const Rat& x, const char* what) {
  Rat diff = x - spec.lambda_min;
  if (diff.get_den() != 1) throw std::invalid_argument(std::string(what) + " not in lambda_min + Z");
}

CEnc epsilon_gamma(const ModularSpec& spec, const Mat& g, mpfr_prec_t prec) {
  if (g.det() != 1) throw std::invalid_argument("epsilon_gamma: det != 1");
  if (g.c <= 0) throw std::invalid_argument("epsilon_gamma: need c > 0");
  if (spec.kind == ModularSpec::Kind::JFunction) {
    CEnc one(prec);
    one.v.re = Real::of(1L, prec);
    return one;
  }
  return unit_phase(eta_epsilon_exponent(spec.r, g.a, g.c, g.d), prec);
}

CEnc alpha_from_matrix(const ModularSpec& spec, const Rat& lambda, const Rat& mu,
                       const Mat& g, mpfr_prec_t prec) {
  if (g.det() != 1 || g.c <= 0) throw std::invalid_argument("alpha: bad matrix");
  require_lattice(spec, lambda, "lambda");
  require_lattice(spec, mu, "mu");
  return unit_phase(alpha_exponent(spec, lambda, mu, g.a, g.c, g.d), prec);
}

static Int canonical_d(const Int& a, const Int& c) {
  if (c == 1) return Int(0);
  Int am, d;
  mpz_mod(am.get_mpz_t(), a.get_mpz_t(), c.get_mpz_t());
  if (mpz_invert(d.get_mpz_t(), am.get_mpz_t(), c.get_mpz_t()) == 0)
    throw std::invalid_argument("alpha_x: a not invertible mod c");
  return d;
}

CEnc alpha_x(const ModularSpec& spec, const Rat& lambda, const Rat& mu,
             const FareyFraction& x, mpfr_prec_t prec) {
  require_lattice(spec, lambda, "lambda");
  require_lattice(spec, mu, "mu");
  Int d = canonical_d(x.a, x.c);
  return unit_phase(alpha_exponent(spec, lambda, mu, x.a, x.c, d), prec);
}

namespace {

struct PhaseRow {
  long a, d;
  long w6;  // lattice-independent exponent numerator over 6c (see below)
};

// The summand exponent collapses to integer arithmetic: with
// lambda = lambda_min + n and mu = lambda_min + m, the (a+d)/(12c) part
// of the eta multiplier cancels against the lambda_min contributions and
//   rho = -r s(d,c) - 2(n a + m d)/c = (w6 - 12(n a + m d)) / (6c),
// where w6 = -r * 6c s(d,c) is an integer (a classical fact about
// Dedekind sums).  For the j function (lambda_min = -1, trivial
// multiplier) the same shape holds with w6 = 12(a+d).
const std::vector<PhaseRow>& phase_table(long r, long c, bool jfun) {
  static std::map<std::tuple<long, long, bool>, std::vector<PhaseRow>> memo;
  static std::shared_mutex mu;
  auto key = std::make_tuple(r, c, jfun);
  {
    std::shared_lock<std::shared_mutex> rlock(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;  // map nodes are stable
  }
  std::unique_lock<std::shared_mutex> lock(mu);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::vector<PhaseRow> rows;
  Int C(c);
  for (long a = 0; a < c; a++) {
    Int A(a);
    if (c > 1) {
      Int g;
      mpz_gcd(g.get_mpz_t(), A.get_mpz_t(), C.get_mpz_t());
      if (g != 1) continue;
    }
    Int d = canonical_d(A, C);
    long dl = long(mpz_get_si(d.get_mpz_t()));
    long w6 = 0;
    if (jfun) {
      w6 = 12 * (a + dl);
    } else if (r != 0) {
      Rat s6 = dedekind_sum(d, C) * Rat(6 * c);
      s6.canonicalize();
      if (s6.get_den() != 1) throw std::logic_error("6c s(d,c) not integral");
      Int w = Int(-r) * s6.get_num();
      Int wm;
      mpz_fdiv_r(wm.get_mpz_t(), w.get_mpz_t(), Int(12 * c).get_mpz_t());
      w6 = long(mpz_get_si(wm.get_mpz_t()));
    }
    rows.push_back({a, dl, w6});
  }
  return memo.emplace(key, std::move(rows)).first->second;
}

// e^{i pi t/(6c)} for t in [0, 12c); cached for small c, direct
// evaluation beyond kWheelMaxC
constexpr long kWheelMaxC = 192;

const std::vector<Cplx>& phase_wheel(long c, mpfr_prec_t prec) {
  static std::map<std::pair<long, mpfr_prec_t>, std::vector<Cplx>> memo;
  static std::shared_mutex mu;
  auto key = std::make_pair(c, prec);
  {
    std::shared_lock<std::shared_mutex> rlock(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  std::unique_lock<std::shared_mutex> lock(mu);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::vector<Cplx> wheel;
  wheel.reserve(size_t(12 * c));
  Real pi = Real::pi(prec);
  for (long t = 0; t < 12 * c; t++) {
    Rat h(t, 6 * c);
    h.canonicalize();
    wheel.push_back(cis(mul(pi, Real::of(h, prec), prec), prec));
  }
  return memo.emplace(key, std::move(wheel)).first->second;
}

// lattice index of x relative to lambda_min, as a long
long lattice_index(const ModularSpec& spec, const Rat& x, const char* what) {
  Rat diff = x - spec.lambda_min;
  if (diff.get_den() != 1)
    throw std::invalid_argument(std::string(what) + " not in lambda_min + Z");
  if (!diff.get_num().fits_slong_p())
    throw std::invalid_argument(std::string(what) + " index out of range");
  return diff.get_num().get_si();
}

}  // namespace

std::vector<CEnc> kloosterman_A_multi(const ModularSpec& spec, const Rat& lambda,
                                      std::span<const Rat> mus, long c,
                                      mpfr_prec_t prec) {
  if (c < 1) throw std::invalid_argument("kloosterman_A: c must be >= 1");
  bool jfun = spec.kind == ModularSpec::Kind::JFunction;
  long n_lat = lattice_index(spec, lambda, "lambda");
  std::vector<long> m_lat(mus.size());
  for (size_t j = 0; j < mus.size(); j++)
    m_lat[j] = lattice_index(spec, mus[j], "mu");

  std::vector<CEnc> acc(mus.size(), CEnc(prec));
  const auto& rows = phase_table(jfun ? 0 : spec.r, c, jfun);
  const long period = 12 * c;
  long n_red = ((n_lat % c) + c) % c;
  Real comp_err = mul_2si(Real::of(1.0, kErrPrec), 5 - long(prec));

  if (c <= kWheelMaxC) {
    const auto& wheel = phase_wheel(c, prec);
    // accumulate plain sums first, then attach the phase error per term
    std::vector<Cplx> sums(mus.size(), Cplx(prec));
    for (const PhaseRow& row : rows) {
      for (size_t j = 0; j < mus.size(); j++) {
        long md = ((m_lat[j] % c + c) % c) * row.d % c;
        long t = (row.w6 - 12 * ((n_red * row.a + md) % c)) % period;
        if (t < 0) t += period;
        sums[j] = cadd(sums[j], wheel[size_t(t)], prec);
      }
    }
    // per-term phase error plus addition rounding; intermediate partial
    // sums are bounded by the term count, not the (possibly cancelled)
    // final value
    Real terms = Real::of(long(rows.size() + 4), kErrPrec);
    Real add_rnd = mul_up(mul_up(terms, terms), mul_2si(Real::of(1.0, kErrPrec), 1 - long(prec)));
    Real e = add_up(mul_up(terms, comp_err), add_rnd);
    for (size_t j = 0; j < mus.size(); j++) {
      acc[j].v = sums[j];
      acc[j].er = e;
      acc[j].ei = e;
    }
    return acc;
  }

  for (const PhaseRow& row : rows) {
    for (size_t j = 0; j < mus.size(); j++) {
      long md = ((m_lat[j] % c + c) % c) * row.d % c;
      long t = (row.w6 - 12 * ((n_red * row.a + md) % c)) % period;
      if (t < 0) t += period;
      Rat rho(t, 6 * c);
      rho.canonicalize();
      acc[j] = cenc_add(acc[j], unit_phase(rho, prec), prec);
    }
  }
  return acc;
}

CEnc kloosterman_A(const ModularSpec& spec, const Rat& lambda, const Rat& mu,
                   long c, mpfr_prec_t prec) {
  std::vector<Rat> mus{mu};
  return kloosterman_A_multi(spec, lambda, mus, c, prec)[0];
}

Cplx automorphy_j(const ModularSpec& spec, const Mat& g, const Cplx& z,
                  mpfr_prec_t prec) {
  if (g.det() != 1) throw std::invalid_argument("automorphy_j: det != 1");
  if (g.c == 0) {
    // +-(1 n; 0 1): j = u^{a*b} with u = e^{2 pi i lambda_min}
    Int n = g.a * g.b;  // a = d = +-1, so this is the translation amount
    Rat ht = rat_mod(2 * spec.lambda_min * Rat(n), 2);
    Real theta = mul(Real::pi(prec), Real::of(ht, prec), prec);
    return cis(theta, prec);
  }
  Mat m = g;
  if (m.c < 0) m = Mat{-m.a, -m.b, -m.c, -m.d};  // -gamma acts identically
  CEnc eps = epsilon_gamma(spec, m, prec);
  // ((cz+d)/i)^k
  Cplx czd{add(mul(Real::of(m.c, prec), z.re, prec), Real::of(m.d, prec), prec),
           mul(Real::of(m.c, prec), z.im, prec)};
  Cplx w{czd.im, neg(czd.re)};  // (cz+d)/i = -i(cz+d)
  Cplx pw = cpow_real(w, Real::of(spec.weight, prec), prec);
  return cmul(eps.v, pw, prec);
}

long euler_phi(long c) {
  long result = c, n = c;
  for (long p = 2; p * p <= n; p++) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

}  // namespace qmod::multiplier
