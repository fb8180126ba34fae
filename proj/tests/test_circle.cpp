#include <doctest.h>

#include <cmath>

#include "qmod/circle.hpp"
#include "qmod/qseries.hpp"

using namespace qmod;
using namespace qmod::circle;
using multiplier::ModularSpec;

namespace {

Rat rq(long p, long q) {
  Rat r(p, q);
  r.canonicalize();
  return r;
}

// |main - want| <= bound, exactly, via integer/rational arithmetic in Real
bool encloses(const ErrorBudget& b, const Int& want) {
  mpfr_prec_t p = std::max<mpfr_prec_t>(b.main.prec(), 64);
  Real diff = abs(sub(b.main, Real::of(want, p), p), p);
  return diff <= b.bound;
}

}  // namespace

TEST_CASE("dominance_data: eta powers and j") {
  {
    DominanceData d = dominance_data(ModularSpec::eta_power(-1));
    CHECK(d.delta == rq(1, 24));
    CHECK(d.delta_prime == rq(1, 96));
    CHECK(d.M == 1);
    CHECK(!d.tie);
  }
  {
    DominanceData d = dominance_data(ModularSpec::eta_power(-25));
    CHECK(d.mu0 == rq(-25, 24));
    CHECK(d.delta == rq(25, 24));
    CHECK(d.delta_prime == rq(25, 96));
    CHECK(d.M == 26);
  }
  {
    DominanceData d = dominance_data(ModularSpec::eta_power(-24));
    CHECK(d.delta == 1);
    CHECK(d.delta_prime == rq(1, 4));
    CHECK(d.M == 1);
  }
  {
    DominanceData d = dominance_data(ModularSpec::j_function());
    CHECK(d.delta == 1);
    CHECK(d.delta_prime == rq(1, 4));
  }
  CHECK_THROWS_AS(dominance_data(ModularSpec::eta_power(2)), CuspFinite);
}

TEST_CASE("negative weight: partition values snap exactly") {
  ModularSpec spec = ModularSpec::eta_power(-1);
  Real target = Real::of(0.25, 64);
  ErrorBudget b5 = coefficient_negative_weight(spec, 5, target);
  REQUIRE(b5.snapped.has_value());
  CHECK(*b5.snapped == 7);
  CHECK(b5.bound <= target);
  ErrorBudget b100 = coefficient_negative_weight(spec, 100, target);
  REQUIRE(b100.snapped.has_value());
  CHECK(*b100.snapped == Int("190569292"));
}

TEST_CASE("negative weight: 1/Delta constant term (lambda = 0)") {
  ModularSpec spec = ModularSpec::eta_power(-24);
  ErrorBudget b = coefficient_negative_weight(spec, 1, Real::of(0.25, 64));
  REQUIRE(b.snapped.has_value());
  CHECK(*b.snapped == 24);
}

TEST_CASE("negative weight: enclosure sweep with the exact series") {
  Real target = Real::of(0.25, 64);
  for (long r : {-1L, -25L}) {
    ModularSpec spec = ModularSpec::eta_power(r);
    exactq::QSeries s = exactq::eta_quotient(r, 64);
    for (long n = 0; n < 60; n += 7) {
      ErrorBudget b = coefficient(spec, n, target);
      CHECK(encloses(b, s.coeffs[size_t(n)]));
      if (b.snapped) CHECK(*b.snapped == s.coeffs[size_t(n)]);
    }
  }
}

TEST_CASE("polar indices pass through exactly") {
  ModularSpec spec = ModularSpec::eta_power(-25);
  ErrorBudget b0 = coefficient(spec, 0, Real::of(0.25, 64));
  CHECK(b0.exact);
  CHECK(*b0.snapped == 1);
  ErrorBudget b1 = coefficient(spec, 1, Real::of(0.25, 64));
  CHECK(b1.exact);
  CHECK(*b1.snapped == 25);
  ErrorBudget j0 = coefficient(ModularSpec::j_function(), 0, Real::of(0.25, 64));
  CHECK(j0.exact);
  CHECK(*j0.snapped == 1);
}

TEST_CASE("series-tail entry shrinks as the target tightens") {
  // at k = -1/2 the tail decays like C^{-1/2}, so halving the target
  // roughly quadruples the cutoff; a modest tightening keeps this quick
  ModularSpec spec = ModularSpec::eta_power(-1);
  ErrorBudget a = coefficient_negative_weight(spec, 40, Real::of(0.25, 64));
  ErrorBudget b = coefficient_negative_weight(spec, 40, Real::of(0.125, 64));
  REQUIRE(a.breakdown[0].name == "series-tail");
  CHECK(b.cutoff >= a.cutoff);
  CHECK(b.breakdown[0].bound <= a.breakdown[0].bound);
  // both certify the same integer
  CHECK(*a.snapped == *b.snapped);
}

TEST_CASE("nonneg weight: j-function coefficients are enclosed") {
  ModularSpec spec = ModularSpec::j_function();
  NonnegConstants cst = nonneg_constants(spec);
  exactq::QSeries j = exactq::j_expansion(56);
  // lambda = 1 (index 2), auto N = 1
  ErrorBudget b2 = coefficient_nonneg_weight(spec, 2, std::nullopt, {}, &cst);
  CHECK(b2.cutoff == 1);
  CHECK(encloses(b2, Int("196884")));
  // lambda = 0 with N = 1
  ErrorBudget b1 = coefficient_nonneg_weight(spec, 1, 1, {}, &cst);
  CHECK(encloses(b1, Int(744)));
  // a denser sweep against the oracle
  for (long lam = 1; lam <= 50; lam += 9) {
    ErrorBudget b = coefficient_nonneg_weight(spec, lam + 1, std::nullopt, {}, &cst);
    CHECK(encloses(b, j.coeffs[size_t(lam + 1)]));
  }
  CHECK_THROWS_AS(coefficient_nonneg_weight(spec, 1, std::nullopt), std::invalid_argument);
}

TEST_CASE("nonneg weight: the k = 0 branch coefficient is (4/(2-k)) N^k = 2") {
  ModularSpec spec = ModularSpec::j_function();
  NonnegConstants cst = nonneg_constants(spec);
  ErrorBudget b = coefficient_nonneg_weight(spec, 5, std::nullopt, {}, &cst);  // lambda 4, N 2
  REQUIRE(b.breakdown[0].name == "polar-part-comparison");
  // entry = e^{4 pi lambda/(N+1)^2} * pi * M1 * 2
  double E = std::exp(4.0 * M_PI * 4.0 / 9.0);
  double want = E * M_PI * cst.M1.d() * 2.0;
  CHECK(b.breakdown[0].bound.d() == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("constant_M1: j bound exceeds 744 and eta^{-1} tracks the majorant") {
  Real m1j = constant_M1(ModularSpec::j_function());
  CHECK(m1j.d() >= 744.0);
  CHECK(m1j.d() < 5000.0);

  Real m1e = constant_M1(ModularSpec::eta_power(-1));
  // coefficient-sum majorant sum p(n) e^{-2 pi (n - 1/24)}
  double maj = 0;
  exactq::QSeries s = exactq::eta_quotient(-1, 200);
  for (long n = 1; n < 200; n++)
    maj += s.coeffs[size_t(n)].get_d() * std::exp(-2.0 * M_PI * (double(n) - 1.0 / 24.0));
  CHECK(m1e.d() <= maj * 1.10);
  CHECK(m1e.d() >= maj * 0.90);

  // grid refinement stays within one percent
  Real a = constant_M1(ModularSpec::eta_power(-1), 256, 96);
  Real c = constant_M1(ModularSpec::eta_power(-1), 1024, 96);
  CHECK(std::abs(a.d() - c.d()) < 0.01 * a.d());
}

TEST_CASE("constant_M2 and g_k") {
  // k = 0, single polar term mu = -1: e^{2 pi}(4 + 1/pi)
  Real m2 = constant_M2(ModularSpec::j_function());
  double want = std::exp(2 * M_PI) * (4.0 + 1.0 / M_PI);
  CHECK(m2.d() == doctest::Approx(want).epsilon(1e-8));
  // k = 3 branch: 2^{3/2}(e^{2 pi}(1 + 1/(2 pi)) + Gamma(2)/(2 pi)^2)
  Real g3 = g_k(Rat(3), Rat(-1));
  double want3 = std::pow(2.0, 1.5) *
                 (std::exp(2 * M_PI) * (1.0 + 1.0 / (2 * M_PI)) + 1.0 / (4 * M_PI * M_PI));
  CHECK(g3.d() == doctest::Approx(want3).epsilon(1e-8));
  // the k <= 2 branch still evaluates for negative weight (diagnostic)
  Real gm = g_k(Rat(-1, 2), rq(-1, 24));
  CHECK(gm.d() > 0);
  CHECK(std::isfinite(gm.d()));
}

TEST_CASE("main_term tracks the coefficients") {
  ModularSpec eta = ModularSpec::eta_power(-1);
  double p100 = exactq::partition_oracle(100).get_d();
  double mt = main_term(eta, 100).d();
  CHECK(mt / p100 > 0.999);
  CHECK(mt / p100 < 1.001);

  ModularSpec jf = ModularSpec::j_function();
  exactq::QSeries j = exactq::j_expansion(16);
  double a10 = j.coeffs[11].get_d();
  double mtj = main_term(jf, 11).d();
  CHECK(std::abs(mtj / a10 - 1.0) < 1e-3);

  // lambda = 0: (2pi)^{2-k} a(mu0) delta^{1-k} / Gamma(2-k) for eta^{-24}
  ModularSpec e24 = ModularSpec::eta_power(-24);
  double want = std::pow(2 * M_PI, 14.0) / 6227020800.0;  // Gamma(14) = 13!
  CHECK(main_term(e24, 1).d() == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("equivalence trend: relative gap to the main term decreases") {
  // the gaps span dozens of orders of magnitude, so they are formed in
  // Real before any double conversion
  ModularSpec eta = ModularSpec::eta_power(-1);
  Real prev = Real::of(1e9, 64);
  for (long n : {25L, 100L, 400L}) {
    Real mt = main_term(eta, n, 256);
    Real aval = Real::of(exactq::partition_oracle(n), 256);
    Real gap = abs(sub(div(aval, mt, 256), Real::of(1L, 256), 256), 256);
    CHECK(gap < prev);
    if (n == 100) CHECK(gap.d() < 1e-2);
    prev = gap;
  }
  ModularSpec jf = ModularSpec::j_function();
  exactq::QSeries j = exactq::j_expansion(402);
  prev = Real::of(1e9, 64);
  for (long lam : {25L, 100L, 400L}) {
    Real mt = main_term(jf, lam + 1, 512);
    Real aval = Real::of(j.coeffs[size_t(lam + 1)], 512);
    Real gap = abs(sub(div(aval, mt, 512), Real::of(1L, 512), 512), 512);
    CHECK(gap < prev);
    if (lam == 100) CHECK(gap.d() < 1e-2);
    prev = gap;
  }
}

TEST_CASE("dominant-term inequality for eta^{-1} at sampled indices") {
  ModularSpec spec = ModularSpec::eta_power(-1);
  DominanceData dom = dominance_data(spec);
  mpfr_prec_t p = 256;
  Real zeta32 = specfun::zeta_value(Rat(3, 2), p);
  Real front = pow(mul_2si(Real::pi(p), 1), Real::of(Rat(5, 2), p), p);
  Real dpow = pow(Real::of(dom.delta, p), Real::of(Rat(3, 2), p), p);
  for (long n = 3; n <= 420; n += 21) {
    Rat lam = spec.lambda(n);
    Real arg = mul(mul(mul_2si(Real::pi(p), 1), mul_2si(Real::pi(p), 1), p),
                   Real::of(Rat(lam * dom.delta_prime), p), p);
    Real L = specfun::eval_L(Rat(3, 2), arg, mul_2si(Real::of(1.0, 64), -30)).value;
    Real rhs = mul(mul(mul(front, zeta32, p), dpow, p), L, p);
    Real lhs = abs(sub(Real::of(exactq::partition_oracle(n), p), main_term(spec, n, p), p), p);
    CHECK(lhs.d() <= rhs.d() * (1.0 + 1e-9) + 1e-9);
  }
}

TEST_CASE("budgets are bit-identical across thread counts") {
  ModularSpec spec = ModularSpec::eta_power(-1);
  for (long n : {12L, 77L}) {
    EngineOptions one, four;
    one.threads = 1;
    four.threads = 4;
    ErrorBudget a = coefficient_negative_weight(spec, n, Real::of(0.25, 64), one);
    ErrorBudget b = coefficient_negative_weight(spec, n, Real::of(0.25, 64), four);
    CHECK(a.main.str(40) == b.main.str(40));
    CHECK(a.bound.str(20) == b.bound.str(20));
  }
}

TEST_CASE("effective_lambda0 for negative weight (ratio certificate)") {
  ModularSpec spec = ModularSpec::eta_power(-1);
  Lambda0Certificate cert = effective_lambda0(spec);
  CHECK(cert.kind == "ratio");
  CHECK(cert.lhs < cert.rhs);
  // target is 1/zeta(3/2) for a single polar term of coefficient 1
  CHECK(cert.rhs.d() == doctest::Approx(1.0 / 2.612375348685488).epsilon(1e-6));
  // oracle sweep below the threshold (and to 200)
  double bound = std::max(cert.lambda0.d(), 200.0);
  for (long n = 0; Rat(n) - rq(1, 24) <= Rat(long(bound)); n++)
    CHECK(exactq::partition_oracle(n) > 0);

  Lambda0Certificate c24 = effective_lambda0(ModularSpec::eta_power(-24));
  CHECK(c24.kind == "ratio");
  CHECK(c24.lhs < c24.rhs);
}

TEST_CASE("effective_lambda0 for the j function (margin certificate)") {
  Lambda0Certificate cert = effective_lambda0(ModularSpec::j_function());
  CHECK(cert.kind == "margin");
  CHECK(cert.lhs > cert.rhs);
  CHECK(cert.lambda0.d() >= 1.0);
  CHECK(cert.lambda0.d() < 1e4);
  exactq::QSeries j = exactq::j_expansion(110);
  for (long lam = 1; lam <= 100; lam++) CHECK(j.coeffs[size_t(lam + 1)] != 0);
}

TEST_CASE("cusp-finite specs are refused") {
  CHECK_THROWS_AS(effective_lambda0(ModularSpec::eta_power(1)), CuspFinite);
  CHECK_THROWS_AS(coefficient(ModularSpec::eta_power(2), 3, Real::of(0.25, 64)),
                  CuspFinite);
}

TEST_CASE("weight-sign dispatch errors") {
  CHECK_THROWS_AS(
      coefficient_nonneg_weight(ModularSpec::eta_power(-1), 5, std::nullopt),
      std::domain_error);
  CHECK_THROWS_AS(
      coefficient_negative_weight(ModularSpec::j_function(), 5, Real::of(0.25, 64)),
      std::domain_error);
  CHECK_THROWS_AS(
      coefficient_negative_weight(ModularSpec::eta_power(-1), 0, Real::of(0.25, 64)),
      std::invalid_argument);  // lambda = -1/24 < 0
}
