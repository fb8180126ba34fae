#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmod/multiplier.hpp"
#include "qmod/specfun.hpp"

namespace qmod::circle {

using multiplier::ModularSpec;

struct BudgetItem {
  std::string name;
  Real bound;
};

// A computed coefficient with a certified absolute error bound and the
// provenance of each contribution.
struct ErrorBudget {
  Rat lambda;
  Real main;
  Real bound;                    // >= sum of breakdown entries
  std::vector<BudgetItem> breakdown;
  long cutoff = 0;               // series cutoff in c
  mpfr_prec_t prec = 0;
  bool exact = false;            // polar coefficient, returned exactly
  std::optional<Int> snapped;    // set when bound < 1/2 and coefficients are integral
};

struct DominanceData {
  Rat mu0;          // polar exponent of largest absolute value
  Rat delta;        // |mu0|
  Rat delta_prime;  // second largest of |mu| c^{-2}
  Int M;            // sum of |a(mu)|
  bool tie = false; // delta_prime attained by more than one (mu, c) pair
};

struct EngineOptions {
  int threads = 0;           // 0 = hardware concurrency
  mpfr_prec_t min_prec = 0;  // floor on working precision
};

// largest / second largest of the |mu| c^{-2} lattice, exact
DominanceData dominance_data(const ModularSpec& spec);

// Convergent-series coefficient for weight < 0: partial sum over c <= C
// with a certified tail (|A_c| <= c, L increasing, integral comparison of
// sum c^{k-1}) plus all evaluation errors.  |main - a(lambda)| <= bound
// <= target.
ErrorBudget coefficient_negative_weight(const ModularSpec& spec, long n,
                                        const Real& target,
                                        const EngineOptions& opts = {});

struct NonnegConstants {
  Real M1, M2;
};
NonnegConstants nonneg_constants(const ModularSpec& spec);

// Truncated double sum over c <= N for weight >= 0 with the explicit
// error bound built from M1 (polar-part comparison) and M2 (contour
// comparison).  Auto mode (N unset) uses N = floor(sqrt(lambda)),
// requiring lambda >= 1.
ErrorBudget coefficient_nonneg_weight(const ModularSpec& spec, long n,
                                      std::optional<long> N = std::nullopt,
                                      const EngineOptions& opts = {},
                                      const NonnegConstants* cached = nullptr);

// dispatch: exact polar passthrough for lambda < 0, else by weight sign
ErrorBudget coefficient(const ModularSpec& spec, long n, const Real& target,
                        const EngineOptions& opts = {});

// Upper bound for sup_{Im z >= 1} |f - P| via the boundary maximum on
// |q| = e^{-2 pi}: grid maximum plus a derivative grid-gap pad plus a
// certified coefficient tail.
Real constant_M1(const ModularSpec& spec, long grid = 512, long T = 96);

// sum over polar mu of |a(mu)| g_k(mu)
Real constant_M2(const ModularSpec& spec);
Real g_k(const Rat& k, const Rat& mu, mpfr_prec_t prec = 128);

// dominant single term (2pi)^{2-k} a(mu0) delta^{1-k} eps L_{1-k}(4 pi^2 lambda delta)
Real main_term(const ModularSpec& spec, long n, mpfr_prec_t prec = 192);

// certified upper bound of sum_{m > T} |a_m| e^{-2 pi (m - m0)},
// where m0 is the first index with lambda_min + m >= 0
Real coeff_tail_at_boundary(const ModularSpec& spec, long T, long m0);

struct Lambda0Certificate {
  Real lambda0;
  Real lhs;          // certified value at lambda0
  Real rhs;          // the target it was checked against
  std::string kind;  // "ratio" for k < 0, "margin" for k = 0
};

// Effective threshold: a(lambda) != 0 for every lambda >= lambda0 in
// Lambda.  For k < 0 via the L-ratio inequality with target
// zeta(1-k)^{-1} |a(mu0)| / M(f); for k = 0 by the dominance of the main
// term over the truncation bound plus the off-main majorant.
Lambda0Certificate effective_lambda0(const ModularSpec& spec,
                                     const EngineOptions& opts = {});

}  // namespace qmod::circle
