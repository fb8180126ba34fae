#pragma once

#include <span>
#include <vector>

#include "qmod/fordfarey.hpp"
#include "qmod/numeric.hpp"

namespace qmod::multiplier {

using fordfarey::FareyFraction;
using fordfarey::Mat;

struct PolarTerm {
  Rat mu;   // exponent, < 0
  Int a;    // exact coefficient, != 0
};

// Description of a modular function handled by the engine: an eta power
// f = eta^r (any nonzero integer r, weight r/2) or the weight-0 j
// function with trivial multiplier.  The polar part is carried as exact
// data derived from the q-series engine.
struct ModularSpec {
  enum class Kind { EtaPower, JFunction };

  Kind kind = Kind::EtaPower;
  long r = -1;            // eta exponent (0 for j)
  Rat weight;             // k = r/2, or 0 for j
  Rat lambda_min;         // r/24, or -1 for j
  std::vector<PolarTerm> polar;
  int epsilon = 1;        // the sign in j(S,z) = eps (z/i)^k; +1 here
  bool integer_coeffs = true;

  Rat lambda(long n) const { return lambda_min + Rat(n); }
  Rat nu() const { return Rat(1) - weight; }  // order 1-k of the L function

  static ModularSpec eta_power(long r);
  static ModularSpec j_function();

  std::string name() const;
};

// Exact Dedekind sum s(d, c) for gcd(d, c) = 1, c >= 1, computed by the
// Euclidean reciprocity reduction.
Rat dedekind_sum(const Int& d, const Int& c);

// Exponent (in half-turns) of the eta-power multiplier for a matrix with
// c > 0:  eta(gz)^r = e^{i pi rho} ((cz+d)/i)^{r/2} eta(z)^r,
// rho = r ((a+d)/(12c) - s(d,c)).
Rat eta_epsilon_exponent(long r, const Int& a, const Int& c, const Int& d);

// Exponent (in half-turns) of alpha_x(lambda, mu) for the matrix
// (a, *; c, d):  multiplier part plus -2(lambda a + mu d)/c.
Rat alpha_exponent(const ModularSpec& spec, const Rat& lambda, const Rat& mu,
                   const Int& a, const Int& c, const Int& d);

// epsilon(gamma): the unit complex with j(gamma,z) = epsilon(gamma)((cz+d)/i)^k.
// Requires det = 1 and c > 0.
CEnc epsilon_gamma(const ModularSpec& spec, const Mat& g, mpfr_prec_t prec);

// alpha_x(lambda, mu) for the canonical matrix attached to x
// (d = a^{-1} mod c in [0, c)); lambda, mu must lie in lambda_min + Z.
CEnc alpha_x(const ModularSpec& spec, const Rat& lambda, const Rat& mu,
             const FareyFraction& x, mpfr_prec_t prec);

// same from an explicit matrix (for the choice-independence checks)
CEnc alpha_from_matrix(const ModularSpec& spec, const Rat& lambda, const Rat& mu,
                       const Mat& g, mpfr_prec_t prec);

// A_c(lambda, mu) = sum of alpha_{a/c}(lambda, mu) over a in [0, c)
// coprime to c; |A_c| <= phi(c).
CEnc kloosterman_A(const ModularSpec& spec, const Rat& lambda, const Rat& mu,
                   long c, mpfr_prec_t prec);

// one pass over a for several mu at once (shared Dedekind sums)
std::vector<CEnc> kloosterman_A_multi(const ModularSpec& spec, const Rat& lambda,
                                      std::span<const Rat> mus, long c,
                                      mpfr_prec_t prec);

// Full automorphy factor j(gamma, z) for any gamma in SL2(Z) (numeric;
// used by the transformation-law and cocycle checks).
Cplx automorphy_j(const ModularSpec& spec, const Mat& g, const Cplx& z,
                  mpfr_prec_t prec);

long euler_phi(long c);

}  // namespace qmod::multiplier
