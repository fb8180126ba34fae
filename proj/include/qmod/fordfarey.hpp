#pragma once

#include <string>
#include <vector>

#include "qmod/numeric.hpp"

namespace qmod::fordfarey {

// Irreducible fraction a/c with c >= 1.
struct FareyFraction {
  Int a;
  Int c;

  FareyFraction() : a(0), c(1) {}
  FareyFraction(Int a_, Int c_);  // normalizes sign, checks gcd

  Rat value() const { return Rat(a) / Rat(c); }
  bool operator==(const FareyFraction& o) const { return a == o.a && c == o.c; }
};

// Exact complex number with rational real and imaginary parts.
struct RatPoint {
  Rat re, im;
};

struct Mat {
  Int a, b, c, d;
  Int det() const { return a * d - b * c; }
};

// Tangency data of the Ford circle C_x within the order-N dissection:
// predecessor x', successor x'', the unimodular matrix used to
// parametrize the arc, and the exact tangency points R (with C_{x'})
// and S (with C_{x''}).
struct FordArcData {
  FareyFraction x;
  long N = 0;
  FareyFraction xprev, xnext;
  Mat gamma;
  Int n, m;       // largest integers with d+nc <= N, -d+mc <= N
  Int cprev, cnext;  // c' = d+nc, c'' = -d+mc
  RatPoint R, S;
};

// Farey sequence of order N in [0,1], ascending.
std::vector<FareyFraction> farey_sequence(long N);

// Arc data for x = a/c with c <= N.  The matrix is the canonical one
// with d = a^{-1} mod c in [0,c).
FordArcData ford_arc_data(const FareyFraction& x, long N);

// Same, with (b,d) replaced by (b+t*a, d+t*c); the geometric output is
// unchanged for any shift t.
FordArcData ford_arc_data_shifted(const FareyFraction& x, long N, long t);

// (squared chord-distance bound 2/(cN)^2, circle-radius bound N^2/c^2)
std::pair<Rat, Rat> chord_bounds(const FordArcData& d);

// SVG rendering of the Ford circles of order N in [0,1] together with
// the integration path through the tangency points.  1 <= N <= 200.
std::string render_ford_svg(long N);
void render_ford_path(long N, const std::string& out_path);

}  // namespace qmod::fordfarey
