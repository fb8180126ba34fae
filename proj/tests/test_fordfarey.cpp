#include <doctest.h>

#include "qmod/fordfarey.hpp"

using namespace qmod;
using namespace qmod::fordfarey;

namespace {

Rat rq(long p, long q) {
  Rat r(p, q);
  r.canonicalize();
  return r;
}

long count_substr(const std::string& hay, const std::string& needle) {
  long k = 0;
  size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    k++;
    pos += needle.size();
  }
  return k;
}

// exact squared distance from x = a/c on the real line to the chord [R, S]
Rat chord_distance_sq(const FordArcData& d) {
  Rat px = d.x.value();
  Rat ux = d.S.re - d.R.re, uy = d.S.im - d.R.im;
  Rat cross = ux * (Rat(0) - d.R.im) - uy * (px - d.R.re);
  Rat num = cross * cross;
  Rat den = ux * ux + uy * uy;
  Rat v = num / den;
  v.canonicalize();
  return v;
}

}  // namespace

TEST_CASE("farey_sequence: small orders") {
  auto f1 = farey_sequence(1);
  REQUIRE(f1.size() == 2);
  CHECK(f1[0] == FareyFraction(Int(0), Int(1)));
  CHECK(f1[1] == FareyFraction(Int(1), Int(1)));

  auto f3 = farey_sequence(3);
  REQUIRE(f3.size() == 5);
  CHECK(f3[1] == FareyFraction(Int(1), Int(3)));
  CHECK(f3[2] == FareyFraction(Int(1), Int(2)));
  CHECK(f3[3] == FareyFraction(Int(2), Int(3)));

  CHECK(farey_sequence(5).size() == 11);
}

TEST_CASE("farey_sequence: consecutive terms are unimodular") {
  for (long N = 1; N <= 60; N++) {
    auto f = farey_sequence(N);
    for (size_t i = 1; i < f.size(); i++) {
      CHECK(f[i].a * f[i - 1].c - f[i - 1].a * f[i].c == 1);
      CHECK(f[i].c <= N);
    }
  }
}

TEST_CASE("ford_arc_data: the 1/2, N=3 instance") {
  FordArcData d = ford_arc_data(FareyFraction(Int(1), Int(2)), 3);
  CHECK(d.gamma.a == 1);
  CHECK(d.gamma.b == 0);
  CHECK(d.gamma.c == 2);
  CHECK(d.gamma.d == 1);
  CHECK(d.n == 1);
  CHECK(d.m == 2);
  CHECK(d.xprev == FareyFraction(Int(1), Int(3)));
  CHECK(d.xnext == FareyFraction(Int(2), Int(3)));
  CHECK(d.R.re == Rat(5, 13));
  CHECK(d.R.im == Rat(1, 13));
  // Im R within [1/(2N^2), 2/(N+1)^2]
  CHECK(d.R.im >= Rat(1, 18));
  CHECK(d.R.im <= rq(2, 16));
}

TEST_CASE("ford_arc_data: neighbors of 0/1 at order 1") {
  FordArcData d = ford_arc_data(FareyFraction(Int(0), Int(1)), 1);
  CHECK(d.xprev == FareyFraction(Int(-1), Int(1)));
  CHECK(d.xnext == FareyFraction(Int(1), Int(1)));
}

TEST_CASE("ford_arc_data matches the Farey-sequence neighbors") {
  for (long N = 1; N <= 40; N++) {
    auto f = farey_sequence(N);
    for (size_t i = 0; i < f.size(); i++) {
      FordArcData d = ford_arc_data(f[i], N);
      if (i > 0) CHECK(d.xprev == f[i - 1]);
      if (i + 1 < f.size()) CHECK(d.xnext == f[i + 1]);
    }
    // wrap-around neighbors at the endpoints
    FordArcData d0 = ford_arc_data(f.front(), N);
    CHECK(d0.xprev == FareyFraction(Int(-1), Int(N)));
    FordArcData d1 = ford_arc_data(f.back(), N);
    CHECK(d1.xnext == FareyFraction(Int(N + 1), Int(N)));
  }
}

TEST_CASE("ford_arc_data: full invariant sweep at N = 24") {
  long N = 24;
  for (const auto& x : farey_sequence(N)) {
    FordArcData d = ford_arc_data(x, N);
    CHECK(d.cprev >= 1);
    CHECK(d.cprev <= N);
    CHECK(d.cnext >= 1);
    CHECK(d.cnext <= N);
    CHECK(d.x.c + d.cprev >= N + 1);
    CHECK(d.x.c + d.cnext >= N + 1);
    // R = (a' + i a)/(c' + i c) cross-checked by clearing denominators
    Rat cr = Rat(d.x.c);
    Rat cp = Rat(d.cprev);
    CHECK(d.R.re * cp - d.R.im * cr == d.xprev.value() * Rat(d.cprev));
    CHECK(d.R.re * cr + d.R.im * cp == Rat(d.x.a));
    CHECK(d.R.im == Rat(1) / Rat(d.x.c * d.x.c + d.cprev * d.cprev));
    CHECK(d.S.im == Rat(1) / Rat(d.x.c * d.x.c + d.cnext * d.cnext));
    CHECK(d.R.im >= rq(1, 2 * N * N));
    CHECK(d.R.im <= rq(2, (N + 1) * (N + 1)));
  }
}

TEST_CASE("ford_arc_data is independent of the (b, d) choice") {
  for (long t : {-3L, -1L, 1L, 2L, 5L}) {
    FordArcData a = ford_arc_data(FareyFraction(Int(3), Int(7)), 9);
    FordArcData b = ford_arc_data_shifted(FareyFraction(Int(3), Int(7)), 9, t);
    CHECK(a.xprev == b.xprev);
    CHECK(a.xnext == b.xnext);
    CHECK(a.R.re == b.R.re);
    CHECK(a.R.im == b.R.im);
    CHECK(a.S.re == b.S.re);
    CHECK(a.S.im == b.S.im);
    CHECK(b.n == a.n - t);
    CHECK(b.m == a.m + t);
  }
}

TEST_CASE("chord_bounds dominate the exact geometry") {
  {
    FordArcData d = ford_arc_data(FareyFraction(Int(1), Int(2)), 3);
    auto [dist2, radius] = chord_bounds(d);
    CHECK(dist2 == rq(2, 36));
    Rat exact = (d.R.re - Rat(1, 2)) * (d.R.re - Rat(1, 2)) + d.R.im * d.R.im;
    exact.canonicalize();
    CHECK(exact == Rat(1, 52));
    CHECK(exact <= dist2);
  }
  {
    FordArcData d = ford_arc_data(FareyFraction(Int(0), Int(1)), 1);
    auto [dist2, radius] = chord_bounds(d);
    CHECK(radius == 1);
  }
  {
    FordArcData d = ford_arc_data(FareyFraction(Int(1), Int(3)), 3);
    auto [dist2, radius] = chord_bounds(d);
    CHECK(dist2 == Rat(2, 81));
    Rat x = Rat(1, 3);
    Rat er = (d.R.re - x) * (d.R.re - x) + d.R.im * d.R.im;
    Rat es = (d.S.re - x) * (d.S.re - x) + d.S.im * d.S.im;
    CHECK(er <= dist2);
    CHECK(es <= dist2);
    // image-circle radius bound: distance from x to the chord is >= 1/(2N^2)
    Rat dsq = chord_distance_sq(d);
    CHECK(dsq >= Rat(1, 4 * 81 * 81));
  }
}

TEST_CASE("render_ford_svg: one circle element per Farey fraction") {
  CHECK(count_substr(render_ford_svg(1), "<circle") == 2);
  CHECK(count_substr(render_ford_svg(3), "<circle") == 5);
  CHECK(count_substr(render_ford_svg(5), "<circle") == 11);
  CHECK_THROWS_AS(render_ford_svg(0), std::invalid_argument);
  CHECK_THROWS_AS(render_ford_svg(201), std::invalid_argument);
}

TEST_CASE("denominator above the order is rejected") {
  CHECK_THROWS_AS(ford_arc_data(FareyFraction(Int(1), Int(5)), 3), std::invalid_argument);
}
