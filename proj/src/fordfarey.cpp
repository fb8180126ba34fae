#include "qmod/fordfarey.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmod::fordfarey {

FareyFraction::FareyFraction(Int a_, Int c_) : a(std::move(a_)), c(std::move(c_)) {
  if (c < 0) {
    a = -a;
    c = -c;
  }
  if (c == 0) throw std::invalid_argument("FareyFraction: zero denominator");
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), c.get_mpz_t());
  if (g != 1) throw std::invalid_argument("FareyFraction: not irreducible");
}

std::vector<FareyFraction> farey_sequence(long N) {
  if (N < 1) throw std::invalid_argument("farey_sequence: N must be >= 1");
  std::vector<FareyFraction> out;
  // next-term recurrence: after consecutive a/b, c/d the following term
  // is (kc-a)/(kd-b) with k = floor((N+b)/d)
  Int a = 0, b = 1, c = 1, d = N;
  out.emplace_back(a, b);
  while (true) {
    out.emplace_back(c, d);
    if (c == d) break;  // reached 1/1
    Int k = (Int(N) + b) / d;
    Int p = k * c - a;
    Int q = k * d - b;
    a = c;
    b = d;
    c = p;
    d = q;
  }
  return out;
}

static FordArcData arc_data_from_matrix(const FareyFraction& x, long N, Int b, Int d) {
  FordArcData out;
  out.x = x;
  out.N = N;
  const Int& a = x.a;
  const Int& c = x.c;
  out.gamma = Mat{a, b, c, d};
  // largest n with d + n c <= N, largest m with -d + m c <= N
  Int n, m;
  mpz_fdiv_q(n.get_mpz_t(), Int(Int(N) - d).get_mpz_t(), c.get_mpz_t());
  mpz_fdiv_q(m.get_mpz_t(), Int(Int(N) + d).get_mpz_t(), c.get_mpz_t());
  out.n = n;
  out.m = m;
  Int cp = d + n * c;
  Int cn = -d + m * c;
  Int ap = b + n * a;
  Int an = -b + m * a;
  out.cprev = cp;
  out.cnext = cn;
  out.xprev = FareyFraction(ap, cp);
  out.xnext = FareyFraction(an, cn);
  // R = (ac + a'c' + i)/(c^2 + c'^2), S = (ac + a''c'' + i)/(c^2 + c''^2)
  Int den_r = c * c + cp * cp;
  Int den_s = c * c + cn * cn;
  out.R.re = Rat(a * c + ap * cp) / Rat(den_r);
  out.R.im = Rat(1) / Rat(den_r);
  out.S.re = Rat(a * c + an * cn) / Rat(den_s);
  out.S.im = Rat(1) / Rat(den_s);
  out.R.re.canonicalize();
  out.R.im.canonicalize();
  out.S.re.canonicalize();
  out.S.im.canonicalize();
  return out;
}

FordArcData ford_arc_data(const FareyFraction& x, long N) {
  if (x.c > N) throw std::invalid_argument("ford_arc_data: denominator exceeds N");
  // canonical d = a^{-1} mod c in [0, c), b = (ad - 1)/c
  Int am;
  mpz_mod(am.get_mpz_t(), x.a.get_mpz_t(), x.c.get_mpz_t());
  Int d;
  if (mpz_invert(d.get_mpz_t(), am.get_mpz_t(), x.c.get_mpz_t()) == 0 && x.c != 1)
    throw std::logic_error("ford_arc_data: no inverse");
  if (x.c == 1) d = 0;
  Int b = (x.a * d - 1) / x.c;
  return arc_data_from_matrix(x, N, b, d);
}

FordArcData ford_arc_data_shifted(const FareyFraction& x, long N, long t) {
  FordArcData base = ford_arc_data(x, N);
  Int b = base.gamma.b + Int(t) * x.a;
  Int d = base.gamma.d + Int(t) * x.c;
  return arc_data_from_matrix(x, N, b, d);
}

std::pair<Rat, Rat> chord_bounds(const FordArcData& d) {
  Rat dist2 = Rat(2) / Rat(d.x.c * d.x.c * Int(d.N) * Int(d.N));
  Rat radius = Rat(Int(d.N) * Int(d.N)) / Rat(d.x.c * d.x.c);
  dist2.canonicalize();
  radius.canonicalize();
  return {dist2, radius};
}

namespace {

struct Pt {
  double x, y;
};

// sample the clockwise arc of the circle centered at o through from->to
void sample_arc(std::ostringstream& os, Pt o, double rho, Pt from, Pt to, int steps) {
  double th0 = std::atan2(from.y - o.y, from.x - o.x);
  double th1 = std::atan2(to.y - o.y, to.x - o.x);
  double sweep = th0 - th1;
  while (sweep <= 0) sweep += 2 * M_PI;
  for (int s = 0; s <= steps; s++) {
    double th = th0 - sweep * double(s) / double(steps);
    double px = o.x + rho * std::cos(th);
    double py = o.y + rho * std::sin(th);
    os << px << "," << (0.6 - py) << " ";
  }
}

}  // namespace

std::string render_ford_svg(long N) {
  if (N < 1 || N > 200) throw std::invalid_argument("render_ford_svg: need 1 <= N <= 200");
  std::ostringstream os;
  os.precision(8);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
        "viewBox=\"0 0 1 0.6\" width=\"900\" height=\"540\">\n";
  os << "  <g fill=\"none\" stroke=\"#4466aa\" stroke-width=\"0.0015\">\n";
  auto seq = farey_sequence(N);
  for (const auto& f : seq) {
    double c = f.c.get_d();
    double r = 1.0 / (2.0 * c * c);
    double cx = f.a.get_d() / c;
    os << "    <circle cx=\"" << cx << "\" cy=\"" << (0.6 - r) << "\" r=\"" << r << "\"/>\n";
  }
  os << "  </g>\n";
  // integration path: clockwise arcs between consecutive tangency points
  os << "  <polyline fill=\"none\" stroke=\"#cc3333\" stroke-width=\"0.0025\" points=\"";
  for (const auto& f : seq) {
    FordArcData d = ford_arc_data(f, N);
    double c = f.c.get_d();
    double rho = 1.0 / (2.0 * c * c);
    Pt o{f.a.get_d() / c, rho};
    Pt R{d.R.re.get_d(), d.R.im.get_d()};
    Pt S{d.S.re.get_d(), d.S.im.get_d()};
    bool first = (f.a == 0 && f.c == 1);
    bool last = (f.a == 1 && f.c == 1);
    if (first) R = Pt{0.0, 1.0};  // path starts at i (clipped by the viewBox)
    if (last) S = Pt{1.0, 1.0};
    sample_arc(os, o, rho, R, S, 24);
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

void render_ford_path(long N, const std::string& out_path) {
  std::string doc = render_ford_svg(N);
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output path: " + out_path);
  f << doc;
  if (!f.good()) throw std::runtime_error("write failed: " + out_path);
}

}  // namespace qmod::fordfarey
