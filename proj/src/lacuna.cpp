#include "qmod/lacuna.hpp"

#include <ostream>
#include <stdexcept>

namespace qmod::lacuna {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ApparentlyLacunary: return "apparently-lacunary";
    case Verdict::ApparentlyNonLacunary: return "apparently-non-lacunary";
    case Verdict::CertifiedNonLacunary: return "certified-non-lacunary";
  }
  return "?";
}

DensityReport density_profile(const exactq::QSeries& series, const std::vector<Rat>& cuts,
                              double lacunary_threshold) {
  DensityReport rep;
  for (const Rat& x : cuts) {
    // largest n with offset + n <= x
    Rat nmax_r = x - series.offset;
    if (nmax_r < 0) {
      rep.xs.push_back(x);
      rep.counts.push_back(0);
      rep.densities.push_back(0.0);
      continue;
    }
    Int nmax = rat_floor(nmax_r);
    if (nmax >= series.order())
      throw std::invalid_argument("density_profile: cut beyond truncation");
    long nm = long(mpz_get_si(nmax.get_mpz_t()));
    long count = 0;
    for (long n = 0; n <= nm; n++)
      if (series.coeffs[size_t(n)] != 0) count++;
    rep.xs.push_back(x);
    rep.counts.push_back(count);
    rep.densities.push_back(double(count) / x.get_d());
  }
  // heuristic verdict: low and non-increasing density suggests lacunarity
  bool decreasing = true;
  for (size_t i = 1; i < rep.densities.size(); i++)
    if (rep.densities[i] > rep.densities[i - 1] * 1.02) decreasing = false;
  if (!rep.densities.empty() && rep.densities.back() < lacunary_threshold && decreasing)
    rep.verdict = Verdict::ApparentlyLacunary;
  else
    rep.verdict = Verdict::ApparentlyNonLacunary;
  return rep;
}

std::vector<APScanRow> arithmetic_progression_scan(const exactq::QSeries& series,
                                                   long max_modulus) {
  std::vector<APScanRow> out;
  for (long m = 1; m <= max_modulus; m++) {
    for (long r = 0; r < m; r++) {
      APScanRow row;
      row.modulus = m;
      row.residue = r;
      for (long n = r; n < series.order(); n += m) {
        if (series.coeffs[size_t(n)] == 0) {
          row.first_miss = n;
          break;
        }
      }
      out.push_back(row);
    }
  }
  return out;
}

void certify_non_lacunary(DensityReport& report, const exactq::QSeries& series,
                          double lambda0) {
  Rat bound = Rat(lambda0 <= 0 ? 0.0 : lambda0);
  Rat nmax_r = bound - series.offset;
  Int nmax = rat_floor(nmax_r);
  if (nmax >= series.order())
    throw std::invalid_argument("certify_non_lacunary: truncation does not reach lambda0");
  long nm = long(mpz_get_si(nmax.get_mpz_t()));
  for (long n = 0; n <= nm; n++) {
    if (series.exponent(n) < 0) continue;  // threshold applies to lambda >= 0
    if (series.coeffs[size_t(n)] == 0)
      throw std::runtime_error("certify_non_lacunary: zero coefficient below lambda0");
  }
  report.verdict = Verdict::CertifiedNonLacunary;
  report.lambda0 = lambda0;
}

void write_csv(std::ostream& os, const DensityReport& report) {
  os << "# verdict: " << verdict_name(report.verdict);
  if (report.lambda0) os << " lambda0=" << *report.lambda0;
  os << "\n";
  os << "x,count,density\n";
  char buf[64];
  for (size_t i = 0; i < report.xs.size(); i++) {
    std::snprintf(buf, sizeof buf, "%.6f", report.densities[i]);
    os << report.xs[i].get_num();
    if (report.xs[i].get_den() != 1) os << "/" << report.xs[i].get_den();
    os << "," << report.counts[i] << "," << buf << "\n";
  }
}

}  // namespace qmod::lacuna
