#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qmod/qseries.hpp"

namespace qmod::lacuna {

enum class Verdict {
  ApparentlyLacunary,
  ApparentlyNonLacunary,
  CertifiedNonLacunary,
};

std::string verdict_name(Verdict v);

// Exact coefficient-density profile of a q-expansion at the given cut
// points: counts #{lambda <= x : a(lambda) != 0} with exact rational
// comparison of exponents.
struct DensityReport {
  std::vector<Rat> xs;
  std::vector<long> counts;
  std::vector<double> densities;
  Verdict verdict = Verdict::ApparentlyNonLacunary;
  std::optional<double> lambda0;  // present only for the certified verdict
};

// cuts must lie within the truncation range of the series
DensityReport density_profile(const exactq::QSeries& series, const std::vector<Rat>& cuts,
                              double lacunary_threshold = 0.05);

struct APScanRow {
  long modulus = 1;
  long residue = 0;
  std::optional<long> first_miss;  // first index in the class with zero coefficient
};

// For each modulus m <= max_modulus and residue class, scans the indices
// n = residue, residue+m, ... within truncation and reports the first
// vanishing coefficient, if any.  A class with no miss witnesses an
// all-nonzero arithmetic progression at desk scale.
std::vector<APScanRow> arithmetic_progression_scan(const exactq::QSeries& series,
                                                   long max_modulus);

// Upgrades the verdict to certified-non-lacunary.  Requires a threshold
// lambda0 from the effectivity machinery and re-checks every exponent in
// [0, lambda0] against the exact series; throws if any vanishes or the
// truncation does not cover lambda0.
void certify_non_lacunary(DensityReport& report, const exactq::QSeries& series,
                          double lambda0);

// CSV emission: "# verdict: ..." comment, header, one row per cut
void write_csv(std::ostream& os, const DensityReport& report);

}  // namespace qmod::lacuna
