#include "qmod/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "qmod/circle.hpp"
#include "qmod/fordfarey.hpp"
#include "qmod/lacuna.hpp"
#include "qmod/qseries.hpp"

namespace qmod::cli {

using circle::EngineOptions;
using circle::ErrorBudget;
using multiplier::ModularSpec;

namespace {

struct SpecArgs {
  long eta = 0;
  bool j = false;
  std::string spec_file;
  std::optional<double> target;
  std::optional<long> truncation;
  mpfr_prec_t prec_bits = 0;
};

void add_spec_flags(CLI::App* cmd, SpecArgs& sa) {
  auto* eta = cmd->add_option("--eta", sa.eta, "eta exponent r (f = eta^r, r != 0)");
  auto* jf = cmd->add_flag("--j", sa.j, "the modular invariant j");
  auto* sf = cmd->add_option("--spec", sa.spec_file, "spec document (JSON)");
  eta->excludes(jf);
  eta->excludes(sf);
  jf->excludes(sf);
}

ModularSpec resolve_spec(const SpecArgs& sa_in, SpecArgs& sa) {
  sa = sa_in;
  if (!sa.spec_file.empty()) {
    std::ifstream f(sa.spec_file);
    if (!f) throw std::invalid_argument("cannot open spec file: " + sa.spec_file);
    nlohmann::json doc = nlohmann::json::parse(f);
    if (!doc.contains("eta_exponent"))
      throw std::invalid_argument("spec file: eta_exponent is required");
    sa.eta = doc["eta_exponent"].get<long>();
    if (doc.contains("precision_bits")) sa.prec_bits = doc["precision_bits"].get<long>();
    if (doc.contains("truncation")) sa.truncation = doc["truncation"].get<long>();
    if (doc.contains("target_abs_err")) sa.target = doc["target_abs_err"].get<double>();
    return ModularSpec::eta_power(sa.eta);
  }
  if (sa.j) return ModularSpec::j_function();
  if (sa.eta == 0)
    throw std::invalid_argument("one of --eta R (R != 0), --j or --spec is required");
  return ModularSpec::eta_power(sa.eta);
}

mpfr_prec_t env_min_prec() {
  const char* e = std::getenv("CM_PRECISION_BITS");
  if (!e) return 0;
  long v = std::strtol(e, nullptr, 10);
  return v > 0 ? mpfr_prec_t(v) : 0;
}

std::string rat_str(const Rat& q) {
  std::ostringstream os;
  os << q.get_num();
  if (q.get_den() != 1) os << "/" << q.get_den();
  return os.str();
}

void print_budget_text(std::ostream& out, const ErrorBudget& b) {
  out << "lambda = " << rat_str(b.lambda) << "\n";
  if (b.exact) {
    out << "main = " << b.main.str(6) << "\n";
    out << "bound = 0 (exact polar coefficient)\n";
  } else {
    out << "cutoff = " << b.cutoff << "\n";
    out << "main = " << b.main.str(24) << "\n";
    out << "bound = " << b.bound.str(6) << "\n";
  }
  if (b.snapped) out << "integer = " << *b.snapped << "\n";
}

void print_budget_json(std::ostream& out, const ErrorBudget& b) {
  nlohmann::ordered_json j;
  j["lambda"] = rat_str(b.lambda);
  j["main"] = b.main.str(24);
  j["bound"] = b.bound.str(8);
  j["exact"] = b.exact;
  j["cutoff"] = b.cutoff;
  j["precision_bits"] = long(b.prec);
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const auto& it : b.breakdown) {
    items.push_back({{"name", it.name}, {"bound", it.bound.str(8)}});
  }
  j["breakdown"] = items;
  if (b.snapped) j["integer"] = b.snapped->get_str();
  out << j.dump(2) << "\n";
}

int cmd_coeff(const SpecArgs& sa_in, long n, std::optional<long> N, bool json,
              int threads, std::ostream& out) {
  SpecArgs sa;
  ModularSpec spec = resolve_spec(sa_in, sa);
  EngineOptions opts;
  opts.threads = threads;
  opts.min_prec = sa.prec_bits ? sa.prec_bits : env_min_prec();
  double target = sa.target.value_or(spec.integer_coeffs ? 0.25 : 1e-10);
  ErrorBudget b;
  if (N && spec.weight >= 0 && spec.lambda(n) >= 0) {
    b = circle::coefficient_nonneg_weight(spec, n, N, opts);
  } else {
    b = circle::coefficient(spec, n, Real::of(target, 64), opts);
  }
  if (json)
    print_budget_json(out, b);
  else
    print_budget_text(out, b);
  return kExitOk;
}

int cmd_certify(const SpecArgs& sa_in, bool json, int threads, std::ostream& out) {
  SpecArgs sa;
  ModularSpec spec = resolve_spec(sa_in, sa);
  EngineOptions opts;
  opts.threads = threads;
  opts.min_prec = sa.prec_bits ? sa.prec_bits : env_min_prec();
  circle::Lambda0Certificate cert = circle::effective_lambda0(spec, opts);
  circle::DominanceData dom = circle::dominance_data(spec);

  double l0 = cert.lambda0.d();
  double sweep_to = std::max(l0, 200.0);
  Rat reach = Rat(sweep_to) - spec.lambda_min;
  long nmax = long(mpz_get_si(rat_floor(reach).get_mpz_t()));
  exactq::QSeries s = (spec.kind == ModularSpec::Kind::JFunction)
                          ? exactq::j_expansion(nmax + 2)
                          : exactq::eta_quotient(spec.r, nmax + 2);
  long first_zero = -1;
  for (long m = 0; m <= nmax; m++) {
    if (s.coeffs[size_t(m)] == 0) {
      first_zero = m;
      break;
    }
  }

  if (json) {
    nlohmann::ordered_json j;
    j["spec"] = spec.name();
    j["kind"] = cert.kind;
    j["lambda0"] = cert.lambda0.str(10);
    j["lhs"] = cert.lhs.str(8);
    j["rhs"] = cert.rhs.str(8);
    j["sweep_nmax"] = nmax;
    j["sweep_ok"] = (first_zero < 0);
    if (first_zero >= 0) j["first_zero_n"] = first_zero;
    j["delta_prime_tie"] = dom.tie;
    out << j.dump(2) << "\n";
  } else {
    out << "spec = " << spec.name() << "\n";
    out << "kind = " << cert.kind << "\n";
    out << "lambda0 = " << cert.lambda0.str(10) << "\n";
    if (cert.kind == "ratio")
      out << "instance: ratio(lambda0) = " << cert.lhs.str(8)
          << " < target = " << cert.rhs.str(8)
          << " (margin " << sub_down(cert.rhs, cert.lhs).str(2) << ")\n";
    else
      out << "instance: main(lambda0) = " << cert.lhs.str(8)
          << " > rivals = " << cert.rhs.str(8)
          << " (margin " << sub_down(cert.lhs, cert.rhs).str(2) << ")\n";
    if (first_zero < 0)
      out << "sweep: verified a(lambda) != 0 for n in [0, " << nmax
          << "] (lambda <= " << sweep_to << ")\n";
    else
      out << "sweep: zero coefficient at n = " << first_zero << "\n";
    if (dom.tie)
      out << "note: delta-prime is attained by more than one (mu, c) pair\n";
  }
  return kExitOk;
}

int cmd_density(const SpecArgs& sa_in, const std::string& cuts_arg, long ap_scan,
                const std::string& out_path, std::ostream& out) {
  SpecArgs sa;
  ModularSpec spec = resolve_spec(sa_in, sa);
  std::vector<Rat> cuts;
  std::stringstream ss(cuts_arg);
  std::string item;
  long maxcut = 0;
  while (std::getline(ss, item, ',')) {
    long v = std::strtol(item.c_str(), nullptr, 10);
    if (v <= 0) throw std::invalid_argument("density: cuts must be positive integers");
    cuts.emplace_back(v);
    maxcut = std::max(maxcut, v);
  }
  if (cuts.empty()) throw std::invalid_argument("density: --cuts is required");
  long T = sa.truncation.value_or(
      long(mpz_get_si(rat_floor(Rat(maxcut) - spec.lambda_min).get_mpz_t())) + 2);
  exactq::QSeries s = (spec.kind == ModularSpec::Kind::JFunction)
                          ? exactq::j_expansion(T)
                          : exactq::eta_quotient(spec.r, T);
  lacuna::DensityReport rep = lacuna::density_profile(s, cuts);
  std::ostringstream csv;
  lacuna::write_csv(csv, rep);
  if (ap_scan > 0) {
    auto rows = lacuna::arithmetic_progression_scan(s, ap_scan);
    for (const auto& r : rows) {
      csv << "# ap m=" << r.modulus << " r=" << r.residue << ": ";
      if (r.first_miss)
        csv << "first miss at n=" << *r.first_miss << "\n";
      else
        csv << "no miss within truncation\n";
    }
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output path: " + out_path);
    f << csv.str();
    out << "wrote " << out_path << "\n";
  } else {
    out << csv.str();
  }
  return kExitOk;
}

int cmd_ford(long N, const std::string& out_path, std::ostream& out) {
  fordfarey::render_ford_path(N, out_path);
  long count = long(fordfarey::farey_sequence(N).size());
  out << "wrote " << out_path << " (" << count << " circles)\n";
  return kExitOk;
}

int cmd_oracle(const SpecArgs& sa_in, long partition_n, long T, std::ostream& out) {
  if (partition_n >= 0) {
    out << exactq::partition_oracle(partition_n) << "\n";
    return kExitOk;
  }
  SpecArgs sa;
  ModularSpec spec = resolve_spec(sa_in, sa);
  long TT = sa.truncation.value_or(T);
  if (TT < 1) throw std::invalid_argument("oracle: -T must be >= 1");
  exactq::QSeries s = (spec.kind == ModularSpec::Kind::JFunction)
                          ? exactq::j_expansion(TT)
                          : exactq::eta_quotient(spec.r, TT);
  exactq::write_series(out, s);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fourier coefficients of modular functions by the circle method"};
  app.require_subcommand(1);

  SpecArgs sa_coeff, sa_cert, sa_dens, sa_orac;
  long n = 0;
  long N_override = 0;
  bool json_coeff = false, json_cert = false;
  int threads = 0;
  double target_flag = -1.0;

  CLI::App* coeff = app.add_subcommand("coeff", "one coefficient with certified bound");
  add_spec_flags(coeff, sa_coeff);
  coeff->add_option("-n,--index", n, "coefficient index (lambda = lambda_min + n)")->required();
  coeff->add_option("--target", target_flag, "absolute error target");
  coeff->add_option("-N,--cutoff", N_override, "cutoff override (weight >= 0 only)");
  coeff->add_flag("--json", json_coeff, "full budget as JSON");
  coeff->add_option("--threads", threads, "worker cap for the c-sum");

  CLI::App* certify = app.add_subcommand("certify", "effective non-vanishing threshold");
  add_spec_flags(certify, sa_cert);
  certify->add_flag("--json", json_cert, "JSON output");
  certify->add_option("--threads", threads, "worker cap");

  CLI::App* density = app.add_subcommand("density", "coefficient density profile (CSV)");
  add_spec_flags(density, sa_dens);
  std::string cuts, dens_out;
  long ap_scan = 0;
  density->add_option("--cuts", cuts, "comma-separated cut points")->required();
  density->add_option("--ap-scan", ap_scan, "scan progressions up to this modulus");
  density->add_option("-o,--out", dens_out, "output file (default stdout)");

  CLI::App* ford = app.add_subcommand("ford", "Ford-circle SVG of order N");
  long ford_N = 0;
  std::string ford_out;
  ford->add_option("-N,--order", ford_N, "Farey order (1..200)")->required();
  ford->add_option("-o,--out", ford_out, "output SVG path")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "exact q-series oracles");
  add_spec_flags(oracle, sa_orac);
  long partition_n = -1, oracle_T = 0;
  oracle->add_option("--partition", partition_n, "print p(n)");
  oracle->add_option("-T,--truncation", oracle_T, "series order to print");

  std::vector<std::string> argv_vec = args;
  try {
    app.parse(std::vector<std::string>(argv_vec.rbegin(), argv_vec.rend()));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitBadSpec;
  }

  try {
    if (coeff->parsed()) {
      if (target_flag > 0) sa_coeff.target = target_flag;
      std::optional<long> N = N_override > 0 ? std::optional<long>(N_override) : std::nullopt;
      return cmd_coeff(sa_coeff, n, N, json_coeff, threads, out);
    }
    if (certify->parsed()) return cmd_certify(sa_cert, json_cert, threads, out);
    if (density->parsed()) return cmd_density(sa_dens, cuts, ap_scan, dens_out, out);
    if (ford->parsed()) return cmd_ford(ford_N, ford_out, out);
    if (oracle->parsed()) return cmd_oracle(sa_orac, partition_n, oracle_T, out);
    err << "error: no subcommand\n";
    return kExitBadSpec;
  } catch (const CuspFinite& e) {
    err << "error: " << e.what() << "\n";
    return kExitCuspFinite;
  } catch (const TargetUnreachable& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnreachable;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadSpec;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadSpec;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qmod::cli
