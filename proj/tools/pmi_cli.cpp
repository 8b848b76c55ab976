// Command-line front end: certify, solve, extract, export-sdpa.
//
// Exit codes: 0 certified (or success), 1 solved but uncertified, 2 schema or
// usage error, 3 solver failure, 4 extraction failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pmi/driver.hpp"
#include "pmi/sdpa.hpp"

namespace {

using pmi::json;

constexpr int kSchemaExit = 2;

std::uint64_t effective_seed(std::uint64_t flag) {
  if (const char* env = std::getenv("PMI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw pmi::SchemaError("PMI_SEED", "expected a non-negative integer");
    }
  }
  return flag;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw pmi::Error("cannot write " + path);
  out << text;
}

std::string fmt_vec(const pmi::Vec& v) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

void print_summary(const pmi::HierarchyReport& r, std::ostream& os) {
  for (const auto& o : r.orders) {
    os << "k=" << o.k << "  primal " << pmi::to_string(o.primal.status) << " " << o.primal.objective << "  dual "
       << pmi::to_string(o.dual.status) << " " << o.dual.objective;
    if (o.fec_x) os << "  FEC(S) " << (o.fec_x->holds ? "t=" + std::to_string(o.fec_x->t) : std::string("false"));
    if (o.fec_y) os << "  FEC(s) " << (o.fec_y->holds ? "t=" + std::to_string(o.fec_y->t) : std::string("false"));
    if (o.rank_one) os << "  rank-one " << (o.rank_one->rank_one ? "yes" : "no");
    os << "  " << (o.certified ? "certified" : "uncertified") << "\n";
    if (o.minimizer) os << "    minimizer " << fmt_vec(*o.minimizer) << "\n";
    if (o.extraction)
      for (const auto& a : o.extraction->measure.atoms) os << "    atom " << fmt_vec(a.point) << "\n";
    if (!o.extraction_error.empty()) os << "    extraction: " << o.extraction_error << "\n";
    for (const auto& n : o.notes) os << "    note: " << n << "\n";
  }
  os << "result: " << pmi::to_string(r.outcome) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment-SOS relaxations for robust polynomial matrix inequality problems"};
  app.require_subcommand(1);

  // certify
  std::string cert_file, cert_out;
  pmi::CertifyOptions copt;
  std::uint64_t cert_seed = 0;
  auto* cert = app.add_subcommand("certify", "Advisory checks: SOS-convexity, Archimedean certificate, strong duality");
  cert->add_option("problem", cert_file, "Problem file (JSON)")->required();
  cert->add_option("--radius", copt.radius, "Radius for the Archimedean certificate (0: automatic)");
  cert->add_option("--arch-max-degree", copt.arch_max_degree, "Largest multiplier half-degree in the sweep");
  cert->add_option("--seed", cert_seed, "Seed for interior-point sampling");
  cert->add_option("-o,--output", cert_out, "Write the JSON verdicts to this file");

  // solve
  std::string solve_file, solve_out;
  int order = 0, max_order = 0;
  pmi::DriverSettings ds;
  bool no_ts = false, verbose = false;
  auto* sol = app.add_subcommand("solve", "Solve the relaxation hierarchy, certify and extract");
  sol->add_option("problem", solve_file, "Problem file (JSON)")->required();
  auto* o_order = sol->add_option("--order", order, "Solve this single relaxation order");
  auto* o_max = sol->add_option("--max-order", max_order, "Solve orders from the minimum up to this one");
  o_order->excludes(o_max);
  sol->add_option("--seed", ds.seed, "Seed for atom extraction (PMI_SEED overrides)");
  sol->add_option("--tol-gap", ds.tol_gap, "Certification tolerance on the relative primal-dual gap");
  sol->add_option("--tol-rank", ds.tau_rank, "Relative numerical-rank threshold");
  sol->add_option("--threads", ds.sdp.threads, "OpenMP threads for the Schur-complement kernel");
  sol->add_flag("--no-timestamps", no_ts, "Omit wall times and creation time from the report");
  sol->add_flag("--dump-moments", ds.dump_moments, "Include the pseudo-moments S in the report");
  sol->add_flag("-v,--verbose", verbose, "Print solver iterations to stderr");
  sol->add_option("-o,--output", solve_out, "Write the JSON report to this file (default: stdout)");

  // extract
  std::string ex_file, ex_out;
  double ex_tau = 1e-9;
  std::uint64_t ex_seed = 0;
  int ex_dg = -1;
  auto* ext = app.add_subcommand("extract", "Flat-extension check and atom extraction from a moment dump or report");
  ext->add_option("dump", ex_file, "Moment dump or solve report (JSON)")->required();
  auto* o_ex_tau = ext->add_option("--tol-rank", ex_tau,
                                   "Relative numerical-rank threshold (default: the report's effective threshold, else 1e-9)");
  ext->add_option("--seed", ex_seed, "Seed for the random combination (PMI_SEED overrides)");
  ext->add_option("--d-G", ex_dg, "Degree shift of the flat extension test (default: from the dump, else 1)");
  ext->add_option("-o,--output", ex_out, "Write the atoms JSON to this file (default: stdout)");

  // export-sdpa
  std::string sd_file, sd_out, side = "primal";
  int sd_order = 0;
  auto* exp = app.add_subcommand("export-sdpa", "Write one relaxation in SDPA sparse format");
  exp->add_option("problem", sd_file, "Problem file (JSON)")->required();
  exp->add_option("--order", sd_order, "Relaxation order")->required();
  exp->add_option("--side", side, "primal or dual")->check(CLI::IsMember({"primal", "dual"}));
  exp->add_option("-o,--output", sd_out, "Output .dat-s file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kSchemaExit;
  }

  try {
    if (*cert) {
      const auto pf = pmi::problem_from_json(pmi::read_json_file(cert_file));
      copt.seed = effective_seed(cert_seed);
      const auto rep = pmi::run_certify(pf, copt);
      std::cout << pmi::certify_table(rep);
      if (!cert_out.empty()) write_text(cert_out, pmi::certify_to_json(rep).dump(2) + "\n");
      return 0;
    }
    if (*sol) {
      const auto pf = pmi::problem_from_json(pmi::read_json_file(solve_file));
      ds.seed = effective_seed(ds.seed);
      ds.timestamps = !no_ts;
      ds.sdp.verbose = verbose;
      const int k0 = pmi::minimal_order(pf.problem);
      int lo = k0, hi = k0;
      if (*o_order) {
        lo = hi = order;
      } else if (*o_max) {
        hi = max_order;
      }
      if (hi < k0 || lo < k0) {
        std::cerr << "error: the minimum relaxation order for this problem is " << k0 << "\n";
        return kSchemaExit;
      }
      const auto rep = pmi::run_hierarchy(pf.problem, lo, hi, ds);
      const std::string text = pmi::report_to_json(rep).dump(2) + "\n";
      if (solve_out.empty()) {
        std::cout << text;
        print_summary(rep, std::cerr);
      } else {
        write_text(solve_out, text);
        print_summary(rep, std::cout);
      }
      return pmi::exit_code(rep.outcome);
    }
    if (*ext) {
      int dg = 1;
      const json input = pmi::read_json_file(ex_file);
      const auto S = pmi::moments_from_json(input, &dg);
      if (ex_dg >= 0) dg = ex_dg;
      // A solve report records the rank threshold its solver accuracy supports.
      if (!*o_ex_tau && input.contains("orders") && input["orders"].is_array() && !input["orders"].empty()) {
        const json& last = input["orders"].back();
        if (last.contains("tau_rank_effective") && last["tau_rank_effective"].contains("S") &&
            last["tau_rank_effective"]["S"].is_number())
          ex_tau = last["tau_rank_effective"]["S"].get<double>();
      }
      const int d = std::max(1, dg);
      const int k = S.order() / 2;
      const auto fec = pmi::check_fec(S, 1, k, d, ex_tau);
      json doc;
      doc["schema_version"] = 1;
      doc["fec"] = {{"holds", fec.holds}, {"rank_high", fec.rank_high}, {"rank_low", fec.rank_low}};
      if (!fec.holds) {
        doc["fec"]["t"] = nullptr;
        write_text(ex_out, doc.dump(2) + "\n");
        std::cerr << "error: the flat extension condition does not hold up to order " << k << "\n";
        return 4;
      }
      doc["fec"]["t"] = fec.t;
      pmi::ExtractionSettings es;
      es.tau_rank = ex_tau;
      es.seed = effective_seed(ex_seed);
      try {
        const auto out = pmi::extract_atoms(S, fec.t, d, es);
        doc["atoms"] = pmi::measure_to_json(out.measure);
        doc["rank"] = out.rank;
        doc["residual"] = out.residual;
        doc["weight_slack"] = out.weight_slack;
        doc["seed_used"] = out.seed_used;
      } catch (const pmi::ExtractionError& e) {
        doc["error"] = e.what();
        write_text(ex_out, doc.dump(2) + "\n");
        std::cerr << "error: " << e.what() << "\n";
        return 4;
      }
      write_text(ex_out, doc.dump(2) + "\n");
      return 0;
    }
    if (*exp) {
      const auto pf = pmi::problem_from_json(pmi::read_json_file(sd_file));
      const auto r = pmi::build_relaxation(pf.problem, sd_order);
      write_text(sd_out, pmi::export_sdpa(side == "primal" ? r.primal : r.dual));
      return 0;
    }
  } catch (const pmi::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kSchemaExit;
  } catch (const pmi::DegreeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSchemaExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
