#include "pmi/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace pmi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SideResult run_side(const SdpInstance& inst, const SdpSettings& s, SdpSolution& sol) {
  const auto t0 = Clock::now();
  sol = solve(inst, s);
  SideResult r;
  r.status = sol.status;
  r.objective = sol.primal_obj;
  r.iterations = sol.iterations;
  r.rel_gap = sol.gap / (1.0 + std::abs(sol.primal_obj));
  r.primal_infeas = sol.primal_infeas;
  r.dual_infeas = sol.dual_infeas;
  r.seconds = seconds_since(t0);
  return r;
}

ExtractionSettings extraction_settings(const DriverSettings& ds, double tau) {
  ExtractionSettings es;
  es.tau_rank = tau;
  es.seed = ds.seed;
  es.max_retries = ds.max_retries;
  return es;
}

std::string pathway_name(Mode m) {
  switch (m) {
    case Mode::SosConvex: return "sos-convex: flat extension on S and zero relaxation gap";
    case Mode::Convex: return "convex: flat extensions on S and on the pseudo-moments s";
    case Mode::Nonconvex: return "nonconvex: flat extension on S and rank-one pseudo-moments";
    case Mode::Linear: return "linear: flat extension on S and zero relaxation gap";
    case Mode::Eigmin: return "eigmin: flat extension on S";
  }
  return "";
}

void process_order(const RpmioProblem& p, const Relaxation& r, const DriverSettings& ds, OrderResult& o) {
  SdpSolution sp, sd;
  o.primal = run_side(r.primal, ds.sdp, sp);
  o.dual = run_side(r.dual, ds.sdp, sd);
  o.relaxation_gap = std::abs(o.primal.objective - o.dual.objective) /
                     (1.0 + std::max(std::abs(o.primal.objective), std::abs(o.dual.objective)));
  o.pathway = pathway_name(p.mode);
  const DegreeProfile& prof = r.profile;
  const int d_x = std::max(1, prof.d_G);
  const bool gap_ok = o.primal.usable() && o.dual.usable() && o.relaxation_gap <= ds.tol_gap;

  if (!o.primal.usable()) o.notes.push_back("primal relaxation not solved: " + to_string(o.primal.status));
  if (!o.dual.usable()) o.notes.push_back("dual relaxation not solved: " + to_string(o.dual.status));

  // Flat extension on the matrix pseudo-moments S of the primal.
  std::optional<MomentSequence> S;
  if (o.primal.usable()) {
    S = r.moments(sp.y);
    o.tau_x = std::max(ds.tau_rank, 100.0 * o.primal.accuracy(ds.sdp));
    o.fec_x = check_fec(*S, std::max(1, half_degree(prof.k_x)), r.k, d_x, o.tau_x);
    if (ds.dump_moments) o.moments = S;
  }
  const bool fec_x = o.fec_x && o.fec_x->holds;

  // Minimizer and the mode's certificate.
  std::optional<PseudoMomentVector> s;
  if (r.s && o.dual.usable()) {
    s = r.pseudo_moments(sd.y);
    o.tau_y = std::max(ds.tau_rank, 100.0 * o.dual.accuracy(ds.sdp));
  }
  switch (p.mode) {
    case Mode::SosConvex:
      if (s) {
        o.minimizer = candidate_minimizer(*s);
        o.minimizer_source = "degree-one pseudo-moments";
      }
      o.certified = fec_x && gap_ok;
      break;
    case Mode::Convex:
      if (s) {
        const auto cm = convex_minimizer_from_dual(*s, std::max(1, half_degree(prof.k_y)), r.t_y, prof.d_Theta,
                                                   extraction_settings(ds, o.tau_y));
        o.fec_y = cm.fec;
        o.minimizer = cm.y;
        o.y_atoms = cm.atoms;
        o.minimizer_source = cm.from_atoms ? "weighted atoms of the pseudo-moments" : "degree-one pseudo-moments";
        if (!cm.warning.empty()) o.notes.push_back(cm.warning);
        o.certified = fec_x && cm.fec.holds && cm.from_atoms;
      }
      break;
    case Mode::Nonconvex:
      if (s) {
        o.rank_one = rank_one_certificate(*s, prof.k_y, o.tau_y);
        o.minimizer = candidate_minimizer(*s);
        o.minimizer_source = "degree-one pseudo-moments";
        o.certified = fec_x && o.rank_one->rank_one;
      }
      break;
    case Mode::Linear:
      if (o.dual.usable()) {
        Vec y(static_cast<int>(r.y_vars.size()));
        for (int i = 0; i < y.size(); ++i) y[i] = sd.y[r.y_vars[i]];
        o.minimizer = y;
        o.minimizer_source = "dual decision variables";
      }
      o.certified = fec_x && gap_ok;
      break;
    case Mode::Eigmin:
      o.certified = fec_x;
      break;
  }
  if (fec_x && !o.certified && p.mode != Mode::Eigmin && o.relaxation_gap > ds.tol_gap)
    o.notes.push_back("relaxation gap above tolerance");

  // Atoms of S and the active constraint directions.
  if (fec_x) {
    try {
      o.extraction = extract_atoms(*S, o.fec_x->t, d_x, extraction_settings(ds, o.tau_x));
      const double wtol = std::max(1e-8, o.tau_x);
      if (p.mode == Mode::Eigmin)
        o.active = recover_eigenvectors(o.extraction->measure, p.F, o.primal.objective, wtol);
      else if (o.minimizer)
        o.active = recover_active_set(o.extraction->measure, *o.minimizer, p.P, wtol);
    } catch (const ExtractionError& e) {
      o.extraction_error = e.what();
    }
  }
}

json side_json(const SideResult& s, bool timestamps) {
  json j = {{"status", to_string(s.status)},  {"objective", s.objective},        {"iterations", s.iterations},
            {"rel_gap", s.rel_gap},           {"primal_infeas", s.primal_infeas}, {"dual_infeas", s.dual_infeas}};
  if (timestamps) j["seconds"] = s.seconds;
  return j;
}

json fec_json(const FecResult& f) {
  json scanned = json::array();
  for (const auto& [t, hi, lo] : f.scanned) scanned.push_back({{"t", t}, {"rank_t", hi}, {"rank_t_minus_d", lo}});
  json j = {{"holds", f.holds}, {"rank_high", f.rank_high}, {"rank_low", f.rank_low}, {"scanned", scanned},
            {"singular_values_high", vector_to_json(f.sv_high)}, {"singular_values_low", vector_to_json(f.sv_low)}};
  j["t"] = f.holds ? json(f.t) : json(nullptr);
  return j;
}

json active_json(const std::vector<ActiveAtom>& act) {
  json out = json::array();
  for (const auto& a : act) {
    json vs = json::array();
    for (const auto& v : a.vectors) vs.push_back(vector_to_json(v));
    out.push_back({{"point", vector_to_json(a.point)}, {"vectors", vs}, {"residuals", a.residuals}});
  }
  return out;
}

std::string now_iso8601() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

double SideResult::accuracy(const SdpSettings& s) const {
  return std::max({s.gap_tol, rel_gap, primal_infeas, dual_infeas});
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Certified: return "certified";
    case Outcome::Uncertified: return "uncertified";
    case Outcome::SolverFailure: return "solver-failure";
    case Outcome::ExtractionFailure: return "extraction-failure";
  }
  return "unknown";
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Certified: return 0;
    case Outcome::Uncertified: return 1;
    case Outcome::SolverFailure: return 3;
    case Outcome::ExtractionFailure: return 4;
  }
  return 1;
}

HierarchyReport run_hierarchy(const RpmioProblem& p, int k_min, int k_max, const DriverSettings& ds) {
  p.validate();
  HierarchyReport rep;
  rep.mode = p.mode;
  rep.profile = degree_profile(p);
  rep.settings = ds;
  rep.diagnostics = diagnose_strong_duality(p, ds.seed);
  const int k0 = minimal_order(p);
  if (k_min < k0) throw DegreeError("relaxation order " + std::to_string(k_min) + " below the minimum " +
                                    std::to_string(k0) + " for this problem");
  for (int k = k_min; k <= k_max; ++k) {
    const auto t0 = Clock::now();
    OrderResult o;
    o.k = k;
    process_order(p, build_relaxation(p, k), ds, o);
    o.seconds = seconds_since(t0);
    rep.orders.push_back(std::move(o));
    if (rep.orders.back().certified) break;
  }
  const OrderResult& last = rep.orders.back();
  const bool extraction_failed = (last.fec_x && last.fec_x->holds && !last.extraction) ||
                                 (last.fec_y && last.fec_y->holds && last.y_atoms.empty());
  if (last.certified)
    rep.outcome = extraction_failed ? Outcome::ExtractionFailure : Outcome::Certified;
  else if (!last.primal.usable() || !last.dual.usable())
    rep.outcome = Outcome::SolverFailure;
  else
    rep.outcome = extraction_failed ? Outcome::ExtractionFailure : Outcome::Uncertified;
  return rep;
}

json report_to_json(const HierarchyReport& r) {
  json doc;
  doc["schema_version"] = 1;
  doc["mode"] = to_string(r.mode);
  doc["seed"] = r.settings.seed;
  doc["settings"] = {{"gap_tol", r.settings.sdp.gap_tol},   {"feas_tol", r.settings.sdp.feas_tol},
                     {"near_tol", r.settings.sdp.near_tol}, {"max_iter", r.settings.sdp.max_iter},
                     {"threads", r.settings.sdp.threads},   {"tol_gap", r.settings.tol_gap},
                     {"tau_rank", r.settings.tau_rank},     {"max_retries", r.settings.max_retries}};
  doc["degree_profile"] = {{"k_y", r.profile.k_y}, {"k_x", r.profile.k_x}, {"d_G", r.profile.d_G},
                           {"d_Theta", r.profile.d_Theta}};
  json diag = {{"ball_constraint", r.diagnostics.ball_constraint},
               {"interior_evidence", r.diagnostics.interior_evidence},
               {"notes", r.diagnostics.notes}};
  if (r.diagnostics.ball_constraint) diag["ball_radius"] = r.diagnostics.ball_radius;
  doc["diagnostics"] = diag;

  json orders = json::array();
  for (const auto& o : r.orders) {
    json j;
    j["k"] = o.k;
    j["primal"] = side_json(o.primal, r.settings.timestamps);
    j["dual"] = side_json(o.dual, r.settings.timestamps);
    j["relaxation_gap"] = o.relaxation_gap;
    j["tau_rank_effective"] = {{"S", o.tau_x}, {"s", o.tau_y}};
    if (o.fec_x) j["fec_S"] = fec_json(*o.fec_x);
    if (o.fec_y) j["fec_s"] = fec_json(*o.fec_y);
    if (o.rank_one) j["rank_one"] = {{"holds", o.rank_one->rank_one}, {"rank", o.rank_one->rank}};
    j["pathway"] = o.pathway;
    j["certified"] = o.certified;
    if (o.minimizer) {
      j["minimizer"] = vector_to_json(*o.minimizer);
      j["minimizer_source"] = o.minimizer_source;
    }
    if (!o.y_atoms.empty()) {
      AtomicMeasure mu{o.y_atoms};
      j["atoms_s"] = measure_to_json(mu);
    }
    if (o.extraction) {
      const auto& ex = *o.extraction;
      json basis = json::array();
      for (const auto& [a, w] : ex.basis) basis.push_back({{"exp", a}, {"unit", w}});
      j["atoms"] = measure_to_json(ex.measure);
      j["extraction"] = {{"rank", ex.rank},         {"residual", ex.residual},   {"weight_slack", ex.weight_slack},
                         {"seed_used", ex.seed_used}, {"attempts", ex.attempts}, {"basis", basis}};
      j[r.mode == Mode::Eigmin ? "eigenvectors" : "active_set"] = active_json(o.active);
    }
    if (!o.extraction_error.empty()) j["extraction_error"] = o.extraction_error;
    j["notes"] = o.notes;
    if (o.moments) j["moments"] = moments_to_json(*o.moments);
    if (r.settings.timestamps) j["seconds"] = o.seconds;
    orders.push_back(j);
  }
  doc["orders"] = orders;

  const OrderResult& last = r.orders.back();
  json fin = {{"outcome", to_string(r.outcome)}, {"order", last.k}, {"certified", last.certified}};
  fin["primal_objective"] = last.primal.objective;
  fin["dual_objective"] = last.dual.objective;
  if (last.minimizer) fin["minimizer"] = vector_to_json(*last.minimizer);
  doc["result"] = fin;
  if (r.settings.timestamps) doc["created"] = now_iso8601();
  return doc;
}

CertifyReport run_certify(const ProblemFile& pf, const CertifyOptions& opt) {
  const RpmioProblem& p = pf.problem;
  CertifyReport rep;
  if (p.mode != Mode::Eigmin) {
    rep.f_sos_convex = certify_sos_convex(p.f, opt.cs);
    for (const auto& th : p.theta) rep.neg_theta_sos_convex.push_back(certify_sos_convex(-th, opt.cs));
    for (const auto& x : pf.samples_X)
      rep.neg_P_psd_sos_convex.push_back(certify_uniform_psd_sos_convex(-p.P.at_x(x), opt.cs));
  }
  double r = opt.radius;
  if (r <= 0.0) {
    double mx = 1.0;
    for (const auto& x : pf.samples_X) mx = std::max(mx, x.norm());
    r = 1.1 * mx;
  }
  rep.radius = r;
  for (int d = 1; d <= opt.arch_max_degree; ++d) {
    const bool ok = certify_archimedean(p.G, r, d, opt.cs);
    rep.archimedean.emplace_back(d, ok);
    if (ok) break;
  }
  rep.duality = diagnose_strong_duality(p, opt.seed);

  if (rep.f_sos_convex && !*rep.f_sos_convex && p.mode == Mode::SosConvex)
    rep.advice.push_back("the objective is not certified SOS-convex: convex mode advised");
  for (std::size_t j = 0; j < rep.neg_theta_sos_convex.size(); ++j)
    if (!rep.neg_theta_sos_convex[j] && p.mode == Mode::SosConvex)
      rep.advice.push_back("-theta[" + std::to_string(j) + "] is not certified SOS-convex: convex mode advised");
  for (std::size_t i = 0; i < rep.neg_P_psd_sos_convex.size(); ++i)
    if (!rep.neg_P_psd_sos_convex[i] && (p.mode == Mode::SosConvex || p.mode == Mode::Convex)) {
      rep.advice.push_back("-P is not certified PSD-SOS-convex at samples_X[" + std::to_string(i) +
                           "]: nonconvex mode advised");
      break;
    }
  if (rep.archimedean.empty() || !rep.archimedean.back().second)
    rep.advice.push_back("no Archimedean certificate found up to the sweep degree (inconclusive)");
  for (const auto& n : rep.duality.notes) rep.advice.push_back(n);
  return rep;
}

json certify_to_json(const CertifyReport& r) {
  json doc;
  doc["schema_version"] = 1;
  doc["f_sos_convex"] = r.f_sos_convex ? json(*r.f_sos_convex) : json(nullptr);
  doc["neg_theta_sos_convex"] = r.neg_theta_sos_convex;
  doc["neg_P_psd_sos_convex"] = r.neg_P_psd_sos_convex;
  json arch = json::array();
  for (const auto& [d, ok] : r.archimedean) arch.push_back({{"degree", d}, {"certified", ok}});
  doc["archimedean"] = {{"radius", r.radius}, {"sweep", arch}};
  doc["strong_duality"] = {{"ball_constraint", r.duality.ball_constraint},
                           {"interior_evidence", r.duality.interior_evidence}};
  if (r.duality.ball_constraint) doc["strong_duality"]["ball_radius"] = r.duality.ball_radius;
  doc["advice"] = r.advice;
  return doc;
}

std::string certify_table(const CertifyReport& r) {
  std::ostringstream os;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  auto row = [&](const std::string& k, const std::string& v) { os << std::left << std::setw(34) << k << v << "\n"; };
  if (r.f_sos_convex) row("f SOS-convex:", yn(*r.f_sos_convex));
  for (std::size_t j = 0; j < r.neg_theta_sos_convex.size(); ++j)
    row("-theta[" + std::to_string(j) + "] SOS-convex:", yn(r.neg_theta_sos_convex[j]));
  if (!r.neg_P_psd_sos_convex.empty()) {
    const bool all = std::all_of(r.neg_P_psd_sos_convex.begin(), r.neg_P_psd_sos_convex.end(), [](bool b) { return b; });
    std::size_t n = 0;
    for (bool b : r.neg_P_psd_sos_convex) n += b;
    row("-P PSD-SOS-convex at samples:",
        std::string(yn(all)) + " (" + std::to_string(n) + "/" + std::to_string(r.neg_P_psd_sos_convex.size()) + ")");
  }
  std::ostringstream arch;
  arch << "r = " << r.radius;
  for (const auto& [d, ok] : r.archimedean) arch << ", d=" << d << ": " << (ok ? "certified" : "inconclusive");
  row("Archimedean certificate:", arch.str());
  row("ball constraint on y:",
      r.duality.ball_constraint ? "yes (b = " + std::to_string(r.duality.ball_radius) + ")" : std::string("no"));
  row("interior point of X found:", yn(r.duality.interior_evidence));
  for (const auto& a : r.advice) os << "advice: " << a << "\n";
  return os.str();
}

}  // namespace pmi
