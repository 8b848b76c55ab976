#pragma once
// Orchestration: solve the relaxations order by order, run the flat-extension
// checks of the problem's mode, certify finite convergence, extract minimizers
// and atoms, and produce machine-readable reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmi/extraction.hpp"
#include "pmi/hierarchy.hpp"
#include "pmi/problem_io.hpp"

namespace pmi {

struct DriverSettings {
  SdpSettings sdp;
  // Certification tolerance on |primal - dual| / (1 + max(|primal|, |dual|)).
  double tol_gap = 1e-6;
  // Relative rank threshold. The effective threshold used on a solved sequence
  // is max(tau_rank, 100 * accuracy of the solve that produced it), so that
  // rank decisions never resolve below the solver's own noise level.
  double tau_rank = 1e-9;
  std::uint64_t seed = 0;
  int max_retries = 5;
  bool timestamps = true;    // wall times and a creation time in the report
  bool dump_moments = false;  // include the matrix pseudo-moments S in the report
};

struct SideResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  double objective = 0.0;
  int iterations = 0;
  double rel_gap = 0.0, primal_infeas = 0.0, dual_infeas = 0.0;
  double seconds = 0.0;
  bool usable() const { return pmi::usable(status); }
  // max(gap_tol, rel_gap, infeasibilities): the accuracy the solve achieved.
  double accuracy(const SdpSettings& s) const;
};

struct OrderResult {
  int k = 0;
  SideResult primal, dual;
  double relaxation_gap = 0.0;  // |primal - dual| / (1 + max(|primal|, |dual|))
  double tau_x = 0.0, tau_y = 0.0;  // effective rank thresholds on S and s
  std::optional<FecResult> fec_x;  // rank M_t(S) = rank M_{t - d_G}(S)
  std::optional<FecResult> fec_y;  // convex mode: on the scalar pseudo-moments s
  std::optional<RankOneResult> rank_one;  // nonconvex mode
  std::string pathway;
  bool certified = false;
  std::vector<std::string> notes;
  std::optional<Vec> minimizer;
  std::string minimizer_source;
  std::optional<ExtractionOutput> extraction;
  std::string extraction_error;
  std::vector<ActiveAtom> active;  // active directions, or eigenvectors in eigmin mode
  std::vector<Atom> y_atoms;       // convex mode: atoms of s
  std::optional<MomentSequence> moments;
  double seconds = 0.0;
};

enum class Outcome { Certified, Uncertified, SolverFailure, ExtractionFailure };
std::string to_string(Outcome o);
// 0 certified, 1 solved but uncertified, 3 solver failure, 4 extraction failure.
int exit_code(Outcome o);

struct HierarchyReport {
  Mode mode = Mode::SosConvex;
  DegreeProfile profile;
  DriverSettings settings;
  StrongDualityReport diagnostics;
  std::vector<OrderResult> orders;
  Outcome outcome = Outcome::Uncertified;
};

// Solves orders k_min..k_max, stopping at the first certified order.
HierarchyReport run_hierarchy(const RpmioProblem& p, int k_min, int k_max, const DriverSettings& ds = {});
json report_to_json(const HierarchyReport& r);

struct CertifyOptions {
  CertifySettings cs;
  double radius = 0.0;  // Archimedean radius; 0 picks 1.1 * max(1, largest sample norm)
  int arch_max_degree = 2;
  std::uint64_t seed = 0;
};

struct CertifyReport {
  std::optional<bool> f_sos_convex;
  std::vector<bool> neg_theta_sos_convex;  // -theta_j SOS-convex (theta_j SOS-concave)
  std::vector<bool> neg_P_psd_sos_convex;  // per sample in samples_X
  double radius = 0.0;
  std::vector<std::pair<int, bool>> archimedean;  // (d, certified) until the first success
  StrongDualityReport duality;
  std::vector<std::string> advice;
};

CertifyReport run_certify(const ProblemFile& pf, const CertifyOptions& opt = {});
json certify_to_json(const CertifyReport& r);
std::string certify_table(const CertifyReport& r);

}  // namespace pmi
