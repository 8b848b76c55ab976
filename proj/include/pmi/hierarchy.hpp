#pragma once
// Moment-SOS relaxations of robust polynomial matrix inequality problems
//
//     min_y f(y)  s.t.  theta_j(y) >= 0,  P(y, x) PSD for all x with G(x) PSD,
//
// their linear (robust PSD program) and eigenvalue-minimization special cases,
// and the advisory certification SDPs (SOS matrices, SOS-convexity,
// Archimedean certificates, strong-duality diagnostics).

#include <optional>
#include <string>
#include <vector>

#include "pmi/encode.hpp"
#include "pmi/sdp.hpp"

namespace pmi {

enum class Mode { SosConvex, Convex, Linear, Eigmin, Nonconvex };
std::string to_string(Mode m);
// Accepts "sos-convex", "convex", "linear", "eigmin", "nonconvex"; throws Error otherwise.
Mode mode_from_string(const std::string& s);

struct RpmioProblem {
  int nx = 0, ny = 0;
  Polynomial f;                // in y
  std::vector<Polynomial> theta;  // in y
  BiPolyMatrix P;              // P(y, x), m x m
  PolyMatrix G;                // in x, q x q
  PolyMatrix F;                // eigmin mode only, in x
  Mode mode = Mode::SosConvex;

  // Size of the matrix constraint (P or F).
  int m() const { return mode == Mode::Eigmin ? F.size() : P.size(); }
  // Throws DimensionError on inconsistent sizes or variable counts.
  void validate() const;
};

struct DegreeProfile {
  int k_y = 0, k_x = 0;
  int d_G = 0;      // ceil(deg G / 2)
  int d_Theta = 0;  // max_j ceil(deg theta_j / 2), 0 without constraints
};

DegreeProfile degree_profile(const RpmioProblem& p);

// Smallest admissible relaxation order for the problem's mode.
int minimal_order(const RpmioProblem& p);

// A primal/dual pair of relaxations at order k. The primal always carries the
// matrix pseudo-moments S (moments in x); the dual carries the Gram matrices
// of the SOS certificate in x and, for RPMIO modes, the scalar pseudo-moments
// s in y (normalized s_0 = 1).
struct Relaxation {
  Mode mode = Mode::SosConvex;
  int k = 0;
  int t_y = 0;  // half-order of the y-side truncation (0 in linear/eigmin modes)
  DegreeProfile profile;
  SdpInstance primal, dual;
  MomentLayout S;                // in primal
  std::optional<MomentLayout> s;  // in dual, RPMIO modes
  std::vector<int> y_vars;       // linear mode: dual variables that are y itself
  int scalar_var = -1;           // primal rho / dual lambda where applicable

  MomentSequence moments(const Vec& primal_y) const { return S.extract(primal_y); }
  PseudoMomentVector pseudo_moments(const Vec& dual_y) const;
};

// Relaxations (primal: sup rho; dual: inf H_s(f)) with y-side half-order ceil(k_y/2).
Relaxation build_sos_convex(const RpmioProblem& p, int k);
// Same construction with y-side half-order k (used for convex and nonconvex modes).
Relaxation build_convex(const RpmioProblem& p, int k);
// Robust PSD program: primal sup L_S(P_0) s.t. L_S(P_i) = c_i, S in M_k(G);
// dual inf c^T y s.t. sum_i y_i P_i - P_0 in Q_k(G). pmats = {P_0, ..., P_l}.
Relaxation build_rpsdp(const Vec& c, const std::vector<PolyMatrix>& pmats, const PolyMatrix& G, int k);
// Smallest eigenvalue: primal inf L_S(F) s.t. L_S(I) = 1; dual sup lambda s.t. F - lambda I in Q_k(G).
Relaxation build_eigmin(const PolyMatrix& F, const PolyMatrix& G, int k);
// Dispatch on p.mode (linear mode decomposes f and P into their affine parts in y).
Relaxation build_relaxation(const RpmioProblem& p, int k);

// ---- certification SDPs (advisory) ----

struct CertifySettings {
  SdpSettings sdp;
  double tol = 1e-7;
};

struct SosMatrixResult {
  bool certified = false;
  std::optional<Mat> gram;
  double reconstruction_error = 0.0;  // max coefficientwise error of the Gram identity
  double margin = 0.0;                // optimal lambda of the feasibility SDP
};

// Searches Z PSD with M = (u_d kron I_q)^T Z (u_d kron I_q), d = deg(M)/2.
SosMatrixResult certify_sos_matrix(const PolyMatrix& M, const CertifySettings& cs = {});
bool certify_sos_convex(const Polynomial& h, const CertifySettings& cs = {});
// Q is an m x m polynomial matrix in y; checks that the Hessian of v^T Q(y) v is SOS in (y, v).
bool certify_uniform_psd_sos_convex(const PolyMatrix& Q, const CertifySettings& cs = {});
// r^2 - |x|^2 - <Sigma, G> SOS with deg Sigma <= 2d. False is inconclusive.
bool certify_archimedean(const PolyMatrix& G, double r, int d, const CertifySettings& cs = {});

struct StrongDualityReport {
  bool ball_constraint = false;
  double ball_radius = 0.0;
  bool interior_evidence = false;
  Vec interior_point;
  std::vector<std::string> notes;
};

// Samples in [-box, box]^n are used to look for an interior point of {G >= 0}.
StrongDualityReport diagnose_strong_duality(const RpmioProblem& p, std::uint64_t seed = 0, int samples = 2000,
                                            double box = 2.0);

}  // namespace pmi
