#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morin/strata.hpp"

namespace morin {

struct Covector {
  Vec a;
  std::uint64_t seed = 0;
};

/// Unit vector in R^n from normal deviates of Rng(seed).
Covector sample_covector(std::size_t n, std::uint64_t seed);

struct CriticalRecord {
  Vec x;
  Vec z;                    // point of the depth-k lift
  int stratum_depth = 0;    // k: critical for L_a o f restricted to the closure of A_k
  int point_depth = 0;      // A-type of x (0 for regular points of f)
  int morse_index = 0;
  int index_basis_dim = 0;  // n - k (m for k = 0)
  double min_abs_eig = 0.0;
  bool degenerate = false;
  bool correctness_checked = false;  // only for k >= 1, relative to depth k-1
  bool correct = false;
  double closure_grad_norm = 0.0;
  StratumSign sign = StratumSign::none;          // sign of x when point_depth is odd
  StratumSign inward_into = StratumSign::none;   // correct boundary points of signed strata
  int eta_sign = 0;                              // 0 when not applicable
  double residual = 0.0;
  std::uint64_t seed = 0;
};

/// Critical points of L_a o f on the closure of A_k (k = 0 is M itself).
/// 0-dimensional strata return all their points with index 0; 1-dimensional
/// ones are scanned along the traced curves; otherwise multistart Newton.
std::vector<CriticalRecord> critical_points_on_stratum(const MorinScenario& S, const Stratification& st,
                                                       const Covector& a, int k, unsigned workers = 1);

/// Correctness of rec relative to the closure of A_{k-1}: the closure
/// gradient is nonzero. Returns false when the numeric verdict contradicts
/// the point's depth (A_k points must be non-correct, A_{k+1} points correct).
bool classify_correctness(const MorinScenario& S, const Covector& a, CriticalRecord& rec);

struct EtaResult {
  int k = 0;
  double eta = 0.0;          // gradient ratio (k = 0 only)
  int eta_sign = 0;
  double angle = 0.0;        // between the two gradients, radians (k = 0)
  bool parallel = true;
  StratumSign inward_into = StratumSign::none;  // odd k
  bool lambda_even = true;   // normal-form parity at p (odd k)
  int lambda_bar = 0;        // index of L on the closure of A_{k+1}
  int lambda = 0;            // index of L on A_{k+2}
  bool identity_ok = false;  // sign eta = -(-1)^lambda_bar (-1)^lambda
};

/// Sign of eta at p in A_{k+2} correct for the closure of A_k. z2 is the
/// depth-2 lift of p. k = 0: ratio of the M-gradients of L_a o f and of the
/// first degeneracy function. Odd k (needs k + 2 = n): inward side by probing
/// combined with the parity of the normal form at p.
EtaResult eta_sign(const MorinScenario& S, const Covector& a, const Vec& z2, int k, int lambda_bar,
                   int lambda = 0);

/// eta with k = n - 2 at p in A_n, n odd.
EtaResult xi_sign(const MorinScenario& S, const Covector& a, const Vec& z2, int lambda_bar);

struct ParityAudit {
  int checked = 0;
  int violations = 0;
  std::vector<std::string> messages;
  bool ok() const { return violations == 0; }
};

/// Ind(L o f, q) vs Ind(L o f | A_1, q) mod 2 at every critical point q on M.
ParityAudit check_fold_index_parity(const std::vector<CriticalRecord>& on_M,
                                    const std::vector<CriticalRecord>& on_A1, double radius);

struct PerturbationCertificate {
  Vec x_p;
  Vec x_tilde;
  int k = 0;                    // p lies on the boundary of the signed closures of A_k
  double epsilon = 0.0;
  int attempts = 0;
  int sign_xnk = 0;             // side of p~ along the transversal t
  int det_sign_closure = 0;     // det Hess(L | closure A_k)(p)
  int det_sign_boundary = 0;    // det Hess(L | closure A_{k+1})(p)
  int index_boundary = 0;
  int index_tilde = 0;
  StratumSign t_side = StratumSign::none;
  StratumSign tilde_side = StratumSign::none;
  int contribution_plus = 0;
  int contribution_minus = 0;
  bool eq24_ok = false;
  bool sides_consistent = false;
  bool submatrix_ok = false;
  bool cancels = false;
  std::string failure;
};

/// p: non-correct critical point on the closure of A_{k+1} (z is its lift of
/// depth k + 1). Shifts the gradient by eps * t, t a unit transversal to
/// A_{k+1} inside A_k, and accounts for the pair (p, p~).
PerturbationCertificate perturbation_certificate(const MorinScenario& S, const Covector& a, const Vec& z,
                                                 int k, int index_boundary,
                                                 const std::vector<StratumPoint>& boundary_points);

struct GenericityAudit {
  bool nondegenerate = true;        // (1) reduced Hessians invertible
  bool avoids_deeper = true;        // (2) no critical point of closure A_k on closure A_{k+2}
  bool lemaseparado = true;         // (3) critical on A_{k+1} <=> critical on closure A_k there
  bool top_stratum = true;          // (4) A_n points nondegenerate critical on closure A_{n-1}
  bool correctness_separated = true;  // (5) closure gradients far from the threshold
  std::vector<std::string> failures;
  bool ok() const { return nondegenerate && avoids_deeper && lemaseparado && top_stratum && correctness_separated; }
};

struct MorseData {
  Covector a;
  std::vector<std::vector<CriticalRecord>> records;  // index k = 0..max depth
  std::vector<PerturbationCertificate> certificates;
  std::vector<EtaResult> eta_checks;
  std::vector<bool> dichotomy_ok;                    // per record with a correctness check
  int dichotomy_violations = 0;
  ParityAudit parity;
  GenericityAudit genericity;
};

/// All Morse data for one covector: critical points on every closure,
/// correctness, eta at cusps and correct boundary points, certificates.
MorseData compute_morse(const MorinScenario& S, const Stratification& st, const Covector& a,
                        unsigned workers = 1);

/// Items (1)-(5) on an already computed MorseData.
GenericityAudit validate_genericity(const MorinScenario& S, const Stratification& st, const MorseData& md);

}  // namespace morin
