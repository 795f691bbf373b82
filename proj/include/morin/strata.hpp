#pragma once

#include <optional>
#include <string>
#include <vector>

#include "morin/continuation.hpp"
#include "morin/scenario.hpp"

namespace morin {

enum class StratumSign { plus, minus, none };
const char* to_string(StratumSign s);

struct QuadraticSignature {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;
  bool lambda_even = true;  // parity of n_minus
  double min_abs = 0.0;
  Vec null_direction;       // in R^N, set when n_zero == 1
};

struct StratumPoint {
  Vec x;
  Vec lift;                 // point of the depth-1 (or depth-2) lifted system
  int depth = 1;
  bool depth_verified = true;
  Vec u;                    // unit cokernel covector, sign-normalized
  Vec mu;                   // multipliers of the constraints: Df^T u = Dg^T mu
  Mat kernel_basis;         // N x (m-n+1)
  Vec degenerate_direction; // empty for folds
  StratumSign sign = StratumSign::none;
  QuadraticSignature signature;
  double residual = 0.0;
  double leading_coefficient = 0.0;  // order-(k+1) derivative along the degenerate direction
};

/// The closure of the depth-k stratum as a regular level set {F(Z) = 0}
/// whose points project to x = Z[0:N). Supported for k = 0, 1, 2.
///   k = 0: Z = x,                       F = g
///   k = 1: Z = (x, u, mu),              F adds Df^T u - Dg^T mu, |u|^2 - 1
///   k = 2: Z = (x, u, mu, v, al, be, s) F adds Dg v, Df v - s u,
///          H v - Dg^T al - Df^T be, |v|^2 - 1, u.be
/// with L = <u, f> - mu.g and H its x-Hessian. Each lift extends the previous
/// one, so Z_k is a prefix of Z_{k+1}.
class StratumLift {
 public:
  StratumLift(const MorinScenario& S, int k);

  int depth() const { return k_; }
  int dim() const;  // dimension of the stratum closure
  std::size_t num_vars() const { return F_.num_vars(); }
  const PolySystem& system() const { return F_; }

  std::size_t off_u() const { return N_; }
  std::size_t off_mu() const { return N_ + n_; }
  std::size_t off_v() const { return N_ + n_ + c_; }
  std::size_t off_alpha() const { return 2 * N_ + n_ + c_; }
  std::size_t off_beta() const { return 2 * N_ + n_ + 2 * c_; }
  std::size_t off_sigma() const { return 2 * N_ + 2 * n_ + 2 * c_; }

  Vec x(const Vec& z) const { return z.head(static_cast<Eigen::Index>(N_)); }
  Vec u(const Vec& z) const { return z.segment(static_cast<Eigen::Index>(off_u()), static_cast<Eigen::Index>(n_)); }
  Vec mu(const Vec& z) const { return z.segment(static_cast<Eigen::Index>(off_mu()), static_cast<Eigen::Index>(c_)); }
  Vec v(const Vec& z) const { return z.segment(static_cast<Eigen::Index>(off_v()), static_cast<Eigen::Index>(N_)); }

  /// (u, mu, ...) -> -(u, mu, ...): the covering involution of the lift.
  Vec flip_u(const Vec& z) const;
  Vec flip_v(const Vec& z) const;

  /// <a, f(x)> as a function of Z.
  PolyFunction linear_functional(const Vec& a) const;

  /// Prefix of Z belonging to the depth-j lift (j <= k).
  Vec truncate(const Vec& z, int j) const;

 private:
  const MorinScenario* S_;
  int k_;
  std::size_t N_, n_, c_;
  PolySystem F_;
};

/// Equations {g; Df^T u - Dg^T mu; |u|^2 - 1} in (x, u, mu).
PolySystem singular_system(const MorinScenario& S);

/// Initial depth-1 lift from a point of M: u is the left singular vector of
/// the smallest singular value of Df restricted to T_xM.
Vec depth1_guess(const MorinScenario& S, const Vec& x);

/// Depth-2 lift guess from a depth-1 lift point with nearly degenerate kernel form.
Vec depth2_guess(const MorinScenario& S, const StratumLift& lift2, const Vec& z1);

/// Tangent-frame basis of ker d(f|M)(x), N x (m-n+1).
Mat kernel_basis(const MorinScenario& S, const Vec& x);

/// Signature of the kernel Hessian of <u,f> - mu.g. Throws MorinError when
/// n_zero > 1.
QuadraticSignature kernel_hessian(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& mu);

/// Fills depth, degenerate direction, leading coefficient and the normalized
/// cokernel sign. Depth 2 uses the intrinsic cubic; depth >= 3 comes from a
/// numerical reduction to the degenerate direction and is marked unverified.
void classify_depth(const MorinScenario& S, StratumPoint& p);

/// x-Hessian of <u,f> - mu.g.
Mat lagrangian_hessian(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& mu);

/// Third derivative of <u,f> along a curve in {g = 0, <w,f> = const, w in
/// u^perp} with velocity v (v a null vector of the kernel form).
double intrinsic_cubic(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& mu, const Vec& v);

/// plus iff the kernel form has an even number of negative eigenvalues.
StratumSign sign_split(const MorinScenario& S, const StratumPoint& p);

/// Builds a fully classified point from a depth-1 lift point.
StratumPoint make_stratum_point(const MorinScenario& S, const Vec& z1);

/// Order-j derivative (j = 3, 4, 5) at t = 0 of <u,f> along the curve of
/// kernel-form critical points through x tangent to dir. Numerical.
double reduced_derivative(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& dir, int order);

struct Arc {
  int curve = 0;
  std::size_t begin = 0;       // index into the curve polyline
  std::size_t end = 0;         // exclusive unless the arc wraps
  int cusp_begin = -1;         // index into cusps, -1 for a cusp-free circle
  int cusp_end = -1;
  StratumSign sign = StratumSign::none;
  bool circle = false;
};

struct StratumCurve {
  TracedCurve trace;           // depth-1 lift coordinates
  std::vector<int> cusps;      // cusp indices in traversal order
  std::vector<std::size_t> cusp_after;  // polyline index preceding each cusp
};

struct StrataAudit {
  bool dimension_ok = true;
  double dimension_min_sv = 0.0;   // smallest relative singular value seen
  bool nesting_ok = true;
  bool boundary_ok = true;
  int boundary_violations = 0;
  bool parity_invariant_ok = true;
  bool nonempty_ok = true;
  bool cusp_crosscheck_ok = true;  // cusps from tracing == cusps from direct solve
  bool curves_closed = true;
  double max_closure_gap = 0.0;
  std::vector<std::string> messages;
};

struct Stratification {
  std::vector<StratumPoint> a1;    // finite set for n = 1, sample cloud otherwise
  std::vector<StratumCurve> curves;  // n = 2
  std::vector<Arc> arcs;
  std::vector<StratumPoint> a2;    // depth >= 2 points (cusps for n = 2)
  std::vector<StratumPoint> deeper;  // depth >= 3, unverified
  StrataAudit audit;
  std::vector<std::string> warnings;
};

struct StrataOptions {
  unsigned workers = 1;
  TraceOptions trace;
};

/// Multistart on the depth-1 lift, continuation of 1-dimensional Ā_1,
/// cusp detection and the depth-2 solve, followed by the audits.
Stratification solve_strata(const MorinScenario& S, const StrataOptions& opt = {});

/// Depth-1 lifted points found by multistart, deduplicated in x.
std::vector<Vec> solve_stratum1(const MorinScenario& S, unsigned workers = 1);

/// Depth-2 lifted points found by multistart seeded from depth-1 lift points.
std::vector<Vec> solve_stratum2(const MorinScenario& S, const std::vector<Vec>& seeds1, unsigned workers = 1);

/// Deterministic merge: sort by x lexicographically, drop points within
/// `radius` of a kept one (in x; the lift coordinates are ignored).
std::vector<Vec> dedup_by_x(std::vector<Vec> pts, std::size_t N, double radius);

}  // namespace morin
