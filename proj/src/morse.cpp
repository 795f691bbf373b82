#include "morin/morse.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "morin/parallel.hpp"
#include "morin/random.hpp"

namespace morin {

namespace {

using Idx = Eigen::Index;

Idx I(std::size_t i) { return static_cast<Idx>(i); }

double xdist(const Vec& a, const Vec& b) { return (a - b).norm(); }

int parity_sign(int index) { return index % 2 == 0 ? 1 : -1; }

// Lift of the right depth for the reduced-Hessian computations.
struct LiftCtx {
  StratumLift lift;
  PolyFunction phi;
  ConstrainedCritical cc;
  LiftCtx(const MorinScenario& S, int k, const Vec& a)
      : lift(S, k), phi(lift.linear_functional(a)), cc(lift.system(), phi) {}
};

struct Hess {
  Mat basis;
  Mat H;
  Inertia in;
};

Hess reduced(const MorinScenario& S, const LiftCtx& L, const Vec& z, const Vec& nu) {
  Hess h;
  h.basis = L.cc.tangent_basis(z);
  h.H = L.cc.reduced_hessian(z, nu, h.basis);
  h.in = inertia(h.H, S.tol.eigen_zero);
  return h;
}

std::vector<Vec> random_points_on_M(const MorinScenario& S, std::size_t count, std::uint64_t stream) {
  Rng rng(stream_seed(S.seed, stream));
  std::vector<Vec> out;
  const Idx N = I(S.N());
  for (std::size_t i = 0; i < count; ++i) {
    Vec x(N);
    for (Idx j = 0; j < N; ++j) x[j] = rng.uniform(-S.manifold.sample_radius, S.manifold.sample_radius);
    out.push_back(x);
  }
  return out;
}

// Depth of a critical point of L o f on M: it is singular with u = a/|a|.
StratumPoint classify_M_critical(const MorinScenario& S, const Vec& a, const Vec& x, const Vec& nu) {
  double na = a.norm();
  Vec z1(I(S.N() + S.n() + S.c()));
  z1 << x, a / na, nu / na;
  return make_stratum_point(S, z1);
}

CriticalRecord record_from(const MorinScenario& S, const LiftCtx& L, int k, const ConstrainedCritical::Point& p,
                           const Covector& a) {
  CriticalRecord r;
  r.z = p.z;
  r.x = L.lift.x(p.z);
  r.stratum_depth = k;
  r.residual = p.residual;
  r.seed = a.seed;
  Hess h = reduced(S, L, p.z, p.nu);
  r.index_basis_dim = static_cast<int>(h.basis.cols());
  r.morse_index = h.in.n_minus;
  r.min_abs_eig = h.in.min_abs;
  r.degenerate = h.in.n_zero > 0;
  return r;
}

// Depth of a point of the closure of A_k (k >= 1): a nearby deeper stratum
// point decides, otherwise the kernel form.
void set_point_depth(const MorinScenario& S, const Stratification& st, CriticalRecord& r) {
  const double near = 10 * S.tol.dedup_radius;
  for (const auto& q : st.a2)
    if (xdist(q.x, r.x) <= near) {
      r.point_depth = q.depth;
      r.sign = q.sign;
      return;
    }
  StratumPoint p = make_stratum_point(S, StratumLift(S, std::max(1, r.stratum_depth)).truncate(r.z, 1));
  r.point_depth = p.depth;
  r.sign = p.sign;
}

std::vector<CriticalRecord> merge(std::vector<CriticalRecord> recs, double radius) {
  std::sort(recs.begin(), recs.end(), [](const CriticalRecord& a, const CriticalRecord& b) {
    for (Idx i = 0; i < a.x.size(); ++i)
      if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    return false;
  });
  std::vector<CriticalRecord> kept;
  for (auto& r : recs) {
    bool dup = false;
    for (const auto& q : kept)
      if (xdist(q.x, r.x) <= radius) dup = true;
    if (!dup) kept.push_back(std::move(r));
  }
  return kept;
}

std::vector<CriticalRecord> multistart(const MorinScenario& S, const Stratification& st, const Covector& a, int k,
                                       const std::vector<Vec>& starts, unsigned workers) {
  LiftCtx L(S, k, a.a);
  std::vector<std::optional<CriticalRecord>> slot(starts.size());
  NewtonOptions opt;
  opt.residual_tol = S.tol.residual;
  opt.max_iters = 80;
  parallel_for(starts.size(), workers, [&](std::size_t i) {
    try {
      Vec z0 = starts[i];
      if (k == 0) z0 = project_to_manifold(S.manifold, z0);
      auto p = L.cc.solve(z0, nullptr, opt);
      if (!p.converged) return;
      CriticalRecord r = record_from(S, L, k, p, a);
      if (k == 0) {
        StratumPoint sp = classify_M_critical(S, a.a, r.x, p.nu);
        r.point_depth = sp.depth;
        r.sign = sp.sign;
      }
      slot[i] = std::move(r);
    } catch (const SolverError&) {
    } catch (const RegularityError&) {
    }
  });
  std::vector<CriticalRecord> recs;
  for (auto& s : slot)
    if (s) recs.push_back(std::move(*s));
  auto out = merge(std::move(recs), S.tol.dedup_radius);
  if (k >= 1)
    for (auto& r : out) set_point_depth(S, st, r);
  return out;
}

// Zeros of dL/ds along the traced curves of a 1-dimensional closure.
std::vector<CriticalRecord> scan_curves(const MorinScenario& S, const Stratification& st, const Covector& a) {
  LiftCtx L(S, 1, a.a);
  std::vector<CriticalRecord> recs;
  NewtonOptions opt;
  opt.residual_tol = S.tol.residual;
  auto slope = [&](const Vec& z, const Vec& t) { return L.phi.gradient(z).dot(t); };
  for (const auto& sc : st.curves) {
    const auto& P = sc.trace.points;
    std::size_t n = P.size();
    if (n < 2) continue;
    std::vector<Vec> T(n);
    T[0] = curve_tangent(L.lift.system(), P[0]);
    for (std::size_t j = 1; j < n; ++j) T[j] = curve_tangent(L.lift.system(), P[j], &T[j - 1]);
    std::size_t segs = sc.trace.closed ? n : n - 1;
    for (std::size_t j = 0; j < segs; ++j) {
      std::size_t jn = (j + 1) % n;
      Vec za = P[j], ta = T[j];
      Vec zb = P[jn], tb = T[jn];
      if (jn == 0) {
        if (sc.trace.closed_by_involution) zb = L.lift.flip_u(zb);
        tb = curve_tangent(L.lift.system(), zb, &ta);
      }
      double sa = slope(za, ta), sb = slope(zb, tb);
      if ((sa > 0) == (sb > 0) || sa == 0.0) continue;
      for (int it = 0; it < 60 && (za - zb).norm() > 1e-12; ++it) {
        NewtonResult m = curve_point_between(L.lift.system(), za, zb, 0.5, opt);
        if (!m.converged) break;
        Vec tm = curve_tangent(L.lift.system(), m.z, &ta);
        double sm = slope(m.z, tm);
        if ((sm > 0) == (sa > 0)) {
          za = m.z;
          ta = tm;
          sa = sm;
        } else {
          zb = m.z;
        }
      }
      auto p = L.cc.solve(0.5 * (za + zb), nullptr, opt);
      if (!p.converged) continue;
      recs.push_back(record_from(S, L, 1, p, a));
    }
  }
  auto out = merge(std::move(recs), S.tol.dedup_radius);
  for (auto& r : out) set_point_depth(S, st, r);
  return out;
}

// Every point of a 0-dimensional closure is critical with index 0.
std::vector<CriticalRecord> all_points(const std::vector<StratumPoint>& pts, int k,
                                       const Covector& a) {
  std::vector<CriticalRecord> out;
  for (const auto& p : pts) {
    CriticalRecord r;
    r.x = p.x;
    r.z = p.lift;
    r.stratum_depth = k;
    r.point_depth = p.depth;
    r.sign = p.sign;
    r.residual = p.residual;
    r.seed = a.seed;
    out.push_back(r);
  }
  return out;
}

StratumSign side_at(const MorinScenario& S, const Vec& z) {
  StratumPoint p = make_stratum_point(S, z.head(I(S.N() + S.n() + S.c())));
  return p.sign;
}

// Side of the signed closure reached from z (depth-1 lift) along direction d.
StratumSign probe_side(const MorinScenario& S, const StratumLift& lift1, const Vec& z, const Vec& d, double h) {
  Mat A = d.normalized().transpose();
  Vec target = z + h * d.normalized();
  NewtonResult r = solve_min_norm_sliced(lift1.system(), target, A, target);
  if (!r.converged) throw SolverError("side probe did not converge");
  return side_at(S, r.z);
}

}  // namespace

Covector sample_covector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vec a(I(n));
  do {
    for (Idx i = 0; i < a.size(); ++i) a[i] = rng.normal();
  } while (a.norm() < 1e-12);
  return {a / a.norm(), seed};
}

std::vector<CriticalRecord> critical_points_on_stratum(const MorinScenario& S, const Stratification& st,
                                                       const Covector& a, int k, unsigned workers) {
  const int n = static_cast<int>(S.n());
  if (k < 0 || k > n) throw Error("stratum depth out of range");
  if (k == 0) {
    auto starts = random_points_on_M(S, static_cast<std::size_t>(S.multistart_factor) * S.n() + S.multistart_factor,
                                     2000);
    for (const auto& p : st.a1) starts.push_back(p.x);
    return multistart(S, st, a, 0, starts, workers);
  }
  int dim = n - k;
  if (dim == 0) {
    if (k == 1) return all_points(st.a1, 1, a);
    if (k == 2) return all_points(st.a2, 2, a);
    return all_points(st.deeper, k, a);
  }
  if (k == 1 && dim == 1) return scan_curves(S, st, a);
  if (k > 2) throw Error("critical points on positive-dimensional closures of depth >= 3 are not supported");
  std::vector<Vec> starts;
  for (const auto& p : (k == 1 ? st.a1 : st.a2)) starts.push_back(p.lift);
  return multistart(S, st, a, k, starts, workers);
}

bool classify_correctness(const MorinScenario& S, const Covector& a, CriticalRecord& rec) {
  if (rec.stratum_depth < 1) return true;
  int kc = rec.stratum_depth - 1;
  LiftCtx L(S, kc, a.a);
  Vec zc = StratumLift(S, rec.stratum_depth).truncate(rec.z, kc);
  Vec g = L.cc.tangent_gradient(zc);
  rec.closure_grad_norm = g.norm();
  Mat Df = S.fsys.jacobian(rec.x);
  double scale = a.a.norm() * std::max(1.0, singular_values(Df)[0]);
  rec.correct = rec.closure_grad_norm > S.tol.correctness * scale;
  rec.correctness_checked = true;
  bool expect_correct = rec.point_depth >= rec.stratum_depth + 1;
  return rec.correct == expect_correct;
}

EtaResult eta_sign(const MorinScenario& S, const Covector& a, const Vec& z2, int k, int lambda_bar, int lambda) {
  const int n = static_cast<int>(S.n());
  EtaResult res;
  res.k = k;
  res.lambda_bar = lambda_bar;
  res.lambda = lambda;
  StratumLift lift2(S, 2);
  Vec x = lift2.x(z2), u = lift2.u(z2), mu = lift2.mu(z2), v = lift2.v(z2);
  if (k == 0) {
    // normalize (u, v) so the cubic coefficient is positive; H v is invariant
    if (intrinsic_cubic(S, x, u, mu, v) < 0) v = -v;
    TangentFrame fr = tangent_frame(S.manifold, x);
    Mat PT = fr.tangent * fr.tangent.transpose();
    Vec gD = PT * (lagrangian_hessian(S, x, u, mu) * v);
    Vec gL = PT * (S.fsys.jacobian(x).transpose() * a.a);
    double nD = gD.norm(), nL = gL.norm();
    if (nD < 1e-12 || nL < 1e-12) throw SolverError("vanishing gradient in the eta computation");
    double cosang = std::clamp(gL.dot(gD) / (nL * nD), -1.0, 1.0);
    res.angle = std::acos(std::abs(cosang));
    res.parallel = res.angle < 1e-4;
    res.eta = gL.dot(gD) / (nD * nD);
    res.eta_sign = res.eta > 0 ? 1 : -1;
  } else {
    if (k % 2 == 0 || k + 2 != n) throw Error("eta for odd k is supported when k + 2 = n");
    if (k != 1) throw Error("eta needs the depth-1 closure as the ambient stratum");
    StratumLift lift1(S, 1);
    Vec z1 = lift2.truncate(z2, 1);
    LiftCtx L(S, 1, a.a);
    Vec g = L.cc.tangent_gradient(z1);
    if (g.norm() < 1e-12) throw SolverError("eta: point is not correct");
    res.inward_into = probe_side(S, lift1, z1, g, 1e-3);
    StratumPoint p = make_stratum_point(S, z1);
    res.lambda_even = p.signature.lambda_even;
    bool into_plus = res.inward_into == StratumSign::plus;
    res.eta_sign = (into_plus == res.lambda_even) ? 1 : -1;
  }
  int predicted = -parity_sign(lambda_bar) * parity_sign(lambda);
  res.identity_ok = res.parallel && res.eta_sign == predicted;
  return res;
}

EtaResult xi_sign(const MorinScenario& S, const Covector& a, const Vec& z2, int lambda_bar) {
  const int n = static_cast<int>(S.n());
  if (n % 2 == 0) throw Error("xi is defined for odd n");
  return eta_sign(S, a, z2, n - 2, lambda_bar, 0);
}

ParityAudit check_fold_index_parity(const std::vector<CriticalRecord>& on_M,
                                    const std::vector<CriticalRecord>& on_A1, double radius) {
  ParityAudit au;
  for (const auto& q : on_M) {
    const CriticalRecord* match = nullptr;
    for (const auto& r : on_A1)
      if (xdist(q.x, r.x) <= radius) match = &r;
    ++au.checked;
    if (!match) {
      ++au.violations;
      au.messages.push_back("critical point of L o f has no counterpart on the fold stratum");
      continue;
    }
    int lhs = q.morse_index % 2;
    int rhs = match->morse_index % 2;
    if (q.sign == StratumSign::minus) rhs = (rhs + 1) % 2;
    if (q.sign == StratumSign::none || lhs != rhs) {
      ++au.violations;
      std::ostringstream os;
      os << "index parity fails at x = (" << q.x.transpose() << "): Ind = " << q.morse_index
         << ", Ind on A1 = " << match->morse_index << ", sign " << to_string(q.sign);
      au.messages.push_back(os.str());
    }
  }
  return au;
}

PerturbationCertificate perturbation_certificate(const MorinScenario& S, const Covector& a, const Vec& z, int k,
                                                 int index_boundary,
                                                 const std::vector<StratumPoint>& boundary_points) {
  PerturbationCertificate pc;
  pc.k = k;
  pc.index_boundary = index_boundary;
  if (k < 1 || k + 1 > 2) {
    pc.failure = "certificates are built for boundaries of depth 2";
    return pc;
  }
  LiftCtx Lk(S, k, a.a);
  LiftCtx Lb(S, k + 1, a.a);
  Vec zp = Lb.lift.truncate(z, k);
  pc.x_p = Lk.lift.x(zp);

  Mat Tk = Lk.cc.tangent_basis(zp);
  Mat Tb = Lb.cc.tangent_basis(z);
  Mat C = Tk.transpose() * Tb.topRows(Tk.rows());  // boundary tangents in closure coordinates
  Vec tc;
  if (C.cols() == 0) {
    tc = Vec::Ones(1);
  } else {
    Eigen::JacobiSVD<Mat> svd(C.transpose(), Eigen::ComputeFullV);
    tc = svd.matrixV().col(Tk.cols() - 1);
  }
  Vec t = Tk * tc;
  for (Idx i = 0; i < t.size(); ++i)
    if (std::abs(t[i]) > 1e-8) {
      if (t[i] < 0) t = -t;
      break;
    }
  t.normalize();

  Vec nu = Lk.cc.multipliers(zp);
  Hess hk = reduced(S, Lk, zp, nu);
  pc.det_sign_closure = det_sign(hk.H, S.tol.eigen_zero);
  Hess hb = reduced(S, Lb, z, Lb.cc.multipliers(z));
  pc.det_sign_boundary = hb.H.rows() == 0 ? 1 : det_sign(hb.H, S.tol.eigen_zero);
  // Hessian of the boundary restriction is the restriction of the closure Hessian.
  Mat Cn = C;
  Mat sub = Cn.transpose() * hk.H * Cn;
  pc.submatrix_ok = hb.H.rows() == 0 || (sub - hb.H).norm() <= 1e-6 * std::max(1.0, hk.H.norm());

  double eps = 1e-4 * std::max(hk.in.max_abs, 1e-8);
  NewtonOptions opt;
  opt.residual_tol = S.tol.residual;
  std::optional<ConstrainedCritical::Point> tilde;
  for (int attempt = 1; attempt <= 8; ++attempt) {
    pc.attempts = attempt;
    Vec shift = eps * t;
    auto p = Lk.cc.solve(zp, &shift, opt);
    bool ok = p.converged;
    if (ok) {
      Vec xt = Lk.lift.x(p.z);
      if (xdist(xt, pc.x_p) <= S.tol.dedup_radius) ok = false;
      for (const auto& b : boundary_points)
        if (xdist(xt, b.x) <= S.tol.dedup_radius) ok = false;
      if (ok && make_stratum_point(S, p.z.head(I(S.N() + S.n() + S.c()))).depth != k) ok = false;
    }
    if (ok) {
      tilde = p;
      break;
    }
    eps *= 0.5;
  }
  pc.epsilon = eps;
  if (!tilde) {
    pc.failure = "perturbed critical point collides with the boundary";
    return pc;
  }
  pc.x_tilde = Lk.lift.x(tilde->z);
  double s = t.dot(tilde->z - zp);
  pc.sign_xnk = s > 0 ? 1 : -1;
  Hess ht = reduced(S, Lk, tilde->z, tilde->nu);
  pc.index_tilde = ht.in.n_minus;
  pc.tilde_side = side_at(S, tilde->z);
  StratumLift lift1(S, 1);
  pc.t_side = probe_side(S, lift1, zp, t, (tilde->z - zp).norm());

  pc.eq24_ok = pc.sign_xnk == -parity_sign(index_boundary) * parity_sign(pc.index_tilde);
  pc.sides_consistent = (pc.sign_xnk > 0) == (pc.tilde_side == pc.t_side) && pc.t_side != StratumSign::none &&
                        pc.tilde_side != StratumSign::none;
  auto add = [&](StratumSign side, int v) {
    if (side == StratumSign::plus) pc.contribution_plus += v;
    if (side == StratumSign::minus) pc.contribution_minus += v;
  };
  add(pc.t_side, parity_sign(index_boundary));
  add(pc.tilde_side, parity_sign(pc.index_tilde));
  pc.cancels = pc.eq24_ok && pc.sides_consistent && pc.contribution_plus - pc.contribution_minus == 0;
  return pc;
}

MorseData compute_morse(const MorinScenario& S, const Stratification& st, const Covector& a, unsigned workers) {
  MorseData md;
  md.a = a;
  const int n = static_cast<int>(S.n());
  const double near = 10 * S.tol.dedup_radius;
  md.records.resize(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) {
    if (k > 2 && n - k > 0) continue;
    md.records[static_cast<std::size_t>(k)] = critical_points_on_stratum(S, st, a, k, workers);
  }
  for (int k = 1; k <= n; ++k)
    for (auto& r : md.records[static_cast<std::size_t>(k)]) {
      if (k > 2) continue;
      bool ok = classify_correctness(S, a, r);
      md.dichotomy_ok.push_back(ok);
      if (!ok) ++md.dichotomy_violations;
    }

  // eta at cusps (k = 0 form): cusps are correct relative to M
  if (n >= 2) {
    for (auto& r : md.records[1]) {
      if (r.point_depth != 2) continue;
      const StratumPoint* cusp = nullptr;
      for (const auto& q : st.a2)
        if (xdist(q.x, r.x) <= near) cusp = &q;
      if (!cusp) continue;
      int lambda = 0;
      if (n > 2) {
        for (const auto& q : md.records[2])
          if (xdist(q.x, r.x) <= near) lambda = q.morse_index;
      }
      EtaResult e = eta_sign(S, a, cusp->lift, 0, r.morse_index, lambda);
      r.eta_sign = e.eta_sign;
      md.eta_checks.push_back(e);
    }
  }
  // eta at correct boundary points of the signed depth-1 closure (A_3 points, n = 3)
  if (n == 3) {
    for (auto& r : md.records[2]) {
      if (!r.correctness_checked || !r.correct || r.point_depth != 3) continue;
      EtaResult e = eta_sign(S, a, r.z, 1, r.morse_index, 0);
      r.eta_sign = e.eta_sign;
      r.inward_into = e.inward_into;
      md.eta_checks.push_back(e);
    }
  }
  // certificates at non-correct boundary points of signed closures
  if (n >= 2) {
    for (auto& r : md.records[2]) {
      if (!r.correctness_checked || r.correct) continue;
      md.certificates.push_back(perturbation_certificate(S, a, r.z, 1, r.morse_index, st.a2));
    }
  }
  md.parity = check_fold_index_parity(md.records[0], md.records[1], near);
  md.genericity = validate_genericity(S, st, md);
  return md;
}

GenericityAudit validate_genericity(const MorinScenario& S, const Stratification& st, const MorseData& md) {
  GenericityAudit g;
  const int n = static_cast<int>(S.n());
  const double near = 10 * S.tol.dedup_radius;
  auto fail = [&](bool& item, const std::string& msg) {
    item = false;
    int no = &item == &g.nondegenerate ? 1 : &item == &g.avoids_deeper ? 2 : &item == &g.lemaseparado ? 3
             : &item == &g.top_stratum ? 4 : 5;
    g.failures.push_back("item " + std::to_string(no) + ": " + msg);
  };
  for (std::size_t k = 0; k < md.records.size(); ++k)
    for (const auto& r : md.records[k]) {
      if (r.degenerate) fail(g.nondegenerate, "degenerate critical point on the depth-" + std::to_string(k) + " closure");
      if (r.point_depth >= static_cast<int>(k) + 2)
        fail(g.avoids_deeper, "critical point of the depth-" + std::to_string(k) + " closure lies two strata deeper");
      if (r.correctness_checked) {
        double scale = md.a.a.norm() * std::max(1.0, singular_values(S.fsys.jacobian(r.x))[0]);
        double q = r.closure_grad_norm / (S.tol.correctness * scale);
        if (q > 1e-2 && q < 1e2) fail(g.correctness_separated, "closure gradient too close to the correctness threshold");
      }
    }
  auto contains = [&](const std::vector<CriticalRecord>& v, const Vec& x, double radius) {
    for (const auto& r : v)
      if (xdist(r.x, x) <= radius) return &r;
    return static_cast<const CriticalRecord*>(nullptr);
  };
  for (int k = 0; k + 1 <= n && k + 1 < static_cast<int>(md.records.size()); ++k) {
    const auto& up = md.records[static_cast<std::size_t>(k + 1)];
    const auto& here = md.records[static_cast<std::size_t>(k)];
    if (k + 1 > 2 && n - (k + 1) > 0) continue;
    for (const auto& r : up)
      if (r.point_depth == k + 1 && !contains(here, r.x, S.tol.dedup_radius))
        fail(g.lemaseparado, "a critical point on A_" + std::to_string(k + 1) + " is not critical on the depth-" +
                                 std::to_string(k) + " closure");
    for (const auto& r : here)
      if (r.point_depth == k + 1 && !contains(up, r.x, S.tol.dedup_radius))
        fail(g.lemaseparado, "a critical point of the depth-" + std::to_string(k) + " closure on A_" +
                                 std::to_string(k + 1) + " is not critical on A_" + std::to_string(k + 1));
  }
  // (4) A_n points are nondegenerate critical points of the depth-(n-1) closure
  if (n <= 2) {
    const auto& top = n == 1 ? st.a1 : st.a2;
    const auto& below = md.records[static_cast<std::size_t>(n - 1)];
    for (const auto& p : top) {
      if (p.depth != n) continue;
      const CriticalRecord* r = contains(below, p.x, near);
      if (!r || r->degenerate) fail(g.top_stratum, "an A_n point is not a nondegenerate critical point one level up");
    }
  }
  return g;
}

}  // namespace morin
