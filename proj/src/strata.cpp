#include "morin/strata.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "morin/parallel.hpp"
#include "morin/random.hpp"

namespace morin {

const char* to_string(StratumSign s) {
  switch (s) {
    case StratumSign::plus: return "plus";
    case StratumSign::minus: return "minus";
    default: return "none";
  }
}

namespace {

using Idx = Eigen::Index;

Idx I(std::size_t i) { return static_cast<Idx>(i); }

const PolySystem& fmap(const MorinScenario& S) {
  if (S.fsys.num_eqs() != S.n()) throw Error("scenario was not finalized");
  return S.fsys;
}

struct KernelForm {
  Mat K;  // N x (m-n+1)
  Mat Q;
  Mat H;
};

KernelForm kernel_form(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& mu) {
  KernelForm kf;
  kf.K = kernel_basis(S, x);
  kf.H = lagrangian_hessian(S, x, u, mu);
  Mat Q = kf.K.transpose() * kf.H * kf.K;
  kf.Q = 0.5 * (Q + Q.transpose());
  return kf;
}

Expr constant_expr(std::size_t nvars, double c) { return Expr::constant(nvars, Rational(c)); }

// Orthonormal basis of u^perp in R^n, Gram-Schmidt over coordinate vectors.
Mat complement_basis(const Vec& u) {
  const Idx n = u.size();
  Mat B(n, n - 1);
  Idx found = 0;
  for (Idx i = 0; i < n && found < n - 1; ++i) {
    Vec w = Vec::Unit(n, i);
    w -= u.dot(w) * u;
    for (int pass = 0; pass < 2; ++pass)
      for (Idx b = 0; b < found; ++b) w -= B.col(b).dot(w) * B.col(b);
    if (w.norm() > 1e-6) B.col(found++) = w.normalized();
  }
  return B;
}

void normalize_first_positive(Vec& u, Vec& mu) {
  for (Idx i = 0; i < u.size(); ++i)
    if (std::abs(u[i]) > 1e-8) {
      if (u[i] < 0) {
        u = -u;
        mu = -mu;
      }
      return;
    }
}

double min_relative_sv(const Mat& J) {
  Vec s = singular_values(J);
  if (s.size() == 0) return 1.0;
  return s[s.size() - 1] / std::max(1.0, s[0]);
}

double dist_x(const Vec& a, const Vec& b, std::size_t N) { return (a.head(I(N)) - b.head(I(N))).norm(); }

}  // namespace

Mat lagrangian_hessian(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& mu) {
  Mat H = fmap(S).weighted_hessian(x, u);
  if (S.c() > 0) H -= S.manifold.system().weighted_hessian(x, mu);
  return H;
}

// ---------------------------------------------------------------- lifts

StratumLift::StratumLift(const MorinScenario& S, int k)
    : S_(&S), k_(k), N_(S.N()), n_(S.n()), c_(S.c()) {
  if (k < 0 || k > 2) throw Error("lifted systems exist for depth 0, 1, 2 only");
  std::size_t D = k == 0 ? N_ : k == 1 ? N_ + n_ + c_ : 2 * N_ + 2 * n_ + 2 * c_ + 1;
  auto var = [&](std::size_t i) { return Expr::variable(D, i); };
  std::vector<Expr> f, g, eqs;
  for (const auto& e : S.f) f.push_back(e.embedded(D));
  for (const auto& e : S.manifold.constraints()) g.push_back(e.embedded(D));
  eqs = g;
  if (k >= 1) {
    Expr lam(D);
    for (std::size_t j = 0; j < n_; ++j) lam += var(off_u() + j) * f[j];
    for (std::size_t l = 0; l < c_; ++l) lam -= var(off_mu() + l) * g[l];
    std::vector<Expr> dlam;
    for (std::size_t i = 0; i < N_; ++i) dlam.push_back(lam.differentiate(i));
    eqs.insert(eqs.end(), dlam.begin(), dlam.end());
    Expr uu(D);
    for (std::size_t j = 0; j < n_; ++j) uu += var(off_u() + j).pow(2);
    eqs.push_back(uu - Expr::constant(D, 1));
    if (k == 2) {
      auto contract = [&](const Expr& e) {  // De . v
        Expr r(D);
        for (std::size_t i = 0; i < N_; ++i) {
          Expr d = e.differentiate(i);
          if (!d.is_zero()) r += d * var(off_v() + i);
        }
        return r;
      };
      for (std::size_t l = 0; l < c_; ++l) eqs.push_back(contract(g[l]));
      for (std::size_t j = 0; j < n_; ++j) eqs.push_back(contract(f[j]) - var(off_sigma()) * var(off_u() + j));
      for (std::size_t i = 0; i < N_; ++i) {
        Expr r = contract(dlam[i]);
        for (std::size_t l = 0; l < c_; ++l) r -= var(off_alpha() + l) * g[l].differentiate(i);
        for (std::size_t j = 0; j < n_; ++j) r -= var(off_beta() + j) * f[j].differentiate(i);
        eqs.push_back(r);
      }
      Expr vv(D);
      for (std::size_t i = 0; i < N_; ++i) vv += var(off_v() + i).pow(2);
      eqs.push_back(vv - Expr::constant(D, 1));
      Expr ub(D);
      for (std::size_t j = 0; j < n_; ++j) ub += var(off_u() + j) * var(off_beta() + j);
      eqs.push_back(ub);
    }
  }
  F_ = PolySystem(std::move(eqs), D);
}

int StratumLift::dim() const {
  if (k_ == 0) return static_cast<int>(S_->m());
  return static_cast<int>(n_) - k_;
}

Vec StratumLift::flip_u(const Vec& z) const {
  Vec r = z;
  if (k_ == 0) return r;
  r.segment(I(off_u()), I(n_ + c_)) *= -1.0;
  if (k_ == 2) r.segment(I(off_alpha()), I(c_ + n_ + 1)) *= -1.0;
  return r;
}

Vec StratumLift::flip_v(const Vec& z) const {
  Vec r = z;
  if (k_ < 2) return r;
  r.segment(I(off_v()), I(N_)) *= -1.0;
  r.segment(I(off_alpha()), I(c_ + n_ + 1)) *= -1.0;
  return r;
}

PolyFunction StratumLift::linear_functional(const Vec& a) const {
  std::size_t D = num_vars();
  Expr e(D);
  for (std::size_t j = 0; j < n_; ++j) e += Rational(a[I(j)]) * S_->f[j].embedded(D);
  return PolyFunction(e);
}

Vec StratumLift::truncate(const Vec& z, int j) const {
  if (j > k_) throw Error("cannot truncate a lift to a deeper level");
  std::size_t D = j == 0 ? N_ : j == 1 ? N_ + n_ + c_ : 2 * N_ + 2 * n_ + 2 * c_ + 1;
  return z.head(I(D));
}

PolySystem singular_system(const MorinScenario& S) { return StratumLift(S, 1).system(); }

// ---------------------------------------------------------------- kernel data

Mat kernel_basis(const MorinScenario& S, const Vec& x) {
  TangentFrame fr = tangent_frame(S.manifold, x);
  Mat J = fmap(S).jacobian(x) * fr.tangent;
  auto nullity = static_cast<Idx>(S.m() - S.n() + 1);
  return fr.tangent * canonical_null_basis(J, nullity);
}

Vec depth1_guess(const MorinScenario& S, const Vec& x) {
  const Idx N = I(S.N()), n = I(S.n()), c = I(S.c());
  TangentFrame fr = tangent_frame(S.manifold, x);
  Mat Df = fmap(S).jacobian(x);
  Mat J = Df * fr.tangent;
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullU);
  Vec u = svd.matrixU().col(n - 1);
  Vec mu = Vec::Zero(c);
  if (c > 0) {
    Mat Dg = S.manifold.system().jacobian(x);
    mu = Dg.transpose().colPivHouseholderQr().solve(Df.transpose() * u);
  }
  Vec z(N + n + c);
  z << x, u, mu;
  return z;
}

Vec depth2_guess(const MorinScenario& S, const StratumLift& lift2, const Vec& z1) {
  const Idx N = I(S.N()), n = I(S.n()), c = I(S.c());
  Vec x = z1.head(N), u = z1.segment(N, n), mu = z1.segment(N + n, c);
  KernelForm kf = kernel_form(S, x, u, mu);
  Eigen::SelfAdjointEigenSolver<Mat> es(kf.Q);
  Idx imin = 0;
  es.eigenvalues().cwiseAbs().minCoeff(&imin);
  Vec v = kf.K * es.eigenvectors().col(imin);
  Mat Df = fmap(S).jacobian(x);
  Mat A = Mat::Zero(N + 1, c + n);
  if (c > 0) A.topLeftCorner(N, c) = S.manifold.system().jacobian(x).transpose();
  A.topRightCorner(N, n) = Df.transpose();
  A.bottomRightCorner(1, n) = u.transpose();
  Vec rhs = Vec::Zero(N + 1);
  rhs.head(N) = kf.H * v;
  Vec ab = A.completeOrthogonalDecomposition().solve(rhs);
  Vec z(I(lift2.num_vars()));
  z << z1, v, ab, 0.0;
  return z;
}

QuadraticSignature kernel_hessian(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& mu) {
  KernelForm kf = kernel_form(S, x, u, mu);
  Inertia in = inertia(kf.Q, S.tol.eigen_zero);
  QuadraticSignature sig;
  sig.n_plus = in.n_plus;
  sig.n_minus = in.n_minus;
  sig.n_zero = in.n_zero;
  sig.lambda_even = in.n_minus % 2 == 0;
  sig.min_abs = in.min_abs;
  if (in.n_zero > 1) {
    std::ostringstream os;
    os << "kernel form has " << in.n_zero << " null directions at x = (" << x.transpose()
       << "); the map is not of Morin type there";
    throw MorinError(os.str());
  }
  if (in.n_zero == 1) {
    Eigen::SelfAdjointEigenSolver<Mat> es(kf.Q);
    Idx imin = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&imin);
    sig.null_direction = kf.K * es.eigenvectors().col(imin);
  }
  return sig;
}

namespace {

struct CubicTerms {
  double d3 = 0.0;
  double correction = 0.0;
  double value() const { return d3 - correction; }
};

// Third derivative of <u,f> along a curve in W = {g = 0, <w,f> = const for w
// in u^perp} with initial velocity v. W is transverse at corank-1 points and
// T_xW is the kernel, so this is the cubic coefficient of the reduced germ.
CubicTerms cubic_terms(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& mu, const Vec& v) {
  const Idx N = I(S.N()), n = I(S.n()), c = I(S.c());
  auto xs = as_span(x);
  auto vs = as_span(v);
  CubicTerms t;
  for (Idx j = 0; j < n; ++j) t.d3 += u[j] * S.f[static_cast<std::size_t>(j)].directional_derivative(xs, vs, 3);
  for (Idx l = 0; l < c; ++l)
    t.d3 -= mu[l] * S.manifold.constraints()[static_cast<std::size_t>(l)].directional_derivative(xs, vs, 3);

  Mat W = complement_basis(u);
  Mat Df = fmap(S).jacobian(x);
  Mat JW(c + n - 1, N);
  Vec r(c + n - 1);
  if (c > 0) JW.topRows(c) = S.manifold.system().jacobian(x);
  for (Idx l = 0; l < c; ++l)
    r[l] = S.manifold.constraints()[static_cast<std::size_t>(l)].directional_derivative(xs, vs, 2);
  for (Idx i = 0; i < n - 1; ++i) {
    JW.row(c + i) = W.col(i).transpose() * Df;
    double s = 0.0;
    for (Idx j = 0; j < n; ++j) s += W(j, i) * S.f[static_cast<std::size_t>(j)].directional_derivative(xs, vs, 2);
    r[c + i] = s;
  }
  Vec y = JW.completeOrthogonalDecomposition().solve(r);
  Mat H = lagrangian_hessian(S, x, u, mu);
  t.correction = 3.0 * v.dot(H * y);
  return t;
}

}  // namespace

double intrinsic_cubic(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& mu, const Vec& v) {
  return cubic_terms(S, x, u, mu, v).value();
}

double reduced_derivative(const MorinScenario& S, const Vec& x, const Vec& u, const Vec& dir, int order) {
  if (order < 3 || order > 5) throw Error("reduced derivative supports orders 3..5");
  const std::size_t N = S.N(), n = S.n();
  Mat W = complement_basis(u);
  Vec fx = fmap(S).evaluate(x);
  Expr phi(N);
  for (std::size_t j = 0; j < n; ++j) phi += Rational(u[I(j)]) * S.f[j];
  PolyFunction Phi(phi);
  std::vector<Expr> base = S.manifold.constraints();
  for (Idx i = 0; i < W.cols(); ++i) {
    Expr h(N);
    double cst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      h += Rational(W(I(j), i)) * S.f[j];
      cst += W(I(j), i) * fx[I(j)];
    }
    base.push_back(h - constant_expr(N, cst));
  }
  Expr slice(N);
  for (std::size_t i = 0; i < N; ++i) slice += Rational(dir[I(i)]) * Expr::variable(N, i);
  double s0 = dir.dot(x);
  const double h = 2e-2;
  auto psi = [&](double s) {
    auto eqs = base;
    eqs.push_back(slice - constant_expr(N, s0 + s));
    PolySystem F(eqs, N);
    ConstrainedCritical cc(F, Phi);
    NewtonOptions opt;
    opt.residual_tol = 1e-13;
    auto p = cc.solve(x + s * dir, nullptr, opt);
    if (!p.converged && p.residual > 1e-10) throw SolverError("reduction to the degenerate direction failed");
    return Phi.value(p.z);
  };
  std::map<int, double> val;
  int reach = order == 5 ? 3 : 2;
  for (int i = -reach; i <= reach; ++i) val[i] = psi(i * h);
  switch (order) {
    case 3: return (val[2] - 2 * val[1] + 2 * val[-1] - val[-2]) / (2 * h * h * h);
    case 4: return (val[2] - 4 * val[1] + 6 * val[0] - 4 * val[-1] + val[-2]) / std::pow(h, 4);
    default:
      return (val[3] - 4 * val[2] + 5 * val[1] - 5 * val[-1] + 4 * val[-2] - val[-3]) / (2 * std::pow(h, 5));
  }
}

void classify_depth(const MorinScenario& S, StratumPoint& p) {
  normalize_first_positive(p.u, p.mu);
  p.signature = kernel_hessian(S, p.x, p.u, p.mu);
  p.kernel_basis = kernel_basis(S, p.x);
  if (p.signature.n_zero == 0) {
    p.depth = 1;
    p.depth_verified = true;
    p.degenerate_direction = Vec();
    p.leading_coefficient = 0.0;
    p.sign = sign_split(S, p);
    return;
  }
  Vec v = p.signature.null_direction;
  for (Idx i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-8) {
      if (v[i] < 0) v = -v;
      break;
    }
  p.degenerate_direction = v;
  CubicTerms ct = cubic_terms(S, p.x, p.u, p.mu, v);
  double scale = std::max({1.0, std::abs(ct.d3), std::abs(ct.correction)});
  if (std::abs(ct.value()) > 1e-6 * scale) {
    p.depth = 2;
    p.depth_verified = true;
    p.leading_coefficient = ct.value();
    p.sign = StratumSign::none;
    return;
  }
  // Quartic and beyond: numerical reduction, not certified.
  p.depth_verified = false;
  Mat H = lagrangian_hessian(S, p.x, p.u, p.mu);
  double hs = std::max(1.0, H.norm());
  for (int order = 4; order <= 5; ++order) {
    double d = reduced_derivative(S, p.x, p.u, v, order);
    if (std::abs(d) > 1e-4 * hs) {
      p.depth = order - 1;
      if (p.depth % 2 == 1 && d < 0) {
        // odd depth: leading coefficient positive fixes u
        p.u = -p.u;
        p.mu = -p.mu;
        d = -d;
        p.signature = kernel_hessian(S, p.x, p.u, p.mu);
      }
      p.leading_coefficient = d;
      p.sign = sign_split(S, p);
      return;
    }
  }
  std::ostringstream os;
  os << "depth classification failed at x = (" << p.x.transpose() << "): derivatives up to order 5 vanish";
  throw MorinError(os.str());
}

StratumSign sign_split(const MorinScenario&, const StratumPoint& p) {
  if (p.depth % 2 == 0) return StratumSign::none;
  return p.signature.lambda_even ? StratumSign::plus : StratumSign::minus;
}

StratumPoint make_stratum_point(const MorinScenario& S, const Vec& z1) {
  const Idx N = I(S.N()), n = I(S.n()), c = I(S.c());
  StratumPoint p;
  p.lift = z1;
  Vec z = z1.head(N + n + c);
  p.x = z.head(N);
  p.u = z.segment(N, n);
  p.mu = z.segment(N + n, c);
  p.residual = StratumLift(S, 1).system().evaluate(z).norm();
  classify_depth(S, p);
  return p;
}

// ---------------------------------------------------------------- multistart

std::vector<Vec> dedup_by_x(std::vector<Vec> pts, std::size_t N, double radius) {
  const Idx n = I(N);
  std::sort(pts.begin(), pts.end(), [&](const Vec& a, const Vec& b) {
    for (Idx i = 0; i < a.size() && i < b.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return a.size() < b.size();
  });
  std::vector<Vec> kept;
  for (auto& p : pts) {
    bool dup = false;
    for (const auto& q : kept)
      if ((p.head(n) - q.head(n)).norm() <= radius) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(std::move(p));
  }
  return kept;
}

namespace {

std::vector<Vec> random_ambient_points(const MorinScenario& S, std::size_t count, std::uint64_t stream) {
  Rng rng(stream_seed(S.seed, stream));
  std::vector<Vec> pts = S.manifold.sample_seeds();
  const Idx N = I(S.N());
  double R = S.manifold.sample_radius;
  for (std::size_t i = 0; i < count; ++i) {
    Vec x(N);
    for (Idx j = 0; j < N; ++j) x[j] = rng.uniform(-R, R);
    pts.push_back(x);
  }
  return pts;
}

}  // namespace

std::vector<Vec> solve_stratum1(const MorinScenario& S, unsigned workers) {
  StratumLift lift(S, 1);
  // basins shrink with the ambient dimension, not the target one
  std::size_t count = static_cast<std::size_t>(S.multistart_factor) * std::max(S.n(), S.N());
  auto starts = random_ambient_points(S, count, 1001);
  std::vector<std::optional<Vec>> found(starts.size());
  NewtonOptions opt;
  opt.residual_tol = S.tol.residual;
  parallel_for(starts.size(), workers, [&](std::size_t i) {
    try {
      Vec x = project_to_manifold(S.manifold, starts[i]);
      NewtonResult r = solve_min_norm(lift.system(), depth1_guess(S, x), opt);
      if (r.converged) found[i] = r.z;
    } catch (const SolverError&) {
    } catch (const RegularityError&) {
    }
  });
  std::vector<Vec> pts;
  for (auto& f : found)
    if (f) pts.push_back(std::move(*f));
  return dedup_by_x(std::move(pts), S.N(), S.tol.dedup_radius);
}

std::vector<Vec> solve_stratum2(const MorinScenario& S, const std::vector<Vec>& seeds1, unsigned workers) {
  StratumLift lift2(S, 2);
  std::vector<std::optional<Vec>> found(seeds1.size());
  NewtonOptions opt;
  opt.residual_tol = S.tol.residual;
  opt.max_iters = 80;
  parallel_for(seeds1.size(), workers, [&](std::size_t i) {
    try {
      NewtonResult r = solve_min_norm(lift2.system(), depth2_guess(S, lift2, seeds1[i]), opt);
      if (r.converged) found[i] = r.z;
    } catch (const SolverError&) {
    }
  });
  std::vector<Vec> pts;
  for (auto& f : found)
    if (f) pts.push_back(std::move(*f));
  return dedup_by_x(std::move(pts), S.N(), S.tol.dedup_radius);
}

// ---------------------------------------------------------------- tracing

namespace {

int kernel_det_sign(const MorinScenario& S, const StratumLift& lift1, const Vec& z) {
  KernelForm kf = kernel_form(S, lift1.x(z), lift1.u(z), lift1.mu(z));
  return det_sign(kf.Q, S.tol.eigen_zero);
}

StratumSign parity_sign(const MorinScenario& S, const StratumLift& lift1, const Vec& z) {
  KernelForm kf = kernel_form(S, lift1.x(z), lift1.u(z), lift1.mu(z));
  Inertia in = inertia(kf.Q, S.tol.eigen_zero);
  if (in.n_zero > 0) return StratumSign::none;
  return in.n_minus % 2 == 0 ? StratumSign::plus : StratumSign::minus;
}

// Bisection on the sign of det Q between two curve points, then Newton on
// the depth-2 lift.
std::optional<Vec> refine_cusp(const MorinScenario& S, const StratumLift& lift1, const StratumLift& lift2,
                               Vec a, Vec b, int sa) {
  NewtonOptions opt;
  opt.residual_tol = S.tol.residual;
  for (int it = 0; it < 60 && (a - b).norm() > 1e-11; ++it) {
    NewtonResult mid = curve_point_between(lift1.system(), a, b, 0.5, opt);
    if (!mid.converged) break;
    int sm = kernel_det_sign(S, lift1, mid.z);
    if (sm == 0) {
      a = b = mid.z;
      break;
    }
    if (sm == sa) a = mid.z;
    else b = mid.z;
  }
  Vec z1 = 0.5 * (a + b);
  NewtonOptions o2 = opt;
  o2.max_iters = 80;
  NewtonResult r = solve_min_norm(lift2.system(), depth2_guess(S, lift2, z1), o2);
  if (!r.converged) return std::nullopt;
  return r.z;
}

}  // namespace

Stratification solve_strata(const MorinScenario& S, const StrataOptions& opt) {
  Stratification st;
  StrataAudit& au = st.audit;
  const std::size_t N = S.N();
  const std::size_t n = S.n();
  StratumLift lift1(S, 1);
  std::optional<StratumLift> lift2;
  if (n >= 2) lift2.emplace(S, 2);

  std::vector<Vec> cloud = solve_stratum1(S, opt.workers);
  if (cloud.empty()) {
    au.nonempty_ok = false;
    au.messages.push_back("no singular point found although M is compact and m > n");
    return st;
  }
  for (const Vec& z : cloud) st.a1.push_back(make_stratum_point(S, z));

  std::vector<Vec> cusp_lifts;
  if (n == 2) {
    std::vector<bool> covered(cloud.size(), false);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (covered[i]) continue;
      StratumCurve sc;
      sc.trace = trace_closed_curve(lift1.system(), cloud[i], opt.trace,
                                    [&](const Vec& z) { return lift1.flip_u(z); });
      if (!sc.trace.closed) {
        au.curves_closed = false;
        au.messages.push_back("singular curve tracing failed: " + sc.trace.failure);
      }
      au.max_closure_gap = std::max(au.max_closure_gap, sc.trace.closure_gap);
      const auto& P = sc.trace.points;
      for (std::size_t j = 0; j < cloud.size(); ++j) {
        if (covered[j]) continue;
        for (const Vec& q : P)
          if (dist_x(cloud[j], q, N) < 3 * opt.trace.step) {
            covered[j] = true;
            break;
          }
      }
      covered[i] = true;

      // cusps: sign changes of det Q along the closed polyline
      std::size_t L = P.size();
      std::vector<int> ds(L);
      for (std::size_t j = 0; j < L; ++j) ds[j] = kernel_det_sign(S, lift1, P[j]);
      for (std::size_t j = 0; j < L; ++j)
        if (ds[j] == 0) ds[j] = j > 0 ? ds[j - 1] : 1;
      std::size_t segs = sc.trace.closed ? L : L - 1;
      for (std::size_t j = 0; j < segs; ++j) {
        std::size_t jn = (j + 1) % L;
        if (ds[j] == ds[jn]) continue;
        Vec b = P[jn];
        if (jn == 0 && sc.trace.closed_by_involution) b = lift1.flip_u(b);
        auto cz = refine_cusp(S, lift1, *lift2, P[j], b, ds[j]);
        if (!cz) {
          au.messages.push_back("cusp bracket could not be refined");
          au.cusp_crosscheck_ok = false;
          continue;
        }
        sc.cusps.push_back(static_cast<int>(cusp_lifts.size()));
        sc.cusp_after.push_back(j);
        cusp_lifts.push_back(*cz);
      }
      st.curves.push_back(std::move(sc));
    }
  }

  // Direct solve of the depth-2 lift, seeded from the depth-1 cloud.
  std::vector<Vec> direct2;
  if (n >= 2) direct2 = solve_stratum2(S, cloud, opt.workers);

  if (n == 2) {
    // every directly found cusp must be one of the traced ones
    int missing = 0;
    for (const Vec& d : direct2) {
      bool hit = false;
      for (const Vec& c : cusp_lifts)
        if (dist_x(d, c, N) <= 10 * S.tol.dedup_radius) hit = true;
      if (!hit) ++missing;
    }
    if (missing > 0) {
      au.cusp_crosscheck_ok = false;
      au.messages.push_back(std::to_string(missing) + " cusp(s) found by direct solve but not on a traced curve");
    }
    // duplicates along traced curves would mean a curve was traced twice
    auto uniq = dedup_by_x(cusp_lifts, N, S.tol.dedup_radius);
    if (uniq.size() != cusp_lifts.size()) {
      au.cusp_crosscheck_ok = false;
      au.messages.push_back("the same cusp was detected twice");
    }
  } else {
    cusp_lifts = direct2;
  }

  for (const Vec& z2 : cusp_lifts) {
    StratumPoint p = make_stratum_point(S, lift2->truncate(z2, 1));
    p.lift = z2;
    if (p.depth < 2) {
      au.nesting_ok = false;
      au.messages.push_back("a depth-2 lift point has a nondegenerate kernel form");
    }
    if (p.depth >= 3) st.deeper.push_back(p);
    st.a2.push_back(std::move(p));
  }

  // arcs between cusps
  for (std::size_t ci = 0; ci < st.curves.size(); ++ci) {
    const StratumCurve& sc = st.curves[ci];
    const auto& P = sc.trace.points;
    std::size_t L = P.size();
    if (sc.cusps.empty()) {
      Arc a;
      a.curve = static_cast<int>(ci);
      a.begin = 0;
      a.end = L;
      a.circle = true;
      a.sign = parity_sign(S, lift1, P[0]);
      for (const Vec& q : P)
        if (parity_sign(S, lift1, q) != a.sign) {
          au.boundary_ok = false;
          au.messages.push_back("cusp-free singular circle changes sign");
          break;
        }
      st.arcs.push_back(a);
      continue;
    }
    std::size_t K = sc.cusps.size();
    for (std::size_t q = 0; q < K; ++q) {
      Arc a;
      a.curve = static_cast<int>(ci);
      a.begin = (sc.cusp_after[q] + 1) % L;
      a.end = (sc.cusp_after[(q + 1) % K] + 1) % L;
      a.cusp_begin = sc.cusps[q];
      a.cusp_end = sc.cusps[(q + 1) % K];
      std::size_t span = (a.end + L - a.begin) % L;
      Vec probe;
      if (span >= 1) {
        probe = P[(a.begin + span / 2) % L];
      } else {
        // two cusps inside one step: probe between them
        const Vec& c0 = cusp_lifts[static_cast<std::size_t>(a.cusp_begin)];
        const Vec& c1 = cusp_lifts[static_cast<std::size_t>(a.cusp_end)];
        Vec m = 0.5 * (lift2->truncate(c0, 1) + lift2->truncate(c1, 1));
        NewtonResult r = solve_min_norm(lift1.system(), m);
        probe = r.z;
      }
      a.sign = parity_sign(S, lift1, probe);
      st.arcs.push_back(a);
    }
  }

  // ---- audits
  au.dimension_min_sv = 1.0;
  for (const auto& p : st.a1) {
    double s = min_relative_sv(lift1.system().jacobian(p.lift));
    au.dimension_min_sv = std::min(au.dimension_min_sv, s);
  }
  for (const auto& p : st.a2) {
    double s = min_relative_sv(lift2->system().jacobian(p.lift));
    au.dimension_min_sv = std::min(au.dimension_min_sv, s);
    double r = lift1.system().evaluate(lift2->truncate(p.lift, 1)).norm();
    if (r > 1e-9) au.nesting_ok = false;
  }
  if (au.dimension_min_sv < 1e-8) {
    au.dimension_ok = false;
    au.messages.push_back("a lifted stratum system is rank deficient: local dimension differs from n - k");
  }
  if (n == 2) {
    for (const auto& p : st.a2) {
      bool on_curve = false;
      for (const auto& sc : st.curves)
        for (const Vec& q : sc.trace.points)
          if (dist_x(p.x, q, N) < 2 * opt.trace.step) on_curve = true;
      if (!on_curve) au.nesting_ok = false;
    }
    std::vector<int> plus_ends(st.a2.size(), 0), minus_ends(st.a2.size(), 0);
    for (const Arc& a : st.arcs) {
      if (a.circle) continue;
      for (int c : {a.cusp_begin, a.cusp_end}) {
        if (a.sign == StratumSign::plus) ++plus_ends[static_cast<std::size_t>(c)];
        else if (a.sign == StratumSign::minus) ++minus_ends[static_cast<std::size_t>(c)];
      }
    }
    for (std::size_t c = 0; c < st.a2.size(); ++c)
      if (plus_ends[c] != 1 || minus_ends[c] != 1) {
        ++au.boundary_violations;
        au.boundary_ok = false;
      }
    if (au.boundary_violations)
      au.messages.push_back(std::to_string(au.boundary_violations) +
                            " cusp(s) do not separate one plus arc from one minus arc");
  }
  for (const auto& p : st.a1) {
    if (p.depth != 1) continue;
    QuadraticSignature flipped = kernel_hessian(S, p.x, -p.u, -p.mu);
    if (flipped.lambda_even != p.signature.lambda_even) au.parity_invariant_ok = false;
  }
  if (!au.parity_invariant_ok) au.messages.push_back("sign split changed under u -> -u");
  if (!st.deeper.empty())
    st.warnings.push_back(std::to_string(st.deeper.size()) + " point(s) of depth >= 3 found; their depth is unverified");
  return st;
}

}  // namespace morin
