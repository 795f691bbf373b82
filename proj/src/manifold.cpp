#include "morin/manifold.hpp"

#include <limits>
#include <sstream>

#include "morin/random.hpp"

namespace morin {

ImplicitManifold::ImplicitManifold(std::size_t ambient_dim, std::vector<Expr> constraints,
                                   std::vector<Vec> sample_seeds)
    : N_(ambient_dim), g_(std::move(constraints)), seeds_(std::move(sample_seeds)) {
  if (g_.size() >= N_) throw DimensionError("manifold needs fewer constraints than ambient dimension");
  for (const auto& v : seeds_)
    if (static_cast<std::size_t>(v.size()) != N_) throw DimensionError("sample seed has wrong dimension");
  sys_ = PolySystem(g_, N_);
}

Vec project_to_manifold(const ImplicitManifold& M, const Vec& x0, const NewtonOptions& opt) {
  if (static_cast<std::size_t>(x0.size()) != M.ambient_dim())
    throw DimensionError("point dimension does not match manifold");
  if (M.codim() == 0) return x0;
  NewtonResult r = solve_min_norm(M.system(), x0, opt);
  if (!r.converged)
    throw SolverError("projection onto M did not converge (residual " + std::to_string(r.residual) + ")");
  return r.z;
}

TangentFrame tangent_frame(const ImplicitManifold& M, const Vec& p) {
  const auto N = static_cast<Eigen::Index>(M.ambient_dim());
  const auto c = static_cast<Eigen::Index>(M.codim());
  TangentFrame fr;
  fr.base = p;
  if (c == 0) {
    fr.tangent = Mat::Identity(N, N);
    fr.normal = Mat(N, 0);
    return fr;
  }
  Mat J = M.system().jacobian(p);
  Vec s = singular_values(J);
  if (s[c - 1] <= 1e-10 * std::max(1.0, s[0])) throw RegularityError("constraint Jacobian is rank deficient");
  fr.tangent = canonical_null_basis(J, N - c);
  fr.normal = canonical_row_basis(J, c);
  return fr;
}

RegularityAudit validate_regularity(const ImplicitManifold& M, int count, std::uint64_t seed,
                                    double rank_tol) {
  if (count < 1) throw Error("regularity audit needs at least one point");
  RegularityAudit audit;
  audit.min_singular_value = std::numeric_limits<double>::infinity();
  const auto N = static_cast<Eigen::Index>(M.ambient_dim());
  const auto c = static_cast<Eigen::Index>(M.codim());
  Rng rng(seed);

  auto check = [&](const Vec& x) {
    ++audit.points;
    if (c == 0) return;
    Vec s = singular_values(M.system().jacobian(x));
    double smin = s[c - 1];
    if (smin < audit.min_singular_value) {
      audit.min_singular_value = smin;
      audit.worst_point = x;
    }
    if (smin <= rank_tol * std::max(1.0, s[0]) && audit.ok) {
      audit.ok = false;
      std::ostringstream os;
      os << "constraint Jacobian rank deficient at x = (" << x.transpose() << ")";
      audit.message = os.str();
    }
  };

  std::vector<Vec> starts = M.sample_seeds();
  for (int i = 0; i < count; ++i) {
    Vec x(N);
    for (Eigen::Index j = 0; j < N; ++j) x[j] = rng.uniform(-M.sample_radius, M.sample_radius);
    starts.push_back(x);
  }
  for (const Vec& x0 : starts) {
    if (c == 0) {
      check(x0);
      continue;
    }
    NewtonResult r = solve_min_norm(M.system(), x0);
    // A double root still attracts Gauss-Newton, only slowly; land on it anyway.
    if (!r.converged) {
      NewtonOptions slow;
      slow.max_iters = 400;
      r = solve_min_norm(M.system(), r.z, slow);
    }
    if (r.residual < 1e-6) check(r.z);
  }
  if (audit.points == 0) {
    audit.ok = false;
    audit.message = "no sample point could be projected onto M";
  }
  if (c == 0) audit.min_singular_value = 0.0;
  return audit;
}

namespace {

Expr sum_of_squares(std::size_t N, std::size_t from, std::size_t to) {
  Expr s(N);
  for (std::size_t i = from; i < to; ++i) s += Expr::variable(N, i).pow(2);
  return s;
}

int chi_sphere(int m) { return m % 2 == 0 ? 2 : 0; }

}  // namespace

ImplicitManifold standard_manifold(const std::string& name, const std::vector<int>& params) {
  if (name == "sphere") {
    if (params.size() != 1 || params[0] < 1) throw Error("sphere needs one parameter m >= 1");
    auto N = static_cast<std::size_t>(params[0] + 1);
    Vec seed = Vec::Zero(static_cast<Eigen::Index>(N));
    seed[0] = 1.0;
    ImplicitManifold M(N, {sum_of_squares(N, 0, N) - Expr::constant(N, 1)}, {seed});
    M.sample_radius = 1.5;
    M.chi_known = chi_sphere(params[0]);
    return M;
  }
  if (name == "torus") {
    if (!params.empty()) throw Error("torus takes no parameters");
    const std::size_t N = 3;
    Expr r2 = sum_of_squares(N, 0, 3);
    Expr q = sum_of_squares(N, 0, 2);
    Expr g = (r2 + Expr::constant(N, 3)).pow(2) - Rational(16) * q;
    Vec seed(3);
    seed << 3.0, 0.0, 0.0;
    ImplicitManifold M(N, {g}, {seed});
    M.sample_radius = 3.5;
    M.chi_known = 0;
    return M;
  }
  if (name == "product-of-spheres") {
    if (params.size() != 2 || params[0] < 1 || params[1] < 1)
      throw Error("product-of-spheres needs two parameters a, b >= 1");
    auto a = static_cast<std::size_t>(params[0] + 1);
    auto b = static_cast<std::size_t>(params[1] + 1);
    std::size_t N = a + b;
    Expr one = Expr::constant(N, 1);
    Vec seed = Vec::Zero(static_cast<Eigen::Index>(N));
    seed[0] = 1.0;
    seed[static_cast<Eigen::Index>(a)] = 1.0;
    ImplicitManifold M(N, {sum_of_squares(N, 0, a) - one, sum_of_squares(N, a, N) - one}, {seed});
    M.sample_radius = 1.5;
    M.chi_known = chi_sphere(params[0]) * chi_sphere(params[1]);
    return M;
  }
  throw Error("unknown standard manifold '" + name + "'");
}

}  // namespace morin
