#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "morin/poly_system.hpp"

namespace morin {

/// M = {x in R^N : g(x) = 0}, with g_1..g_c, c = N - m.
class ImplicitManifold {
 public:
  ImplicitManifold() = default;
  ImplicitManifold(std::size_t ambient_dim, std::vector<Expr> constraints,
                   std::vector<Vec> sample_seeds = {});

  std::size_t ambient_dim() const { return N_; }
  std::size_t intrinsic_dim() const { return N_ - g_.size(); }
  std::size_t codim() const { return g_.size(); }
  const std::vector<Expr>& constraints() const { return g_; }
  const PolySystem& system() const { return sys_; }
  const std::vector<Vec>& sample_seeds() const { return seeds_; }

  /// Half-width of the box random ambient samples are drawn from.
  double sample_radius = 2.0;
  std::optional<int> chi_known;

 private:
  std::size_t N_ = 0;
  std::vector<Expr> g_;
  PolySystem sys_;
  std::vector<Vec> seeds_;
};

struct TangentFrame {
  Vec base;
  Mat tangent;  // N x m, orthonormal columns
  Mat normal;   // N x (N-m)
};

struct RegularityAudit {
  bool ok = true;
  int points = 0;
  double min_singular_value = 0.0;
  Vec worst_point;
  std::string message;
};

/// Gauss-Newton projection onto M; throws SolverError on failure.
Vec project_to_manifold(const ImplicitManifold& M, const Vec& x0, const NewtonOptions& opt = {});

TangentFrame tangent_frame(const ImplicitManifold& M, const Vec& p);

/// Samples `count` seeded ambient points, projects them onto M and checks the
/// constraint Jacobian rank at each; also evaluates it at the declared seeds.
RegularityAudit validate_regularity(const ImplicitManifold& M, int count, std::uint64_t seed,
                                    double rank_tol = 1e-4);

/// sphere(m) in R^{m+1}, "torus" in R^3, "product-of-spheres" S^a x S^b in
/// R^{a+b+2}. Throws on an unknown name.
ImplicitManifold standard_manifold(const std::string& name, const std::vector<int>& params = {});

}  // namespace morin
