#include <doctest.h>

#include <numbers>

#include "morin/continuation.hpp"
#include "morin/manifold.hpp"
#include "morin/random.hpp"
#include "support.hpp"

using namespace morin;

TEST_CASE("projection and tangent frame on the torus") {
  ImplicitManifold T = standard_manifold("torus");
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    Vec x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.uniform(-3.5, 3.5);
    Vec p;
    try {
      p = project_to_manifold(T, x);
    } catch (const SolverError&) {
      continue;
    }
    CHECK(T.system().evaluate(p).norm() < 1e-10);
    TangentFrame fr = tangent_frame(T, p);
    CHECK(fr.tangent.cols() == 2);
    CHECK((fr.tangent.transpose() * fr.tangent - Mat::Identity(2, 2)).norm() < 1e-10);
    CHECK((fr.tangent.transpose() * fr.normal).norm() < 1e-10);
    // tangent vectors annihilate the constraint gradient
    CHECK((T.system().jacobian(p) * fr.tangent).norm() < 1e-8 * std::max(1.0, T.system().jacobian(p).norm()));
  }
}

TEST_CASE("regularity audit") {
  SUBCASE("spheres are regular") {
    auto au = validate_regularity(standard_manifold("sphere", {3}), 100, 5);
    CHECK(au.ok);
    CHECK(au.points > 0);
  }
  SUBCASE("a squared constraint is rejected") {
    ImplicitManifold M(3, {Expr::parse("(^ x0 2)", 3)});
    M.sample_radius = 1.0;
    auto au = validate_regularity(M, 50, 5);
    CHECK_FALSE(au.ok);
    CHECK_FALSE(au.message.empty());
  }
}

TEST_CASE("standard manifolds carry their Euler characteristic") {
  CHECK(standard_manifold("sphere", {2}).chi_known == 2);
  CHECK(standard_manifold("sphere", {3}).chi_known == 0);
  CHECK(standard_manifold("torus").chi_known == 0);
  CHECK(standard_manifold("product-of-spheres", {1, 2}).intrinsic_dim() == 3);
}

TEST_CASE("continuation closes the unit circle") {
  PolySystem F({Expr::parse("(+ (^ x0 2) (^ x1 2) -1)", 2)}, 2);
  Vec z0(2);
  z0 << 1, 0;
  TraceOptions opt;
  opt.step = 0.05;
  TracedCurve c = trace_closed_curve(F, z0, opt);
  REQUIRE(c.closed);
  CHECK(c.closure_gap <= 1e-6);
  double len = 0;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    CHECK(std::abs(c.points[i].norm() - 1.0) < 1e-10);
    len += (c.points[(i + 1) % c.points.size()] - c.points[i]).norm();
  }
  // inscribed polygon: slightly shorter than 2 pi
  CHECK(len == doctest::Approx(2 * std::numbers::pi).epsilon(1e-3));
}

TEST_CASE("curve tangent is orthogonal to the gradients") {
  PolySystem F({Expr::parse("(+ (^ x0 2) (^ x1 2) (^ x2 2) -1)", 3), Expr::parse("(- x2 (* 1/2 x0))", 3)}, 3);
  Vec z(3);
  z << 0, 1, 0;
  Vec t = curve_tangent(F, z);
  CHECK((F.jacobian(z) * t).norm() < 1e-12);
  CHECK(t.norm() == doctest::Approx(1.0));
  Vec h = -t;
  CHECK(curve_tangent(F, z, &h).dot(t) == doctest::Approx(-1.0));
}
