#include <doctest.h>

#include "morin/poly_system.hpp"
#include "morin/random.hpp"
#include "support.hpp"

using namespace morin;

namespace {

PolySystem sys(std::vector<std::string> src, std::size_t n) {
  std::vector<Expr> eqs;
  for (const auto& s : src) eqs.push_back(Expr::parse(s, n));
  return PolySystem(std::move(eqs), n);
}

}  // namespace

TEST_CASE("Jacobian and weighted Hessian match finite differences") {
  PolySystem F = sys({"(+ (^ x0 2) (* x1 x2) -1)", "(+ (* x0 (^ x2 3)) x1)"}, 3);
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    Vec z(3), w(2);
    for (int i = 0; i < 3; ++i) z[i] = rng.uniform(-1.5, 1.5);
    w << rng.normal(), rng.normal();
    Mat J = F.jacobian(z);
    for (int r = 0; r < 2; ++r) {
      Vec fd = testing::fd_gradient([&](const Vec& q) { return F.evaluate(q)[r]; }, z);
      CHECK((J.row(r).transpose() - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    }
    Mat H = F.weighted_hessian(z, w);
    for (int i = 0; i < 3; ++i) {
      Vec fd = testing::fd_gradient([&](const Vec& q) { return (F.jacobian(q).transpose() * w)[i]; }, z);
      CHECK((H.row(i).transpose() - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    }
    CHECK((H - H.transpose()).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("minimum-norm Newton lands on the sphere") {
  PolySystem F = sys({"(+ (^ x0 2) (^ x1 2) (^ x2 2) -1)"}, 3);
  Vec z0(3);
  z0 << 0.3, -1.2, 0.8;
  NewtonResult r = solve_min_norm(F, z0);
  REQUIRE(r.converged);
  CHECK(r.z.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // the minimum-norm step moves along the normal, so the direction is kept
  CHECK(r.z.normalized().dot(z0.normalized()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("canonical null basis is orthonormal and annihilated") {
  Mat J(2, 4);
  J << 1, 2, 0, -1, 0, 1, 1, 1;
  Mat B = canonical_null_basis(J, 2);
  CHECK((J * B).norm() < 1e-12);
  CHECK((B.transpose() * B - Mat::Identity(2, 2)).norm() < 1e-12);
  // independent of sign conventions: repeated calls and row scaling agree
  Mat J2 = J;
  J2.row(0) *= -3.0;
  CHECK((canonical_null_basis(J2, 2) - B).norm() < 1e-10);
}

TEST_CASE("inertia and determinant sign") {
  Mat A = Vec(Eigen::Vector4d(3, -2, 1e-9, -5)).asDiagonal();
  Inertia in = inertia(A, 1e-6);
  CHECK(in.n_plus == 1);
  CHECK(in.n_minus == 2);
  CHECK(in.n_zero == 1);
  CHECK(det_sign(A, 1e-6) == 0);
  Mat B = Vec(Eigen::Vector3d(3, -2, -5)).asDiagonal();
  CHECK(det_sign(B, 1e-6) == 1);
}

TEST_CASE("constrained critical points of a height on the sphere") {
  PolySystem F = sys({"(+ (^ x0 2) (^ x1 2) (^ x2 2) -1)"}, 3);
  PolyFunction phi(Expr::parse("x2", 3));
  ConstrainedCritical cc(F, phi);
  Vec z0(3);
  z0 << 0.1, 0.2, 0.9;
  auto p = cc.solve(z0);
  REQUIRE(p.converged);
  CHECK(p.z[2] == doctest::Approx(1.0));
  Mat B = cc.tangent_basis(p.z);
  Mat H = cc.reduced_hessian(p.z, p.nu, B);
  // maximum of the height: both tangent curvatures are -1
  CHECK(inertia(H, 1e-6).n_minus == 2);
  CHECK(H.trace() == doctest::Approx(-2.0));

  // tangent gradient: e2 minus its normal part
  Vec x(3);
  x << 0.6, 0.0, 0.8;
  Vec want = Vec::Unit(3, 2) - 0.8 * x;
  CHECK((cc.tangent_gradient(x) - want).norm() < 1e-12);
}
