#include <doctest.h>

#include <algorithm>
#include <random>

#include "morin/strata.hpp"
#include "support.hpp"

using namespace morin;

namespace {

// cusp normal form times a Morse square, on the hyperplane x3 = 0 of R^4
MorinScenario cusp_box() {
  return parse_scenario(R"J({
    "name": "cusp-box", "ambient_dim": 4, "intrinsic_dim": 3,
    "constraints": ["x3"],
    "map": ["x0", "(+ (^ x1 3) (* x0 x1) (^ x2 2))"]
  })J");
}

// swallowtail normal form on the hyperplane x4 = 0 of R^5
MorinScenario swallowtail_box() {
  return parse_scenario(R"J({
    "name": "swallowtail-box", "ambient_dim": 5, "intrinsic_dim": 4,
    "constraints": ["x4"],
    "map": ["x0", "x1", "(+ (^ x2 4) (* x0 (^ x2 2)) (* x1 x2) (^ x3 2))"]
  })J");
}

Vec concat(std::initializer_list<Vec> parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.size();
  Vec z(n);
  Eigen::Index o = 0;
  for (const auto& p : parts) {
    z.segment(o, p.size()) = p;
    o += p.size();
  }
  return z;
}

}  // namespace

TEST_CASE("fold points of the height on the 2-sphere") {
  const auto& s = testing::solved("s2-height");
  REQUIRE(s.st.a1.size() == 2);
  std::vector<int> nminus;
  for (const auto& p : s.st.a1) {
    CHECK(p.depth == 1);
    CHECK(p.sign == StratumSign::plus);
    CHECK(std::abs(std::abs(p.x[2]) - 1.0) < 1e-9);
    nminus.push_back(p.signature.n_minus);
  }
  std::sort(nminus.begin(), nminus.end());
  // kernel form at the poles: +-identity once u is normalized
  CHECK(nminus == std::vector<int>{0, 2});
}

TEST_CASE("torus height: extrema are plus, saddles are minus") {
  const auto& s = testing::solved("torus-height");
  REQUIRE(s.st.a1.size() == 4);
  for (const auto& p : s.st.a1) {
    double r = std::abs(p.x[0]);
    if (std::abs(r - 3.0) < 1e-8) CHECK(p.sign == StratumSign::plus);
    else if (std::abs(r - 1.0) < 1e-8) CHECK(p.sign == StratumSign::minus);
    else FAIL("unexpected fold point");
  }
}

TEST_CASE("quadric height on the 4-sphere has ten fold points") {
  const auto& s = testing::solved("s4-height");
  CHECK(s.st.a1.size() == 10);
  for (const auto& p : s.st.a1) CHECK(p.x.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("projection of the 3-sphere: one cusp-free plus circle") {
  const auto& s = testing::solved("s3-proj");
  REQUIRE(s.st.curves.size() == 1);
  const auto& c = s.st.curves[0];
  CHECK(c.trace.closed);
  CHECK(c.trace.closure_gap <= 1e-6);
  CHECK(c.cusps.empty());
  CHECK(s.st.a2.empty());
  REQUIRE(s.st.arcs.size() == 1);
  CHECK(s.st.arcs[0].circle);
  CHECK(s.st.arcs[0].sign == StratumSign::plus);
  // fold set is the great circle x2 = x3 = 0
  for (const auto& z : c.trace.points) CHECK(z.segment(2, 2).norm() < 1e-9);
}

TEST_CASE("perturbed projection: cusps split the fold curve into alternating arcs") {
  const auto& s = testing::solved("s3-cusp");
  const auto& st = s.st;
  CHECK(st.a2.size() >= 2);
  CHECK(st.audit.boundary_ok);
  CHECK(st.audit.boundary_violations == 0);
  CHECK(st.audit.cusp_crosscheck_ok);
  CHECK(st.audit.curves_closed);
  CHECK(st.audit.nesting_ok);
  CHECK(st.audit.dimension_ok);
  for (const auto& p : st.a2) {
    CHECK(p.depth == 2);
    CHECK(std::abs(p.leading_coefficient) > 1e-3);
  }
  std::vector<int> plus(st.a2.size()), minus(st.a2.size());
  for (const auto& a : st.arcs) {
    if (a.circle) continue;
    for (int c : {a.cusp_begin, a.cusp_end}) (a.sign == StratumSign::plus ? plus : minus)[c]++;
  }
  for (std::size_t i = 0; i < st.a2.size(); ++i) {
    CHECK(plus[i] == 1);
    CHECK(minus[i] == 1);
  }
}

TEST_CASE("cusp normal form: explicit depth-2 lift") {
  MorinScenario S = cusp_box();
  StratumLift L2(S, 2);
  Vec x = Vec::Zero(4), u(2), mu = Vec::Zero(1), v = Vec::Unit(4, 1), al = Vec::Zero(1), be(2), sg = Vec::Zero(1);
  u << 0, 1;
  be << 1, 0;  // H v = e0 = Df^T be
  Vec z = concat({x, u, mu, v, al, be, sg});
  REQUIRE(z.size() == static_cast<Eigen::Index>(L2.num_vars()));
  CHECK(L2.system().evaluate(z).norm() < 1e-14);
  // isolated: the square system is nonsingular
  Vec sv = singular_values(L2.system().jacobian(z));
  CHECK(L2.dim() == 0);
  CHECK(sv[sv.size() - 1] > 1e-3);

  StratumPoint p = make_stratum_point(S, L2.truncate(z, 1));
  CHECK(p.depth == 2);
  CHECK(p.depth_verified);
  // third derivative of x1^3 along the null direction e1
  CHECK(std::abs(p.leading_coefficient) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(std::abs(p.degenerate_direction[1]) == doctest::Approx(1.0));
}

TEST_CASE("swallowtail normal form: explicit depth-2 lift and depth 3 at the origin") {
  MorinScenario S = swallowtail_box();
  StratumLift L2(S, 2);
  Vec x = Vec::Zero(5), u = Vec::Unit(3, 2), mu = Vec::Zero(1), v = Vec::Unit(5, 2), al = Vec::Zero(1),
      be = Vec::Unit(3, 1), sg = Vec::Zero(1);
  Vec z = concat({x, u, mu, v, al, be, sg});
  CHECK(L2.system().evaluate(z).norm() < 1e-14);
  // closure of A_2 is a curve here: corank one at the lift point
  Vec sv = singular_values(L2.system().jacobian(z));
  CHECK(sv.size() == static_cast<Eigen::Index>(L2.system().num_eqs()));
  CHECK(sv[sv.size() - 1] > 1e-3);
  CHECK(L2.dim() == 1);

  StratumPoint p = make_stratum_point(S, L2.truncate(z, 1));
  CHECK(p.depth == 3);
  CHECK_FALSE(p.depth_verified);
  // fourth derivative of x2^4
  CHECK(std::abs(p.leading_coefficient) == doctest::Approx(24.0).epsilon(1e-2));
}

TEST_CASE("lifts are nested prefixes and the involution preserves them") {
  MorinScenario S = cusp_box();
  StratumLift L1(S, 1), L2(S, 2);
  Vec z = Vec::Zero(static_cast<Eigen::Index>(L2.num_vars()));
  z[static_cast<Eigen::Index>(L2.off_u()) + 1] = 1;
  z[static_cast<Eigen::Index>(L2.off_v()) + 1] = 1;
  z[static_cast<Eigen::Index>(L2.off_beta())] = 1;
  CHECK(L2.system().evaluate(z).norm() < 1e-14);
  CHECK(L1.system().evaluate(L2.truncate(z, 1)).norm() < 1e-14);
  CHECK(L2.system().evaluate(L2.flip_u(z)).norm() < 1e-14);
  CHECK(L2.system().evaluate(L2.flip_v(z)).norm() < 1e-14);
}

TEST_CASE("sign split does not depend on the cokernel orientation") {
  const auto& s = testing::solved("s3-cusp");
  int checked = 0;
  for (const auto& p : s.st.a1) {
    if (p.depth != 1) continue;
    auto a = kernel_hessian(s.S, p.x, p.u, p.mu);
    auto b = kernel_hessian(s.S, p.x, -p.u, -p.mu);
    CHECK(a.lambda_even == b.lambda_even);
    // the kernel is even-dimensional, so n_minus and n_plus swap
    CHECK(a.n_minus == b.n_plus);
    if (++checked == 50) break;
  }
  CHECK(checked > 0);
}

TEST_CASE("deduplication is order independent") {
  std::vector<Vec> pts;
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int i = 0; i < 30; ++i) {
    Vec p(3);
    p << U(g), U(g), U(g);
    pts.push_back(p);
    pts.push_back(p + Vec::Constant(3, 1e-9));
  }
  auto a = dedup_by_x(pts, 3, 1e-6);
  std::shuffle(pts.begin(), pts.end(), g);
  auto b = dedup_by_x(pts, 3, 1e-6);
  REQUIRE(a.size() == 30);
  REQUIRE(b.size() == 30);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() < 1e-6);
}

TEST_CASE("strata do not depend on the worker count") {
  MorinScenario S = testing::bundled("s3-cusp");
  StrataOptions o1, o4;
  o4.workers = 4;
  auto a = solve_strata(S, o1);
  auto b = solve_strata(S, o4);
  REQUIRE(a.a1.size() == b.a1.size());
  REQUIRE(a.a2.size() == b.a2.size());
  for (std::size_t i = 0; i < a.a2.size(); ++i) CHECK(a.a2[i].x == b.a2[i].x);
  for (std::size_t i = 0; i < a.a1.size(); ++i) CHECK(a.a1[i].x == b.a1[i].x);
}
