#include <doctest.h>

#include "morin/euler.hpp"
#include "support.hpp"

using namespace morin;

namespace {

const RunResult& run_of(const std::string& name) {
  static std::map<std::string, RunResult> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    RunConfig cfg;
    cfg.scenario = bundled_scenario_dir() / (name + ".json");
    it = cache.emplace(name, run_pipeline(testing::bundled(name), cfg)).first;
  }
  return it->second;
}

const StratumChi* find(const EulerReport& e, int k, StratumSign s) {
  for (const auto& c : e.strata)
    if (c.k == k && c.sign == s) return &c;
  return nullptr;
}

// chi of the signed fold strata, counted by hand from the geometry
struct Expected {
  const char* name;
  int chi_M;
  int fold_plus;
  int fold_minus;
};

}  // namespace

TEST_CASE("Morse counts with and without boundary") {
  // closed interval with a monotone function: no interior points, one inward end
  CHECK(chi_with_boundary({}, {0}) == 1);
  // height on the closed disk centred at a minimum
  CHECK(chi_with_boundary({0}, {}) == 1);
  // annulus, inward boundary points of index 0 and 1
  CHECK(chi_with_boundary({}, {0, 1}) == 0);
  // circle
  std::vector<CriticalRecord> circle(2);
  circle[0].morse_index = 0;
  circle[1].morse_index = 1;
  CHECK(chi_closed_morse(circle) == 0);
  circle[1].morse_index = 2;
  CHECK(chi_closed_morse(circle) == 2);
}

TEST_CASE("Euler characteristics of M and of the fold strata") {
  const Expected table[] = {
      {"s2-height", 2, 2, 0},    // two poles
      {"torus-height", 0, 2, 2},  // extrema plus, saddles minus
      {"s4-height", 2, 6, 4},
      {"s3-proj", 0, 0, 0},    // one circle
      {"s3-cusp", 0, 1, 1},    // closed arcs between cusps
      {"s4-proj3", 2, 2, 0},   // fold 2-sphere
  };
  for (const auto& t : table) {
    CAPTURE(t.name);
    const auto& r = run_of(t.name);
    REQUIRE(r.exit_code == exit_ok);
    REQUIRE(r.euler);
    const auto& e = *r.euler;
    CHECK(e.chi_M_morse == t.chi_M);
    CHECK(e.euler_identity_ok);
    CHECK(e.euler_identity_lhs == t.chi_M);
    CHECK(e.euler_identity_rhs == t.chi_M);
    const auto* p = find(e, 1, StratumSign::plus);
    const auto* m = find(e, 1, StratumSign::minus);
    REQUIRE(p);
    REQUIRE(m);
    CHECK(p->chi_morse == t.fold_plus);
    CHECK(m->chi_morse == t.fold_minus);
    if (p->chi_oracle) CHECK(*p->chi_oracle == p->chi_morse);
    if (m->chi_oracle) CHECK(*m->chi_oracle == m->chi_morse);
    CHECK(e.identities_ok());
  }
}

TEST_CASE("the oracle is independent of the Morse data") {
  const auto& s = testing::solved("torus-height");
  CHECK(chi_stratum_oracle(s.S, s.st, 1, StratumSign::plus) == 2);
  CHECK(chi_stratum_oracle(s.S, s.st, 1, StratumSign::minus) == 2);
  CHECK(chi_stratum_oracle(s.S, s.st, 0, StratumSign::none) == 0);
  const auto& c = testing::solved("s3-cusp");
  CHECK(chi_stratum_oracle(c.S, c.st, 1, StratumSign::plus) == 1);
  CHECK(chi_stratum_oracle(c.S, c.st, 1, StratumSign::minus) == 1);
}

TEST_CASE("mod-2 congruence") {
  for (const char* name : {"s2-height", "torus-height", "s4-height", "s3-proj", "s3-cusp", "s4-proj3"}) {
    CAPTURE(name);
    const auto& e = *run_of(name).euler;
    CHECK(e.mod2_ok);
    CHECK((e.mod2_lhs - e.mod2_rhs) % 2 == 0);
  }
  // torus: chi(M) = 0 while the fold closure is four points
  CHECK(run_of("torus-height").euler->mod2_rhs % 2 == 0);
}

TEST_CASE("fold equality applies only without cusps") {
  for (const char* name : {"s2-height", "torus-height", "s4-height", "s3-proj", "s4-proj3"}) {
    CAPTURE(name);
    const auto& e = *run_of(name).euler;
    REQUIRE(e.fold_equality_ok.has_value());
    CHECK(*e.fold_equality_ok);
    CHECK(e.fold_equality_rhs == e.chi_M_morse);
  }
  CHECK_FALSE(run_of("s3-cusp").euler->fold_equality_ok.has_value());
}

TEST_CASE("cusp scenario: certificates and route agreement") {
  const auto& e = *run_of("s3-cusp").euler;
  const auto* p = find(e, 1, StratumSign::plus);
  const auto* m = find(e, 1, StratumSign::minus);
  REQUIRE(p);
  REQUIRE(m);
  CHECK(p->complete);
  CHECK(m->complete);
  CHECK(p->certificates + m->certificates >= 2);
  CHECK(e.route_agreement_ok);
  CHECK(e.telescoping_ok);
  CHECK(e.closure_inclusion_exclusion_ok);
}

TEST_CASE("chi does not depend on the seed") {
  for (const char* name : {"torus-height", "s3-cusp"}) {
    std::optional<int> first;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      RunConfig cfg;
      cfg.seed = seed;
      RunResult r = run_pipeline(testing::bundled(name), cfg);
      REQUIRE(r.exit_code == exit_ok);
      if (!first) first = r.euler->chi_M_morse;
      CHECK(r.euler->chi_M_morse == *first);
      CHECK(r.euler->identities_ok());
    }
  }
}
