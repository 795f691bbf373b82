// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "morin/pipeline.hpp"
#include "morin/random.hpp"
#include "morin/strata.hpp"

using namespace morin;

namespace {

const std::vector<std::string> all_scenarios = {"s2-height", "torus-height", "s4-height",
                                                "s3-proj",   "s3-cusp",      "s4-proj3"};
constexpr int n_seeds = 5;

struct Timed {
  RunResult r;
  double seconds = 0;
};

MorinScenario load(const std::string& name) { return load_scenario(bundled_scenario_dir() / (name + ".json")); }

Timed timed_run(const std::string& name, std::optional<std::uint64_t> seed) {
  RunConfig cfg;
  cfg.scenario = bundled_scenario_dir() / (name + ".json");
  cfg.seed = seed;
  auto t0 = std::chrono::steady_clock::now();
  Timed t{run_pipeline(load(name), cfg), 0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

// runs over seeds 1..5, shared by several criteria
std::map<std::string, std::vector<Timed>>& seeded() {
  static std::map<std::string, std::vector<Timed>> cache;
  if (cache.empty())
    for (const auto& s : all_scenarios)
      for (int seed = 1; seed <= n_seeds; ++seed) cache[s].push_back(timed_run(s, static_cast<std::uint64_t>(seed)));
  return cache;
}

const StratumChi* stratum(const EulerReport& e, int k, StratumSign s) {
  for (const auto& c : e.strata)
    if (c.k == k && c.sign == s) return &c;
  return nullptr;
}

struct Verdict {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

bool healthy(const RunResult& r) { return r.exit_code == exit_ok && r.euler && r.morse; }

Verdict criterion1() {
  Verdict v;
  const std::map<std::string, std::pair<int, int>> want = {
      {"s2-height", {2, 0}}, {"torus-height", {2, 2}}, {"s4-height", {6, 4}}};
  const std::map<std::string, int> chi = {{"s2-height", 2}, {"torus-height", 0}, {"s4-height", 2}};
  std::string times;
  for (const auto& [name, pm] : want) {
    Timed t = timed_run(name, std::nullopt);
    times += " " + name + " " + std::to_string(t.seconds).substr(0, 4) + "s";
    if (!healthy(t.r)) {
      v.fail(name + ": exit " + std::to_string(t.r.exit_code));
      continue;
    }
    const auto& e = *t.r.euler;
    const auto* p = stratum(e, 1, StratumSign::plus);
    const auto* m = stratum(e, 1, StratumSign::minus);
    v.require(p && m && p->chi_morse == pm.first && m->chi_morse == pm.second, name + ": fold strata chi");
    v.require(e.chi_M_morse == chi.at(name) && e.euler_identity_lhs == e.euler_identity_rhs && e.euler_identity_ok,
              name + ": identity");
    v.require(t.seconds < 10.0, name + ": slower than 10 s");
    if (name == "s4-height") v.require(t.r.morse->records[0].size() >= 6, "s4-height: fewer than 6 critical points");
  }
  if (v.ok) v.detail = "chi 2 = 2 - 0, 0 = 2 - 2, 2 = 6 - 4;" + times;
  return v;
}

Verdict criterion2() {
  Verdict v;
  Timed t = timed_run("s3-proj", std::nullopt);
  if (!healthy(t.r)) {
    v.fail("exit " + std::to_string(t.r.exit_code));
    return v;
  }
  const auto& st = t.r.strata;
  v.require(st.curves.size() == 1, "expected one fold curve");
  v.require(st.a2.empty(), "cusps detected");
  if (!st.curves.empty()) {
    v.require(st.curves[0].trace.closed, "curve not closed");
    v.require(st.curves[0].trace.closure_gap <= 1e-6, "closure gap above 1e-6");
  }
  const auto& e = *t.r.euler;
  const auto* p = stratum(e, 1, StratumSign::plus);
  const auto* m = stratum(e, 1, StratumSign::minus);
  v.require(p && m && e.chi_M_morse == 0 && p->chi_morse == 0 && m->chi_morse == 0 && e.euler_identity_ok,
            "identity 0 = 0 - 0");
  v.require(t.seconds < 60.0, "slower than 60 s");
  if (v.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "1 closed curve, gap %.1e, 0 cusps, 0 = 0 - 0, %.2fs", st.curves[0].trace.closure_gap,
                  t.seconds);
    v.detail = buf;
  }
  return v;
}

Verdict criterion3() {
  Verdict v;
  for (const auto& t : seeded().at("s3-cusp")) {
    const auto& r = t.r;
    if (!healthy(r)) {
      v.fail("exit " + std::to_string(r.exit_code));
      continue;
    }
    const auto& st = r.strata;
    v.require(st.a2.size() >= 2, "fewer than 2 cusps");
    v.require(st.audit.boundary_ok && st.audit.boundary_violations == 0, "boundary audit");
    // arcs alternate sign across each cusp, counted here from the arc list
    std::vector<int> plus(st.a2.size()), minus(st.a2.size());
    for (const auto& a : st.arcs) {
      if (a.circle) continue;
      for (int c : {a.cusp_begin, a.cusp_end}) (a.sign == StratumSign::plus ? plus : minus)[static_cast<std::size_t>(c)]++;
    }
    for (std::size_t i = 0; i < st.a2.size(); ++i) v.require(plus[i] == 1 && minus[i] == 1, "arcs do not alternate");
    const auto& e = *r.euler;
    const auto* p = stratum(e, 1, StratumSign::plus);
    const auto* m = stratum(e, 1, StratumSign::minus);
    v.require(p && m && e.chi_M_morse == 0 && p->chi_morse - m->chi_morse == 0 && e.euler_identity_ok,
              "identity 0 = chi(+) - chi(-)");
    for (const auto& s : e.strata)
      if (s.sign != StratumSign::none)
        v.require(s.chi_oracle && *s.chi_oracle == s.chi_morse, "Morse route differs from arc oracle");
  }
  if (v.ok) {
    const auto& r = seeded().at("s3-cusp")[0].r;
    const auto* p = stratum(*r.euler, 1, StratumSign::plus);
    const auto* m = stratum(*r.euler, 1, StratumSign::minus);
    v.detail = std::to_string(r.strata.a2.size()) + " cusps, " + std::to_string(r.strata.arcs.size()) +
               " arcs, 0 = " + std::to_string(p->chi_morse) + " - " + std::to_string(m->chi_morse) + " over " +
               std::to_string(n_seeds) + " seeds";
  }
  return v;
}

Verdict criterion4() {
  Verdict v;
  for (const auto& [name, runs] : seeded())
    for (const auto& t : runs) {
      if (!healthy(t.r)) {
        v.fail(name + ": exit " + std::to_string(t.r.exit_code));
        continue;
      }
      const auto& e = *t.r.euler;
      v.require(e.mod2_ok && (e.mod2_lhs - e.mod2_rhs) % 2 == 0, name + ": mod-2 congruence");
    }
  if (v.ok) v.detail = "all scenarios, " + std::to_string(n_seeds) + " seeds each";
  return v;
}

Verdict criterion5() {
  Verdict v;
  int fold_only = 0;
  for (const auto& [name, runs] : seeded())
    for (const auto& t : runs) {
      if (!healthy(t.r)) continue;
      bool has_cusps = !t.r.strata.a2.empty();
      const auto& e = *t.r.euler;
      if (has_cusps) {
        v.require(!e.fold_equality_ok.has_value(), name + ": fold equality applied with cusps present");
        continue;
      }
      ++fold_only;
      const auto* p = stratum(e, 1, StratumSign::plus);
      const auto* m = stratum(e, 1, StratumSign::minus);
      v.require(e.fold_equality_ok.value_or(false) && p && m && e.chi_M_morse == p->chi_morse - m->chi_morse,
                name + ": fold equality");
    }
  v.require(fold_only > 0, "no fold-only runs");
  if (v.ok) v.detail = std::to_string(fold_only) + " fold-only runs";
  return v;
}

Verdict criterion6() {
  Verdict v;
  int points = 0;
  std::size_t max_attempts = 0;
  for (const auto& [name, runs] : seeded())
    for (const auto& t : runs) {
      const auto& r = t.r;
      if (!healthy(r)) {
        v.fail(name + ": exit " + std::to_string(r.exit_code));
        continue;
      }
      const auto& md = *r.morse;
      v.require(md.parity.ok() && md.parity.checked == static_cast<int>(md.records[0].size()), name + ": parity");
      points += md.parity.checked;
      // every critical point of the closure lying on the open stratum one level up is critical there, and back
      for (std::size_t k = 0; k + 1 < md.records.size(); ++k) {
        auto nearest = [](const std::vector<CriticalRecord>& pool, const Vec& x) {
          double best = 1e300;
          for (const auto& q : pool) best = std::min(best, (q.x - x).norm());
          return best;
        };
        for (const auto& q : md.records[k + 1])
          if (q.point_depth == static_cast<int>(k) + 1)
            v.require(nearest(md.records[k], q.x) <= 1e-6, name + ": critical on A_k+1 but not on the closure");
        for (const auto& q : md.records[k])
          if (q.point_depth == static_cast<int>(k) + 1)
            v.require(nearest(md.records[k + 1], q.x) <= 1e-6, name + ": critical on the closure but not on A_k+1");
        for (const auto& q : md.records[k])
          v.require(q.point_depth < static_cast<int>(k) + 2, name + ": critical point two strata deeper");
      }
      v.require(md.genericity.ok(), name + ": accepted covector fails genericity");
      v.require(r.attempts.size() <= 16, name + ": more than 16 resamples");
      max_attempts = std::max(max_attempts, r.attempts.size());
    }
  if (v.ok)
    v.detail = std::to_string(points) + " parity checks, lemaseparado within 1e-6, at most " +
               std::to_string(max_attempts) + " covector(s) per run";
  return v;
}

Verdict criterion7() {
  Verdict v;
  int eta = 0, certs = 0, cusps = 0;
  for (const auto& [name, runs] : seeded())
    for (const auto& t : runs) {
      if (!healthy(t.r)) continue;
      const auto& md = *t.r.morse;
      for (const auto& e : md.eta_checks) {
        ++eta;
        int want = -(e.lambda_bar % 2 == 0 ? 1 : -1) * (e.lambda % 2 == 0 ? 1 : -1);
        v.require(e.identity_ok && e.eta_sign == want, name + ": eta sign identity");
      }
      for (const auto& c : md.certificates) {
        ++certs;
        v.require(c.cancels, name + ": certificate does not cancel");
      }
      // one k = 0 check per cusp
      int at_cusps = 0;
      for (const auto& e : md.eta_checks) at_cusps += e.k == 0;
      v.require(at_cusps == static_cast<int>(t.r.strata.a2.size()), name + ": cusp without an eta check");
      cusps += at_cusps;
    }
  v.require(cusps > 0 && certs > 0, "no cusps or certificates exercised");
  if (v.ok)
    v.detail = std::to_string(eta) + " eta checks (" + std::to_string(cusps) + " at cusps), " + std::to_string(certs) +
               " certificates cancel";
  return v;
}

double fd_check(const PolySystem& F, const Vec& z, double h) {
  Mat J = F.jacobian(z);
  double worst = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Vec a = z, b = z;
    a[i] += h;
    b[i] -= h;
    Vec col = (F.evaluate(a) - F.evaluate(b)) / (2 * h);
    worst = std::max(worst, (J.col(i) - col).norm() / std::max(1.0, J.col(i).norm()));
  }
  return worst;
}

Verdict criterion8() {
  Verdict v;
  double worst = 0;
  for (const auto& name : all_scenarios) {
    MorinScenario S = load(name);
    Rng rng(stream_seed(S.seed, 7000));
    std::vector<std::pair<std::string, PolySystem>> systems = {{"f", S.fsys}, {"g", S.manifold.system()}};
    for (int k = 1; k <= std::min<int>(2, static_cast<int>(S.n())); ++k)
      systems.emplace_back("lift " + std::to_string(k), StratumLift(S, k).system());
    for (const auto& [label, F] : systems)
      for (int t = 0; t < 100; ++t) {
        Vec z(static_cast<Eigen::Index>(F.num_vars()));
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.uniform(-1.5, 1.5);
        double e = fd_check(F, z, 1e-5);
        worst = std::max(worst, e);
        v.require(e <= 1e-6, name + ": " + label + " gradient differs from finite differences");
      }
  }
  // chi values agree across all seeds
  for (const auto& [name, runs] : seeded()) {
    std::optional<std::vector<int>> first;
    for (const auto& t : runs) {
      if (!healthy(t.r)) {
        v.fail(name + ": exit " + std::to_string(t.r.exit_code));
        continue;
      }
      std::vector<int> chis = {t.r.euler->chi_M_morse};
      for (const auto& s : t.r.euler->strata) chis.push_back(s.chi_morse);
      if (!first) first = chis;
      v.require(chis == *first, name + ": chi depends on the seed");
    }
  }
  if (v.ok) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst relative gradient error %.2e", worst);
    v.detail = std::string(buf) + ", chi stable over " + std::to_string(n_seeds) + " seeds";
  }
  return v;
}

}  // namespace

int main() {
  Verdict (*criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                             criterion5, criterion6, criterion7, criterion8};
  int failed = 0;
  for (int i = 0; i < 8; ++i) {
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s  %s\n", i + 1, v.ok ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failed += !v.ok;
  }
  return failed == 0 ? 0 : 1;
}
