#include "morin/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "morin/random.hpp"

namespace morin {

using ojson = nlohmann::ordered_json;

namespace {

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// csv fields round-trip exactly
std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string coords(const Vec& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? "," : "") + num(x[i]);
  return s;
}

std::string coord_header(std::size_t N) {
  std::string s;
  for (std::size_t i = 0; i < N; ++i) s += (i ? ",x" : "x") + std::to_string(i);
  return s;
}

const char* eta_str(int s) { return s > 0 ? "+1" : s < 0 ? "-1" : "n/a"; }

const char* inward_str(StratumSign s) {
  return s == StratumSign::plus ? "plus-stratum" : s == StratumSign::minus ? "minus-stratum" : "not-applicable";
}

void strata_violations(const StrataAudit& au, std::vector<std::string>& out) {
  if (!au.nonempty_ok) out.push_back("strata: no singular point found");
  if (!au.dimension_ok) out.push_back("strata: stratum dimension differs from n - k");
  if (!au.nesting_ok) out.push_back("strata: closures are not nested");
  if (!au.boundary_ok) out.push_back("strata: a cusp does not separate a plus arc from a minus arc");
  if (!au.parity_invariant_ok) out.push_back("strata: sign split depends on the cokernel orientation");
  if (!au.cusp_crosscheck_ok) out.push_back("strata: traced cusps disagree with the direct depth-2 solve");
  if (!au.curves_closed) out.push_back("strata: a singular curve did not close");
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const HypothesisError*>(&e) ||
      dynamic_cast<const DimensionError*>(&e))
    return exit_usage;
  if (dynamic_cast<const RegularityError*>(&e)) return exit_regularity;
  if (dynamic_cast<const MorinError*>(&e)) return exit_not_morin;
  return 1;
}

RunResult run_pipeline(MorinScenario S, const RunConfig& cfg) {
  if (cfg.max_resamples < 1) throw ParseError("max_resamples must be at least 1");
  if (cfg.tol_residual) {
    if (!(*cfg.tol_residual > 0)) throw ParseError("residual tolerance must be positive");
    S.tol.residual = *cfg.tol_residual;
  }
  RunResult r;
  r.root_seed = cfg.seed.value_or(S.seed);
  S.seed = r.root_seed;

  r.regularity = validate_regularity(S.manifold, cfg.regularity_samples, stream_seed(r.root_seed, stream_regularity));
  if (!r.regularity.ok) throw RegularityError(r.regularity.message);

  StrataOptions so;
  so.workers = cfg.workers;
  r.strata = solve_strata(S, so);

  for (int attempt = 0; attempt < cfg.max_resamples; ++attempt) {
    GenericityAttempt ga;
    ga.a = sample_covector(S.n(), stream_seed(r.root_seed, stream_covector + static_cast<std::uint64_t>(attempt)));
    try {
      MorseData md = compute_morse(S, r.strata, ga.a, cfg.workers);
      ga.failures = md.genericity.failures;
      if (md.dichotomy_violations > 0)
        ga.failures.push_back("item 5: " + std::to_string(md.dichotomy_violations) +
                              " correctness verdict(s) contradict the stratum depth");
      ga.accepted = ga.failures.empty();
      r.attempts.push_back(ga);
      if (ga.accepted) {
        r.morse = std::move(md);
        break;
      }
    } catch (const SolverError& e) {
      ga.failures.push_back(std::string("solver: ") + e.what());
      r.attempts.push_back(ga);
    }
  }
  if (!r.morse) {
    r.exit_code = exit_genericity_exhausted;
    r.message = "no generic covector after " + std::to_string(cfg.max_resamples) + " attempt(s)";
    strata_violations(r.strata.audit, r.violations);
    return r;
  }

  r.euler = verify_euler_identity(S, r.strata, *r.morse);
  const MorseData& md = *r.morse;
  const EulerReport& er = *r.euler;
  strata_violations(r.strata.audit, r.violations);
  if (!md.parity.ok()) r.violations.push_back("fold index parity fails at " + std::to_string(md.parity.violations) + " point(s)");
  for (const auto& e : md.eta_checks)
    if (!e.identity_ok) r.violations.push_back("eta sign identity fails at a boundary critical point");
  for (const auto& c : md.certificates)
    if (!c.cancels)
      r.violations.push_back("perturbation certificate does not cancel" + (c.failure.empty() ? "" : ": " + c.failure));
  if (!er.euler_identity_ok) r.violations.push_back("Euler identity fails");
  if (!er.chi_expected_ok) r.violations.push_back("Morse count on M differs from the expected Euler characteristic");
  if (!er.mod2_ok) r.violations.push_back("mod-2 congruence fails");
  if (er.fold_equality_ok && !*er.fold_equality_ok) r.violations.push_back("fold equality fails");
  if (!er.route_agreement_ok) r.violations.push_back("Morse route and oracle disagree on a signed stratum");
  if (!er.telescoping_ok) r.violations.push_back("boundary contributions do not telescope");
  if (!er.fold_sum_ok) r.violations.push_back("critical points on M do not match the signed fold sums");
  if (!er.closure_inclusion_exclusion_ok) r.violations.push_back("glued closures disagree with direct Morse counts");
  r.exit_code = r.violations.empty() ? exit_ok : exit_identity_violated;
  r.message = r.violations.empty() ? "all identities hold" : r.violations.front();
  return r;
}

// ---------------------------------------------------------------- report

namespace {

ojson record_json(const CriticalRecord& c) {
  ojson j;
  j["x"] = to_std(c.x);
  j["stratum_depth"] = c.stratum_depth;
  j["on_closure_of"] = std::max(0, c.stratum_depth - 1);
  j["point_depth"] = c.point_depth;
  j["morse_index"] = c.morse_index;
  j["index_basis_dim"] = c.index_basis_dim;
  j["min_abs_eigenvalue"] = c.min_abs_eig;
  j["sign"] = to_string(c.sign);
  if (c.correctness_checked) {
    j["correct"] = c.correct;
    j["closure_gradient"] = c.closure_grad_norm;
  }
  j["inward_into"] = inward_str(c.inward_into);
  j["eta_sign"] = eta_str(c.eta_sign);
  j["residual"] = c.residual;
  j["seed"] = c.seed;
  return j;
}

ojson stratum_chi_json(const StratumChi& s) {
  ojson j;
  j["k"] = s.k;
  j["sign"] = to_string(s.sign);
  j["dim"] = s.dim;
  j["chi_morse_boundary"] = s.chi_morse;
  j["interior"] = s.interior;
  j["inward_boundary"] = s.boundary;
  j["certified_pairs"] = s.certificates;
  j["chi_oracle"] = s.chi_oracle ? ojson(*s.chi_oracle) : ojson(nullptr);
  j["arcs"] = s.arcs;
  j["circles"] = s.circles;
  j["points"] = s.points;
  if (!s.complete) j["incomplete"] = s.note;
  return j;
}

}  // namespace

ojson report_json(const MorinScenario& S, const RunConfig& cfg, const RunResult& r) {
  ojson j;
  j["scenario"] = {{"name", S.name},
                   {"file", cfg.scenario.filename().string()},
                   {"ambient_dim", S.N()},
                   {"m", S.m()},
                   {"n", S.n()},
                   {"chi_expected", S.chi_expected ? ojson(*S.chi_expected) : ojson(nullptr)}};
  std::vector<std::string> fs;
  for (const auto& e : S.f) fs.push_back(e.to_prefix());
  j["scenario"]["map"] = fs;
  j["seed"] = r.root_seed;
  j["tolerances"] = {{"residual", S.tol.residual},
                     {"dedup_radius", S.tol.dedup_radius},
                     {"eigen_zero", S.tol.eigen_zero},
                     {"correctness", S.tol.correctness}};
  if (cfg.tol_residual) j["tolerances"]["residual"] = *cfg.tol_residual;
  j["max_resamples"] = cfg.max_resamples;
  j["exit_code"] = r.exit_code;
  j["status"] = r.exit_code == exit_ok                     ? "ok"
                : r.exit_code == exit_genericity_exhausted ? "genericity_exhausted"
                                                           : "identity_violated";
  j["message"] = r.message;
  j["violations"] = r.violations;

  j["regularity"] = {{"ok", r.regularity.ok},
                     {"points", r.regularity.points},
                     {"min_singular_value", r.regularity.min_singular_value}};

  const Stratification& st = r.strata;
  ojson js;
  int a1_points = 0;
  for (const auto& p : st.a1)
    if (p.depth == 1) ++a1_points;
  js["a1_points"] = a1_points;
  js["a1_is_sample"] = S.n() >= 2;
  ojson curves = ojson::array();
  for (const auto& c : st.curves)
    curves.push_back({{"points", c.trace.points.size()},
                      {"closed", c.trace.closed},
                      {"closure_gap", c.trace.closure_gap},
                      {"cusps", c.cusps}});
  js["curves"] = curves;
  ojson arcs = ojson::array();
  for (const auto& a : st.arcs)
    arcs.push_back({{"curve", a.curve},
                    {"sign", to_string(a.sign)},
                    {"circle", a.circle},
                    {"cusp_begin", a.cusp_begin},
                    {"cusp_end", a.cusp_end}});
  js["arcs"] = arcs;
  ojson a2 = ojson::array();
  for (const auto& p : st.a2)
    a2.push_back({{"x", to_std(p.x)},
                  {"depth", p.depth},
                  {"depth_verified", p.depth_verified},
                  {"leading_coefficient", p.leading_coefficient}});
  js["a2"] = a2;
  const StrataAudit& au = st.audit;
  js["audit"] = {{"dimension_ok", au.dimension_ok},
                 {"dimension_min_sv", au.dimension_min_sv},
                 {"nesting_ok", au.nesting_ok},
                 {"boundary_ok", au.boundary_ok},
                 {"boundary_violations", au.boundary_violations},
                 {"parity_invariant_ok", au.parity_invariant_ok},
                 {"nonempty_ok", au.nonempty_ok},
                 {"cusp_crosscheck_ok", au.cusp_crosscheck_ok},
                 {"curves_closed", au.curves_closed},
                 {"max_closure_gap", au.max_closure_gap},
                 {"messages", au.messages}};
  js["warnings"] = st.warnings;
  j["strata"] = js;

  ojson attempts = ojson::array();
  for (const auto& a : r.attempts)
    attempts.push_back({{"seed", a.a.seed}, {"covector", to_std(a.a.a)}, {"accepted", a.accepted}, {"failures", a.failures}});
  j["genericity"] = {{"seed_used", r.morse ? ojson(r.morse->a.seed) : ojson(nullptr)},
                     {"covector", r.morse ? ojson(to_std(r.morse->a.a)) : ojson(nullptr)},
                     {"attempts", attempts}};

  if (r.morse) {
    const MorseData& md = *r.morse;
    ojson jm;
    ojson levels = ojson::array();
    for (std::size_t k = 0; k < md.records.size(); ++k) {
      ojson recs = ojson::array();
      for (const auto& c : md.records[k]) recs.push_back(record_json(c));
      levels.push_back({{"k", k}, {"critical_points", recs}});
    }
    jm["levels"] = levels;
    jm["dichotomy_violations"] = md.dichotomy_violations;
    jm["index_parity"] = {{"checked", md.parity.checked}, {"violations", md.parity.violations}, {"messages", md.parity.messages}};
    ojson etas = ojson::array();
    for (const auto& e : md.eta_checks)
      etas.push_back({{"k", e.k},
                      {"eta", e.eta},
                      {"eta_sign", e.eta_sign},
                      {"angle", e.angle},
                      {"parallel", e.parallel},
                      {"inward_into", inward_str(e.inward_into)},
                      {"lambda_bar", e.lambda_bar},
                      {"lambda", e.lambda},
                      {"identity_ok", e.identity_ok}});
    jm["eta_checks"] = etas;
    ojson certs = ojson::array();
    for (const auto& c : md.certificates)
      certs.push_back({{"p", to_std(c.x_p)},
                       {"p_tilde", to_std(c.x_tilde)},
                       {"k", c.k},
                       {"epsilon", c.epsilon},
                       {"attempts", c.attempts},
                       {"sign_xnk", c.sign_xnk},
                       {"det_sign_closure", c.det_sign_closure},
                       {"det_sign_boundary", c.det_sign_boundary},
                       {"index_boundary", c.index_boundary},
                       {"index_tilde", c.index_tilde},
                       {"t_side", to_string(c.t_side)},
                       {"tilde_side", to_string(c.tilde_side)},
                       {"sign_relation_ok", c.eq24_ok},
                       {"sides_consistent", c.sides_consistent},
                       {"hessian_restriction_ok", c.submatrix_ok},
                       {"cancels", c.cancels},
                       {"failure", c.failure}});
    jm["certificates"] = certs;
    const GenericityAudit& g = md.genericity;
    jm["genericity_audit"] = {{"nondegenerate", g.nondegenerate},
                              {"avoids_deeper", g.avoids_deeper},
                              {"criticality_equivalence", g.lemaseparado},
                              {"top_stratum", g.top_stratum},
                              {"correctness_separated", g.correctness_separated}};
    j["morse"] = jm;
  }

  if (r.euler) {
    const EulerReport& er = *r.euler;
    ojson je;
    je["chi_M_morse"] = er.chi_M_morse;
    je["chi_M_expected"] = er.chi_M_expected ? ojson(*er.chi_M_expected) : ojson(nullptr);
    ojson table = ojson::array();
    for (const auto& s : er.strata) table.push_back(stratum_chi_json(s));
    je["strata"] = table;
    je["euler_identity"] = {{"lhs", er.euler_identity_lhs}, {"rhs", er.euler_identity_rhs}, {"ok", er.euler_identity_ok}};
    je["fold_sum_ok"] = er.fold_sum_ok;
    je["telescoping"] = {{"ok", er.telescoping_ok}, {"lines", er.telescoping}};
    je["mod2"] = {{"lhs", er.mod2_lhs}, {"rhs", er.mod2_rhs}, {"ok", er.mod2_ok}};
    if (er.fold_equality_ok)
      je["fold_equality"] = {{"applicable", true}, {"lhs", er.chi_M_morse}, {"rhs", er.fold_equality_rhs}, {"ok", *er.fold_equality_ok}};
    else
      je["fold_equality"] = {{"applicable", false}};
    je["closure_inclusion_exclusion_ok"] = er.closure_inclusion_exclusion_ok;
    je["route_agreement_ok"] = er.route_agreement_ok;
    je["genericity_seed_used"] = er.genericity_seed_used;
    je["notes"] = er.notes;
    j["euler"] = je;
  }
  return j;
}

std::string strata_csv(const MorinScenario& S, const RunResult& r) {
  std::ostringstream os;
  os << "kind,depth,sign," << coord_header(S.N()) << ",leading_coefficient,n_minus,depth_verified\n";
  auto row = [&](const char* kind, const StratumPoint& p) {
    os << kind << ',' << p.depth << ',' << to_string(p.sign) << ',' << coords(p.x) << ',' << num(p.leading_coefficient)
       << ',' << p.signature.n_minus << ',' << (p.depth_verified ? 1 : 0) << '\n';
  };
  for (const auto& p : r.strata.a1) row(S.n() == 1 ? "a1" : "a1_sample", p);
  for (const auto& p : r.strata.a2) row("a2", p);
  return os.str();
}

std::string critical_csv(const MorinScenario& S, const RunResult& r) {
  std::ostringstream os;
  os << coord_header(S.N()) << ",k,point_depth,index,index_dim,correct,inward_into,eta_sign,residual,seed\n";
  if (!r.morse) return os.str();
  for (const auto& level : r.morse->records)
    for (const auto& c : level)
      os << coords(c.x) << ',' << c.stratum_depth << ',' << c.point_depth << ',' << c.morse_index << ','
         << c.index_basis_dim << ',' << (c.correctness_checked ? (c.correct ? "1" : "0") : "") << ','
         << inward_str(c.inward_into) << ',' << eta_str(c.eta_sign) << ',' << num(c.residual) << ',' << c.seed << '\n';
  return os.str();
}

std::string curves_csv(const MorinScenario& S, const RunResult& r) {
  std::ostringstream os;
  os << "curve,i," << coord_header(S.N()) << ",arc,sign\n";
  const auto& st = r.strata;
  for (std::size_t ci = 0; ci < st.curves.size(); ++ci) {
    const auto& P = st.curves[ci].trace.points;
    std::size_t L = P.size();
    std::vector<int> arc_of(L, -1);
    for (std::size_t ai = 0; ai < st.arcs.size(); ++ai) {
      const Arc& a = st.arcs[ai];
      if (a.curve != static_cast<int>(ci)) continue;
      std::size_t span = a.circle ? L : (a.end + L - a.begin) % L;
      for (std::size_t t = 0; t < span; ++t) arc_of[(a.begin + t) % L] = static_cast<int>(ai);
    }
    for (std::size_t i = 0; i < L; ++i) {
      int ai = arc_of[i];
      os << ci << ',' << i << ',' << coords(P[i].head(static_cast<Eigen::Index>(S.N()))) << ',' << ai << ','
         << (ai >= 0 ? to_string(st.arcs[static_cast<std::size_t>(ai)].sign) : "none") << '\n';
    }
  }
  return os.str();
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace

int run_and_write(const RunConfig& cfg, std::string* message) {
  std::filesystem::create_directories(cfg.out);
  int code = 1;
  std::string msg;
  try {
    MorinScenario S = load_scenario(cfg.scenario);
    RunResult r = run_pipeline(S, cfg);
    ojson rep = report_json(S, cfg, r);
    write_file(cfg.out / "report.json", rep.dump(2) + "\n");
    write_file(cfg.out / "strata.csv", strata_csv(S, r));
    write_file(cfg.out / "critical.csv", critical_csv(S, r));
    write_file(cfg.out / "curves.csv", curves_csv(S, r));
    code = r.exit_code;
    msg = r.message;
  } catch (const Error& e) {
    code = exit_code_for(e);
    msg = e.what();
    ojson rep;
    rep["scenario"] = {{"file", cfg.scenario.filename().string()}};
    rep["exit_code"] = code;
    rep["status"] = code == exit_usage ? "rejected_input" : code == exit_regularity ? "not_regular"
                    : code == exit_not_morin                ? "not_morin"
                                                            : "error";
    rep["message"] = msg;
    write_file(cfg.out / "report.json", rep.dump(2) + "\n");
  }
  if (message) *message = msg;
  return code;
}

// ---------------------------------------------------------------- explain

namespace {

const char* mark(bool ok) { return ok ? "ok" : "FAILED"; }

// short statement of what each genericity item guards
const std::map<std::string, std::string>& item_names() {
  static const std::map<std::string, std::string> m = {
      {"1", "L_a o f is Morse on every stratum closure"},
      {"2", "no critical point of a closure lies two strata deeper"},
      {"3", "criticality on A_{k+1} matches criticality on the closure of A_k"},
      {"4", "top-stratum points are nondegenerate critical points one level up"},
      {"5", "closure gradients are clear of the correctness threshold"},
  };
  return m;
}

}  // namespace

std::string explain_report(const ojson& j) {
  std::ostringstream os;
  const ojson& sc = j.at("scenario");
  os << "scenario " << sc.value("name", sc.value("file", std::string("?")));
  if (sc.contains("m")) os << " (m = " << sc.at("m").get<int>() << ", n = " << sc.at("n").get<int>() << ")";
  os << "\n";
  int code = j.at("exit_code").get<int>();
  os << "status: " << j.value("status", std::string("?")) << " (exit " << code << ")\n";
  if (j.contains("message") && !j.at("message").get<std::string>().empty()) os << "  " << j.at("message").get<std::string>() << "\n";
  if (!j.contains("strata")) return os.str();

  const ojson& st = j.at("strata");
  os << "strata: " << st.at("a1_points").get<int>() << (st.at("a1_is_sample").get<bool>() ? " sampled" : "")
     << " fold point(s), " << st.at("curves").size() << " curve(s), " << st.at("a2").size() << " cusp(s), "
     << st.at("arcs").size() << " arc(s)\n";
  for (const auto& m : st.at("audit").at("messages")) os << "  audit: " << m.get<std::string>() << "\n";

  const ojson& gen = j.at("genericity");
  for (const auto& a : gen.at("attempts")) {
    if (a.at("accepted").get<bool>()) continue;
    os << "covector seed " << a.at("seed").get<std::uint64_t>() << " rejected\n";
    for (const auto& f : a.at("failures")) {
      std::string s = f.get<std::string>();
      std::string label;
      if (s.rfind("item ", 0) == 0) {
        auto it = item_names().find(s.substr(5, 1));
        if (it != item_names().end()) label = " [genericity item " + it->first + ": " + it->second + "]";
      }
      os << "  " << s << label << "\n";
    }
  }
  if (!gen.at("seed_used").is_null()) os << "covector seed used: " << gen.at("seed_used").get<std::uint64_t>() << "\n";

  if (j.contains("morse")) {
    const ojson& m = j.at("morse");
    const ojson& par = m.at("index_parity");
    os << "fold index parity: " << par.at("checked").get<int>() << " point(s), " << par.at("violations").get<int>()
       << " violation(s) " << mark(par.at("violations").get<int>() == 0) << "\n";
    int eta_ok = 0, eta_n = 0;
    for (const auto& e : m.at("eta_checks")) {
      ++eta_n;
      if (e.at("identity_ok").get<bool>()) ++eta_ok;
    }
    if (eta_n) os << "eta sign identity: " << eta_ok << "/" << eta_n << " " << mark(eta_ok == eta_n) << "\n";
    int c_ok = 0, c_n = 0;
    for (const auto& c : m.at("certificates")) {
      ++c_n;
      if (c.at("cancels").get<bool>()) ++c_ok;
    }
    if (c_n) os << "perturbation certificates cancelling: " << c_ok << "/" << c_n << " " << mark(c_ok == c_n) << "\n";
  }

  if (j.contains("euler")) {
    const ojson& e = j.at("euler");
    os << "\n  k  sign   chi(morse)  chi(oracle)  arcs  circles  points\n";
    for (const auto& s : e.at("strata"))
      os << fmt::format("  {:<2} {:<6} {:>10}  {:>11}  {:>4}  {:>7}  {:>6}\n", s.at("k").get<int>(),
                        s.at("sign").get<std::string>(), s.at("chi_morse_boundary").get<int>(),
                        s.at("chi_oracle").is_null() ? std::string("-") : std::to_string(s.at("chi_oracle").get<int>()),
                        s.at("arcs").get<int>(), s.at("circles").get<int>(), s.at("points").get<int>());
    os << "\n";
    // rhs as the alternating sum of the table
    std::string rhs;
    for (const auto& s : e.at("strata")) {
      int v = s.at("chi_morse_boundary").get<int>();
      bool plus = s.at("sign").get<std::string>() == "plus";
      if (rhs.empty()) rhs = plus ? std::to_string(v) : "-" + std::to_string(v);
      else rhs += (plus ? " + " : " - ") + std::to_string(v);
    }
    const ojson& df = e.at("euler_identity");
    os << "Euler identity chi(M) = sum over odd k of chi(A_k^+) - chi(A_k^-): " << df.at("lhs").get<int>() << " = " << rhs
       << " " << mark(df.at("ok").get<bool>()) << "\n";
    if (!e.at("chi_M_expected").is_null())
      os << "Morse count on M vs expected chi: " << e.at("chi_M_morse").get<int>() << " vs "
         << e.at("chi_M_expected").get<int>() << " " << mark(e.at("chi_M_morse") == e.at("chi_M_expected")) << "\n";
    const ojson& fk = e.at("mod2");
    os << "mod-2 congruence: " << fk.at("lhs").get<int>() << " = " << fk.at("rhs").get<int>() << " mod 2 "
       << mark(fk.at("ok").get<bool>()) << "\n";
    const ojson& fe = e.at("fold_equality");
    if (fe.at("applicable").get<bool>())
      os << "fold equality chi(M) = chi(A_1^+) - chi(A_1^-): " << fe.at("lhs").get<int>() << " = "
         << fe.at("rhs").get<int>() << " " << mark(fe.at("ok").get<bool>()) << "\n";
    else
      os << "fold equality: not applicable (cusps present)\n";
    os << "telescoping of boundary contributions: " << mark(e.at("telescoping").at("ok").get<bool>()) << "\n";
    os << "Morse route vs oracle: " << mark(e.at("route_agreement_ok").get<bool>()) << "\n";
    for (const auto& n : e.at("notes")) os << "note: " << n.get<std::string>() << "\n";
  }
  // what a failure contradicts
  for (const auto& v : j.at("violations")) {
    std::string s = v.get<std::string>();
    std::string why;
    if (s.find("parity") != std::string::npos && s.find("fold index") != std::string::npos)
      why = "contradicts the fold index parity lemma (m - n + 1 even)";
    else if (s.find("eta") != std::string::npos)
      why = "contradicts the sign relation between eta and the boundary indices";
    else if (s.find("certificate") != std::string::npos)
      why = "contradicts the perturbation lemma for non-correct boundary points";
    else if (s.find("arc") != std::string::npos)
      why = "contradicts the signed-closure boundary structure at cusps";
    else
      why = "numerical inconsistency";
    os << "violation: " << s << " (" << why << ")\n";
  }
  return os.str();
}

namespace {

void list_dir(const std::filesystem::path& dir, std::vector<ScenarioListing>& out) {
  if (dir.empty() || !std::filesystem::is_directory(dir)) return;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    ScenarioListing l;
    l.file = f.filename().string();
    try {
      MorinScenario S = load_scenario(f);
      l.name = S.name;
      l.m = S.m();
      l.n = S.n();
      l.chi_expected = S.chi_expected;
      l.summary = S.summary;
    } catch (const Error& e) {
      l.summary = std::string("invalid: ") + e.what();
    }
    out.push_back(l);
  }
}

}  // namespace

std::vector<ScenarioListing> list_scenarios(const std::filesystem::path& extra_dir) {
  std::vector<ScenarioListing> out;
  list_dir(bundled_scenario_dir(), out);
  std::error_code ec;
  if (!extra_dir.empty() && !std::filesystem::equivalent(extra_dir, bundled_scenario_dir(), ec)) list_dir(extra_dir, out);
  return out;
}

}  // namespace morin
