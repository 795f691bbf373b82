#include "morin/euler.hpp"

#include <sstream>

namespace morin {

namespace {

int psign(int index) { return index % 2 == 0 ? 1 : -1; }

const std::vector<CriticalRecord>& level(const MorseData& md, int k) {
  static const std::vector<CriticalRecord> empty;
  if (k < 0 || k >= static_cast<int>(md.records.size())) return empty;
  return md.records[static_cast<std::size_t>(k)];
}

bool has_certificate(const MorseData& md, const Vec& x, double radius) {
  for (const auto& c : md.certificates)
    if (c.x_p.size() == x.size() && (c.x_p - x).norm() <= radius && c.failure.empty()) return true;
  return false;
}

}  // namespace

int chi_closed_morse(const std::vector<CriticalRecord>& records) {
  int chi = 0;
  for (const auto& r : records) chi += psign(r.morse_index);
  return chi;
}

int chi_with_boundary(const std::vector<int>& interior_indices, const std::vector<int>& inward_boundary_indices) {
  int chi = 0;
  for (int i : interior_indices) chi += psign(i);
  for (int i : inward_boundary_indices) chi += psign(i);
  return chi;
}

int chi_closure_morse(const MorseData& md, int k) { return chi_closed_morse(level(md, k)); }

StratumChi chi_stratum_via_morse(const MorinScenario& S, const Stratification& st, const MorseData& md, int k,
                                 StratumSign sign) {
  const int n = static_cast<int>(S.n());
  const double near = 10 * S.tol.dedup_radius;
  StratumChi sc;
  sc.k = k;
  sc.sign = sign;
  sc.dim = n - k;
  if (k % 2 == 0) throw Error("signed strata exist for odd depth only");
  if (k > 2 && sc.dim > 0) throw Error("Morse data for positive-dimensional strata of depth >= 3 is not computed");

  std::vector<int> interior, inward;
  for (const auto& r : level(md, k))
    if (r.point_depth == k && r.sign == sign) interior.push_back(r.morse_index);
  for (const auto& r : level(md, k + 1)) {
    if (r.correctness_checked && r.correct) {
      if (r.inward_into == StratumSign::none) {
        sc.complete = false;
        sc.note = "correct boundary point without an inward side";
      } else if (r.inward_into == sign) {
        inward.push_back(r.morse_index);
      }
    } else if (!has_certificate(md, r.x, near)) {
      sc.complete = false;
      sc.note = "non-correct boundary point without a certificate";
    }
  }
  for (const auto& c : md.certificates) {
    if (c.k != k || !c.failure.empty()) continue;
    sc.certificates += sign == StratumSign::plus ? c.contribution_plus : c.contribution_minus;
  }
  sc.interior = chi_with_boundary(interior, {});
  sc.boundary = chi_with_boundary({}, inward);
  sc.chi_morse = sc.interior + sc.boundary + sc.certificates;

  if (sc.dim == 0) {
    for (const auto& p : k == 1 ? st.a1 : st.a2)
      if (p.depth == k && p.sign == sign) ++sc.points;
  } else if (sc.dim == 1) {
    for (const auto& a : st.arcs)
      if (a.sign == sign) (a.circle ? sc.circles : sc.arcs) += 1;
  }
  sc.chi_oracle = chi_stratum_oracle(S, st, k, sign);
  return sc;
}

std::optional<int> chi_stratum_oracle(const MorinScenario& S, const Stratification& st, int k, StratumSign sign) {
  const int n = static_cast<int>(S.n());
  if (k == 0) return S.chi_expected;
  int dim = n - k;
  if (dim == 0) {
    const auto& pts = k == 1 ? st.a1 : k == 2 ? st.a2 : st.deeper;
    int count = 0;
    for (const auto& p : pts)
      if (p.depth == k && (k % 2 == 0 || p.sign == sign)) ++count;
    return count;
  }
  if (dim == 1 && k == 1) {
    if (!st.audit.curves_closed) return std::nullopt;
    int arcs = 0;
    for (const auto& a : st.arcs)
      if (a.sign == sign && !a.circle) ++arcs;
    return arcs;
  }
  return std::nullopt;
}

bool verify_mod2_congruence(const MorinScenario& S, const Stratification& st, const MorseData& md, int* lhs, int* rhs) {
  const int n = static_cast<int>(S.n());
  int chi_M = chi_closed_morse(level(md, 0));
  int sum = 0;
  for (int k = 1; k <= n; ++k) {
    if (k % 2 == 1) {
      int next = k + 1 <= n ? chi_closure_morse(md, k + 1) : 0;
      sum += chi_stratum_via_morse(S, st, md, k, StratumSign::plus).chi_morse +
             chi_stratum_via_morse(S, st, md, k, StratumSign::minus).chi_morse - next;
    } else {
      sum += chi_closure_morse(md, k);
    }
  }
  if (lhs) *lhs = chi_M;
  if (rhs) *rhs = sum;
  return ((chi_M - sum) % 2 + 2) % 2 == 0;
}

std::optional<bool> verify_fold_equality(const MorinScenario& S, const Stratification& st, const MorseData& md,
                                         int* rhs) {
  if (!st.a2.empty() || !st.deeper.empty()) return std::nullopt;
  int chi_M = chi_closed_morse(level(md, 0));
  int r = chi_stratum_via_morse(S, st, md, 1, StratumSign::plus).chi_morse -
          chi_stratum_via_morse(S, st, md, 1, StratumSign::minus).chi_morse;
  if (rhs) *rhs = r;
  return chi_M == r;
}

EulerReport verify_euler_identity(const MorinScenario& S, const Stratification& st, const MorseData& md) {
  const int n = static_cast<int>(S.n());
  EulerReport rep;
  rep.tol = S.tol;
  rep.genericity_seed_used = md.a.seed;
  rep.chi_M_morse = chi_closed_morse(level(md, 0));
  rep.chi_M_expected = S.chi_expected;
  rep.chi_expected_ok = !S.chi_expected || *S.chi_expected == rep.chi_M_morse;

  for (int k = 1; k <= n; k += 2)
    for (StratumSign s : {StratumSign::plus, StratumSign::minus}) {
      StratumChi sc = chi_stratum_via_morse(S, st, md, k, s);
      if (!sc.complete) rep.route_agreement_ok = false;
      if (sc.chi_oracle && *sc.chi_oracle != sc.chi_morse) {
        rep.route_agreement_ok = false;
        std::ostringstream os;
        os << "depth " << k << " " << to_string(s) << ": Morse route " << sc.chi_morse << ", oracle "
           << *sc.chi_oracle;
        rep.notes.push_back(os.str());
      }
      rep.euler_identity_rhs += s == StratumSign::plus ? sc.chi_morse : -sc.chi_morse;
      rep.strata.push_back(std::move(sc));
    }
  rep.euler_identity_lhs = rep.chi_M_morse;
  rep.euler_identity_ok = rep.euler_identity_lhs == rep.euler_identity_rhs;

  // critical points of L o f on M are the fold critical points
  int fold = 0;
  for (const auto& r : level(md, 1))
    if (r.point_depth == 1) fold += (r.sign == StratumSign::plus ? 1 : -1) * psign(r.morse_index);
  rep.fold_sum_ok = fold == rep.chi_M_morse;

  // boundary contributions of depth k against open sums at depth k + 2
  for (int k = 1; k <= n; k += 2) {
    int lhs = 0, rhs = 0;
    for (const auto& r : level(md, k + 1)) {
      if (!(r.correctness_checked && r.correct)) continue;
      if (r.inward_into == StratumSign::plus) lhs += psign(r.morse_index);
      if (r.inward_into == StratumSign::minus) lhs -= psign(r.morse_index);
    }
    if (k + 2 <= n)
      for (const auto& r : level(md, k + 2)) {
        if (r.point_depth != k + 2) continue;
        if (r.sign == StratumSign::minus) rhs += psign(r.morse_index);
        if (r.sign == StratumSign::plus) rhs -= psign(r.morse_index);
      }
    std::ostringstream os;
    os << "depth " << k << ": boundary " << lhs << ", open depth " << k + 2 << " " << rhs;
    rep.telescoping.push_back(os.str());
    if (lhs != rhs) rep.telescoping_ok = false;
  }

  rep.mod2_ok = verify_mod2_congruence(S, st, md, &rep.mod2_lhs, &rep.mod2_rhs);
  // the closures of odd depth are closed manifolds too: glued pieces vs direct count
  for (int k = 1; k <= n; k += 2) {
    if (k > 2 && n - k > 0) continue;
    int next = k + 1 <= n ? chi_closure_morse(md, k + 1) : 0;
    int glued = chi_stratum_via_morse(S, st, md, k, StratumSign::plus).chi_morse +
                chi_stratum_via_morse(S, st, md, k, StratumSign::minus).chi_morse - next;
    if (glued != chi_closure_morse(md, k)) rep.closure_inclusion_exclusion_ok = false;
  }
  rep.fold_equality_ok = verify_fold_equality(S, st, md, &rep.fold_equality_rhs);
  if (rep.fold_equality_ok)
    rep.notes.push_back("fold equality taken as chi(M) = chi(A_1^+) - chi(A_1^-)");
  return rep;
}

}  // namespace morin
