#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "morin/morse.hpp"

namespace morin {

/// Morse count on a closed manifold: sum of (-1)^index.
int chi_closed_morse(const std::vector<CriticalRecord>& records);

/// chi of a manifold with boundary from a correct Morse function: interior
/// critical points plus the inward-pointing boundary critical points.
int chi_with_boundary(const std::vector<int>& interior_indices, const std::vector<int>& inward_boundary_indices);

struct StratumChi {
  int k = 0;
  StratumSign sign = StratumSign::none;
  int dim = 0;
  int chi_morse = 0;
  int interior = 0;       // open-stratum critical points of this sign
  int boundary = 0;       // inward correct boundary points
  int certificates = 0;   // cancelling pairs at non-correct boundary points
  bool complete = true;   // every boundary critical point accounted for
  std::optional<int> chi_oracle;
  int arcs = 0;
  int circles = 0;
  int points = 0;
  std::string note;
};

/// chi of the signed closure of A_k (k odd) from the Morse data.
StratumChi chi_stratum_via_morse(const MorinScenario& S, const Stratification& st, const MorseData& md, int k,
                                 StratumSign sign);

/// Independent count: points for 0-dimensional strata, arcs and circles for
/// traced curves, chi_expected for M itself. Empty when unavailable.
std::optional<int> chi_stratum_oracle(const MorinScenario& S, const Stratification& st, int k, StratumSign sign);

/// chi of the full closure of A_k (a closed manifold) from its own critical points.
int chi_closure_morse(const MorseData& md, int k);

struct EulerReport {
  int chi_M_morse = 0;
  std::optional<int> chi_M_expected;
  std::vector<StratumChi> strata;
  int euler_identity_lhs = 0;
  int euler_identity_rhs = 0;
  bool euler_identity_ok = false;
  bool chi_expected_ok = true;
  bool fold_sum_ok = false;           // chi(M) = sum over A_1^+ minus sum over A_1^- of the fold indices
  bool telescoping_ok = true;
  std::vector<std::string> telescoping;
  int mod2_lhs = 0;
  int mod2_rhs = 0;
  bool mod2_ok = false;
  bool closure_inclusion_exclusion_ok = true;  // chi of odd closures, glued vs direct
  std::optional<bool> fold_equality_ok;
  int fold_equality_rhs = 0;
  bool route_agreement_ok = true;
  std::uint64_t genericity_seed_used = 0;
  Tolerances tol;
  std::vector<std::string> notes;

  bool identities_ok() const {
    return euler_identity_ok && chi_expected_ok && mod2_ok && fold_equality_ok.value_or(true) &&
           route_agreement_ok && telescoping_ok && fold_sum_ok && closure_inclusion_exclusion_ok;
  }
};

/// chi(M) against the alternating sum over odd signed closures, plus the
/// supporting identities.
EulerReport verify_euler_identity(const MorinScenario& S, const Stratification& st, const MorseData& md);

/// chi(M) = sum of chi of the closures of A_k (k = 1..n) mod 2.
bool verify_mod2_congruence(const MorinScenario& S, const Stratification& st, const MorseData& md, int* lhs = nullptr,
                        int* rhs = nullptr);

/// chi(M) = chi(A_1^+) - chi(A_1^-) for fold-only maps; empty otherwise.
std::optional<bool> verify_fold_equality(const MorinScenario& S, const Stratification& st, const MorseData& md,
                                         int* rhs = nullptr);

}  // namespace morin
