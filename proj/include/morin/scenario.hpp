#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "morin/manifold.hpp"

namespace morin {

struct Tolerances {
  double residual = 1e-12;
  double dedup_radius = 1e-6;
  double eigen_zero = 1e-6;
  double correctness = 1e-8;
};

/// f = (f_1..f_n) : M -> R^n with m - n odd and positive.
struct MorinScenario {
  std::string name;
  std::string description;
  ImplicitManifold manifold;
  std::vector<Expr> f;
  std::uint64_t seed = 0;
  Tolerances tol;
  std::optional<int> chi_expected;
  std::string summary;  // free text shown by `list`
  int multistart_factor = 200;

  /// f compiled with derivatives; built by finalize().
  PolySystem fsys;
  void finalize() { fsys = PolySystem(f, N()); }

  std::size_t N() const { return manifold.ambient_dim(); }
  std::size_t m() const { return manifold.intrinsic_dim(); }
  std::size_t n() const { return f.size(); }
  std::size_t c() const { return manifold.codim(); }
};

/// Structural checks: n >= 1, m - n odd and positive, dimensions agree.
/// Throws HypothesisError.
void validate_scenario(const MorinScenario& S);

MorinScenario parse_scenario(const std::string& json_text);
MorinScenario load_scenario(const std::filesystem::path& path);

std::filesystem::path bundled_scenario_dir();

}  // namespace morin
