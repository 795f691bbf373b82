#include "morin/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace morin {

using nlohmann::json;

void validate_scenario(const MorinScenario& S) {
  if (S.n() < 1) throw HypothesisError("target dimension n must be at least 1");
  for (const auto& fi : S.f)
    if (fi.ambient_dim() != S.N()) throw DimensionError("map component has wrong ambient dimension");
  if (S.m() <= S.n())
    throw HypothesisError("need m > n, got m = " + std::to_string(S.m()) + ", n = " + std::to_string(S.n()));
  if ((S.m() - S.n()) % 2 == 0)
    throw HypothesisError("m - n must be odd, got m = " + std::to_string(S.m()) +
                          ", n = " + std::to_string(S.n()));
  if (S.c() == 0) throw HypothesisError("M must be given by at least one constraint");
}

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("scenario is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario field '") + key + "': " + e.what());
  }
}

}  // namespace

MorinScenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");

  MorinScenario S;
  S.name = j.value("name", "unnamed");
  S.description = j.value("description", "");
  S.summary = j.value("summary", "");
  auto N = field<std::size_t>(j, "ambient_dim");
  if (N == 0) throw ParseError("ambient_dim must be positive");

  std::vector<Expr> g;
  for (const auto& s : field<std::vector<std::string>>(j, "constraints")) g.push_back(Expr::parse(s, N));
  for (const auto& s : field<std::vector<std::string>>(j, "map")) S.f.push_back(Expr::parse(s, N));

  std::vector<Vec> seeds;
  if (j.contains("sample_seeds")) {
    for (const auto& p : field<std::vector<std::vector<double>>>(j, "sample_seeds")) {
      if (p.size() != N) throw ParseError("sample seed has wrong dimension");
      seeds.push_back(Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size())));
    }
  }
  if (g.size() >= N) throw HypothesisError("too many constraints for the ambient dimension");
  S.manifold = ImplicitManifold(N, std::move(g), std::move(seeds));
  if (j.contains("sample_radius")) S.manifold.sample_radius = field<double>(j, "sample_radius");

  auto m = field<std::size_t>(j, "intrinsic_dim");
  if (m != S.m())
    throw HypothesisError("intrinsic_dim " + std::to_string(m) + " does not match ambient_dim - #constraints = " +
                          std::to_string(S.m()));
  if (j.contains("chi_expected")) S.chi_expected = field<int>(j, "chi_expected");
  S.manifold.chi_known = S.chi_expected;
  if (j.contains("seed")) S.seed = field<std::uint64_t>(j, "seed");
  if (j.contains("multistart_factor")) S.multistart_factor = field<int>(j, "multistart_factor");
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    S.tol.residual = t.value("residual", S.tol.residual);
    S.tol.dedup_radius = t.value("dedup_radius", S.tol.dedup_radius);
    S.tol.eigen_zero = t.value("eigen_zero", S.tol.eigen_zero);
    S.tol.correctness = t.value("correctness", S.tol.correctness);
  }
  validate_scenario(S);
  S.finalize();
  return S;
}

MorinScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::filesystem::path bundled_scenario_dir() { return MORIN_SCENARIO_DIR; }

}  // namespace morin
