#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "morin/pipeline.hpp"
#include "morin/random.hpp"

namespace testing {

inline morin::MorinScenario bundled(const std::string& name) {
  return morin::load_scenario(morin::bundled_scenario_dir() / (name + ".json"));
}

inline std::filesystem::path data_file(const std::string& name) { return std::filesystem::path(MORIN_TEST_DATA) / name; }

// scenario + strata, computed once per process
struct Solved {
  morin::MorinScenario S;
  morin::Stratification st;
};

inline const Solved& solved(const std::string& name) {
  static std::map<std::string, std::unique_ptr<Solved>> cache;
  auto& slot = cache[name];
  if (!slot) {
    slot = std::make_unique<Solved>();
    slot->S = bundled(name);
    slot->st = morin::solve_strata(slot->S);
  }
  return *slot;
}

inline morin::Covector covector(const morin::MorinScenario& S, int attempt = 0) {
  return morin::sample_covector(S.n(), morin::stream_seed(S.seed, morin::stream_covector + attempt));
}

// central differences of a scalar function
inline morin::Vec fd_gradient(const std::function<double(const morin::Vec&)>& f, const morin::Vec& x, double h = 1e-6) {
  morin::Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    morin::Vec a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("morin-test-" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
