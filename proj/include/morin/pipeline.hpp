#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morin/euler.hpp"

namespace morin {

enum ExitCode : int {
  exit_ok = 0,
  exit_genericity_exhausted = 2,
  exit_identity_violated = 3,
  exit_usage = 64,  // parse and hypothesis errors
  exit_regularity = 65,
  exit_not_morin = 66,
};

struct RunConfig {
  std::filesystem::path scenario;
  std::optional<std::uint64_t> seed;  // root seed; the scenario's own seed when unset
  std::optional<double> tol_residual;
  int max_resamples = 16;
  std::filesystem::path out;
  unsigned workers = 1;
  int regularity_samples = 200;
};

// Stream ids split off the root seed.
constexpr std::uint64_t stream_covector = 1;  // + attempt
constexpr std::uint64_t stream_regularity = 100;

struct GenericityAttempt {
  Covector a;
  bool accepted = false;
  std::vector<std::string> failures;
};

struct RunResult {
  int exit_code = exit_ok;
  std::string message;
  std::uint64_t root_seed = 0;
  RegularityAudit regularity;
  Stratification strata;
  std::vector<GenericityAttempt> attempts;
  std::optional<MorseData> morse;
  std::optional<EulerReport> euler;
  std::vector<std::string> violations;  // why exit 3
};

/// Full pipeline on an already loaded scenario: regularity, strata,
/// covector resampling, Morse data, identities. Throws the morin::Error
/// family for exit codes 64-66.
RunResult run_pipeline(MorinScenario S, const RunConfig& cfg);

/// Exit code for an exception escaping run_pipeline or load_scenario.
int exit_code_for(const std::exception& e);

nlohmann::ordered_json report_json(const MorinScenario& S, const RunConfig& cfg, const RunResult& r);

std::string strata_csv(const MorinScenario& S, const RunResult& r);
std::string critical_csv(const MorinScenario& S, const RunResult& r);
std::string curves_csv(const MorinScenario& S, const RunResult& r);

/// Loads, runs and writes report.json, strata.csv, critical.csv, curves.csv
/// into cfg.out. Returns the exit code; error reports are written too.
int run_and_write(const RunConfig& cfg, std::string* message = nullptr);

/// Human-readable digest of a report.json.
std::string explain_report(const nlohmann::ordered_json& report);

struct ScenarioListing {
  std::string file;
  std::string name;
  std::size_t m = 0, n = 0;
  std::optional<int> chi_expected;
  std::string summary;
};

/// Bundled scenarios, then the ones in extra_dir (if any).
std::vector<ScenarioListing> list_scenarios(const std::filesystem::path& extra_dir = {});

}  // namespace morin
