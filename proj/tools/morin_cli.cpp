#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <thread>

#include "morin/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Morin stratification and Euler characteristic checks"};
  app.require_subcommand(1);

  morin::RunConfig cfg;
  std::uint64_t seed = 0;
  double tol_residual = 0;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto* run = app.add_subcommand("run", "run the full pipeline on a scenario");
  run->add_option("--scenario", cfg.scenario, "scenario JSON file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "root seed (default: the scenario's)");
  run->add_option("--out", cfg.out, "output directory")->required();
  auto* tol_opt = run->add_option("--tol-residual", tol_residual, "Newton residual tolerance");
  run->add_option("--max-resamples", cfg.max_resamples, "covector attempts before giving up")->default_val(16);
  run->add_option("--workers", workers, "solver threads (results do not depend on it)");

  std::string dir;
  auto* list = app.add_subcommand("list", "list bundled scenarios");
  list->add_option("--dir", dir, "extra scenario directory");

  std::string report;
  auto* explain = app.add_subcommand("explain", "summarize a report.json");
  explain->add_option("report", report, "report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : morin::exit_usage;
  }

  if (*run) {
    if (*seed_opt) cfg.seed = seed;
    if (*tol_opt) cfg.tol_residual = tol_residual;
    cfg.workers = workers;
    std::string msg;
    int code = morin::run_and_write(cfg, &msg);
    std::cerr << msg << " (exit " << code << ")\n";
    return code;
  }
  if (*list) {
    auto rows = morin::list_scenarios(dir);
    std::cout << fmt::format("{:<26} {:>3} {:>3} {:>5}  {}\n", "file", "m", "n", "chi", "strata");
    for (const auto& r : rows)
      std::cout << fmt::format("{:<26} {:>3} {:>3} {:>5}  {}\n", r.file, r.m, r.n,
                               r.chi_expected ? std::to_string(*r.chi_expected) : "-", r.summary);
    return 0;
  }
  if (*explain) {
    std::ifstream in(report);
    if (!in) {
      std::cerr << "cannot open " << report << "\n";
      return morin::exit_usage;
    }
    try {
      auto j = nlohmann::ordered_json::parse(in);
      std::cout << morin::explain_report(j);
    } catch (const std::exception& e) {
      std::cerr << "malformed report: " << e.what() << "\n";
      return morin::exit_usage;
    }
    return 0;
  }
  return 0;
}
