// Runs the twelve acceptance criteria with their pinned tolerances and
// prints one PASS/FAIL line each. Exit status 0 only if all pass.
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dhflow/errors.hpp"
#include "dhflow/validation/validation.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria C1..C12"};
  std::vector<std::string> checks;
  std::uint64_t seed = 0;
  std::string report;
  app.add_option("--check", checks, "criterion ids to run (default: all)");
  app.add_option("--seed", seed, "seed for sampled states");
  app.add_option("--report", report, "write the JSON report (with timings) here");
  CLI11_PARSE(app, argc, argv);

  dhflow::validation::SuiteOptions opt;
  opt.checks = checks;
  opt.seed = seed;
  opt.on_result = [](const dhflow::validation::CheckResult& r) {
    std::printf("%s\n", dhflow::validation::summary_line(r).c_str());
    std::fflush(stdout);
  };
  try {
    const auto results = dhflow::validation::run_suite(opt);
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    if (!report.empty())
      std::ofstream(report) << dhflow::validation::report_json(results, seed, true).dump(2) << '\n';
    std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
  } catch (const dhflow::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
}
