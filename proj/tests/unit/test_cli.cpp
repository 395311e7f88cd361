#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include "dhflow/cli/commands.hpp"
#include "dhflow/io/output.hpp"
#include "helpers.hpp"

using namespace dhflow;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "dhflow");
  args.push_back("--quiet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

int csv_rows(const fs::path& p) {
  const std::string text = dhtest::slurp(p);
  int lines = 0;
  for (char c : text) lines += c == '\n';
  return lines - 1;
}

}  // namespace

TEST_CASE("flow from a stationary pair writes a single row") {
  const auto dir = dhtest::scratch_dir("cli_stationary");
  const auto cfg = write_config(dir, "c.json", R"({
    "domain": {"n1": 8, "n2": 8},
    "target": {"kind": "circle_torus", "dims": 1},
    "initial": {"generator": "constant"}})");
  CHECK(run({"flow", "--config", cfg.string(), "--out", (dir / "o").string()}) == 0);
  CHECK(csv_rows(dir / "o" / "trajectory.csv") == 1);
  CHECK(dhtest::slurp(dir / "o" / "trajectory.csv").find(",Stationary\n") != std::string::npos);
  const auto summary = io::read_json(dir / "o" / "summary.json");
  CHECK(summary["terminal"] == "Stationary");
  CHECK(summary["format_version"] == "dhflow-1");
  CHECK(fs::exists(dir / "o" / "events.json"));
  CHECK(fs::exists(dir / "o" / "checkpoints" / "final.bin"));
  CHECK_FALSE(fs::exists(dir / "o" / "error.json"));
  const auto resolved = io::read_json(dir / "o" / "resolved_config.json");
  CHECK(resolved.contains("physics_hash"));
  CHECK(resolved["output"]["directory"] == (dir / "o").string());
}

TEST_CASE("spectrum reports the kernel dimension for each spin structure") {
  const auto dir = dhtest::scratch_dir("cli_spectrum");
  const auto p = write_config(dir, "p.json", R"({"domain": {"n1": 8, "n2": 8}})");
  const auto a = write_config(dir, "a.json", R"({"domain": {"n1": 8, "n2": 8,
      "spin": ["antiperiodic", "antiperiodic"]}})");
  CHECK(run({"spectrum", "--config", p.string(), "--out", (dir / "p").string()}) == 0);
  CHECK(run({"spectrum", "--config", a.string(), "--out", (dir / "a").string()}) == 0);
  CHECK(io::read_json(dir / "p" / "spectrum.json")["kernel_dim_complex"] == 4);
  CHECK(io::read_json(dir / "a" / "spectrum.json")["kernel_dim_complex"] == 0);
  CHECK(fs::exists(dir / "p" / "eigenvectors.bin"));
  const auto header = io::read_json(dir / "p" / "eigenvectors.json");
  CHECK(header["format_version"] == "dhflow-1");
}

TEST_CASE("configuration problems exit with code 2") {
  const auto dir = dhtest::scratch_dir("cli_config");
  const auto bad = write_config(dir, "bad.json", "{\"flow\": {\"dt\": }");
  CHECK(run({"flow", "--config", bad.string(), "--out", (dir / "o").string()}) == 2);
  CHECK(io::read_json(dir / "o" / "error.json")["error"] == "config");

  const auto sched = write_config(dir, "s.json",
                                  R"({"continuation": {"schedule": [1.05, 1.1]}})");
  CHECK(run({"continue", "--config", sched.string(), "--out", (dir / "s").string()}) == 2);

  const auto none = write_config(dir, "n.json", "{}");
  CHECK(run({"continue", "--config", none.string(), "--out", (dir / "n").string()}) == 2);

  CHECK(run({"flow", "--config", (dir / "absent.json").string(), "--out",
             (dir / "m").string()}) == 2);
  CHECK(run({"nonsense"}) == 2);
}

TEST_CASE("a non-minimal kernel is a numerical failure") {
  // Constant maps into S^2 have a four-dimensional kernel.
  const auto dir = dhtest::scratch_dir("cli_kernel");
  const auto cfg = write_config(dir, "c.json", R"({"domain": {"n1": 8, "n2": 8}})");
  CHECK(run({"flow", "--config", cfg.string(), "--out", (dir / "o").string()}) == 4);
  CHECK(io::read_json(dir / "o" / "error.json")["error"] == "numerical");
}

TEST_CASE("seed on the command line overrides the config") {
  const auto dir = dhtest::scratch_dir("cli_seed");
  const auto cfg = write_config(dir, "c.json", R"({"seed": 3, "domain": {"n1": 8, "n2": 8}})");
  CHECK(run({"spectrum", "--config", cfg.string(), "--out", (dir / "o").string(), "--seed",
             "41"}) == 0);
  const auto resolved = io::read_json(dir / "o" / "resolved_config.json");
  CHECK(resolved["seed"] == 41);
}

TEST_CASE("resuming from a checkpoint reproduces the uninterrupted run") {
  const auto dir = dhtest::scratch_dir("cli_resume");
  const std::string physics = R"(
    "seed": 2,
    "domain": {"n1": 16, "n2": 16},
    "target": {"kind": "circle_torus", "dims": 1},
    "flow": {"alpha": 1.1, "dt": 0.01, "t_max": 0.06},)";
  const auto full = write_config(dir, "full.json", "{" + physics + R"(
    "initial": {"generator": "perturbed", "base": "winding", "amplitude": 0.1},
    "output": {"checkpoint_stride": 2}})");
  REQUIRE(run({"flow", "--config", full.string(), "--out", (dir / "full").string()}) == 0);
  REQUIRE(fs::exists(dir / "full" / "checkpoints" / "step_00000002.bin"));
  const auto resume = write_config(dir, "resume.json", "{" + physics + R"(
    "initial": {"generator": "checkpoint", "path": ")" +
      (dir / "full" / "checkpoints" / "step_00000002").string() + R"("}})");
  REQUIRE(run({"flow", "--config", resume.string(), "--out", (dir / "resumed").string()}) == 0);

  CHECK(dhtest::slurp(dir / "full" / "checkpoints" / "final.bin") ==
        dhtest::slurp(dir / "resumed" / "checkpoints" / "final.bin"));
  // The resumed CSV is the tail of the full one.
  const std::string a = dhtest::slurp(dir / "full" / "trajectory.csv");
  const std::string b = dhtest::slurp(dir / "resumed" / "trajectory.csv");
  const std::string tail = b.substr(b.find('\n') + 1);
  REQUIRE_FALSE(tail.empty());
  CHECK(a.size() > tail.size());
  CHECK(a.compare(a.size() - tail.size(), tail.size(), tail) == 0);
  CHECK(io::read_json(dir / "full" / "summary.json")["final"] ==
        io::read_json(dir / "resumed" / "summary.json")["final"]);

  // A different physics block is refused.
  const auto other = write_config(dir, "other.json", R"({"seed": 2,
    "domain": {"n1": 16, "n2": 16}, "target": {"kind": "circle_torus", "dims": 1},
    "flow": {"alpha": 1.2, "dt": 0.01, "t_max": 0.06},
    "initial": {"generator": "checkpoint", "path": ")" +
      (dir / "full" / "checkpoints" / "step_00000002").string() + R"("}})");
  CHECK(run({"flow", "--config", other.string(), "--out", (dir / "other").string()}) == 2);
}

TEST_CASE("validation reports are reproducible") {
  const auto dir = dhtest::scratch_dir("cli_validate");
  const auto cfg = write_config(dir, "v.json", R"({"seed": 5,
      "validation": {"checks": ["C1", "C9"]}})");
  REQUIRE(run({"validate", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
  REQUIRE(run({"validate", "--config", cfg.string(), "--out", (dir / "b").string()}) == 0);
  CHECK(dhtest::slurp(dir / "a" / "validation.json") ==
        dhtest::slurp(dir / "b" / "validation.json"));
  const auto report = io::read_json(dir / "a" / "validation.json");
  CHECK(report["checks"].size() == 2);
  CHECK(report["all_passed"] == true);

  // A tolerance nobody can meet fails the command with code 4.
  const auto strict = write_config(dir, "s.json", R"({"validation": {"checks": ["C9"],
      "tolerances": {"C9.rel_error": 1e-300}}})");
  CHECK(run({"validate", "--config", strict.string(), "--out", (dir / "s").string()}) == 4);
  const auto unknown = write_config(dir, "u.json", R"({"validation": {"checks": ["C13"]}})");
  CHECK(run({"validate", "--config", unknown.string(), "--out", (dir / "u").string()}) == 2);
}

TEST_CASE("continuation writes one directory per stage and a blowup report") {
  const auto dir = dhtest::scratch_dir("cli_continue");
  const auto cfg = write_config(dir, "c.json", R"({"seed": 5,
    "domain": {"n1": 16, "n2": 16}, "target": {"kind": "circle_torus", "dims": 1},
    "flow": {"alpha": 1.2, "dt": 0.05, "t_max": 0.1},
    "initial": {"generator": "perturbed", "base": "winding", "amplitude": 0.1},
    "continuation": {"schedule": [1.2, 1.1, 1.0]}})");
  REQUIRE(run({"continue", "--config", cfg.string(), "--out", (dir / "o").string()}) == 0);
  const auto stages = io::read_json(dir / "o" / "stages.json");
  REQUIRE(stages.size() == 3);
  CHECK(stages[0]["alpha"] == 1.2);
  CHECK(stages[2]["limit_only"] == true);
  CHECK(csv_rows(dir / "o" / "stage_00" / "trajectory.csv") == 3);
  CHECK(csv_rows(dir / "o" / "stage_01" / "trajectory.csv") == 3);
  const auto blowup = io::read_json(dir / "o" / "blowup_report.json");
  CHECK(blowup["alphas"].size() == 3);
  CHECK(blowup["flagged_nodes"].empty());
}
