#include <doctest.h>

#include <string>

#include "dhflow/errors.hpp"
#include "dhflow/io/config.hpp"
#include "dhflow/io/output.hpp"
#include "helpers.hpp"

using namespace dhflow;

namespace {

std::string error_of(const std::string& text) {
  try {
    io::parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("an empty config resolves to the defaults") {
  const io::RunConfig c = io::parse_config("{}");
  CHECK(c.seed == 0);
  CHECK(c.domain.n1 == 16);
  CHECK(c.target.kind == "sphere");
  CHECK(c.flow.alpha == doctest::Approx(1.1));
  CHECK(c.output.sample_stride == 1);
}

TEST_CASE("config fields are read and round-trip through the resolved form") {
  const io::RunConfig c = io::parse_config(R"({
    "seed": 17,
    "domain": {"n1": 12, "n2": 8, "spin": ["antiperiodic", "periodic"]},
    "target": {"kind": "circle_torus", "dims": 2},
    "flow": {"alpha": 1.3, "dt": 0.005, "spinor_mode": "zero"},
    "initial": {"generator": "winding", "k1": 2, "k2": -1},
    "continuation": {"schedule": [1.3, 1.2, 1.0]}
  })");
  CHECK(c.seed == 17);
  CHECK(c.flow.seed == 17);
  CHECK(c.domain.n2 == 8);
  CHECK(c.domain.spin.boundary[0] == geometry::SpinBoundary::Antiperiodic);
  CHECK(c.flow.spinor_mode == flow::SpinorMode::Zero);
  CHECK(c.initial.k2 == -1);
  const io::RunConfig back = io::config_from_json(io::to_json(c));
  CHECK(io::to_json(back) == io::to_json(c));
  CHECK(io::config_hash(back) == io::config_hash(c));
}

TEST_CASE("physics hash ignores output settings") {
  io::RunConfig a = io::parse_config("{}");
  io::RunConfig b = a;
  b.output.directory = "elsewhere";
  b.output.sample_stride = 7;
  CHECK(io::physics_hash(a) == io::physics_hash(b));
  CHECK(io::config_hash(a) != io::config_hash(b));
  b.flow.dt *= 2;
  CHECK(io::physics_hash(a) != io::physics_hash(b));
}

TEST_CASE("config errors name the offending field") {
  CHECK(error_of(R"({"flow": {"dt": -1}})").find("flow.dt") != std::string::npos);
  CHECK(error_of(R"({"flow": {"dtt": 1}})").find("flow.dtt: unknown key") != std::string::npos);
  CHECK(error_of(R"({"domain": {"n1": 7}})").find("domain") != std::string::npos);
  CHECK(error_of(R"({"target": {"kind": "torus"}})").find("target.kind") != std::string::npos);
  CHECK(error_of(R"({"continuation": {"schedule": [1.1, 1.2]}})")
            .find("strictly decreasing") != std::string::npos);
  CHECK(error_of(R"({"continuation": {"schedule": [1.2, 1.0, 1.1]}})")
            .find("continuation.schedule") != std::string::npos);
  CHECK(error_of(R"({"domain": {"spin": ["periodic", "twisted"]}})").find("domain.spin") !=
        std::string::npos);
  CHECK(error_of(R"({"seed": "x"})").find("seed") != std::string::npos);
  CHECK(error_of(R"({"initial": {"generator": "checkpoint"}})").find("initial.path") !=
        std::string::npos);
}

TEST_CASE("malformed JSON reports a position") {
  const std::string e = error_of("{\n  \"seed\": 1,\n  oops\n}");
  CHECK(e.find("line 3") != std::string::npos);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(io::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("checkpoints round-trip exactly and refuse a different grid") {
  const io::RunConfig c = io::parse_config(R"({"target": {"kind": "circle_torus", "dims": 1},
      "domain": {"n1": 12, "n2": 12}, "initial": {"generator": "perturbed", "amplitude": 0.1}})");
  const auto N = c.target.build();
  const auto d = c.domain.build();
  flow::FlowState s(io::initial_map(c, N, d), geometry::TwistedSpinorField(d, N.ambient_dim()),
                    1.1, 0.25, 25);
  for (std::size_t i = 0; i < s.psi.values.size(); ++i) s.psi.values[i] = {0.1 * i, -1.0 / (i + 1)};
  flow::RunProgress p;
  p.tau_E = 1e-9;
  p.seg_E0 = 3.25;
  p.seg_cum = 0.125;
  p.restarts = 2;
  p.steps = 25;
  const auto dir = dhtest::scratch_dir("ckpt");
  io::write_checkpoint(dir / "c", s, p, 0x1234);
  const io::Checkpoint back = io::read_checkpoint(dir / "c", d, N.ambient_dim());
  CHECK(back.physics_hash == 0x1234);
  CHECK(back.state.u.values == s.u.values);
  CHECK(back.state.psi.values == s.psi.values);
  CHECK(back.state.t == s.t);
  CHECK(back.state.step == 25);
  CHECK(back.progress.seg_cum == p.seg_cum);
  CHECK(back.progress.restarts == 2);
  CHECK_THROWS_AS(io::read_checkpoint(dir / "c", geometry::TorusDomain::square(8), 2), ConfigError);
  CHECK_THROWS_AS(io::read_checkpoint(dir / "missing", d, 2), ConfigError);
}

TEST_CASE("CSV rows keep 17 significant digits") {
  const auto dir = dhtest::scratch_dir("csv");
  {
    io::CsvWriter w(dir / "t.csv");
    flow::Diagnostics diag;
    diag.E_alpha = 0.1;
    w.row(1.0 / 3.0, diag, "Restart");
  }
  const std::string text = dhtest::slurp(dir / "t.csv");
  CHECK(text.rfind(io::CsvWriter::header(), 0) == 0);
  CHECK(text.find("0.33333333333333331,0.10000000000000001,") != std::string::npos);
  CHECK(text.find(",Restart\n") != std::string::npos);
}
