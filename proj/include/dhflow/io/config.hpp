#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dhflow/flow/flow.hpp"

namespace dhflow::io {

using json = nlohmann::json;

/// Tag written into every output directory and file header.
inline constexpr const char* kFormatVersion = "dhflow-1";

struct DomainConfig {
  int n1 = 16;
  int n2 = 16;
  double L1 = 2.0 * std::numbers::pi;
  double L2 = 2.0 * std::numbers::pi;
  geometry::SpinStructure spin;

  geometry::TorusDomain build() const;
};

struct TargetConfig {
  /// "sphere" (S^dims of the given radius) or "circle_torus" (dims circles).
  std::string kind = "sphere";
  double radius = 1.0;
  int dims = 2;

  geometry::TargetManifold build() const;
};

struct InitialConfig {
  /// constant | winding | perturbed | checkpoint
  std::string generator = "constant";
  /// Constant-map value (projected onto N); empty selects the base point.
  std::vector<double> point;
  int k1 = 1;
  int k2 = 0;
  /// Base of the perturbed generator: constant | winding.
  std::string base = "constant";
  double amplitude = 0.05;
  /// Perturbation seed; absent means the run seed.
  std::optional<std::uint64_t> seed;
  int max_mode = 2;
  /// Checkpoint base path (without .json / .bin).
  std::string path;
};

struct SpectrumConfig {
  int k = 8;
  double tau_ker = 0.0;
  dirac::EigenMethod method = dirac::EigenMethod::Auto;
  std::size_t dense_max_dim = 1600;
  bool dump_eigenvectors = true;
};

struct ContinuationConfig {
  std::vector<double> schedule;
  bool warm_start = true;
  double threshold = 0.0;
  std::vector<double> radii;
  int tail = 0;
};

struct OutputConfig {
  std::string directory = "out";
  int sample_stride = 1;
  /// Checkpoint every this many accepted steps; 0 disables periodic ones
  /// (the final state is always checkpointed).
  int checkpoint_stride = 0;
};

struct ValidationConfig {
  /// Criterion ids to run (C1 ... C12); empty runs all.
  std::vector<std::string> checks;
  /// Overrides of named tolerances, e.g. {"C1.abs_error": 1e-10}.
  std::map<std::string, double> tolerances;
};

struct RunConfig {
  std::uint64_t seed = 0;
  DomainConfig domain;
  TargetConfig target;
  flow::FlowConfig flow;
  InitialConfig initial;
  SpectrumConfig spectrum;
  ContinuationConfig continuation;
  OutputConfig output;
  ValidationConfig validation;
};

/// Parses and validates a config. Unknown keys, wrong types and invalid
/// values throw ConfigError naming the field ("flow.dt: must be > 0") or,
/// for malformed JSON, the line and column.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
RunConfig config_from_json(const json& j);

/// Resolved config with every default filled in and the format tag.
json to_json(const RunConfig& c);

/// 64-bit FNV-1a of the compact JSON dump.
std::uint64_t fnv1a(const std::string& bytes);
/// Hash of the blocks that determine the dynamics (seed, domain, target,
/// flow). A checkpoint resumes only under the same physics hash.
std::uint64_t physics_hash(const RunConfig& c);
std::uint64_t config_hash(const RunConfig& c);
std::string hex64(std::uint64_t h);

/// Initial map from the generator (not for `checkpoint`).
geometry::MapField initial_map(const RunConfig& c, const geometry::TargetManifold& N,
                               const geometry::TorusDomain& d);

}  // namespace dhflow::io
