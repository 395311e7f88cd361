#include "dhflow/io/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dhflow/geometry/generators.hpp"

namespace dhflow::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

// Walks one JSON object; every key must be read before finish().
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void num(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(at(key), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(at(key), "must be finite");
    }
  }
  template <class I>
  void integer(const char* key, I& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(at(key), "expected an integer");
      if constexpr (std::is_unsigned_v<I>) {
        if (v->is_number_unsigned()) out = v->get<I>();
        else fail(at(key), "must be non-negative");
      } else {
        out = v->get<I>();
      }
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(at(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void str(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void nums(const char* key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(at(key), "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) fail(at(key), "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  void strs(const char* key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(at(key), "expected an array of strings");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_string()) fail(at(key), "expected an array of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }
  template <class F>
  void object(const char* key, F&& f) {
    if (const json* v = find(key)) {
      Obj sub(*v, at(key));
      f(sub);
      sub.finish();
    }
  }
  const json& raw() const { return j_; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      (void)v;
      if (!seen_.count(k)) fail(at(k.c_str()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

geometry::SpinBoundary parse_boundary(const std::string& path, const std::string& s) {
  if (s == "periodic") return geometry::SpinBoundary::Periodic;
  if (s == "antiperiodic") return geometry::SpinBoundary::Antiperiodic;
  fail(path, "expected \"periodic\" or \"antiperiodic\", got \"" + s + "\"");
}

const char* boundary_name(geometry::SpinBoundary b) {
  return b == geometry::SpinBoundary::Periodic ? "periodic" : "antiperiodic";
}

dirac::EigenMethod parse_method(const std::string& path, const std::string& s) {
  if (s == "auto") return dirac::EigenMethod::Auto;
  if (s == "dense") return dirac::EigenMethod::Dense;
  if (s == "iterative") return dirac::EigenMethod::Iterative;
  fail(path, "expected auto | dense | iterative, got \"" + s + "\"");
}

const char* method_name(dirac::EigenMethod m) {
  switch (m) {
    case dirac::EigenMethod::Dense: return "dense";
    case dirac::EigenMethod::Iterative: return "iterative";
    default: return "auto";
  }
}

void parse_flow(Obj& o, flow::FlowConfig& f) {
  o.num("alpha", f.alpha);
  o.num("dt", f.dt);
  o.num("t_max", f.t_max);
  o.num("tau_stat", f.tau_stat);
  o.num("tau_ker", f.tau_ker);
  o.num("lambda_min", f.lambda_min);
  o.num("tau_E_factor", f.tau_E_factor);
  o.integer("max_halvings", f.max_halvings);
  std::string mode = f.spinor_mode == flow::SpinorMode::Kernel ? "kernel" : "zero";
  o.str("spinor_mode", mode);
  if (mode == "kernel") f.spinor_mode = flow::SpinorMode::Kernel;
  else if (mode == "zero") f.spinor_mode = flow::SpinorMode::Zero;
  else fail(o.at("spinor_mode"), "expected kernel | zero, got \"" + mode + "\"");
  o.integer("spectrum_k", f.spectrum_k);
  std::string method = method_name(f.eigen_method);
  o.str("eigen_method", method);
  f.eigen_method = parse_method(o.at("eigen_method"), method);
  o.integer("dense_max_dim", f.dense_max_dim);
  o.boolean("stop_on_stationary", f.stop_on_stationary);
  o.integer("max_steps", f.max_steps);
  o.object("restart", [&](Obj& r) {
    r.nums("amplitudes", f.restart.amplitudes);
    r.integer("pairs_per_amplitude", f.restart.pairs_per_amplitude);
    r.integer("max_mode", f.restart.max_mode);
    r.integer("max_restarts", f.restart.max_restarts);
    r.boolean("descent_candidate", f.restart.descent_candidate);
  });
}

}  // namespace

geometry::TorusDomain DomainConfig::build() const {
  return geometry::TorusDomain(n1, n2, L1, L2, spin);
}

geometry::TargetManifold TargetConfig::build() const {
  if (kind == "sphere") return geometry::TargetManifold::sphere(dims, radius);
  return geometry::TargetManifold::circle_torus(dims, radius);
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Obj root(j, "");
  std::string version = kFormatVersion;
  root.str("format_version", version);
  if (version != kFormatVersion)
    fail("format_version", "expected \"" + std::string(kFormatVersion) + "\", got \"" + version + "\"");
  root.integer("seed", c.seed);

  root.object("domain", [&](Obj& o) {
    o.integer("n1", c.domain.n1);
    o.integer("n2", c.domain.n2);
    o.num("L1", c.domain.L1);
    o.num("L2", c.domain.L2);
    std::vector<std::string> spin;
    o.strs("spin", spin);
    if (!spin.empty()) {
      if (spin.size() != 2) fail(o.at("spin"), "expected two entries");
      for (int k = 0; k < 2; ++k) c.domain.spin.boundary[k] = parse_boundary(o.at("spin"), spin[k]);
    }
  });
  for (int n : {c.domain.n1, c.domain.n2})
    if (n < 4 || n % 2 != 0) fail("domain", "n1 and n2 must be even and at least 4");
  if (!(c.domain.L1 > 0.0) || !(c.domain.L2 > 0.0)) fail("domain", "L1 and L2 must be positive");

  root.object("target", [&](Obj& o) {
    o.str("kind", c.target.kind);
    o.num("radius", c.target.radius);
    o.integer("dims", c.target.dims);
  });
  if (c.target.kind != "sphere" && c.target.kind != "circle_torus")
    fail("target.kind", "expected sphere | circle_torus, got \"" + c.target.kind + "\"");
  if (!(c.target.radius > 0.0)) fail("target.radius", "must be positive");
  if (c.target.dims < 1) fail("target.dims", "must be at least 1");

  root.object("flow", [&](Obj& o) { parse_flow(o, c.flow); });
  c.flow.seed = c.seed;
  c.flow.validate();

  root.object("initial", [&](Obj& o) {
    o.str("generator", c.initial.generator);
    o.nums("point", c.initial.point);
    o.integer("k1", c.initial.k1);
    o.integer("k2", c.initial.k2);
    o.str("base", c.initial.base);
    o.num("amplitude", c.initial.amplitude);
    std::uint64_t s = 0;
    if (o.raw().contains("seed")) {
      o.integer("seed", s);
      c.initial.seed = s;
    }
    o.integer("max_mode", c.initial.max_mode);
    o.str("path", c.initial.path);
  });
  {
    const auto& g = c.initial.generator;
    if (g != "constant" && g != "winding" && g != "perturbed" && g != "checkpoint")
      fail("initial.generator", "expected constant | winding | perturbed | checkpoint, got \"" + g + "\"");
    if (c.initial.base != "constant" && c.initial.base != "winding")
      fail("initial.base", "expected constant | winding, got \"" + c.initial.base + "\"");
    if (g == "checkpoint" && c.initial.path.empty()) fail("initial.path", "required for checkpoint");
    if (!(c.initial.amplitude >= 0.0)) fail("initial.amplitude", "must be non-negative");
    if (c.initial.max_mode < 0) fail("initial.max_mode", "must be non-negative");
  }

  root.object("spectrum", [&](Obj& o) {
    o.integer("k", c.spectrum.k);
    o.num("tau_ker", c.spectrum.tau_ker);
    std::string m = method_name(c.spectrum.method);
    o.str("method", m);
    c.spectrum.method = parse_method(o.at("method"), m);
    o.integer("dense_max_dim", c.spectrum.dense_max_dim);
    o.boolean("dump_eigenvectors", c.spectrum.dump_eigenvectors);
  });
  if (c.spectrum.k < 4) fail("spectrum.k", "must be at least 4");
  if (!(c.spectrum.tau_ker >= 0.0)) fail("spectrum.tau_ker", "must be non-negative");

  root.object("continuation", [&](Obj& o) {
    o.nums("schedule", c.continuation.schedule);
    o.boolean("warm_start", c.continuation.warm_start);
    o.num("threshold", c.continuation.threshold);
    o.nums("radii", c.continuation.radii);
    o.integer("tail", c.continuation.tail);
  });
  {
    const auto& s = c.continuation.schedule;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(s[i] >= 1.0)) fail("continuation.schedule", "entries must be >= 1");
      if (s[i] == 1.0 && i + 1 != s.size())
        fail("continuation.schedule", "alpha = 1 may only be the last entry");
      if (i > 0 && !(s[i] < s[i - 1])) fail("continuation.schedule", "must be strictly decreasing");
    }
  }

  root.object("output", [&](Obj& o) {
    o.str("directory", c.output.directory);
    o.integer("sample_stride", c.output.sample_stride);
    o.integer("checkpoint_stride", c.output.checkpoint_stride);
  });
  if (c.output.sample_stride < 1) fail("output.sample_stride", "must be at least 1");
  if (c.output.checkpoint_stride < 0) fail("output.checkpoint_stride", "must be non-negative");

  root.object("validation", [&](Obj& o) {
    o.strs("checks", c.validation.checks);
    if (const json* t = o.find("tolerances")) {
      if (!t->is_object()) fail(o.at("tolerances"), "expected an object of numbers");
      for (const auto& [k, v] : t->items()) {
        if (!v.is_number()) fail(o.at("tolerances") + "." + k, "expected a number");
        c.validation.tolerances[k] = v.get<double>();
      }
    }
  });
  root.finish();
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset -> line and column.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "config: malformed JSON at line " << line << ", column " << col << ": " << e.what();
    throw ConfigError(os.str());
  }
  return config_from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json to_json(const RunConfig& c) {
  json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = c.seed;
  j["domain"] = {{"n1", c.domain.n1},
                 {"n2", c.domain.n2},
                 {"L1", c.domain.L1},
                 {"L2", c.domain.L2},
                 {"spin", {boundary_name(c.domain.spin.boundary[0]),
                           boundary_name(c.domain.spin.boundary[1])}}};
  j["target"] = {{"kind", c.target.kind}, {"radius", c.target.radius}, {"dims", c.target.dims}};
  const auto& f = c.flow;
  j["flow"] = {{"alpha", f.alpha},
               {"dt", f.dt},
               {"t_max", f.t_max},
               {"tau_stat", f.tau_stat},
               {"tau_ker", f.tau_ker},
               {"lambda_min", f.lambda_min},
               {"tau_E_factor", f.tau_E_factor},
               {"max_halvings", f.max_halvings},
               {"spinor_mode", f.spinor_mode == flow::SpinorMode::Kernel ? "kernel" : "zero"},
               {"spectrum_k", f.spectrum_k},
               {"eigen_method", method_name(f.eigen_method)},
               {"dense_max_dim", f.dense_max_dim},
               {"stop_on_stationary", f.stop_on_stationary},
               {"max_steps", f.max_steps},
               {"restart",
                {{"amplitudes", f.restart.amplitudes},
                 {"pairs_per_amplitude", f.restart.pairs_per_amplitude},
                 {"max_mode", f.restart.max_mode},
                 {"max_restarts", f.restart.max_restarts},
                 {"descent_candidate", f.restart.descent_candidate}}}};
  j["initial"] = {{"generator", c.initial.generator},
                  {"point", c.initial.point},
                  {"k1", c.initial.k1},
                  {"k2", c.initial.k2},
                  {"base", c.initial.base},
                  {"amplitude", c.initial.amplitude},
                  {"seed", c.initial.seed.value_or(c.seed)},
                  {"max_mode", c.initial.max_mode},
                  {"path", c.initial.path}};
  j["spectrum"] = {{"k", c.spectrum.k},
                   {"tau_ker", c.spectrum.tau_ker},
                   {"method", method_name(c.spectrum.method)},
                   {"dense_max_dim", c.spectrum.dense_max_dim},
                   {"dump_eigenvectors", c.spectrum.dump_eigenvectors}};
  j["continuation"] = {{"schedule", c.continuation.schedule},
                       {"warm_start", c.continuation.warm_start},
                       {"threshold", c.continuation.threshold},
                       {"radii", c.continuation.radii},
                       {"tail", c.continuation.tail}};
  j["output"] = {{"directory", c.output.directory},
                 {"sample_stride", c.output.sample_stride},
                 {"checkpoint_stride", c.output.checkpoint_stride}};
  j["validation"] = {{"checks", c.validation.checks},
                     {"tolerances", c.validation.tolerances}};
  return j;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t physics_hash(const RunConfig& c) {
  const json j = to_json(c);
  const json p = {{"seed", j["seed"]}, {"domain", j["domain"]}, {"target", j["target"]},
                  {"flow", j["flow"]}};
  return fnv1a(p.dump());
}

std::uint64_t config_hash(const RunConfig& c) { return fnv1a(to_json(c).dump()); }

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

geometry::MapField initial_map(const RunConfig& c, const geometry::TargetManifold& N,
                               const geometry::TorusDomain& d) {
  const InitialConfig& ic = c.initial;
  auto constant = [&] {
    if (ic.point.empty()) return geometry::constant_map(d, N, geometry::base_point(N));
    if (static_cast<int>(ic.point.size()) != N.ambient_dim())
      fail("initial.point", "expected " + std::to_string(N.ambient_dim()) + " coordinates");
    const geometry::Vec p = Eigen::Map<const geometry::Vec>(ic.point.data(), N.ambient_dim());
    try {
      return geometry::constant_map(d, N, N.project(p));
    } catch (const TubeViolation&) {
      fail("initial.point", "too far from the target to project");
    }
  };
  if (ic.generator == "constant") return constant();
  if (ic.generator == "winding") return geometry::winding_map(d, N, ic.k1, ic.k2);
  if (ic.generator == "perturbed") {
    geometry::MapField base =
        ic.base == "winding" ? geometry::winding_map(d, N, ic.k1, ic.k2) : constant();
    geometry::Rng rng(ic.seed.value_or(c.seed));
    return geometry::perturbed_map(base, N, ic.amplitude, rng, ic.max_mode);
  }
  fail("initial.generator", "\"" + ic.generator + "\" does not generate a map");
}

}  // namespace dhflow::io
