#include "dhflow/io/output.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

namespace dhflow::io {

static_assert(std::endian::native == std::endian::little, "field dumps assume little endian");

namespace {

json num(double v) {
  // JSON has no NaN or infinity.
  if (std::isfinite(v)) return v;
  return nullptr;
}

json num_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}


void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

}  // namespace

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const fs::path& path, bool append) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  f_ = std::fopen(path.c_str(), append ? "a" : "w");
  if (!f_) throw Error("cannot write " + path.string());
  if (!append) std::fprintf(f_, "%s\n", header());
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

const char* CsvWriter::header() {
  return "t,E_alpha,E_dirichlet,dissipation,gap_lambda,kernel_dim,psi_l2,map_residual,"
         "spinor_residual,event";
}

void CsvWriter::row(double t, const flow::Diagnostics& d, const std::string& event) {
  std::fprintf(f_, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%s\n", t, d.E_alpha,
               d.E_dirichlet, d.dissipation, d.gap, d.kernel_dim, d.psi_l2, d.map_residual,
               d.spinor_residual, event.c_str());
}

void CsvWriter::flush() { std::fflush(f_); }

json spectrum_json(const dirac::SpectralReport& rep) {
  json j;
  j["format_version"] = kFormatVersion;
  j["eigenvalues"] = num_array(rep.eigenvalues);
  j["residuals"] = num_array(rep.residuals);
  j["outer_mass"] = num_array(rep.outer_mass);
  j["resolved"] = rep.resolved;
  j["kernel_dim_complex"] = rep.kernel_dim;
  j["unresolved_kernel"] = rep.unresolved_kernel;
  j["gap"] = num(rep.gap);
  j["tau_ker"] = rep.tau_ker;
  j["spectral_radius"] = rep.spectral_radius;
  j["pairing_defect"] = num(rep.pairing_defect());
  j["kernel_dim_even"] = rep.kernel_dim_even();
  j["method"] = rep.method;
  j["iterations"] = rep.iterations;
  return j;
}

json event_json(const flow::FlowEvent& e) {
  json p = json::object();
  for (const auto& [k, v] : e.payload) p[k] = num(v);
  return {{"kind", flow::to_string(e.kind)},
          {"t", e.t},
          {"step", e.step},
          {"payload", p},
          {"message", e.message}};
}

json events_json(const std::vector<flow::FlowEvent>& events) {
  json a = json::array();
  for (const auto& e : events) a.push_back(event_json(e));
  return a;
}

json blowup_json(const flow::BlowupReport& b) {
  return {{"format_version", kFormatVersion},
          {"alphas", b.alphas},
          {"psi_l2", num_array(b.psi_l2)},
          {"dirichlet", num_array(b.dirichlet)},
          {"threshold", b.threshold},
          {"radii", b.radii},
          {"flagged_nodes", b.flagged},
          {"concentration_empty", b.flagged.empty()}};
}

void write_eigenvectors(const fs::path& base, const dirac::SpectralReport& rep) {
  json h;
  h["format_version"] = kFormatVersion;
  h["kind"] = "eigenvectors";
  h["dtype"] = "complex128";
  h["endianness"] = "little";
  h["count"] = rep.eigenvectors.size();
  h["eigenvalues"] = num_array(rep.eigenvalues);
  if (!rep.eigenvectors.empty()) {
    const auto& v = rep.eigenvectors.front();
    h["n1"] = v.domain.n1();
    h["n2"] = v.domain.n2();
    h["q"] = v.q;
    h["layout"] = "vector, node = i*n2 + j, spinor component, ambient index";
    h["values_per_vector"] = v.values.size();
  }
  fs::path bin = base;
  bin += ".bin";
  h["data"] = bin.filename().string();
  fs::path hdr = base;
  hdr += ".json";
  write_json(hdr, h);
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw Error("cannot write " + bin.string());
  for (const auto& v : rep.eigenvectors) write_raw(out, v.values.data(), v.values.size() * sizeof(cd));
}

void write_checkpoint(const fs::path& base, const flow::FlowState& s,
                      const flow::RunProgress& p, std::uint64_t physics_hash) {
  json h;
  h["format_version"] = kFormatVersion;
  h["kind"] = "checkpoint";
  h["physics_hash"] = hex64(physics_hash);
  h["n1"] = s.u.domain.n1();
  h["n2"] = s.u.domain.n2();
  h["q"] = s.u.q;
  h["t"] = s.t;
  h["alpha"] = s.alpha;
  h["step"] = s.step;
  h["progress"] = {{"tau_E", p.tau_E},
                   {"seg_E0", p.seg_E0},
                   {"seg_cum", p.seg_cum},
                   {"restarts", p.restarts},
                   {"steps", p.steps},
                   {"monotonicity_violations", p.monotonicity_violations}};
  // Scalars are also stored in binary so a resume never depends on decimal
  // round trips.
  const double scalars[5] = {s.t, s.alpha, p.tau_E, p.seg_E0, p.seg_cum};
  h["fields"] = {{{"name", "scalars"}, {"dtype", "float64"}, {"count", 5},
                  {"order", {"t", "alpha", "tau_E", "seg_E0", "seg_cum"}}},
                 {{"name", "u"}, {"dtype", "float64"}, {"count", s.u.values.size()}},
                 {{"name", "psi"}, {"dtype", "complex128"}, {"count", s.psi.values.size()}}};
  fs::path bin = base;
  bin += ".bin";
  h["data"] = bin.filename().string();
  fs::path hdr = base;
  hdr += ".json";
  write_json(hdr, h);
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw Error("cannot write " + bin.string());
  write_raw(out, scalars, sizeof scalars);
  write_raw(out, s.u.values.data(), s.u.values.size() * sizeof(double));
  write_raw(out, s.psi.values.data(), s.psi.values.size() * sizeof(cd));
}

Checkpoint read_checkpoint(const fs::path& base, const geometry::TorusDomain& d, int q) {
  fs::path hdr = base;
  hdr += ".json";
  fs::path bin = base;
  bin += ".bin";
  const json h = read_json(hdr);
  auto bad = [&](const std::string& m) -> ConfigError {
    return ConfigError("checkpoint " + hdr.string() + ": " + m);
  };
  try {
    if (h.at("format_version") != kFormatVersion) throw bad("format_version mismatch");
    if (h.at("kind") != "checkpoint") throw bad("not a checkpoint");
    if (h.at("n1").get<int>() != d.n1() || h.at("n2").get<int>() != d.n2() ||
        h.at("q").get<int>() != q)
      throw bad("grid or target dimension differs from the config");
    geometry::MapField u(d, q);
    geometry::TwistedSpinorField psi(d, q);
    double scalars[5];
    std::ifstream in(bin, std::ios::binary);
    if (!in) throw bad("cannot open " + bin.string());
    in.read(reinterpret_cast<char*>(scalars), sizeof scalars);
    in.read(reinterpret_cast<char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(psi.values.data()),
            static_cast<std::streamsize>(psi.values.size() * sizeof(cd)));
    if (!in) throw bad("truncated data file");
    flow::FlowState s(std::move(u), std::move(psi), scalars[1], scalars[0], h.at("step").get<long>());
    const json& p = h.at("progress");
    flow::RunProgress prog;
    prog.tau_E = scalars[2];
    prog.seg_E0 = scalars[3];
    prog.seg_cum = scalars[4];
    prog.restarts = p.at("restarts").get<int>();
    prog.steps = p.at("steps").get<long>();
    prog.monotonicity_violations = p.at("monotonicity_violations").get<int>();
    const std::uint64_t hash =
        std::stoull(h.at("physics_hash").get<std::string>(), nullptr, 16);
    return {std::move(s), prog, hash};
  } catch (const json::exception& e) {
    throw bad(e.what());
  }
}

void write_resolved_config(const fs::path& dir, const RunConfig& c) {
  json j = to_json(c);
  j["config_hash"] = hex64(config_hash(c));
  j["physics_hash"] = hex64(physics_hash(c));
  write_json(dir / "resolved_config.json", j);
}

}  // namespace dhflow::io
