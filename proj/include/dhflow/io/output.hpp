#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "dhflow/io/config.hpp"

namespace dhflow::io {

namespace fs = std::filesystem;

/// Writes `j` pretty-printed; creates parent directories.
void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

/// Time series, one row per recorded state; doubles at 17 significant
/// digits so reruns compare byte for byte.
class CsvWriter {
 public:
  /// Truncates, or appends without a header when `append` is set.
  CsvWriter(const fs::path& path, bool append = false);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  static const char* header();
  void row(double t, const flow::Diagnostics& d, const std::string& event = "");
  void row(const flow::FlowState& s, const std::string& event = "") { row(s.t, s.diag, event); }
  void flush();

 private:
  std::FILE* f_ = nullptr;
};

/// Formats a double with %.17g.
std::string fmt17(double v);

json spectrum_json(const dirac::SpectralReport& rep);
json event_json(const flow::FlowEvent& e);
json events_json(const std::vector<flow::FlowEvent>& events);
json blowup_json(const flow::BlowupReport& b);

/// Field dump: `<base>.json` header (format, shapes, layout, byte offsets)
/// plus `<base>.bin` with little-endian float64 data (complex values as
/// interleaved real, imaginary).
void write_eigenvectors(const fs::path& base, const dirac::SpectralReport& rep);

struct Checkpoint {
  flow::FlowState state;
  flow::RunProgress progress;
  std::uint64_t physics_hash = 0;
};

void write_checkpoint(const fs::path& base, const flow::FlowState& s,
                      const flow::RunProgress& progress, std::uint64_t physics_hash);
/// Reads `<base>.json` and `<base>.bin`. Throws ConfigError on a missing or
/// inconsistent file, or when the grid does not match `d` and `q`.
Checkpoint read_checkpoint(const fs::path& base, const geometry::TorusDomain& d, int q);

/// Writes resolved_config.json (with config and physics hashes) into `dir`.
void write_resolved_config(const fs::path& dir, const RunConfig& c);

}  // namespace dhflow::io
