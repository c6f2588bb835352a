#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace zdsec {

// Provenance record for one command invocation. run_id covers only the
// deterministic inputs (command, config hash, seed, version), so reruns
// produce byte-identical CSV headers; the wall-clock timestamp lives only in
// the manifest file.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;
  std::vector<std::string> outputs;

  std::string run_id() const;
};

std::string iso8601_utc_now();

// Writes bytes to a temp file in the same directory, then renames into place.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

// CSV buffer with '#'-prefixed metadata header lines.
class Csv {
 public:
  void comment(const std::string& line);
  void columns(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
};

// Fixed "%.12g" rendering used for every numeric cell.
std::string fmt_g(double v);

}  // namespace zdsec
