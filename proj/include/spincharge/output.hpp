#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spincharge/config.hpp"
#include "spincharge/spectral_field.hpp"

namespace spincharge {

// Reproducibility block attached to every output: config hash, profile (with derived amplitude
// and neutraliser), grid, tolerances, seed, threads and wall time.
nlohmann::json make_manifest(const RunConfig& c, const std::string& command, double wall_seconds);

// 17 significant digits, enough to round-trip every double.
std::string format_double(double v);

// RFC-4180 CSV; the manifest goes on a leading "# manifest: {...}" comment line.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header, const nlohmann::json& manifest);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

std::string csv_quote(const std::string& field);

// report.json: the payload plus a "manifest" member.
void write_report(const std::string& path, nlohmann::json report, const nlohmann::json& manifest);

// .fst snapshot: one line of JSON header {n_per_axis, k_max, time, omega_pert, ...}, then
// e_hat and b_hat as flat little-endian arrays of per-node complex triples (re, im interleaved).
void write_fst(const std::string& path, const FieldState& state, const nlohmann::json& manifest = nullptr);
FieldState read_fst(const std::string& path);

}  // namespace spincharge
