#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqcv/checker.hpp"

namespace pqcv {

/// {verdict, aborted_at_param, phase_is_constant, node_max, node_final,
///  node_tdd, node_trdd, time_s}
nlohmann::json report_json(const CheckReport& r);
std::string report_text(const CheckReport& r, const ParamTable* names = nullptr);

struct ManifestEntry {
  std::string name;
  std::string file1;
  std::string file2;
  Verdict expected = Verdict::Equivalent;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);
void save_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);
nlohmann::json manifest_json(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> manifest_from_json(const nlohmann::json& j);

struct BenchRow {
  std::string name;
  std::size_t params = 0;
  int qubits = 0;
  std::size_t gates1 = 0;
  std::size_t gates2 = 0;
  std::optional<CheckReport> report;  // empty on timeout
  std::string error;                  // set when the job failed otherwise
};

std::string csv_header();
std::string csv_row(const BenchRow& row);

}  // namespace pqcv
