#include "pqcv/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pqcv {

nlohmann::json report_json(const CheckReport& r) {
  nlohmann::json j;
  j["verdict"] = std::string(to_string(r.verdict));
  j["aborted_at_param"] = r.aborted_at_param ? nlohmann::json(*r.aborted_at_param) : nlohmann::json(nullptr);
  j["phase_is_constant"] = r.phase_is_constant;
  j["node_max"] = r.stats.node_max;
  j["node_final"] = r.stats.node_final;
  j["node_tdd"] = r.stats.nodes_tdd_total;
  j["node_trdd"] = r.stats.nodes_trdd_total;
  j["time_s"] = r.wall_time;
  return j;
}

std::string report_text(const CheckReport& r, const ParamTable* names) {
  std::ostringstream os;
  os << "verdict: " << to_string(r.verdict) << '\n'
     << "strategy: " << to_string(r.strategy) << '\n';
  if (r.aborted_at_param) {
    os << "aborted at parameter: " << *r.aborted_at_param << " (" << r.gates_consumed << " of "
       << r.gates_total << " gates consumed)\n";
  }
  if (r.verdict != Verdict::NotEquivalent && r.weights) {
    os << "global phase: ";
    if (r.phase.is_constant()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "(%.12g,%.12g)", r.phase.weight.real(), r.phase.weight.imag());
      os << buf;
    } else if (r.weights->node_count(r.phase) <= 64) {
      os << to_string(r.weights->to_poly(r.phase), names);
    } else {
      os << "<" << r.weights->node_count(r.phase) << "-node polynomial>";
    }
    os << '\n';
  }
  os << "node_max: " << r.stats.node_max << '\n'
     << "node_final: " << r.stats.node_final << '\n'
     << "node_tdd: " << r.stats.nodes_tdd_total << '\n'
     << "node_trdd: " << r.stats.nodes_trdd_total << '\n'
     << "time_s: " << r.wall_time << '\n';
  return os.str();
}

nlohmann::json manifest_json(const std::vector<ManifestEntry>& entries) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : entries) {
    j.push_back({{"name", e.name},
                 {"file1", e.file1},
                 {"file2", e.file2},
                 {"expected_verdict", std::string(to_string(e.expected))}});
  }
  return j;
}

std::vector<ManifestEntry> manifest_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("manifest must be a JSON array");
  std::vector<ManifestEntry> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const auto where = "manifest entry " + std::to_string(i);
    if (!e.is_object()) throw std::invalid_argument(where + " is not an object");
    for (const char* key : {"name", "file1", "file2", "expected_verdict"}) {
      if (!e.contains(key) || !e[key].is_string()) {
        throw std::invalid_argument(where + ": missing string field '" + key + "'");
      }
    }
    out.push_back(ManifestEntry{e["name"], e["file1"], e["file2"],
                                verdict_from_string(e["expected_verdict"].get<std::string>())});
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return manifest_from_json(j);
}

void save_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << manifest_json(entries).dump(2) << '\n';
}

std::string csv_header() {
  return "name,P,Q,G1,G2,node_max,node_final,node_tdd,node_trdd,verdict,time_s";
}

std::string csv_row(const BenchRow& row) {
  std::ostringstream os;
  os << row.name << ',' << row.params << ',' << row.qubits << ',' << row.gates1 << ',' << row.gates2 << ',';
  if (row.report) {
    const auto& s = row.report->stats;
    char t[32];
    std::snprintf(t, sizeof t, "%.3f", row.report->wall_time);
    os << s.node_max << ',' << s.node_final << ',' << s.nodes_tdd_total << ',' << s.nodes_trdd_total << ','
       << to_string(row.report->verdict) << ',' << t;
  } else {
    os << ",,,," << (row.error.empty() ? "timeout" : "error") << ',';
  }
  return os.str();
}

}  // namespace pqcv
