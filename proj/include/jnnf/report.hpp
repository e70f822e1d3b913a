// Verification reports and their JSONL serialization. One report per job,
// one JSON object per line. The canonical body is the full object minus the
// timing field; two runs of the same job with the same seed must produce
// byte-identical bodies, and the determinism checks compare exactly that.
// Key order inside each object is alphabetical (the JSON library keeps
// object keys sorted), so the bytes are stable too.
#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jnnf/error.hpp"

namespace jnnf {

inline constexpr const char* kToolVersion = "jnnf 0.1.0";

// Job outcomes. "fail" means the check ran to completion and the claim is
// false; "error" means the job did not run to completion; "inconclusive"
// means the inputs fell outside the configured bounds, so nothing was
// claimed either way.
struct VerificationReport {
  std::string job;         // "<index>-<module>-<operation>"
  std::string tag;         // stable public identifier, e.g. "lemma-6.4"
  std::string status;      // pass | fail | error | inconclusive
  nlohmann::json witnesses = nlohmann::json::object();
  std::string input_hash;  // content hash of the canonicalized job inputs
  std::string tool_version = kToolVersion;
  uint64_t seed = 0;
  double timing_ms = 0.0;
};

inline bool status_acceptable(const std::string& status) {
  return status == "pass" || status == "inconclusive";
}

inline nlohmann::json report_to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["job"] = r.job;
  j["tag"] = r.tag;
  j["status"] = r.status;
  j["witnesses"] = r.witnesses;
  j["input_hash"] = r.input_hash;
  j["tool_version"] = r.tool_version;
  j["seed"] = r.seed;
  j["timing_ms"] = r.timing_ms;
  return j;
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
  require(j.is_object(), "report: expected a JSON object");
  for (const char* field : {"job", "tag", "status", "witnesses", "input_hash", "tool_version",
                            "seed", "timing_ms"})
    require(j.contains(field), std::string("report: missing field '") + field + "'");
  VerificationReport r;
  r.job = j["job"].get<std::string>();
  r.tag = j["tag"].get<std::string>();
  r.status = j["status"].get<std::string>();
  r.witnesses = j["witnesses"];
  r.input_hash = j["input_hash"].get<std::string>();
  r.tool_version = j["tool_version"].get<std::string>();
  r.seed = j["seed"].get<uint64_t>();
  r.timing_ms = j["timing_ms"].get<double>();
  return r;
}

// Everything except the timing, dumped without whitespace.
inline std::string report_body(const VerificationReport& r) {
  nlohmann::json j = report_to_json(r);
  j.erase("timing_ms");
  return j.dump();
}

inline std::string report_line(const VerificationReport& r) { return report_to_json(r).dump(); }

// Concatenated canonical bodies, the unit the determinism criterion
// byte-compares across runs.
inline std::string reports_canonical(const std::vector<VerificationReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    out += report_body(r);
    out += '\n';
  }
  return out;
}

// Write-to-temporary plus rename, so readers never observe a half-written
// report file.
inline void write_reports(const std::filesystem::path& path,
                          const std::vector<VerificationReport>& reports) {
  std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    require(out.good(), "write_reports: cannot open " + tmp.string());
    for (const auto& r : reports) out << report_line(r) << '\n';
    require(out.good(), "write_reports: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::vector<VerificationReport> read_reports(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "read_reports: cannot open " + path.string());
  std::vector<VerificationReport> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(report_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace jnnf
