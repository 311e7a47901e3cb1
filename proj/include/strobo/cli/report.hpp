#pragma once

// Report documents written by the command-line tool. One JSON object per run:
//
//   schema           "strobo-report/1"
//   toolkit_version  library version string
//   generated_at     UTC timestamp, the only field that varies between identical runs
//   command          table | verify | find-orbit | bell-debug
//   config           the resolved run configuration
//   system           the parsed system (absent for bell-debug)
//   warnings         array of strings
//   results          array of per-sample (or per-term) records
//   summary          command-specific aggregate
//
// Doubles are written in shortest round-trip form, so re-reading a report
// reproduces every value bit for bit.

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "strobo/errors.hpp"

#ifndef STROBO_VERSION
#define STROBO_VERSION "0.0.0"
#endif

namespace strobo::cli {

inline constexpr const char* kReportSchema = "strobo-report/1";

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json make_report(const std::string& command) {
  nlohmann::json r;
  r["schema"] = kReportSchema;
  r["toolkit_version"] = STROBO_VERSION;
  r["generated_at"] = utc_timestamp();
  r["command"] = command;
  r["config"] = nlohmann::json::object();
  r["warnings"] = nlohmann::json::array();
  r["results"] = nlohmann::json::array();
  r["summary"] = nlohmann::json::object();
  return r;
}

/// Throws ReportError naming the first missing or mistyped top-level field.
inline void validate_report(const nlohmann::json& r) {
  auto require = [&](const char* key, bool ok) {
    if (!r.contains(key)) throw ReportError(std::string("report is missing '") + key + "'");
    if (!ok) throw ReportError(std::string("report field '") + key + "' has the wrong type");
  };
  if (!r.is_object()) throw ReportError("report must be a JSON object");
  require("schema", r.contains("schema") && r["schema"].is_string());
  if (r["schema"] != kReportSchema) throw ReportError("unsupported report schema " + r["schema"].dump());
  require("toolkit_version", r.contains("toolkit_version") && r["toolkit_version"].is_string());
  require("generated_at", r.contains("generated_at") && r["generated_at"].is_string());
  require("command", r.contains("command") && r["command"].is_string());
  const std::string cmd = r["command"];
  if (cmd != "table" && cmd != "verify" && cmd != "find-orbit" && cmd != "bell-debug") {
    throw ReportError("unknown command '" + cmd + "' in report");
  }
  require("config", r.contains("config") && r["config"].is_object());
  require("warnings", r.contains("warnings") && r["warnings"].is_array());
  require("results", r.contains("results") && r["results"].is_array());
  require("summary", r.contains("summary") && r["summary"].is_object());
  if (cmd != "bell-debug") require("system", r.contains("system") && r["system"].is_object());
}

inline std::string dump_report(const nlohmann::json& r) { return r.dump(2) + "\n"; }

/// Writes the report to `path`; throws IoError on I/O failure.
inline void write_report(const nlohmann::json& r, const std::string& path) {
  validate_report(r);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << dump_report(r);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline nlohmann::json read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json r;
  try {
    r = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ReportError("report '" + path + "' is not valid JSON: " + e.what());
  }
  validate_report(r);
  return r;
}

}  // namespace strobo::cli
