#pragma once

// Structured run reports: one report.json per command plus flat CSVs. All
// numeric text uses 17 significant digits and '.' decimals, so identical
// runs produce identical artifacts.

#include <string>
#include <vector>

#include <json.hpp>

#include "treechain/config.hpp"

namespace treechain {

struct CheckResult {
  std::string name;
  bool pass = true;
  nlohmann::json details;
};

struct RunReport {
  std::string command;
  std::string version;
  ExperimentConfig config;
  double wall_time_s = 0.0;
  std::vector<CheckResult> checks;

  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] nlohmann::json to_json() const;
  // Writes <out_dir>/report.json (created if needed).
  void write(const std::string& out_dir) const;
};

// Minimal CSV emission; fields are written verbatim (callers pre-format
// doubles with format_double).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string library_version();

}  // namespace treechain
