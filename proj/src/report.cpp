#include "treechain/report.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace treechain {

std::string library_version() {
#ifdef TREECHAIN_VERSION
  return TREECHAIN_VERSION;
#else
  return "0.1.0";
#endif
}

bool RunReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version;
  j["config"] = config.serialize_identity();
  j["master_seed"] = config.run.master_seed;
  // execution details; everything outside this object is reproducible
  // bit for bit from (config, master_seed)
  j["execution"] = {{"workers", config.run.workers},
                    {"out", config.run.out},
                    {"format", config.run.format},
                    {"wall_time_s", wall_time_s}};
  j["pass"] = all_pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["details"] = c.details;
    arr.push_back(cj);
  }
  j["checks"] = arr;
  return j;
}

void RunReport::write(const std::string& out_dir) const {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/report.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("report: cannot write " + path);
  out << to_json().dump(2) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

}  // namespace treechain
