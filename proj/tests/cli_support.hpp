#pragma once

// Helpers for driving the command line entry point from tests.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fsdp::testcli {

inline std::string fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fsdp_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

inline int run(std::vector<std::string> args) {
  args.insert(args.begin(), "fsdp");
  return cli::run(args);
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Keys of the [result] section of a summary.
inline std::map<std::string, std::string> results(const std::string& dir) {
  std::map<std::string, std::string> out;
  std::istringstream in(slurp(dir + "/summary.ini"));
  std::string line;
  bool in_result = false;
  while (std::getline(in, line)) {
    if (line == "[result]") {
      in_result = true;
      continue;
    }
    if (!in_result || line.empty()) continue;
    auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

inline std::vector<double> numbers(const std::string& csv) {
  std::vector<double> v;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  return v;
}

/// Rows of a CSV file as strings, header included.
inline std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) row.push_back(item);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

/// Column of a CSV file as numbers (header row skipped).
inline std::vector<double> csv_column(const std::string& path, const std::string& name) {
  auto rows = csv_rows(path);
  std::vector<double> out;
  if (rows.empty()) return out;
  std::size_t c = 0;
  while (c < rows[0].size() && rows[0][c] != name) ++c;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (c < rows[i].size() && !rows[i][c].empty()) out.push_back(std::stod(rows[i][c]));
  }
  return out;
}

}  // namespace fsdp::testcli
