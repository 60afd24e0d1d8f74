#pragma once

#include <string>

#include "fsdp/bellman.hpp"
#include "fsdp/stochastic.hpp"

namespace fsdp {

/// Numeric CSV with one header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<Vec> rows;

  /// Index of a named column; throws InvalidArgument when missing.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

/// Value table with grids, cost-to-go layers and argmin indices.
void write_value_table_json(const ValueTable& vt, const std::string& path);
ValueTable read_value_table_json(const std::string& path);

void write_policy_json(const TabularPolicy& policy, const std::string& path);
TabularPolicy read_policy_json(const std::string& path);

/// One row per stage: t, x_0..x_{n-1}, u_0..u_{m-1} (empty at the final
/// stage). `state_names` may be empty.
void write_trajectory_csv(const Trajectory& tr, const std::string& path,
                          const std::vector<std::string>& state_names = {});

/// Emits `# generated <UTC time>` unless disabled.
std::string timestamp_line();

}  // namespace fsdp
