#pragma once

#include <map>
#include <string>
#include <vector>

#include "fsdp/battery.hpp"

namespace fsdp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

/// Fully resolved run settings. A value of 0 for k selects the problem's
/// default grid size.
struct RunConfig {
  std::string problem = "counterexample1";
  std::size_t k = 0;
  std::vector<std::size_t> k_list;
  std::size_t k_solar = 7;
  std::size_t nodes = 5;
  double epsilon = 1e-3;
  std::size_t paths = 500;
  std::uint64_t seed = 1;
  /// "auto" picks the problem default.
  std::string interpolate = "auto";
  std::string lift = "lookahead";
  bool augmented = false;

  battery::BatteryParams battery;
  battery::TariffSchedule tariff;
  std::string loads;
  std::string weather;
  std::size_t solar_states = 1;
  double kw_per_unit = 0.002;
  double noise_scale = 1.0;
  std::string fit_vars = "irradiance";

  /// Execution settings; not part of the resolved config text.
  unsigned threads = 1;
  std::string out_dir;
  bool timestamp = true;

  /// Sets `section.key`; throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Checks every knob; throws ConfigError.
  void validate() const;
  std::size_t grid_k() const;
  bool use_interpolation() const;
  /// Text in the config grammar that reproduces this run.
  std::string to_text() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the config grammar: `[section]` headers, `key = value` lines,
/// and `#` or `;` comments. Keys before any header belong to `run`.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);

/// Entry point of the `fsdp` executable.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace fsdp::cli
