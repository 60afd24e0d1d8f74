#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "fsdp/types.hpp"

namespace fsdp::solar {

/// Rectangular multi-variable weather record. values[i][d * stages_per_day + s]
/// is variable i on day d at stage s.
struct WeatherSeries {
  std::vector<std::string> names;
  std::size_t stages_per_day = 0;
  std::size_t days = 0;
  std::vector<Vec> values;

  std::size_t variables() const { return values.size(); }
  std::size_t length() const { return stages_per_day * days; }
  void validate() const;
};

/// Per time-of-day mean and deviation of each variable. Stages whose sample
/// deviation is below the floor are pinned: sigma is set to the floor and the
/// normalized value to 0.
struct Profiles {
  std::vector<Vec> mean;
  std::vector<Vec> sd;
  std::vector<std::vector<char>> pinned;
};

struct NormalizedSeries {
  WeatherSeries series;
  Profiles profiles;
};

inline constexpr double kSigmaFloor = 1e-6;

NormalizedSeries normalize(const WeatherSeries& raw);
WeatherSeries denormalize(const NormalizedSeries& normalized);

/// Lag-0 and lag-1 cross-correlation matrices of the selected variables,
/// pooled over the continuous series. (M1)_{mn} correlates variable m with
/// variable n one step earlier. Pairs touching a pinned sample are skipped.
struct Correlations {
  Eigen::MatrixXd M0;
  Eigen::MatrixXd M1;
};

Correlations correlations(const NormalizedSeries& data, const std::vector<std::size_t>& variables);
/// Correlations of a generated path (rows are time steps).
Correlations path_correlations(const std::vector<Vec>& path);

/// w(t) = A w(t - 1) + B v(t - 1), v ~ N(0, I), w(0) = 0.
struct GaussMarkovModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  std::vector<std::string> names;
  std::size_t stages_per_day = 0;
  /// Profiles of the modelled variables, indexed like A's rows.
  Profiles profiles;

  std::size_t dim() const { return static_cast<std::size_t>(A.rows()); }
  void validate() const;
};

/// A = M1 M0^-1 and B the symmetric square root of M0 - M1 M0^-1 M1^T.
GaussMarkovModel fit_from_correlations(const Eigen::MatrixXd& M0, const Eigen::MatrixXd& M1);
/// Fit on the selected variables (all when empty).
GaussMarkovModel fit(const NormalizedSeries& data, std::vector<std::size_t> variables = {});

/// Path w(0..T) drawn from the stream (seed, stream).
std::vector<Vec> generate(const GaussMarkovModel& model, int T, std::uint64_t seed, std::uint64_t stream = 0);

/// Power of variable `var` at stage k (daily profiles tile) for normalized
/// value w, in kW: scale * max(0, w sigma + mu), or scale * mu when pinned.
double power_at(const GaussMarkovModel& model, std::size_t var, int k, double w, double kw_per_unit);

/// to_power over a whole path; path[k] is w(k).
Vec to_power(const std::vector<Vec>& path, const GaussMarkovModel& model, std::size_t var, double kw_per_unit);

/// Covariance error of generated paths against the recursion, per stage.
std::vector<Eigen::MatrixXd> empirical_covariance(const GaussMarkovModel& model, int T, std::size_t paths,
                                                  std::uint64_t seed);

WeatherSeries read_weather_csv(const std::string& path);
void write_weather_csv(const WeatherSeries& series, const std::string& path);
void write_model_json(const GaussMarkovModel& model, const std::string& path);
GaussMarkovModel read_model_json(const std::string& path);
void write_path_csv(const std::vector<Vec>& path, const std::vector<std::string>& names, const std::string& file);

}  // namespace fsdp::solar
