#include "fsdp/solar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <sstream>

#include "fsdp/errors.hpp"
#include "fsdp/io.hpp"
#include "fsdp/rng.hpp"

namespace fsdp::solar {

void WeatherSeries::validate() const {
  if (values.empty()) throw InsufficientData("weather series has no variables");
  if (names.size() != values.size()) throw NonRectangular("weather series names do not match its variables");
  if (stages_per_day < 1) throw InsufficientData("weather series has no stages per day");
  for (const Vec& v : values) {
    if (v.size() != length()) throw NonRectangular("weather variables have different lengths");
    for (double x : v) {
      if (!std::isfinite(x)) throw NonRectangular("weather series has a missing or non-finite sample");
    }
  }
}

NormalizedSeries normalize(const WeatherSeries& raw) {
  raw.validate();
  if (raw.days < 2) throw InsufficientData("normalization needs at least two days of data");
  const std::size_t S = raw.stages_per_day, D = raw.days;
  NormalizedSeries out;
  out.series = raw;
  Profiles& p = out.profiles;
  for (std::size_t i = 0; i < raw.variables(); ++i) {
    Vec mean(S, 0.0), sd(S, 0.0);
    std::vector<char> pinned(S, 0);
    for (std::size_t s = 0; s < S; ++s) {
      double acc = 0.0;
      for (std::size_t d = 0; d < D; ++d) acc += raw.values[i][d * S + s];
      mean[s] = acc / static_cast<double>(D);
      double sq = 0.0;
      for (std::size_t d = 0; d < D; ++d) {
        double e = raw.values[i][d * S + s] - mean[s];
        sq += e * e;
      }
      sd[s] = std::sqrt(sq / static_cast<double>(D));
      if (sd[s] < kSigmaFloor) {
        sd[s] = kSigmaFloor;
        pinned[s] = 1;
      }
      for (std::size_t d = 0; d < D; ++d) {
        double& w = out.series.values[i][d * S + s];
        w = pinned[s] ? 0.0 : (raw.values[i][d * S + s] - mean[s]) / sd[s];
      }
    }
    p.mean.push_back(std::move(mean));
    p.sd.push_back(std::move(sd));
    p.pinned.push_back(std::move(pinned));
  }
  return out;
}

WeatherSeries denormalize(const NormalizedSeries& normalized) {
  WeatherSeries out = normalized.series;
  const std::size_t S = out.stages_per_day;
  const Profiles& p = normalized.profiles;
  for (std::size_t i = 0; i < out.variables(); ++i) {
    for (std::size_t t = 0; t < out.length(); ++t) {
      std::size_t s = t % S;
      double w = normalized.series.values[i][t];
      out.values[i][t] = p.pinned[i][s] ? p.mean[i][s] : w * p.sd[i][s] + p.mean[i][s];
    }
  }
  return out;
}

namespace {

/// Pearson-style coefficient sum(a b) / sqrt(sum(a^2) sum(b^2)) over the
/// pairs accepted by `valid`.
template <typename Get, typename Valid>
Correlations pooled(std::size_t p, std::size_t length, Get get, Valid valid) {
  Correlations c;
  c.M0 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  c.M1 = c.M0;
  for (std::size_t m = 0; m < p; ++m) {
    for (std::size_t n = 0; n < p; ++n) {
      for (std::size_t lag = 0; lag < 2; ++lag) {
        double ab = 0.0, aa = 0.0, bb = 0.0;
        for (std::size_t t = lag; t < length; ++t) {
          if (!valid(m, t) || !valid(n, t - lag)) continue;
          double a = get(m, t), b = get(n, t - lag);
          ab += a * b;
          aa += a * a;
          bb += b * b;
        }
        double rho = (aa > 0.0 && bb > 0.0) ? ab / std::sqrt(aa * bb) : 0.0;
        (lag == 0 ? c.M0 : c.M1)(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = rho;
      }
    }
    c.M0(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = 1.0;
  }
  return c;
}

}  // namespace

Correlations correlations(const NormalizedSeries& data, const std::vector<std::size_t>& variables) {
  const WeatherSeries& s = data.series;
  for (std::size_t v : variables) {
    if (v >= s.variables()) throw InvalidArgument("correlation variable index out of range");
  }
  const std::size_t S = s.stages_per_day;
  return pooled(
      variables.size(), s.length(), [&](std::size_t k, std::size_t t) { return s.values[variables[k]][t]; },
      [&](std::size_t k, std::size_t t) { return !data.profiles.pinned[variables[k]][t % S]; });
}

Correlations path_correlations(const std::vector<Vec>& path) {
  if (path.size() < 2) throw InsufficientData("path correlations need at least two samples");
  return pooled(
      path.front().size(), path.size(), [&](std::size_t k, std::size_t t) { return path[t][k]; },
      [](std::size_t, std::size_t) { return true; });
}

void GaussMarkovModel::validate() const {
  if (A.rows() < 1 || A.rows() != A.cols()) throw InvalidArgument("model matrix A must be square");
  if (B.rows() != A.rows()) throw InvalidArgument("model matrix B must have as many rows as A");
}

GaussMarkovModel fit_from_correlations(const Eigen::MatrixXd& M0, const Eigen::MatrixXd& M1) {
  if (M0.rows() < 1 || M0.rows() != M0.cols() || M1.rows() != M0.rows() || M1.cols() != M0.cols()) {
    throw InvalidArgument("correlation matrices must be square and of equal size");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M0);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) throw SingularCorrelation("lag-0 correlation matrix is singular");
  GaussMarkovModel model;
  // A = M1 M0^-1 with M0 symmetric: solve M0 A^T = M1^T.
  model.A = M0.ldlt().solve(M1.transpose()).transpose();
  Eigen::MatrixXd R = M0 - model.A * M1.transpose();
  R = 0.5 * (R + R.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
  Eigen::VectorXd lambda = es.eigenvalues();
  if (lambda.minCoeff() < -1e-10) throw IndefiniteResidual(lambda.minCoeff());
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  model.B = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
  return model;
}

GaussMarkovModel fit(const NormalizedSeries& data, std::vector<std::size_t> variables) {
  if (variables.empty()) {
    for (std::size_t i = 0; i < data.series.variables(); ++i) variables.push_back(i);
  }
  Correlations c = correlations(data, variables);
  GaussMarkovModel model = fit_from_correlations(c.M0, c.M1);
  model.stages_per_day = data.series.stages_per_day;
  for (std::size_t v : variables) {
    model.names.push_back(data.series.names[v]);
    model.profiles.mean.push_back(data.profiles.mean[v]);
    model.profiles.sd.push_back(data.profiles.sd[v]);
    model.profiles.pinned.push_back(data.profiles.pinned[v]);
  }
  return model;
}

std::vector<Vec> generate(const GaussMarkovModel& model, int T, std::uint64_t seed, std::uint64_t stream) {
  model.validate();
  if (T < 0) throw InvalidArgument("path length must be nonnegative");
  const auto p = static_cast<Eigen::Index>(model.dim());
  const auto q = model.B.cols();
  CounterRng rng(seed, stream);
  std::vector<Vec> path(static_cast<std::size_t>(T) + 1, Vec(static_cast<std::size_t>(p), 0.0));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p), v(q);
  for (int t = 1; t <= T; ++t) {
    for (Eigen::Index i = 0; i < q; ++i) v(i) = rng.normal();
    w = model.A * w + model.B * v;
    for (Eigen::Index i = 0; i < p; ++i) path[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = w(i);
  }
  return path;
}

double power_at(const GaussMarkovModel& model, std::size_t var, int k, double w, double kw_per_unit) {
  if (model.stages_per_day == 0 || var >= model.profiles.mean.size()) {
    throw InvalidArgument("model has no profile for the requested variable");
  }
  std::size_t s = static_cast<std::size_t>(k) % model.stages_per_day;
  double mu = model.profiles.mean[var][s];
  if (model.profiles.pinned[var][s]) return kw_per_unit * std::max(0.0, mu);
  return kw_per_unit * std::max(0.0, w * model.profiles.sd[var][s] + mu);
}

Vec to_power(const std::vector<Vec>& path, const GaussMarkovModel& model, std::size_t var, double kw_per_unit) {
  Vec out(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    out[k] = power_at(model, var, static_cast<int>(k), path[k].at(var), kw_per_unit);
  }
  return out;
}

std::vector<Eigen::MatrixXd> empirical_covariance(const GaussMarkovModel& model, int T, std::size_t paths,
                                                  std::uint64_t seed) {
  const auto p = static_cast<Eigen::Index>(model.dim());
  std::vector<Eigen::MatrixXd> acc(static_cast<std::size_t>(T) + 1, Eigen::MatrixXd::Zero(p, p));
  for (std::size_t i = 0; i < paths; ++i) {
    auto path = generate(model, T, seed, i);
    for (std::size_t t = 0; t < path.size(); ++t) {
      Eigen::Map<const Eigen::VectorXd> w(path[t].data(), p);
      acc[t] += w * w.transpose();
    }
  }
  for (auto& m : acc) m /= static_cast<double>(paths);
  return acc;
}

WeatherSeries read_weather_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.size() < 3 || table.header[0] != "day" || table.header[1] != "stage") {
    throw NonRectangular("weather CSV must start with columns day, stage");
  }
  std::map<std::pair<long, long>, std::vector<double>> rows;
  long max_day = -1, max_stage = -1;
  for (const auto& r : table.rows) {
    if (r.size() != table.header.size()) throw NonRectangular("weather CSV row has the wrong number of fields");
    auto day = static_cast<long>(r[0]), stage = static_cast<long>(r[1]);
    if (day < 0 || stage < 0 || day != r[0] || stage != r[1]) throw NonRectangular("day and stage must be nonnegative integers");
    if (!rows.emplace(std::make_pair(day, stage), std::vector<double>(r.begin() + 2, r.end())).second) {
      throw NonRectangular("duplicate weather sample");
    }
    max_day = std::max(max_day, day);
    max_stage = std::max(max_stage, stage);
  }
  WeatherSeries s;
  s.names.assign(table.header.begin() + 2, table.header.end());
  s.days = static_cast<std::size_t>(max_day + 1);
  s.stages_per_day = static_cast<std::size_t>(max_stage + 1);
  if (rows.size() != s.days * s.stages_per_day) throw NonRectangular("weather CSV has missing samples");
  s.values.assign(s.names.size(), Vec(s.length()));
  for (const auto& [key, vals] : rows) {
    std::size_t t = static_cast<std::size_t>(key.first) * s.stages_per_day + static_cast<std::size_t>(key.second);
    for (std::size_t i = 0; i < vals.size(); ++i) s.values[i][t] = vals[i];
  }
  s.validate();
  return s;
}

void write_weather_csv(const WeatherSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "day,stage";
  for (const auto& n : series.names) out << ',' << n;
  out << '\n' << std::setprecision(10);
  for (std::size_t d = 0; d < series.days; ++d) {
    for (std::size_t s = 0; s < series.stages_per_day; ++s) {
      out << d << ',' << s;
      for (const Vec& v : series.values) out << ',' << v[d * series.stages_per_day + s];
      out << '\n';
    }
  }
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd json_matrix(const nlohmann::json& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

}  // namespace

void write_model_json(const GaussMarkovModel& model, const std::string& path) {
  nlohmann::json j;
  j["names"] = model.names;
  j["stages_per_day"] = model.stages_per_day;
  j["A"] = matrix_json(model.A);
  j["B"] = matrix_json(model.B);
  j["mean"] = model.profiles.mean;
  j["sd"] = model.profiles.sd;
  nlohmann::json pinned = nlohmann::json::array();
  for (const auto& row : model.profiles.pinned) {
    std::vector<int> r(row.begin(), row.end());
    pinned.push_back(r);
  }
  j["pinned"] = pinned;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << std::setprecision(17) << j.dump(2) << '\n';
}

GaussMarkovModel read_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  GaussMarkovModel m;
  m.names = j.at("names").get<std::vector<std::string>>();
  m.stages_per_day = j.at("stages_per_day").get<std::size_t>();
  m.A = json_matrix(j.at("A"));
  m.B = json_matrix(j.at("B"));
  m.profiles.mean = j.at("mean").get<std::vector<Vec>>();
  m.profiles.sd = j.at("sd").get<std::vector<Vec>>();
  for (const auto& row : j.at("pinned")) {
    std::vector<int> r = row.get<std::vector<int>>();
    m.profiles.pinned.emplace_back(r.begin(), r.end());
  }
  m.validate();
  return m;
}

void write_path_csv(const std::vector<Vec>& path, const std::vector<std::string>& names, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file);
  out << 't';
  for (const auto& n : names) out << ',' << n;
  out << '\n' << std::setprecision(17);
  for (std::size_t t = 0; t < path.size(); ++t) {
    out << t;
    for (double v : path[t]) out << ',' << v;
    out << '\n';
  }
}

}  // namespace fsdp::solar
