#include "fsdp/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "fsdp/errors.hpp"

namespace fsdp {

using nlohmann::json;

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidArgument("CSV has no column '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void open_out(std::ofstream& out, const std::string& path) {
  out.open(path);
  if (!out) throw Error("cannot write " + path);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (table.header.empty()) {
      table.header = split(t);
      continue;
    }
    Vec row;
    for (const std::string& f : split(t)) {
      if (f.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(f, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != f.size()) throw InvalidArgument(path + ":" + std::to_string(line_no) + ": not a number: " + f);
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw InvalidArgument(path + ": empty CSV");
  return table;
}

namespace {

json grid_json(const TensorGrid& g) {
  json axes = json::array();
  for (const GridSpec& a : g.axes()) axes.push_back({{"lower", a.lower()}, {"upper", a.upper()}, {"k", a.size()}});
  return axes;
}

TensorGrid json_grid(const json& j) {
  std::vector<GridSpec> axes;
  for (const json& a : j) axes.emplace_back(a.at("lower").get<double>(), a.at("upper").get<double>(), a.at("k").get<std::size_t>());
  return TensorGrid(std::move(axes));
}

/// Streams large numeric arrays without building a JSON document.
/// Infinite values (pruned states) are stored as null.
class JsonArrayWriter {
 public:
  explicit JsonArrayWriter(std::ostream& out) : out_(out) {}

  void values(const Vec& v) {
    out_ << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out_ << ',';
      if (std::isfinite(v[i])) {
        auto r = std::to_chars(buf_, buf_ + sizeof buf_, v[i]);
        out_.write(buf_, r.ptr - buf_);
      } else {
        out_ << "null";
      }
    }
    out_ << ']';
  }

  void integers(const std::vector<std::int32_t>& v) {
    out_ << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out_ << ',';
      auto r = std::to_chars(buf_, buf_ + sizeof buf_, v[i]);
      out_.write(buf_, r.ptr - buf_);
    }
    out_ << ']';
  }

 private:
  std::ostream& out_;
  char buf_[32];
};

Vec json_values(const json& j) {
  Vec out;
  out.reserve(j.size());
  for (const json& x : j) out.push_back(x.is_null() ? std::numeric_limits<double>::infinity() : x.get<double>());
  return out;
}

json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  return json::parse(in);
}

}  // namespace

void write_value_table_json(const ValueTable& vt, const std::string& path) {
  std::ofstream out;
  open_out(out, path);
  JsonArrayWriter w(out);
  out << "{\"t0\":" << vt.t0 << ",\"T\":" << vt.T << ",\"interpolated\":" << (vt.interpolated ? "true" : "false")
      << ",\"inputs\":" << grid_json(vt.inputs).dump() << ",\"stages\":[";
  for (int t = vt.t0; t <= vt.T; ++t) {
    if (t > vt.t0) out << ',';
    out << "{\"t\":" << t << ",\"grid\":" << grid_json(vt.grid(t)).dump() << ",\"values\":";
    w.values(vt.layer(t));
    if (t < vt.T) {
      out << ",\"argmin\":";
      w.integers(vt.argmin[static_cast<std::size_t>(t - vt.t0)]);
    }
    out << '}';
  }
  out << "]}\n";
}

ValueTable read_value_table_json(const std::string& path) {
  json j = load(path);
  ValueTable vt;
  vt.t0 = j.at("t0").get<int>();
  vt.T = j.at("T").get<int>();
  vt.interpolated = j.at("interpolated").get<bool>();
  vt.inputs = json_grid(j.at("inputs"));
  for (const json& s : j.at("stages")) {
    vt.grids.push_back(json_grid(s.at("grid")));
    vt.values.push_back(json_values(s.at("values")));
    if (s.contains("argmin")) vt.argmin.push_back(s.at("argmin").get<std::vector<std::int32_t>>());
  }
  return vt;
}

void write_policy_json(const TabularPolicy& policy, const std::string& path) {
  std::ofstream out;
  open_out(out, path);
  JsonArrayWriter w(out);
  out << "{\"t0\":" << policy.t0 << ",\"T\":" << policy.T << ",\"inputs\":" << grid_json(policy.inputs).dump()
      << ",\"stages\":[";
  for (int t = policy.t0; t < policy.T; ++t) {
    if (t > policy.t0) out << ',';
    out << "{\"t\":" << t << ",\"grid\":" << grid_json(policy.grid(t)).dump() << ",\"index\":";
    w.integers(policy.index[static_cast<std::size_t>(t - policy.t0)]);
    out << '}';
  }
  out << "]}\n";
}

TabularPolicy read_policy_json(const std::string& path) {
  json j = load(path);
  TabularPolicy p;
  p.t0 = j.at("t0").get<int>();
  p.T = j.at("T").get<int>();
  p.inputs = json_grid(j.at("inputs"));
  for (const json& s : j.at("stages")) {
    p.grids.push_back(json_grid(s.at("grid")));
    p.index.push_back(s.at("index").get<std::vector<std::int32_t>>());
  }
  return p;
}

void write_trajectory_csv(const Trajectory& tr, const std::string& path, const std::vector<std::string>& state_names) {
  std::ofstream out;
  open_out(out, path);
  const std::size_t n = tr.states.empty() ? 0 : tr.states.front().size();
  const std::size_t m = tr.inputs.empty() ? 0 : tr.inputs.front().size();
  out << 't';
  for (std::size_t i = 0; i < n; ++i) out << ',' << (i < state_names.size() ? state_names[i] : "x" + std::to_string(i));
  for (std::size_t i = 0; i < m; ++i) out << ",u" << i;
  out << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    out << tr.t0 + static_cast<int>(k);
    for (double v : tr.states[k]) out << ',' << v;
    for (std::size_t i = 0; i < m; ++i) {
      out << ',';
      if (k < tr.inputs.size()) out << tr.inputs[k][i];
    }
    out << '\n';
  }
}

std::string timestamp_line() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << "# generated " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace fsdp
