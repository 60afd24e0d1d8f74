#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fsdp/errors.hpp"
#include "fsdp/fixtures.hpp"
#include "fsdp/io.hpp"

using namespace fsdp;

namespace {

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("fsdp_io_" + name)).string();
}

}  // namespace

TEST(Io, ValueTableRoundTripKeepsInfinities) {
  AugmentedSpec aug = fixtures::counterexample1_augmented(1.0);
  StageGrids g = make_stage_grids(aug.spec.state_boxes, 0, Box({1.0}, {1.0}), {2}, {2});
  SolveOptions prune;
  prune.on_empty = EmptySetPolicy::kPrune;
  ValueTable vt = solve_bellman(discretize(aug.spec, g), prune);
  const std::string f = temp_file("vt.json");
  write_value_table_json(vt, f);
  ValueTable back = read_value_table_json(f);
  EXPECT_EQ(back.t0, vt.t0);
  EXPECT_EQ(back.T, vt.T);
  EXPECT_EQ(back.values, vt.values);
  EXPECT_EQ(back.argmin, vt.argmin);
  EXPECT_EQ(back.interpolated, vt.interpolated);
  bool has_inf = false;
  for (const Vec& layer : back.values) {
    for (double v : layer) has_inf = has_inf || std::isinf(v);
  }
  EXPECT_TRUE(has_inf);
  for (int t = 0; t <= 3; ++t) EXPECT_EQ(back.grid(t).size(), vt.grid(t).size());
  std::remove(f.c_str());
}

TEST(Io, PolicyRoundTrip) {
  AugmentedSpec aug = fixtures::duan_augmented();
  PipelineResult r = solve_pipeline(aug.spec, fixtures::duan_pipeline_options(8));
  const std::string f = temp_file("policy.json");
  write_policy_json(r.policy, f);
  TabularPolicy back = read_policy_json(f);
  EXPECT_EQ(back.index, r.policy.index);
  EXPECT_EQ(back.inputs.size(), r.policy.inputs.size());
  for (int t = 0; t < 3; ++t) EXPECT_EQ(back.grid(t).axes().size(), r.policy.grid(t).axes().size());
  std::remove(f.c_str());
}

TEST(Io, CsvReadingAndTrajectoryWriting) {
  const std::string f = temp_file("table.csv");
  {
    std::ofstream out(f);
    out << "# comment\na,b\n1,2\n\n3,\n";
  }
  CsvTable t = read_csv(f);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_EQ(t.rows[0][1], 2.0);
  EXPECT_TRUE(std::isnan(t.rows[1][1]));
  EXPECT_THROW(t.column("c"), InvalidArgument);
  ProblemSpec spec = fixtures::counterexample1();
  Trajectory tr = rollout_open_loop(spec, {{1.0}, {-1.0}, {1.0}});
  write_trajectory_csv(tr, f, {"x"});
  CsvTable back = read_csv(f);
  EXPECT_EQ(back.header, (std::vector<std::string>{"t", "x", "u0"}));
  ASSERT_EQ(back.rows.size(), 4u);
  EXPECT_EQ(back.rows[1][2], -1.0);
  EXPECT_TRUE(std::isnan(back.rows[3][2]));
  std::remove(f.c_str());
  EXPECT_THROW(read_csv("/nonexistent/file.csv"), Error);
}

TEST(Io, TimestampLineFormat) {
  std::string line = timestamp_line();
  EXPECT_EQ(line.rfind("# generated ", 0), 0u);
  EXPECT_EQ(line.back(), 'Z');
  EXPECT_EQ(line.size(), std::string("# generated 2024-01-01T00:00:00Z").size());
}
