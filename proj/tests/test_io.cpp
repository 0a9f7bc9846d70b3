#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "iwil/error.hpp"
#include "iwil/io.hpp"

using namespace iwil;
using namespace iwil::testing;

TEST_CASE("dataset CSV round-trips bit-exactly") {
  Rng rng(51);
  const auto dir = scratch_dir("io_dataset");
  for (int trial = 0; trial < 20; ++trial) {
    auto data = random_samples(1 + trial * 7, 1 + trial % 6, kNumActions, rng);
    std::uniform_real_distribution<double> exponent(-300.0, 300.0);
    for (auto& s : data) {
      s.task_id = trial;
      s.corrupted = (s.step % 3) == 0;
      for (double& v : s.state) v *= std::pow(10.0, exponent(rng));
    }
    data.front().state.front() = std::numeric_limits<double>::denorm_min();
    write_dataset_csv(dir / "d.csv", data);
    CHECK(read_dataset_csv(dir / "d.csv") == data);
  }
}

TEST_CASE("dataset CSV header") {
  const auto dir = scratch_dir("io_header");
  write_dataset_csv(dir / "d.csv", {Sample{{1.5, -2.0}, 3, 7, 4, true}});
  CHECK(slurp(dir / "d.csv") == "task_id,step,s_0,s_1,action,corrupted\n7,4,1.5,-2,3,1\n");
}

TEST_CASE("malformed datasets are I/O errors") {
  const auto dir = scratch_dir("io_bad");
  CHECK_THROWS_AS(read_dataset_csv(dir / "missing.csv"), IoError);
  std::ofstream(dir / "a.csv") << "task_id,step,s_0,action,corrupted\n1,2,abc,0,0\n";
  CHECK_THROWS_AS(read_dataset_csv(dir / "a.csv"), IoError);
  std::ofstream(dir / "b.csv") << "task_id,step,s_0,action,corrupted\n1,2,0.5,0\n";
  CHECK_THROWS_AS(read_dataset_csv(dir / "b.csv"), IoError);
  std::ofstream(dir / "c.csv") << "x,y\n";
  CHECK_THROWS_AS(read_dataset_csv(dir / "c.csv"), IoError);
}

TEST_CASE("params file layout and round trip") {
  Rng rng(52);
  const auto dir = scratch_dir("io_params");
  const PolicyParams p(5, 3, random_vector(20, 1.0, rng));
  write_params(dir / "p.bin", p);
  const std::string bytes = slurp(dir / "p.bin");
  REQUIRE(bytes.size() == 12 + 20 * 8);
  std::int32_t header[3];
  std::memcpy(header, bytes.data(), 12);
  CHECK(header[0] == 5);
  CHECK(header[1] == 3);
  CHECK(header[2] == kParamsFormatVersion);
  double first = 0.0;
  std::memcpy(&first, bytes.data() + 12, 8);
  CHECK(first == p.flat()[0]);
  CHECK(read_params(dir / "p.bin") == p);

  std::ofstream(dir / "short.bin", std::ios::binary) << bytes.substr(0, 50);
  CHECK_THROWS_AS(read_params(dir / "short.bin"), IoError);
  std::ofstream(dir / "long.bin", std::ios::binary) << bytes << "x";
  CHECK_THROWS_AS(read_params(dir / "long.bin"), IoError);
  std::string wrong = bytes;
  wrong[8] = 9;
  std::ofstream(dir / "version.bin", std::ios::binary) << wrong;
  CHECK_THROWS_AS(read_params(dir / "version.bin"), IoError);
  CHECK_THROWS_AS(read_params(dir / "none.bin"), IoError);
}

TEST_CASE("metrics CSV: one row per step, cumulative overrides") {
  const auto dir = scratch_dir("io_metrics");
  TrialMetrics m;
  RolloutLog a;
  a.agent_actions = {0, 1, 2};
  a.labels = {0, 1, 1};
  a.overrides = {1};
  RolloutLog b;
  b.agent_actions = {3, 3};
  b.labels = {3, 3};
  b.overrides = {0, 1};
  m.trials = {a, b};
  write_metrics_csv(dir / "m.csv", "ours", m);
  const std::string text = slurp(dir / "m.csv");
  CHECK(text.rfind("method,trial,timestep,overrides_cum,accuracy\nours,1,0,0,0.6666666666666666\n", 0) == 0);
  CHECK(text.find("ours,1,1,1,") != std::string::npos);
  CHECK(text.find("ours,2,3,2,1\n") != std::string::npos);
  CHECK(text.find("ours,2,4,3,1\n") != std::string::npos);
}

TEST_CASE("weights CSV round trip and colormap layout") {
  const auto dir = scratch_dir("io_weights");
  Dataset data;
  for (int task = 0; task < 2; ++task)
    for (int traj = 0; traj < 2; ++traj)
      for (int step = 0; step < 3; ++step) data.push_back(Sample{{0.0}, 0, task, step, step == 1});
  std::vector<WeightSnapshot> trace;
  std::vector<double> logits(data.size());
  for (std::size_t i = 0; i < logits.size(); ++i) logits[i] = 0.1 * static_cast<double>(i);
  trace.push_back({5, WeightState::uniform(data.size())});
  trace.push_back({10, WeightState::from_logits(logits)});
  write_weights_csv(dir / "w.csv", trace, data);
  std::vector<bool> flags;
  const auto back = read_weights_csv(dir / "w.csv", &flags);
  REQUIRE(back.size() == 2);
  CHECK(back[0].iteration == 5);
  CHECK(back[1].weights == trace[1].weights);
  CHECK(flags.size() == data.size());
  CHECK(flags[1]);
  CHECK_FALSE(flags[0]);

  write_weight_colormap_csv(dir / "c.csv", trace[1].weights, data);
  std::ifstream in(dir / "c.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "task_id,trajectory,w_0,w_1,w_2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK_THROWS_AS(write_weights_csv(dir / "x.csv", trace, Dataset(3)), DimensionError);
}

TEST_CASE("ensure_writable_dir") {
  const auto dir = scratch_dir("io_dir");
  CHECK_NOTHROW(ensure_writable_dir(dir / "a" / "b"));
  std::ofstream(dir / "file") << "x";
  CHECK_THROWS_AS(ensure_writable_dir(dir / "file"), IoError);
  CHECK_THROWS_AS(ensure_writable_dir(dir / "file" / "sub"), IoError);
}
