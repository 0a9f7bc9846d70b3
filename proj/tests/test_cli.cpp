#include <cmath>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "iwil/io.hpp"

using namespace iwil;
using namespace iwil::testing;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// A run small enough for unit tests.
// The subcommand's own arguments come after the defaults, so they win.
std::vector<std::string> small(std::vector<std::string> cmd, const std::filesystem::path& dir) {
  std::vector<std::string> args{cmd.front(), "--tau", "20", "--tau-hat", "5", "--episode-len", "30",
                                "--n-train-tasks", "2", "--test-trials", "2", "--eval-trials", "1", "--seed", "3"};
  args.insert(args.end(), cmd.begin() + 1, cmd.end());
  args.emplace_back("--out-dir");
  args.push_back(dir.string());
  return args;
}

std::size_t count_corrupted(const std::filesystem::path& weights_csv) {
  std::ifstream in(weights_csv);
  std::string line;
  std::getline(in, line);
  std::size_t ones = 0;
  while (std::getline(in, line)) ones += line.back() == '1' ? 1 : 0;
  return ones;
}

}  // namespace

TEST_CASE("train then adapt twice gives byte-identical outputs") {
  const auto a = scratch_dir("cli_a");
  const auto b = scratch_dir("cli_b");
  for (const auto& dir : {a, b}) {
    REQUIRE(run(small({"train"}, dir)).code == 0);
    const Result r = run(small({"adapt", "--baselines"}, dir));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("ours:") != std::string::npos);
  }
  for (const char* f : {"dataset.csv", "params_base.bin", "metrics_ours.csv", "metrics_dagger.csv",
                        "metrics_finetune.csv", "weights.csv", "params_ours.bin"}) {
    CAPTURE(f);
    CHECK(std::filesystem::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "metrics_ours.csv").rfind("method,trial,timestep,overrides_cum,accuracy\n", 0) == 0);
  CHECK(slurp(a / "weights.csv").rfind("iter,sample_index,logit,weight,corrupted\n", 0) == 0);

  REQUIRE(run(small({"dump-weights"}, a)).code == 0);
  CHECK(slurp(a / "weights_colormap.csv").rfind("task_id,trajectory,w_0,", 0) == 0);
}

TEST_CASE("corrupt-exp marks exactly floor(N/2) samples") {
  const auto dir = scratch_dir("cli_corrupt");
  const Result r = run(small({"corrupt-exp"}, dir));
  REQUIRE(r.code == 0);
  const Dataset data = read_dataset_csv(dir / "dataset.csv");
  const std::size_t n = data.size();
  const auto trace = read_weights_csv(dir / "weights.csv");
  REQUIRE(trace.size() == 2);
  CHECK(count_corrupted(dir / "weights.csv") == 2 * (n / 2));
  std::vector<bool> flags;
  read_weights_csv(dir / "weights.csv", &flags);
  CHECK(static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true)) == n / 2);
}

TEST_CASE("eval of the expert's linear form scores 1.0 with no overrides") {
  const auto dir = scratch_dir("cli_eval");
  Result r = run(small({"eval", "--expert", "--theme-noise", "0", "--eval-trials", "3"}, dir));
  REQUIRE(r.code == 0);
  r = run(small({"eval", "--params", (dir / "params_expert.bin").string(), "--name", "check", "--theme-noise", "0",
                 "--eval-trials", "3"},
                dir));
  REQUIRE(r.code == 0);
  std::ifstream in(dir / "metrics_check.csv");
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.rfind(',')) == ",1");
    std::stringstream ss(line);
    std::string method, trial, step, overrides;
    std::getline(ss, method, ',');
    std::getline(ss, trial, ',');
    std::getline(ss, step, ',');
    std::getline(ss, overrides, ',');
    CHECK(overrides == "0");
  }
  CHECK(rows == 3 * 30);
}

TEST_CASE("exit codes") {
  const auto dir = scratch_dir("cli_codes");
  CHECK(run({}).code == 2);
  CHECK(run({"train", "--bogus", "1"}).code == 2);
  CHECK(run({"train", "--config", (dir / "missing.cfg").string()}).code == 2);
  CHECK(run(small({"train", "--K", "0"}, dir)).code == 2);
  CHECK(run(small({"train", "--gamma", "0"}, dir)).code == 2);
  CHECK(run(small({"train", "--tau", "abc"}, dir)).code == 2);
  CHECK(run(small({"train", "--tau", "5", "--tau", "abc"}, dir)).code == 2);
  {
    std::ofstream(dir / "bad.cfg") << "gamma=0.05\nwhat=1\n";
    const Result r = run(small({"train", "--config", (dir / "bad.cfg").string()}, dir));
    CHECK(r.code == 2);
    CHECK(r.err.find("what") != std::string::npos);
  }
  std::ofstream(dir / "blocker") << "x";
  CHECK(run(small({"train"}, dir / "blocker" / "out")).code == 3);
  CHECK(run(small({"adapt"}, dir / "empty")).code == 3);
  CHECK(run(small({"eval"}, dir)).code == 2);

  REQUIRE(run(small({"train"}, dir / "run")).code == 0);
  CHECK(run(small({"adapt", "--d", "8"}, dir / "run")).code == 4);
  CHECK(run(small({"eval", "--params", (dir / "run" / "params_base.bin").string(), "--d", "9"}, dir)).code == 4);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config file and flag precedence through the command line") {
  const auto dir = scratch_dir("cli_cfg");
  std::ofstream(dir / "run.cfg") << "tau=1\nseed=9\n";
  const auto a = dir / "a";
  const auto b = dir / "b";
  REQUIRE(run(small({"train", "--config", (dir / "run.cfg").string()}, a)).code == 0);
  REQUIRE(run(small({"train"}, b)).code == 0);
  CHECK(slurp(a / "params_base.bin") == slurp(b / "params_base.bin"));
  std::ofstream(dir / "alpha.cfg") << "alpha=0.02\n";
  REQUIRE(run(small({"train", "--config", (dir / "alpha.cfg").string()}, dir / "c")).code == 0);
  CHECK(slurp(dir / "c" / "params_base.bin") != slurp(b / "params_base.bin"));
}
