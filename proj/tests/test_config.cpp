#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "iwil/config.hpp"
#include "iwil/error.hpp"

using namespace iwil;
using namespace iwil::testing;

namespace {

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = scratch_dir("config") / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("empty file and no flags give the desk defaults") {
  const RunConfig c = resolve_config(read_config_file(write_file("empty.cfg", "")), {});
  CHECK(c.preset == Preset::kDesk);
  CHECK(c.train.alpha == 0.01);
  CHECK(c.train.beta == 0.01);
  CHECK(c.train.gamma == 0.05);
  CHECK(c.train.K == 10);
  CHECK(c.train.tau == 300);
  CHECK(c.train.tau_hat == 400);
  CHECK(c.train.n_train_tasks == 6);
  CHECK(c.train.trajectories_per_task == 4);
  CHECK(c.env.episode_len == 100);
  CHECK(c.actions == 5);
}

TEST_CASE("paper preset") {
  const RunConfig c = resolve_config({{"preset", "paper"}}, {});
  CHECK(c.train.tau == 3000);
  CHECK(c.train.tau_hat == 4000);
  CHECK(c.env.episode_len == 1000);
  CHECK(describe(c).find("preset=paper\n") != std::string::npos);
}

TEST_CASE("flags win over the file") {
  const auto file = read_config_file(write_file("g.cfg", "# comment\ngamma = 0.05\n\ntau=7\n"));
  const RunConfig c = resolve_config(file, {{"gamma", "0.1"}});
  CHECK(c.train.gamma == 0.1);
  CHECK(c.train.tau == 7);
  const RunConfig d = resolve_config({{"preset", "paper"}}, {{"preset", "desk"}});
  CHECK(d.preset == Preset::kDesk);
  CHECK(d.train.tau == 300);
}

TEST_CASE("file values override preset defaults") {
  const RunConfig c = resolve_config({{"preset", "paper"}, {"tau", "12"}}, {});
  CHECK(c.train.tau == 12);
  CHECK(c.train.tau_hat == 4000);
}

TEST_CASE("constraint violations are config errors") {
  CHECK_THROWS_AS(resolve_config({}, {{"K", "0"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config({}, {{"gamma", "0"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config({}, {{"alpha", "-1"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config({}, {{"A", "4"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config({}, {{"d", "2"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config({}, {{"corrupt_frac", "1.5"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config({}, {{"preset", "laptop"}}), ConfigError);
}

TEST_CASE("unknown keys and bad values name the key") {
  try {
    read_config_file(write_file("u.cfg", "gamma=0.1\nlearning_rate=3\n"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("learning_rate") != std::string::npos);
  }
  try {
    resolve_config({}, {{"tau", "12x"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("tau") != std::string::npos);
  }
  CHECK_THROWS_AS(read_config_file(write_file("m.cfg", "no equals sign\n")), ConfigError);
  CHECK_THROWS_AS(resolve_config({}, {{"bogus", "1"}}), ConfigError);
}

TEST_CASE("a missing config file is a config error") {
  CHECK_THROWS_AS(read_config_file("/nonexistent/iwil.cfg"), ConfigError);
}

TEST_CASE("describe round-trips through the parser") {
  RunConfig c = resolve_config({}, {{"beta", "0.125"}, {"seed", "42"}, {"theme_noise", "0.3"}});
  const auto path = write_file("dump.cfg", describe(c));
  const RunConfig d = resolve_config(read_config_file(path), {});
  CHECK(describe(d) == describe(c));
  CHECK(config_keys().size() == 20);
}
