#include <cmath>
#include <numbers>
#include <limits>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "iwil/dagger.hpp"
#include "iwil/envs.hpp"

using namespace iwil;
using namespace iwil::testing;

namespace {

// Uniformly random actions, for the chance-level check.
class RandomPolicy final : public ActionSource {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  int act(const AgentState&, std::span<const double>) const override { return pick_(rng_); }

 private:
  mutable Rng rng_;
  mutable std::uniform_int_distribution<int> pick_{0, kNumActions - 1};
};

}  // namespace

TEST_CASE("wrap_angle lands in [-pi, pi)") {
  for (double a : {-10.0, -std::numbers::pi, 0.0, 3.0, std::numbers::pi, 7.5, 100.0}) {
    const double w = wrap_angle(a);
    CHECK(w >= -std::numbers::pi);
    CHECK(w < std::numbers::pi);
    CHECK(std::abs(std::remainder(w - a, 2.0 * std::numbers::pi)) < 1e-9);
  }
}

TEST_CASE("make_task is deterministic and validates its config") {
  EnvConfig env;
  CHECK(make_task(7, env) == make_task(7, env));
  CHECK_FALSE(make_task(7, env) == make_task(8, env));
  env.dim = 2;
  CHECK_THROWS(make_task(7, env));
}

TEST_CASE("points on the centerline locate with zero lateral offset") {
  const TaskSpec task = make_task(3, EnvConfig{});
  for (double s = 1.0; s < 40.0; s += 1.7) {
    const Vec2 p = task.track.point_at(s);
    const TrackFrame f = locate(task.track, p, task.track.headings[0], s);
    CHECK(std::abs(f.lateral) < 1e-9);
    CHECK(f.progress == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("observe has the configured length and unit-scaled rays") {
  const TaskSpec task = make_task(4, EnvConfig{});
  Rng rng(1);
  const auto raw = observe(task, start_state(task, rng));
  REQUIRE(raw.size() == task.env.dim);
  for (std::size_t i = 2; i < raw.size(); ++i) {
    CHECK(raw[i] >= 0.0);
    CHECK(raw[i] <= 1.0 + 1e-12);
  }
}

TEST_CASE("expert drives without overrides and is self-consistent") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TaskSpec task = make_task(seed, EnvConfig{});
    Rng rng(seed);
    const RolloutLog log = rollout(ExpertPolicy(task), task, true, rng);
    CHECK(log.overrides.empty());
    CHECK(log.accuracy() == 1.0);
    CHECK(log.steps() == task.env.episode_len);
  }
}

TEST_CASE("expert_policy_params reproduces the expert on noise-free states") {
  EnvConfig env;
  env.theme_noise = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TaskSpec task = make_task(seed, env);
    const PolicyParams p = expert_policy_params(task);
    Rng rng(seed);
    const RolloutLog log = rollout(p, task, true, rng);
    CHECK(log.accuracy() == 1.0);
    CHECK(log.overrides.empty());
  }
}

TEST_CASE("random actions agree with the expert at chance level") {
  EnvConfig env;
  env.episode_len = 2000;
  const TaskSpec task = make_task(9, env);
  Rng rng(9);
  const RolloutLog log = rollout(RandomPolicy(5), task, false, rng);
  CHECK(log.samples.empty());
  CHECK(log.accuracy() > 0.1);
  CHECK(log.accuracy() < 0.45);
  CHECK_FALSE(log.overrides.empty());
}

TEST_CASE("override steps are strictly increasing") {
  const TaskSpec task = make_task(2, EnvConfig{});
  Rng rng(2);
  const RolloutLog log = rollout(PolicyParams(kNumActions, task.env.dim), task, false, rng);
  for (std::size_t i = 1; i < log.overrides.size(); ++i) CHECK(log.overrides[i] > log.overrides[i - 1]);
}

TEST_CASE("rollout rejects mismatched policies") {
  const TaskSpec task = make_task(2, EnvConfig{});
  Rng rng(2);
  CHECK_THROWS(rollout(PolicyParams(kNumActions, task.env.dim + 1), task, false, rng));
  CHECK_THROWS(rollout(PolicyParams(3, task.env.dim), task, false, rng));
}

TEST_CASE("corrupt_labels flips exactly floor(f N) labels to other actions") {
  Rng gen(41);
  for (double frac : {0.0, 0.1, 0.5, 0.33, 1.0}) {
    for (std::size_t n : {0UL, 1UL, 7UL, 400UL}) {
      const auto clean = random_samples(n, 3, kNumActions, gen);
      Rng rng(42);
      const auto dirty = corrupt_labels(clean, frac, rng);
      std::size_t flipped = 0;
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(dirty[i].state == clean[i].state);
        if (dirty[i].corrupted) {
          ++flipped;
          CHECK(dirty[i].action != clean[i].action);
          CHECK(dirty[i].action >= 0);
          CHECK(dirty[i].action < static_cast<int>(kNumActions));
        } else {
          CHECK(dirty[i].action == clean[i].action);
        }
      }
      CHECK(flipped == static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9)));
    }
  }
  Rng rng(1);
  CHECK_THROWS(corrupt_labels({}, 1.5, rng));
}

TEST_CASE("corrupted labels cover every wrong action") {
  Rng gen(43);
  auto samples = random_samples(2000, 2, kNumActions, gen);
  for (auto& s : samples) s.action = 2;
  Rng rng(44);
  const auto dirty = corrupt_labels(samples, 1.0, rng);
  std::set<int> seen;
  for (const auto& s : dirty) seen.insert(s.action);
  CHECK(seen == std::set<int>{0, 1, 3, 4});
}

namespace {

EnvConfig straight_env() {
  EnvConfig env;
  env.max_turn = 0.0;
  return env;
}

AgentState on_centerline(const TaskSpec& task, double progress, double heading_offset) {
  AgentState a;
  a.position = task.track.point_at(progress);
  a.heading = wrap_angle(task.track.headings.front() + heading_offset);
  a.progress = progress;
  return a;
}

class ConstantPolicy final : public ActionSource {
 public:
  explicit ConstantPolicy(int a) : a_(a) {}
  int act(const AgentState&, std::span<const double>) const override { return a_; }

 private:
  int a_;
};

}  // namespace

TEST_CASE("task examples") {
  EnvConfig env;
  env.dim = 8;
  const TaskSpec a = make_task(1, env);
  const TaskSpec b = make_task(2, env);
  CHECK(a.track.waypoints != b.track.waypoints);
  Rng rng(1);
  CHECK(observe(a, start_state(a, rng)).size() == 8);
  CHECK(a.track.waypoints.size() >= 2);
  for (std::size_t i = 1; i < a.track.waypoints.size(); ++i) CHECK_FALSE(a.track.waypoints[i] == a.track.waypoints[i - 1]);
  env.episode_len = 0;
  CHECK_THROWS(make_task(1, env));
}

TEST_CASE("expert examples on a straight corridor") {
  const TaskSpec task = make_task(3, straight_env());
  CHECK(expert_action(task, on_centerline(task, 10.0, 0.0)) == 2);
  // Heading is measured clockwise in screen coordinates; +90 degrees points
  // the agent at the right wall, so the expert steers left.
  const int a = expert_action(task, on_centerline(task, 10.0, 0.5 * std::numbers::pi));
  CHECK((a == 0 || a == 1));
}

TEST_CASE("always hard-left on a straight corridor triggers an override") {
  const TaskSpec task = make_task(4, straight_env());
  Rng rng(4);
  const RolloutLog log = rollout(ConstantPolicy(0), task, true, rng);
  CHECK_FALSE(log.overrides.empty());
  CHECK(log.samples.size() == log.steps());
  CHECK(log.steps() <= task.env.episode_len);
  for (int s : log.overrides) {
    CHECK(s >= 0);
    CHECK(s < static_cast<int>(task.env.episode_len));
  }
}

TEST_CASE("override count does not grow with the threshold") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    int previous = std::numeric_limits<int>::max();
    for (double threshold : {0.15, 0.2, 0.3, 0.4, 0.6}) {
      EnvConfig env;
      env.override_threshold = threshold;
      const TaskSpec task = make_task(seed, env);
      Rng rng(seed);
      const int count = static_cast<int>(rollout(ConstantPolicy(1), task, false, rng).overrides.size());
      CHECK(count <= previous);
      previous = count;
    }
  }
}

TEST_CASE("corruption examples") {
  Rng gen(45);
  const auto clean = random_samples(100, 3, kNumActions, gen);
  Rng r0(1);
  CHECK(corrupt_labels(clean, 0.0, r0) == clean);
  Rng r1(2), r2(2);
  const auto a = corrupt_labels(clean, 0.5, r1);
  CHECK(a == corrupt_labels(clean, 0.5, r2));
  CHECK(std::count_if(a.begin(), a.end(), [](const Sample& s) { return s.corrupted; }) == 50);
}

TEST_CASE("rollouts are deterministic") {
  const TaskSpec task = make_task(6, EnvConfig{});
  const PolicyParams p = expert_policy_params(task);
  Rng a(3), b(3);
  CHECK(rollout(p, task, true, a) == rollout(p, task, true, b));
}
