#include "iwil/envs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "iwil/error.hpp"

namespace iwil {

void EnvConfig::validate() const {
  if (dim < 3) throw ConfigError("d must be at least 3 (lateral offset, heading error, one ray)");
  if (episode_len == 0) throw ConfigError("episode_len must be positive");
  if (!(override_threshold > 0.0)) throw ConfigError("override_threshold must be positive");
  if (!(track_width > 0.0) || !(speed > 0.0) || !(segment_length > 0.0) || !(lookahead > 0.0) ||
      !(ray_range > 0.0) || !(lateral_unit > 0.0) || !(heading_unit > 0.0))
    throw ConfigError("track geometry constants must be positive");
  if (!(max_turn >= 0.0) || !(start_jitter >= 0.0)) throw ConfigError("max_turn and start_jitter must be nonnegative");
  if (!(theme_shift >= 0.0) || !(theme_noise >= 0.0)) throw ConfigError("theme_shift and theme_noise must be nonnegative");
}

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

Vec2 Track::point_at(double progress) const {
  progress = std::clamp(progress, 0.0, length());
  const auto it = std::upper_bound(arc.begin(), arc.end(), progress);
  std::size_t i = it == arc.begin() ? 0 : static_cast<std::size_t>(it - arc.begin()) - 1;
  i = std::min(i, segments() - 1);
  const double t = progress - arc[i];
  return {waypoints[i].x + t * std::cos(headings[i]), waypoints[i].y + t * std::sin(headings[i])};
}

namespace {

struct Nearest {
  std::size_t segment = 0;
  double along = 0.0;  // distance from the segment start
  double distance = std::numeric_limits<double>::infinity();
  Vec2 point;
};

// Closest point over the segments overlapping [lo, hi] in arc length.
// Later segments win ties so that a vertex belongs to the outgoing segment.
Nearest nearest_point(const Track& track, Vec2 p, double lo, double hi) {
  Nearest best;
  for (std::size_t i = 0; i < track.segments(); ++i) {
    if (track.arc[i + 1] < lo || track.arc[i] > hi) continue;
    const Vec2 a = track.waypoints[i];
    const double len = track.arc[i + 1] - track.arc[i];
    const double ux = std::cos(track.headings[i]);
    const double uy = std::sin(track.headings[i]);
    const double t = std::clamp((p.x - a.x) * ux + (p.y - a.y) * uy, 0.0, len);
    const Vec2 q{a.x + t * ux, a.y + t * uy};
    const double dist = std::hypot(p.x - q.x, p.y - q.y);
    if (dist <= best.distance) best = {i, t, dist, q};
  }
  return best;
}

double search_radius(const Track& track, double ray_range) {
  return ray_range + 2.0 * (track.length() / static_cast<double>(track.segments()));
}

double ray_distance(const TaskSpec& task, const AgentState& agent, double angle) {
  const auto& env = task.env;
  const double half_width = 0.5 * env.track_width;
  const double radius = search_radius(task.track, env.ray_range);
  const double lo = agent.progress - radius;
  const double hi = agent.progress + radius;
  const double dx = std::cos(agent.heading + angle);
  const double dy = std::sin(agent.heading + angle);
  double t = 0.0;
  // Sphere tracing: the distance to the centerline is 1-Lipschitz, so the
  // free margin is a safe step.
  for (int it = 0; it < 128; ++it) {
    const Vec2 p{agent.position.x + t * dx, agent.position.y + t * dy};
    const double margin = half_width - nearest_point(task.track, p, lo, hi).distance;
    if (margin <= 1e-6) return t;
    t += std::max(margin, 1e-4);
    if (t >= env.ray_range) return env.ray_range;
  }
  return std::min(t, env.ray_range);
}

}  // namespace

TaskSpec make_task(std::uint64_t task_seed, const EnvConfig& env, int task_id) {
  env.validate();
  Rng rng = make_rng(task_seed, {tag(Stream::kTrack)});
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  const double needed = 1.2 * env.speed * static_cast<double>(env.episode_len) + 2.0 * env.ray_range +
                        env.lookahead + 2.0 * env.track_width;
  const auto segments = static_cast<std::size_t>(std::ceil(needed / env.segment_length)) + 2;

  Track track;
  const double base_heading = std::numbers::pi * uniform(rng);
  double heading = base_heading;
  Vec2 p{0.0, 0.0};
  track.waypoints.push_back(p);
  track.arc.push_back(0.0);
  for (std::size_t i = 0; i < segments; ++i) {
    if (i > 0) {
      // Mean-reverting turns keep the corridor from curling back on itself.
      const double turn = -0.3 * wrap_angle(heading - base_heading) + env.max_turn * uniform(rng);
      heading = wrap_angle(heading + std::clamp(turn, -env.max_turn, env.max_turn));
    }
    p = {p.x + env.segment_length * std::cos(heading), p.y + env.segment_length * std::sin(heading)};
    track.waypoints.push_back(p);
    track.headings.push_back(heading);
    track.arc.push_back(track.arc.back() + env.segment_length);
  }

  TaskSpec task;
  task.task_seed = task_seed;
  task.task_id = task_id;
  task.theme = Theme::from_seed(derive_seed(task_seed, {tag(Stream::kTask)}), env.dim, env.theme_shift,
                                env.theme_noise);
  task.track = std::move(track);
  task.env = env;
  return task;
}

AgentState start_state(const TaskSpec& task, Rng& rng) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const double lateral = task.env.start_jitter * uniform(rng);
  const double heading_jitter = 0.5 * task.env.start_jitter * uniform(rng);
  const double h = task.track.headings.front();
  AgentState agent;
  // Start slightly down the track so the first projection is not clamped.
  const Vec2 c = task.track.point_at(0.5 * task.env.segment_length);
  agent.position = {c.x - lateral * std::sin(h), c.y + lateral * std::cos(h)};
  agent.heading = wrap_angle(h + heading_jitter);
  agent.progress = locate(task.track, agent.position, agent.heading, 0.5 * task.env.segment_length).progress;
  return agent;
}

TrackFrame locate(const Track& track, Vec2 position, double heading, double progress_hint) {
  const double seg = track.length() / static_cast<double>(track.segments());
  const Nearest n = nearest_point(track, position, progress_hint - 2.0 * seg, progress_hint + 2.0 * seg);
  const double h = track.headings[n.segment];
  TrackFrame f;
  f.progress = track.arc[n.segment] + n.along;
  // Right-hand normal in screen coordinates is (-sin h, cos h).
  f.lateral = (position.x - n.point.x) * -std::sin(h) + (position.y - n.point.y) * std::cos(h);
  f.heading_error = wrap_angle(heading - h);
  return f;
}

std::vector<double> observe(const TaskSpec& task, const AgentState& agent) {
  const TrackFrame f = locate(task.track, agent.position, agent.heading, agent.progress);
  const std::size_t rays = task.env.dim - 2;
  std::vector<double> raw(task.env.dim);
  raw[0] = f.lateral / task.env.lateral_unit;
  raw[1] = f.heading_error / task.env.heading_unit;
  for (std::size_t i = 0; i < rays; ++i) {
    const double angle =
        rays == 1 ? 0.0 : -0.5 * std::numbers::pi + std::numbers::pi * static_cast<double>(i) / (rays - 1.0);
    raw[2 + i] = ray_distance(task, agent, angle) / task.env.ray_range;
  }
  return raw;
}

namespace {

// Nearest-yaw-rate snapping written as an argmax of affine scores, which is
// what makes the expert representable by the linear policy.
int snap_yaw_rate(const EnvConfig& env, double target) {
  std::array<double, kNumActions> score{};
  for (std::size_t k = 0; k < kNumActions; ++k) score[k] = 2.0 * env.yaw_rates[k] * target - env.yaw_rates[k] * env.yaw_rates[k];
  return argmax(score);
}

// Coefficients of the target yaw rate on (lateral, heading error) in track units.
std::array<double, 2> yaw_gains(const EnvConfig& env) {
  const double gain = 2.0 * env.speed / env.lookahead;
  return {-gain / env.lookahead, -gain};
}

}  // namespace

int expert_action(const TaskSpec& task, const AgentState& agent) {
  const TrackFrame f = locate(task.track, agent.position, agent.heading, agent.progress);
  const auto c = yaw_gains(task.env);
  return snap_yaw_rate(task.env, c[0] * f.lateral + c[1] * f.heading_error);
}

AgentState step_dynamics(const TaskSpec& task, const AgentState& agent, int action) {
  if (action < 0 || static_cast<std::size_t>(action) >= kNumActions)
    throw DimensionError("action index out of range");
  AgentState next;
  next.heading = wrap_angle(agent.heading + task.env.yaw_rates[static_cast<std::size_t>(action)]);
  next.position = {agent.position.x + task.env.speed * std::cos(next.heading),
                   agent.position.y + task.env.speed * std::sin(next.heading)};
  next.progress = locate(task.track, next.position, next.heading, agent.progress).progress;
  return next;
}

PolicyParams expert_policy_params(const TaskSpec& task) {
  const std::size_t d = task.env.dim;
  const auto gains = yaw_gains(task.env);
  std::vector<double> c(d, 0.0);
  c[0] = gains[0] * task.env.lateral_unit;
  c[1] = gains[1] * task.env.heading_unit;
  const auto inv = task.theme.inverse_mix();
  // Target yaw rate as a function of the encoded state: c^T M^{-1} s.
  std::vector<double> row(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) row[j] += c[i] * inv[i * d + j];
  PolicyParams p(kNumActions, d);
  for (std::size_t k = 0; k < kNumActions; ++k) {
    const double w = task.env.yaw_rates[k];
    for (std::size_t j = 0; j < d; ++j) p.weight(k, j) = 2.0 * w * row[j];
    p.bias(k) = -w * w;
  }
  return p;
}

int LinearPolicy::act(const AgentState&, std::span<const double> state) const { return predict(*params_, state); }

double RolloutLog::accuracy() const {
  if (agent_actions.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < agent_actions.size(); ++i) hits += agent_actions[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(agent_actions.size());
}

RolloutLog rollout(const ActionSource& policy, const TaskSpec& task, bool expert_labeling, Rng& rng) {
  const ThemeEncoder encoder(task.theme);
  const double threshold = task.env.override_threshold;
  RolloutLog log;
  log.task_id = task.task_id;
  AgentState agent = start_state(task, rng);
  bool expert_in_control = false;
  for (std::size_t step = 0; step < task.env.episode_len; ++step) {
    const auto raw = observe(task, agent);
    auto state = encoder.encode(raw, rng);
    const int label = expert_action(task, agent);
    const double deviation = std::abs(raw[0]) * task.env.lateral_unit / task.env.track_width;
    if (!expert_in_control && deviation > threshold) {
      expert_in_control = true;
      log.overrides.push_back(static_cast<int>(step));
    } else if (expert_in_control && deviation < 0.5 * threshold) {
      expert_in_control = false;
    }
    const int action = policy.act(agent, state);
    log.labels.push_back(label);
    log.agent_actions.push_back(action);
    if (expert_labeling)
      log.samples.push_back({std::move(state), label, task.task_id, static_cast<int>(step), false});
    agent = step_dynamics(task, agent, expert_in_control ? label : action);
  }
  return log;
}

RolloutLog rollout(const PolicyParams& params, const TaskSpec& task, bool expert_labeling, Rng& rng) {
  expect_length("policy input vs encoder output", task.env.dim, params.dim());
  if (params.actions() != kNumActions) throw DimensionError("policy action count", kNumActions, params.actions());
  return rollout(LinearPolicy(params), task, expert_labeling, rng);
}

std::vector<Sample> corrupt_labels(std::vector<Sample> samples, double fraction, Rng& rng,
                                   std::size_t num_actions) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("corruption fraction must lie in [0, 1]");
  if (num_actions < 2) throw ConfigError("label corruption needs at least two actions");
  const std::size_t n = samples.size();
  const auto count = std::min(n, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::uniform_int_distribution<int> wrong(0, static_cast<int>(num_actions) - 2);
  for (std::size_t i = 0; i < count; ++i) {
    Sample& s = samples[idx[i]];
    const int r = wrong(rng);
    s.action = r < s.action ? r : r + 1;
    s.corrupted = true;
  }
  return samples;
}

}  // namespace iwil
