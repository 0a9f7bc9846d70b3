#pragma once

// Procedural corridor-navigation tasks.
//
// Geometry uses screen coordinates: y points down and headings grow
// clockwise, so a left turn decreases the heading. A signed lateral offset is
// positive to the right of the centerline.
//
// Actions: 0 hard-left, 1 left, 2 straight, 3 right, 4 hard-right.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "iwil/encoder.hpp"
#include "iwil/policy.hpp"
#include "iwil/rng.hpp"

namespace iwil {

inline constexpr std::size_t kNumActions = 5;

struct EnvConfig {
  std::size_t dim = 12;              // raw/encoded observation length (>= 3)
  std::size_t episode_len = 100;     // T
  double override_threshold = 0.3;   // lateral deviation / track_width
  double track_width = 2.0;
  double speed = 0.5;                // distance per step
  std::array<double, kNumActions> yaw_rates = {-0.30, -0.12, 0.0, 0.12, 0.30};
  double segment_length = 4.0;
  double max_turn = 0.45;            // per-waypoint heading change bound (rad)
  double lookahead = 2.0;            // expert look-ahead distance
  double ray_range = 5.0;
  double lateral_unit = 0.15;        // raw lateral offset is reported in these units
  double heading_unit = 0.1;         // raw heading error is reported in these units (rad)
  double theme_shift = 1.0;
  double theme_noise = 0.2;
  double start_jitter = 0.15;        // max initial lateral offset; heading jitter is half of it (rad)

  /// Throws ConfigError when the configuration cannot produce a task.
  void validate() const;

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Piecewise-linear centerline.
struct Track {
  std::vector<Vec2> waypoints;
  std::vector<double> arc;       // cumulative arc length at each waypoint
  std::vector<double> headings;  // direction of each segment

  double length() const { return arc.back(); }
  std::size_t segments() const { return waypoints.size() - 1; }
  Vec2 point_at(double progress) const;

  friend bool operator==(const Track&, const Track&) = default;
};

struct TaskSpec {
  std::uint64_t task_seed = 0;
  int task_id = 0;
  Theme theme;
  Track track;
  EnvConfig env;

  std::size_t episode_len() const { return env.episode_len; }
  double override_threshold() const { return env.override_threshold; }

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct AgentState {
  Vec2 position;
  double heading = 0.0;   // [-pi, pi)
  double progress = 0.0;  // arc length along the centerline
};

/// Where the agent sits relative to the centerline.
struct TrackFrame {
  double progress = 0.0;
  double lateral = 0.0;        // signed, positive to the right
  double heading_error = 0.0;  // agent heading minus segment heading, wrapped
};

struct RolloutLog {
  int task_id = 0;
  std::vector<Sample> samples;  // empty unless expert labelling was requested
  std::vector<int> labels;      // expert action at every step
  std::vector<int> agent_actions;
  std::vector<int> overrides;   // steps at which the expert took over

  std::size_t steps() const { return agent_actions.size(); }
  double accuracy() const;

  friend bool operator==(const RolloutLog&, const RolloutLog&) = default;
};

double wrap_angle(double a);

TaskSpec make_task(std::uint64_t task_seed, const EnvConfig& env, int task_id = 0);

/// Agent placed on the start of the centerline, aligned with the first
/// segment, offset by up to start_jitter (lateral) and start_jitter/2 (heading).
AgentState start_state(const TaskSpec& task, Rng& rng);

TrackFrame locate(const Track& track, Vec2 position, double heading, double progress_hint);

/// Raw observation: lateral offset / lateral_unit, heading error / heading_unit,
/// then dim-2 ray distances to the corridor wall as fractions of ray_range, at
/// angles spread evenly over [-pi/2, pi/2] from the heading.
std::vector<double> observe(const TaskSpec& task, const AgentState& agent);

/// Linearized pure pursuit: target yaw rate
///   (2 v / L) * alpha,  alpha = -(heading_error + lateral / L)
/// snapped to the nearest available yaw rate (lowest index on ties).
int expert_action(const TaskSpec& task, const AgentState& agent);

/// Unicycle update with the yaw rate of `action`, then re-projection onto the track.
AgentState step_dynamics(const TaskSpec& task, const AgentState& agent, int action);

/// Linear policy parameters that reproduce expert_action exactly on
/// noise-free encoded states of `task` (up to rounding at bin boundaries).
PolicyParams expert_policy_params(const TaskSpec& task);

/// Decides the agent's action from the encoded state.
class ActionSource {
 public:
  virtual ~ActionSource() = default;
  virtual int act(const AgentState& agent, std::span<const double> state) const = 0;
};

/// Acts exactly as the scripted expert would.
class ExpertPolicy final : public ActionSource {
 public:
  explicit ExpertPolicy(const TaskSpec& task) : task_(&task) {}
  int act(const AgentState& agent, std::span<const double>) const override { return expert_action(*task_, agent); }

 private:
  const TaskSpec* task_;
};

class LinearPolicy final : public ActionSource {
 public:
  explicit LinearPolicy(const PolicyParams& params) : params_(&params) {}
  int act(const AgentState&, std::span<const double> state) const override;

 private:
  const PolicyParams* params_;
};

/// Runs one episode with DAgger labelling. The agent acts through `policy`;
/// each step the expert labels the visited state. When the lateral deviation
/// exceeds override_threshold the expert takes control (an override is
/// logged) until the deviation drops below half the threshold.
RolloutLog rollout(const ActionSource& policy, const TaskSpec& task, bool expert_labeling, Rng& rng);
RolloutLog rollout(const PolicyParams& params, const TaskSpec& task, bool expert_labeling, Rng& rng);

/// Relabels exactly floor(fraction * N) samples, chosen uniformly without
/// replacement, with a label drawn uniformly from the other actions.
std::vector<Sample> corrupt_labels(std::vector<Sample> samples, double fraction, Rng& rng,
                                   std::size_t num_actions = kNumActions);

}  // namespace iwil
