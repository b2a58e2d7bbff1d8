#ifndef VRDOC_GAZE_HPP_
#define VRDOC_GAZE_HPP_

// Gaze sample ingestion: velocity-threshold saccade detection and a
// recency-weighted mean over the current fixation window.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrdoc/geometry.hpp"

namespace vrdoc {

/// Raised when sample timestamps are not strictly increasing.
class StreamOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a function's documented precondition is violated.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ButtonState {
  bool trigger_pressed = false;
  bool grab_pressed = false;
  double trackpad_dy = 0.0;  ///< in [-1, 1]
  bool lens_toggle_pressed = false;

  friend bool operator==(const ButtonState&, const ButtonState&) = default;
};

/// One timestamped tracker sample.
///
/// `ray` is the head-anchored gaze ray; its origin doubles as the head
/// position. `head_orientation` is present when the source tracks the head,
/// `controller` when a hand controller ray is available.
struct GazeSample {
  double t = 0.0;
  Ray ray;
  bool valid = true;
  ButtonState buttons;
  std::optional<Orientation> head_orientation;
  std::optional<Ray> controller;
};

/// Head pose carried by a sample. Without a tracked orientation the head is
/// assumed to face along the gaze ray.
inline Pose head_pose(const GazeSample& s) {
  if (s.head_orientation) return {s.ray.origin, *s.head_orientation};
  if (s.valid && is_unit(s.ray.direction, 1e-6)) return {s.ray.origin, Orientation::look_rotation(s.ray.direction)};
  return {s.ray.origin, {}};
}

enum class Phase { Fixation, Saccade, Invalid };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Fixation: return "fixation";
    case Phase::Saccade: return "saccade";
    case Phase::Invalid: return "invalid";
  }
  return "?";
}

struct FixationEstimate {
  double t = 0.0;
  Phase phase = Phase::Invalid;
  Vec3 origin;                  ///< origin of the latest sample's ray
  Vec3 point{0.0, 0.0, -1.0};  ///< smoothed gaze direction
  std::vector<double> window;   ///< timestamps contributing to `point`
  double fixation_start_t = 0.0;

  Ray ray() const { return {origin, point}; }
};

struct PipelineConfig {
  double saccade_velocity_deg_s = 30.0;
  double fixation_window_s = 0.25;
  double smoothing_lambda_per_s = 0.5;
};

struct WindowSample {
  double t = 0.0;
  Vec3 direction;
};

/// Normalised sum of lambda^(t_last - t_i) * d_i over the window.
inline Vec3 smooth(std::span<const WindowSample> window, double lambda_per_s) {
  if (window.empty()) throw ContractViolation("smooth: empty fixation window");
  const double t_last = window.back().t;
  Vec3 acc;
  for (const auto& s : window) acc += s.direction * std::pow(lambda_per_s, t_last - s.t);
  const double n = norm(acc);
  // antipodal inputs cancel; fall back to the newest direction
  if (n < tol::kUnit) return window.back().direction;
  return acc / n;
}

/// Single-owner state of one gaze stream.
struct PipelineState {
  std::optional<double> last_t;
  std::optional<WindowSample> last_valid;  ///< previous valid sample
  std::vector<WindowSample> window;  ///< at most fixation_window_s of history
  FixationEstimate estimate;
};

/// Angular speed in deg/s between the previous valid sample and `sample`;
/// zero when there is no previous valid sample.
inline double angular_velocity(const PipelineState& state, const GazeSample& sample) {
  if (!state.last_valid) return 0.0;
  const double dt = sample.t - state.last_valid->t;
  if (dt <= 0.0) return std::numeric_limits<double>::infinity();
  return angular_distance(state.last_valid->direction, sample.ray.direction) / dt;
}

inline void check_order(const PipelineState& state, double t) {
  if (state.last_t && !(t > *state.last_t)) {
    throw StreamOrderError("gaze stream out of order: t=" + std::to_string(t) +
                           " after t=" + std::to_string(*state.last_t));
  }
}

inline Phase classify(const PipelineState& state, const GazeSample& sample, const PipelineConfig& cfg) {
  check_order(state, sample.t);
  if (!sample.valid) return Phase::Invalid;
  return angular_velocity(state, sample) > cfg.saccade_velocity_deg_s ? Phase::Saccade : Phase::Fixation;
}

/// Advances the stream by one sample and returns the new estimate.
inline const FixationEstimate& step_pipeline(PipelineState& state, const GazeSample& sample,
                                             const PipelineConfig& cfg) {
  const Phase phase = classify(state, sample, cfg);
  const Phase prev_phase = state.estimate.phase;
  FixationEstimate& est = state.estimate;
  est.t = sample.t;
  est.origin = sample.ray.origin;
  state.last_t = sample.t;

  if (phase != Phase::Fixation) {
    state.window.clear();
    est.window.clear();
    if (phase == Phase::Saccade) est.point = sample.ray.direction;
    est.phase = phase;
    if (sample.valid) state.last_valid = WindowSample{sample.t, sample.ray.direction};
    return est;
  }

  if (prev_phase != Phase::Fixation || state.window.empty()) {
    state.window.clear();
    est.fixation_start_t = sample.t;
  }
  state.window.push_back({sample.t, sample.ray.direction});
  const auto stale = std::find_if(state.window.begin(), state.window.end(), [&](const WindowSample& w) {
    return sample.t - w.t <= cfg.fixation_window_s;
  });
  state.window.erase(state.window.begin(), stale);

  est.phase = Phase::Fixation;
  est.point = smooth(state.window, cfg.smoothing_lambda_per_s);
  est.window.clear();
  for (const auto& w : state.window) est.window.push_back(w.t);
  state.last_valid = WindowSample{sample.t, sample.ray.direction};
  return est;
}

}  // namespace vrdoc

#endif  // VRDOC_GAZE_HPP_
