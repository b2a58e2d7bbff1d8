#ifndef VRDOC_ENGINE_HPP_
#define VRDOC_ENGINE_HPP_

// The interaction state machines. One Engine owns one scene and consumes one
// stream of fixation estimates; step() is strictly sequential and
// deterministic.
//
//   VRDoc mode:    gaze highlight + trigger snap, overlap cycling, the gaze
//                  magnifier lens, dwell scroll buttons.
//   Baseline mode: controller raycast select, grab-follow, trackpad scroll.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <concepts>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "vrdoc/document.hpp"
#include "vrdoc/gaze.hpp"
#include "vrdoc/geometry.hpp"

namespace vrdoc {

enum class InteractionMode { VRDoc, Baseline };

inline const char* to_string(InteractionMode m) { return m == InteractionMode::VRDoc ? "vrdoc" : "baseline"; }

inline std::optional<InteractionMode> parse_mode(std::string_view s) {
  if (s == "vrdoc") return InteractionMode::VRDoc;
  if (s == "baseline") return InteractionMode::Baseline;
  return std::nullopt;
}

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EngineConfig {
  double snap_distance_m = 0.45;
  double lens_max_distance_m = 0.5;
  double lens_dwell_s = 1.5;
  double lens_magnification = 1.5;
  int lens_words_span = 4;
  int lens_lines_span = 3;
  double lens_move_epsilon_uv = 0.01;
  double scroll_dwell_s = 0.5;
  double scroll_button_strip_frac = 0.08;
  double saccade_velocity_deg_s = 30.0;
  double fixation_window_s = 0.25;
  double smoothing_lambda_per_s = 0.5;
  double sample_rate_hz = 120.0;
  double focus_hysteresis_s = 0.1;
  double cycle_dwell_s = 1.0;
  double baseline_lines_per_unit = 3.0;
  int chars_per_line = static_cast<int>(kCharsPerLine);
  int visible_lines = static_cast<int>(kVisibleLines);
  double line_spacing = kLineSpacing;
  InteractionMode mode = InteractionMode::VRDoc;

  PipelineConfig pipeline() const { return {saccade_velocity_deg_s, fixation_window_s, smoothing_lambda_per_s}; }

  /// Throws ConfigError naming the first field out of range.
  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
    };
    positive(snap_distance_m, "snap_distance_m");
    positive(lens_max_distance_m, "lens_max_distance_m");
    positive(lens_dwell_s, "lens_dwell_s");
    positive(lens_words_span, "lens_words_span");
    positive(lens_lines_span, "lens_lines_span");
    positive(scroll_dwell_s, "scroll_dwell_s");
    positive(saccade_velocity_deg_s, "saccade_velocity_deg_s");
    positive(fixation_window_s, "fixation_window_s");
    positive(smoothing_lambda_per_s, "smoothing_lambda_per_s");
    positive(sample_rate_hz, "sample_rate_hz");
    positive(focus_hysteresis_s, "focus_hysteresis_s");
    positive(cycle_dwell_s, "cycle_dwell_s");
    positive(baseline_lines_per_unit, "baseline_lines_per_unit");
    positive(chars_per_line, "chars_per_line");
    positive(visible_lines, "visible_lines");
    positive(line_spacing, "line_spacing");
    if (!(lens_magnification > 1.0)) throw ConfigError("lens_magnification must be > 1");
    if (lens_move_epsilon_uv < 0.0) throw ConfigError("lens_move_epsilon_uv must be >= 0");
    if (!(scroll_button_strip_frac >= 0.0 && scroll_button_strip_frac < 0.5)) {
      throw ConfigError("scroll_button_strip_frac must be in [0, 0.5)");
    }
  }
};

/// Calls f(name, member) for every numeric EngineConfig field. `mode` is
/// handled separately.
template <class Config, class F>
  requires std::same_as<std::remove_const_t<Config>, EngineConfig>
void for_each_numeric_field(Config& c, F&& f) {
  f("snap_distance_m", c.snap_distance_m);
  f("lens_max_distance_m", c.lens_max_distance_m);
  f("lens_dwell_s", c.lens_dwell_s);
  f("lens_magnification", c.lens_magnification);
  f("lens_words_span", c.lens_words_span);
  f("lens_lines_span", c.lens_lines_span);
  f("lens_move_epsilon_uv", c.lens_move_epsilon_uv);
  f("scroll_dwell_s", c.scroll_dwell_s);
  f("scroll_button_strip_frac", c.scroll_button_strip_frac);
  f("saccade_velocity_deg_s", c.saccade_velocity_deg_s);
  f("fixation_window_s", c.fixation_window_s);
  f("smoothing_lambda_per_s", c.smoothing_lambda_per_s);
  f("sample_rate_hz", c.sample_rate_hz);
  f("focus_hysteresis_s", c.focus_hysteresis_s);
  f("cycle_dwell_s", c.cycle_dwell_s);
  f("baseline_lines_per_unit", c.baseline_lines_per_unit);
  f("chars_per_line", c.chars_per_line);
  f("visible_lines", c.visible_lines);
  f("line_spacing", c.line_spacing);
}

/// Applies one `key=value` style override. Throws ConfigError for unknown
/// keys or unparsable values.
inline void apply_override(EngineConfig& c, std::string_view key, std::string_view value) {
  if (key == "mode") {
    auto m = parse_mode(value);
    if (!m) throw ConfigError("mode must be vrdoc or baseline, got '" + std::string(value) + "'");
    c.mode = *m;
    return;
  }
  bool found = false;
  for_each_numeric_field(c, [&](std::string_view name, auto& field) {
    if (name != key) return;
    found = true;
    const std::string v(value);
    std::size_t used = 0;
    try {
      if constexpr (std::is_same_v<std::remove_reference_t<decltype(field)>, int>) {
        field = std::stoi(v, &used);
      } else {
        field = std::stod(v, &used);
      }
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError("bad value for " + std::string(key) + ": '" + v + "'");
  });
  if (!found) throw ConfigError("unknown config key '" + std::string(key) + "'");
}

enum class ScrollDirection { Up, Down };

inline const char* to_string(ScrollDirection d) { return d == ScrollDirection::Up ? "up" : "down"; }

struct LensRegion {
  std::string panel;
  Uv center_uv;
  double width_uv = 0.0;
  double height_uv = 0.0;
  double magnification = 1.5;
  Pose camera_pose;  ///< forward axis anti-parallel to the panel normal
};

enum class EventKind {
  HighlightOn,
  HighlightOff,
  Snap,
  CycleForeground,
  LensOn,
  LensMove,
  LensOff,
  Scroll,
  BaselineSelect,
  BaselineGrabStart,
  BaselineGrabEnd,
  BaselineScroll,
};

inline constexpr EventKind kAllEventKinds[] = {
    EventKind::HighlightOn,    EventKind::HighlightOff,      EventKind::Snap,
    EventKind::CycleForeground, EventKind::LensOn,           EventKind::LensMove,
    EventKind::LensOff,        EventKind::Scroll,            EventKind::BaselineSelect,
    EventKind::BaselineGrabStart, EventKind::BaselineGrabEnd, EventKind::BaselineScroll,
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::HighlightOn: return "highlight_on";
    case EventKind::HighlightOff: return "highlight_off";
    case EventKind::Snap: return "snap";
    case EventKind::CycleForeground: return "cycle_foreground";
    case EventKind::LensOn: return "lens_on";
    case EventKind::LensMove: return "lens_move";
    case EventKind::LensOff: return "lens_off";
    case EventKind::Scroll: return "scroll";
    case EventKind::BaselineSelect: return "baseline_select";
    case EventKind::BaselineGrabStart: return "baseline_grab_start";
    case EventKind::BaselineGrabEnd: return "baseline_grab_end";
    case EventKind::BaselineScroll: return "baseline_scroll";
  }
  return "?";
}

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (EventKind k : kAllEventKinds) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

/// One discrete engine output. Only the fields meaningful for `kind` are set.
struct InteractionEvent {
  double t = 0.0;
  EventKind kind = EventKind::HighlightOn;
  std::string panel;
  std::optional<Pose> pose;          ///< Snap, BaselineGrabEnd
  std::optional<long long> z_rank;   ///< Snap, CycleForeground
  std::optional<LensRegion> region;  ///< LensOn, LensMove
  std::optional<ScrollDirection> direction;
  long long count = 0;              ///< sentences (Scroll) or lines (BaselineScroll)
  std::optional<std::size_t> line;  ///< top line after a scroll
};

/// Panel pose for reading: snap_distance_m in front of the head along the
/// horizontal projection of its forward axis, facing the head, upright.
inline Pose snap_pose(const Pose& head, const EngineConfig& cfg) {
  const Vec3 f = head.orientation.forward();
  Vec3 fh = horizontal(f);
  if (norm(fh) < tol::kUnit) {
    // looking straight up or down: the head's up axis points where the face does
    const Vec3 up_h = horizontal(head.orientation.up());
    fh = f.y < 0.0 ? up_h : -up_h;
  }
  fh = normalized(fh);
  return {head.position + fh * cfg.snap_distance_m, Orientation::look_rotation(fh, kWorldUp)};
}

/// Height of one text row in panel uv.
inline double row_height_uv(const Layout& layout, double strip_frac) {
  return (1.0 - 2.0 * strip_frac) / static_cast<double>(std::max<std::size_t>(layout.visible_lines, 1));
}

/// Magnifier region around `gaze_uv`, sized to lens_words_span mean words by
/// lens_lines_span rows and shifted to stay inside the panel.
inline LensRegion lens_region(const DocumentPanel& panel, Uv gaze_uv, const EngineConfig& cfg) {
  const Layout& layout = panel.layout;
  LensRegion r;
  r.panel = panel.panel_id;
  r.magnification = cfg.lens_magnification;
  r.width_uv = cfg.lens_words_span * layout.mean_word_chars() / static_cast<double>(layout.chars_per_line);
  r.height_uv = cfg.lens_lines_span * row_height_uv(layout, cfg.scroll_button_strip_frac);
  auto fit = [](double c, double size) { return size >= 1.0 ? 0.5 : std::clamp(c, size / 2.0, 1.0 - size / 2.0); };
  r.center_uv = {fit(gaze_uv.u, r.width_uv), fit(gaze_uv.v, r.height_uv)};
  r.camera_pose = {panel_point(panel.pose, panel.extent, gaze_uv), panel.pose.orientation};
  return r;
}

inline long long max_z_rank(std::span<const DocumentPanel> panels) {
  long long m = 0;
  for (const auto& p : panels) m = std::max(m, p.z_rank);
  return m;
}

/// Raises panels[index] above every other panel. No-op when it is already top.
inline void promote_to_top(std::span<DocumentPanel> panels, std::size_t index) {
  const long long top = max_z_rank(panels);
  if (panels[index].z_rank == top) {
    const auto tied = std::count_if(panels.begin(), panels.end(), [&](const DocumentPanel& p) { return p.z_rank == top; });
    if (tied == 1) return;
  }
  panels[index].z_rank = top + 1;
}

struct CycleResult {
  std::size_t promoted = 0;  ///< panel index
  std::size_t cursor = 0;
};

/// One overlap-cycling step over `stack`, the panel indices under the gaze in
/// the z order they had when cycling began (topmost first). Promotes
/// stack[(cursor + 1) % n]; n consecutive steps make every panel topmost
/// exactly once.
inline CycleResult cycle_overlap(std::span<DocumentPanel> panels, std::span<const std::size_t> stack,
                                 std::size_t cursor) {
  if (stack.empty()) throw ContractViolation("cycle_overlap: empty stack");
  const std::size_t pick = stack[(cursor + 1) % stack.size()];
  promote_to_top(panels, pick);
  return {pick, cursor + 1};
}

/// Controller pose derived from its pointing ray (no roll).
inline Pose controller_pose(const Ray& ray) { return {ray.origin, Orientation::look_rotation(ray.direction)}; }

struct GazeTarget {
  std::size_t panel = 0;
  Uv uv;
  Vec3 point;
};

enum class SelectPhase { Idle, Focused, Snapped };
enum class LensPhase { Off, Armed, On, ManuallyOff };

inline const char* to_string(SelectPhase p) {
  switch (p) {
    case SelectPhase::Idle: return "idle";
    case SelectPhase::Focused: return "focused";
    case SelectPhase::Snapped: return "snapped";
  }
  return "?";
}

inline const char* to_string(LensPhase p) {
  switch (p) {
    case LensPhase::Off: return "off";
    case LensPhase::Armed: return "armed";
    case LensPhase::On: return "on";
    case LensPhase::ManuallyOff: return "manually_off";
  }
  return "?";
}

struct Scene {
  std::vector<DocumentPanel> panels;
  Pose head;

  std::optional<std::size_t> find(std::string_view id) const {
    for (std::size_t i = 0; i < panels.size(); ++i) {
      if (panels[i].panel_id == id) return i;
    }
    return std::nullopt;
  }
};

struct EngineState {
  Scene scene;
  std::optional<double> last_t;
  ButtonState prev_buttons;

  // gaze resolution
  std::optional<GazeTarget> target;
  std::vector<std::size_t> stack;  ///< document panels under the gaze, topmost first
  std::optional<double> last_fixation_t;

  // select-and-snap
  SelectPhase select_phase = SelectPhase::Idle;
  std::optional<std::size_t> highlighted;
  std::optional<double> off_since;
  std::optional<std::size_t> snapped;
  std::size_t cycle_cursor = 0;
  std::vector<std::size_t> cycle_stack;
  double cycle_since = 0.0;

  // magnifier
  LensPhase lens_phase = LensPhase::Off;
  std::size_t lens_panel = 0;
  double lens_armed_t = 0.0;
  std::optional<LensRegion> lens;

  // gaze scroll
  struct ScrollDwell {
    std::size_t panel = 0;
    ScrollDirection direction = ScrollDirection::Down;
    double start_t = 0.0;
    long long sentences_emitted = 0;
  };
  std::optional<ScrollDwell> scroll;

  // baseline
  std::optional<std::size_t> selected;
  std::optional<std::size_t> grabbed;
  Pose grip;
  double trackpad_acc = 0.0;
};

class Engine {
 public:
  Engine(Scene scene, EngineConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    state_.scene = std::move(scene);
    for (auto& p : state_.scene.panels) p.highlighted = false;
  }

  const EngineConfig& config() const { return cfg_; }
  const EngineState& state() const { return state_; }
  const Scene& scene() const { return state_.scene; }

  /// Advances every state machine by one estimate. Throws StreamOrderError
  /// when t does not increase.
  std::vector<InteractionEvent> step(const FixationEstimate& est, const Pose& head, const ButtonState& buttons,
                                     double t, const std::optional<Ray>& controller = std::nullopt) {
    if (state_.last_t && !(t > *state_.last_t)) {
      throw StreamOrderError("engine step out of order: t=" + std::to_string(t));
    }
    state_.last_t = t;
    state_.scene.head = head;
    std::vector<InteractionEvent> events;
    resolve_gaze(est, t);
    if (cfg_.mode == InteractionMode::VRDoc) {
      select_and_snap(events, head, buttons, t);
      magglass_update(events, est, head, buttons, t);
      gaze_scroll_update(events, est, t);
    } else {
      baseline_update(events, controller, buttons, t);
    }
    state_.prev_buttons = buttons;
    return events;
  }

  /// Progress in [0, 1] of the pending lens activation, 0 when none.
  double lens_progress(double t) const {
    if (state_.lens_phase == LensPhase::On) return 1.0;
    if (state_.lens_phase != LensPhase::Armed) return 0.0;
    return std::clamp((t - state_.lens_armed_t) / cfg_.lens_dwell_s, 0.0, 1.0);
  }

  /// Progress in [0, 1) towards the next scroll step, 0 when not dwelling.
  double scroll_progress(double t) const {
    if (!state_.scroll) return 0.0;
    const double d = (t - state_.scroll->start_t) / cfg_.scroll_dwell_s;
    return d - std::floor(d);
  }

 private:
  static constexpr double kTimeEps = 1e-9;

  DocumentPanel& panel(std::size_t i) { return state_.scene.panels[i]; }

  bool pressed_edge(bool now, bool before) const { return now && !before; }

  void resolve_gaze(const FixationEstimate& est, double t) {
    if (est.phase == Phase::Fixation) {
      state_.last_fixation_t = t;
      const Ray ray = est.ray();
      state_.target.reset();
      if (auto h = topmost_hit(ray, state_.scene.panels)) state_.target = GazeTarget{h->index, h->hit.uv, h->hit.point};
      state_.stack.clear();
      const auto& panels = state_.scene.panels;
      for (std::size_t i = 0; i < panels.size(); ++i) {
        if (panels[i].is_document && ray_panel_intersect(ray, panels[i].pose, panels[i].extent)) state_.stack.push_back(i);
      }
      std::sort(state_.stack.begin(), state_.stack.end(),
                [&](std::size_t a, std::size_t b) { return panels[a].z_rank > panels[b].z_rank; });
      return;
    }
    // saccades and tracker gaps shorter than the fixation window hold the last target
    if (state_.last_fixation_t && t - *state_.last_fixation_t < cfg_.fixation_window_s) return;
    state_.target.reset();
    state_.stack.clear();
  }

  std::optional<std::size_t> document_target() const {
    if (state_.target && state_.scene.panels[state_.target->panel].is_document) return state_.target->panel;
    return std::nullopt;
  }

  void emit(std::vector<InteractionEvent>& out, double t, EventKind kind, std::size_t p) {
    InteractionEvent e;
    e.t = t;
    e.kind = kind;
    e.panel = panel(p).panel_id;
    out.push_back(std::move(e));
  }

  void select_and_snap(std::vector<InteractionEvent>& out, const Pose& head, const ButtonState& buttons, double t) {
    const auto doc = document_target();
    if (state_.highlighted) {
      if (doc == state_.highlighted) {
        state_.off_since.reset();
      } else {
        if (!state_.off_since) state_.off_since = t;
        if (t - *state_.off_since >= cfg_.focus_hysteresis_s - kTimeEps) {
          emit(out, t, EventKind::HighlightOff, *state_.highlighted);
          panel(*state_.highlighted).highlighted = false;
          state_.highlighted.reset();
          state_.off_since.reset();
        }
      }
    } else if (doc) {
      emit(out, t, EventKind::HighlightOn, *doc);
      panel(*doc).highlighted = true;
      state_.highlighted = doc;
    }

    if (pressed_edge(buttons.trigger_pressed, state_.prev_buttons.trigger_pressed) && state_.highlighted) {
      const std::size_t p = *state_.highlighted;
      panel(p).pose = snap_pose(head, cfg_);
      promote_to_top(state_.scene.panels, p);
      state_.snapped = p;
      state_.cycle_stack.clear();
      InteractionEvent e;
      e.t = t;
      e.kind = EventKind::Snap;
      e.panel = panel(p).panel_id;
      e.pose = panel(p).pose;
      e.z_rank = panel(p).z_rank;
      out.push_back(std::move(e));
    }

    cycle_update(out, buttons, t);

    if (!state_.highlighted) {
      state_.select_phase = SelectPhase::Idle;
    } else {
      state_.select_phase = state_.highlighted == state_.snapped ? SelectPhase::Snapped : SelectPhase::Focused;
    }
  }

  void cycle_update(std::vector<InteractionEvent>& out, const ButtonState& buttons, double t) {
    const auto& stack = state_.stack;
    if (stack.size() < 2 || (state_.snapped && stack.front() == *state_.snapped) || buttons.trigger_pressed) {
      state_.cycle_stack.clear();
      state_.cycle_cursor = 0;
      return;
    }
    auto sorted = [](std::vector<std::size_t> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    if (state_.cycle_stack.empty() || sorted(state_.cycle_stack) != sorted(stack)) {
      state_.cycle_stack = stack;
      state_.cycle_cursor = 0;
      state_.cycle_since = t;
      return;
    }
    if (t - state_.cycle_since >= cfg_.cycle_dwell_s - kTimeEps) {
      const auto r = cycle_overlap(state_.scene.panels, state_.cycle_stack, state_.cycle_cursor);
      state_.cycle_cursor = r.cursor;
      state_.cycle_since = t;
      InteractionEvent e;
      e.t = t;
      e.kind = EventKind::CycleForeground;
      e.panel = panel(r.promoted).panel_id;
      e.z_rank = panel(r.promoted).z_rank;
      out.push_back(std::move(e));
    }
  }

  bool in_strip(Uv uv) const {
    return uv.v < cfg_.scroll_button_strip_frac || uv.v > 1.0 - cfg_.scroll_button_strip_frac;
  }

  void lens_off(std::vector<InteractionEvent>& out, double t) {
    if (state_.lens_phase == LensPhase::On) emit(out, t, EventKind::LensOff, state_.lens_panel);
    state_.lens.reset();
  }

  void magglass_update(std::vector<InteractionEvent>& out, const FixationEstimate& est, const Pose& head,
                       const ButtonState& buttons, double t) {
    if (pressed_edge(buttons.lens_toggle_pressed, state_.prev_buttons.lens_toggle_pressed)) {
      if (state_.lens_phase == LensPhase::ManuallyOff) {
        state_.lens_phase = LensPhase::Off;
      } else {
        lens_off(out, t);
        state_.lens_phase = LensPhase::ManuallyOff;
      }
    }
    if (state_.lens_phase == LensPhase::ManuallyOff) return;

    const auto doc = document_target();
    const bool eligible = doc && !in_strip(state_.target->uv) &&
                          norm(panel(*doc).pose.position - head.position) < cfg_.lens_max_distance_m;
    if (!eligible) {
      lens_off(out, t);
      state_.lens_phase = LensPhase::Off;
      return;
    }
    const std::size_t p = *doc;
    const bool fixating = est.phase == Phase::Fixation;
    if (state_.lens_phase != LensPhase::Off && state_.lens_panel != p) {
      lens_off(out, t);
      state_.lens_phase = LensPhase::Off;
    }
    if (state_.lens_phase == LensPhase::Off) {
      if (!fixating) return;
      state_.lens_phase = LensPhase::Armed;
      state_.lens_panel = p;
      state_.lens_armed_t = t;
    }
    if (state_.lens_phase == LensPhase::Armed) {
      if (t - state_.lens_armed_t >= cfg_.lens_dwell_s - kTimeEps) {
        state_.lens_phase = LensPhase::On;
        state_.lens = lens_region(panel(p), state_.target->uv, cfg_);
        InteractionEvent e;
        e.t = t;
        e.kind = EventKind::LensOn;
        e.panel = panel(p).panel_id;
        e.region = state_.lens;
        out.push_back(std::move(e));
      }
      return;
    }
    // On: follow the smoothed gaze
    if (!fixating) return;
    LensRegion r = lens_region(panel(p), state_.target->uv, cfg_);
    const Uv& c0 = state_.lens->center_uv;
    if (std::hypot(r.center_uv.u - c0.u, r.center_uv.v - c0.v) > cfg_.lens_move_epsilon_uv) {
      state_.lens = r;
      InteractionEvent e;
      e.t = t;
      e.kind = EventKind::LensMove;
      e.panel = panel(p).panel_id;
      e.region = std::move(r);
      out.push_back(std::move(e));
    }
  }

  void gaze_scroll_update(std::vector<InteractionEvent>& out, const FixationEstimate& est, double t) {
    const auto doc = document_target();
    std::optional<ScrollDirection> dir;
    if (doc && panel(*doc).scrollable()) {
      const double v = state_.target->uv.v;
      if (v < cfg_.scroll_button_strip_frac) dir = ScrollDirection::Up;
      else if (v > 1.0 - cfg_.scroll_button_strip_frac) dir = ScrollDirection::Down;
    }
    if (!dir) {
      state_.scroll.reset();
      return;
    }
    auto& s = state_.scroll;
    if (!s || s->panel != *doc || s->direction != *dir) {
      s.reset();
      if (est.phase != Phase::Fixation) return;
      s = EngineState::ScrollDwell{*doc, *dir, t, 0};
    }
    const auto owed = static_cast<long long>(std::floor((t - s->start_t) / cfg_.scroll_dwell_s + kTimeEps));
    if (owed <= s->sentences_emitted) return;
    const long long n = owed - s->sentences_emitted;
    s->sentences_emitted = owed;
    DocumentPanel& p = panel(s->panel);
    p = scroll_by_sentences(std::move(p), *dir == ScrollDirection::Down ? n : -n);
    InteractionEvent e;
    e.t = t;
    e.kind = EventKind::Scroll;
    e.panel = p.panel_id;
    e.direction = *dir;
    e.count = n;
    e.line = p.scroll_line;
    out.push_back(std::move(e));
  }

  void baseline_update(std::vector<InteractionEvent>& out, const std::optional<Ray>& controller,
                       const ButtonState& buttons, double t) {
    std::optional<RankedHit> hit;
    if (controller) hit = topmost_hit(*controller, state_.scene.panels);

    if (pressed_edge(buttons.trigger_pressed, state_.prev_buttons.trigger_pressed) && hit) {
      state_.selected = hit->index;
      state_.trackpad_acc = 0.0;
      emit(out, t, EventKind::BaselineSelect, hit->index);
    }

    if (buttons.grab_pressed && controller) {
      const Pose cpose = controller_pose(*controller);
      if (!state_.grabbed && hit) {
        state_.grabbed = hit->index;
        state_.grip = cpose.inverse().compose(panel(hit->index).pose);
        if (state_.selected != hit->index) state_.trackpad_acc = 0.0;
        state_.selected = hit->index;
        emit(out, t, EventKind::BaselineGrabStart, hit->index);
      } else if (state_.grabbed) {
        panel(*state_.grabbed).pose = cpose.compose(state_.grip);
      }
    } else if (state_.grabbed && !buttons.grab_pressed) {
      InteractionEvent e;
      e.t = t;
      e.kind = EventKind::BaselineGrabEnd;
      e.panel = panel(*state_.grabbed).panel_id;
      e.pose = panel(*state_.grabbed).pose;
      out.push_back(std::move(e));
      state_.grabbed.reset();
    }

    if (state_.selected && buttons.trackpad_dy != 0.0) {
      state_.trackpad_acc += std::clamp(buttons.trackpad_dy, -1.0, 1.0) * cfg_.baseline_lines_per_unit;
      const auto whole = static_cast<long long>(std::trunc(state_.trackpad_acc + std::copysign(kTimeEps, state_.trackpad_acc)));
      if (whole != 0) {
        state_.trackpad_acc -= static_cast<double>(whole);
        DocumentPanel& p = panel(*state_.selected);
        set_scroll(p, static_cast<long long>(p.scroll_line) + whole);
        InteractionEvent e;
        e.t = t;
        e.kind = EventKind::BaselineScroll;
        e.panel = p.panel_id;
        e.count = whole;
        e.line = p.scroll_line;
        out.push_back(std::move(e));
      }
    }
  }

  EngineConfig cfg_;
  EngineState state_;
};

}  // namespace vrdoc

#endif  // VRDOC_ENGINE_HPP_
