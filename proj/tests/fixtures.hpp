#ifndef VRDOC_TESTS_FIXTURES_HPP_
#define VRDOC_TESTS_FIXTURES_HPP_

// Small scenes and a sample-by-sample driver for scripted engine tests.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vrdoc/engine.hpp"
#include "vrdoc/gaze.hpp"
#include "vrdoc/scenario.hpp"

namespace fixtures {

using namespace vrdoc;

inline const Vec3 kHead{0.0, 1.6, 0.0};

/// Panel straight ahead of kHead at `distance`, facing it.
inline DocumentPanel panel_ahead(std::string id, double distance, long long rank, std::size_t sentences = 4,
                                 double x_offset = 0.0) {
  std::vector<std::string> text;
  for (std::size_t i = 0; i < sentences; ++i) {
    text.push_back("Sentence number " + std::to_string(i) + " reads plainly and fills one line of the panel.");
  }
  DocumentPanel p;
  p.panel_id = std::move(id);
  p.pose = {kHead + Vec3{x_offset, 0.0, -distance}, Orientation::identity()};
  p.extent = {0.6, 0.4};
  p.content_id = p.panel_id;
  p.layout = layout_text(DocumentContent::make(p.panel_id, text, DocumentKind::Long), 65);
  p.z_rank = rank;
  return p;
}

inline Scene scene_of(std::vector<DocumentPanel> panels) {
  Scene s;
  s.panels = std::move(panels);
  s.head = {kHead, Orientation::identity()};
  return s;
}

struct Driver {
  Engine engine;
  PipelineState pipe;
  double rate_hz;
  long long index = 0;
  Pose head{kHead, Orientation::identity()};
  ButtonState buttons;
  std::optional<Ray> controller;
  std::vector<InteractionEvent> events;

  Driver(Scene scene, EngineConfig cfg, double rate = 120.0) : engine(std::move(scene), cfg), rate_hz(rate) {}

  double now() const { return static_cast<double>(index) / rate_hz; }

  std::vector<InteractionEvent> step_dir(const Vec3& dir, bool valid = true) {
    GazeSample s;
    s.t = now();
    s.ray = {head.position, valid ? normalized(dir) : Vec3{}};
    s.valid = valid;
    s.buttons = buttons;
    s.head_orientation = head.orientation;
    s.controller = controller;
    const auto& est = step_pipeline(pipe, s, engine.config().pipeline());
    auto ev = engine.step(est, head_pose(s), s.buttons, s.t, s.controller);
    events.insert(events.end(), ev.begin(), ev.end());
    ++index;
    return ev;
  }

  std::vector<InteractionEvent> look(std::size_t panel, Uv uv) {
    const auto& p = engine.scene().panels[panel];
    return step_dir(panel_point(p.pose, p.extent, uv) - head.position);
  }

  /// `n` samples on a panel point.
  void look_n(std::size_t panel, Uv uv, long long n) {
    for (long long i = 0; i < n; ++i) look(panel, uv);
  }

  void away_n(long long n) {
    for (long long i = 0; i < n; ++i) step_dir({0.0, 1.0, 0.0});
  }

  long long count(EventKind k) const {
    long long c = 0;
    for (const auto& e : events) c += e.kind == k;
    return c;
  }

  long long scrolled_sentences() const {
    long long c = 0;
    for (const auto& e : events) {
      if (e.kind == EventKind::Scroll) c += e.direction == ScrollDirection::Down ? e.count : -e.count;
    }
    return c;
  }

  std::optional<InteractionEvent> first(EventKind k) const {
    for (const auto& e : events) {
      if (e.kind == k) return e;
    }
    return std::nullopt;
  }
};

inline EngineConfig config_at(double rate_hz, InteractionMode mode = InteractionMode::VRDoc) {
  EngineConfig c;
  c.sample_rate_hz = rate_hz;
  c.mode = mode;
  return c;
}

/// Result of holding the gaze on one scroll strip for `d` seconds.
inline long long scroll_dwell(double d, double rate_hz, ScrollDirection dir = ScrollDirection::Down) {
  auto panel = panel_ahead("doc", 0.45, 1, 40);
  // scrolling up starts from the bottom so there is room
  if (dir == ScrollDirection::Up) panel.scroll_line = panel.layout.max_scroll();
  Driver drv(scene_of({panel}), config_at(rate_hz), rate_hz);
  const double strip = drv.engine.config().scroll_button_strip_frac;
  const Uv target{0.5, dir == ScrollDirection::Down ? 1.0 - strip / 2 : strip / 2};
  const auto n = std::llround(d * rate_hz) + 1;
  drv.look_n(0, target, n);
  drv.look_n(0, {0.5, 0.5}, std::llround(rate_hz));
  return std::abs(drv.scrolled_sentences());
}

/// T2 trace that holds the gaze on the panel centre for 361 samples at
/// 120 Hz: the magnifier turns on after sample 180 and stays on, so exactly
/// half of the 3 s reading time is spent with it on.
inline std::vector<GazeSample> lens_half_trace(const Scenario& t2) {
  const Scene scene = build_scene(t2);
  const Vec3 dir = normalized(scene.panels[0].pose.position - t2.head_start.position);
  std::vector<GazeSample> trace;
  for (int k = 0; k <= 360; ++k) {
    GazeSample s;
    s.t = k / 120.0;
    s.ray = {t2.head_start.position, dir};
    s.head_orientation = t2.head_start.orientation;
    trace.push_back(s);
  }
  return trace;
}

}  // namespace fixtures

#endif  // VRDOC_TESTS_FIXTURES_HPP_
