#ifndef VRDOC_HARNESS_HPP_
#define VRDOC_HARNESS_HPP_

// Offline runs: feed a trace through the pipeline and engine, collect the
// event log and the run metrics.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vrdoc/engine.hpp"
#include "vrdoc/gaze.hpp"
#include "vrdoc/json_io.hpp"
#include "vrdoc/reader.hpp"
#include "vrdoc/scenario.hpp"

namespace vrdoc {

struct DocumentGaze {
  std::string panel;
  double gaze_time_s = 0.0;
};

struct MetricsReport {
  InteractionMode mode = InteractionMode::VRDoc;
  std::size_t samples = 0;
  double reading_time_s = 0.0;
  std::vector<DocumentGaze> per_document;  ///< scene order
  std::vector<std::string> gaze_order;     ///< panels in order of first gaze
  double lens_on_s = 0.0;
  double lens_active_fraction = 0.0;
  long long scroll_event_count = 0;
  long long selection_attempts = 0;
  long long snap_count = 0;
  std::map<EventKind, long long> event_counts;
};

struct RunResult {
  std::vector<InteractionEvent> events;
  MetricsReport metrics;
};

/// Incremental metrics over one stream. Each interval (t_{k-1}, t_k] is
/// charged to the gaze target and lens state in force after sample k-1.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(const Scene& scene, InteractionMode mode) {
    report_.mode = mode;
    for (const auto& p : scene.panels) report_.per_document.push_back({p.panel_id, 0.0});
    for (EventKind k : kAllEventKinds) report_.event_counts[k] = 0;
  }

  void observe(const GazeSample& s, const Engine& engine, const std::vector<InteractionEvent>& events) {
    if (first_t_) {
      const double dt = s.t - last_t_;
      if (target_) report_.per_document[*target_].gaze_time_s += dt;
      if (lens_on_) report_.lens_on_s += dt;
    } else {
      first_t_ = s.t;
    }
    last_t_ = s.t;
    ++report_.samples;
    if (s.buttons.trigger_pressed && !prev_trigger_) ++report_.selection_attempts;
    prev_trigger_ = s.buttons.trigger_pressed;
    for (const auto& e : events) {
      ++report_.event_counts[e.kind];
      if (e.kind == EventKind::Scroll || e.kind == EventKind::BaselineScroll) ++report_.scroll_event_count;
      if (e.kind == EventKind::Snap) ++report_.snap_count;
    }
    const auto& st = engine.state();
    target_.reset();
    if (st.target) {
      target_ = st.target->panel;
      const auto& id = engine.scene().panels[*target_].panel_id;
      if (std::find(report_.gaze_order.begin(), report_.gaze_order.end(), id) == report_.gaze_order.end()) {
        report_.gaze_order.push_back(id);
      }
    }
    lens_on_ = st.lens_phase == LensPhase::On;
  }

  MetricsReport finish() const {
    MetricsReport r = report_;
    if (first_t_) r.reading_time_s = last_t_ - *first_t_;
    r.lens_active_fraction = r.reading_time_s > 0.0 ? r.lens_on_s / r.reading_time_s : 0.0;
    return r;
  }

 private:
  MetricsReport report_;
  std::optional<double> first_t_;
  double last_t_ = 0.0;
  std::optional<std::size_t> target_;
  bool lens_on_ = false;
  bool prev_trigger_ = false;
};

/// Replays `trace` against the scenario's scene and configuration.
inline RunResult run(const Scenario& scenario, const std::vector<GazeSample>& trace) {
  Engine engine(build_scene(scenario), scenario.config);
  PipelineState pipe;
  const PipelineConfig pcfg = scenario.config.pipeline();
  MetricsAccumulator metrics(engine.scene(), scenario.config.mode);
  RunResult out;
  for (const auto& s : trace) {
    const auto& est = step_pipeline(pipe, s, pcfg);
    auto events = engine.step(est, head_pose(s), s.buttons, s.t, s.controller);
    metrics.observe(s, engine, events);
    out.events.insert(out.events.end(), std::make_move_iterator(events.begin()),
                      std::make_move_iterator(events.end()));
  }
  out.metrics = metrics.finish();
  return out;
}

struct ModeComparison {
  MetricsReport vrdoc;
  MetricsReport baseline;
};

/// Same scenario and reading plan under both interaction modes.
inline ModeComparison compare_modes(const Scenario& scenario, const ReaderModel& reader) {
  ModeComparison out;
  for (InteractionMode m : {InteractionMode::VRDoc, InteractionMode::Baseline}) {
    Scenario s = scenario;
    s.config.mode = m;
    const auto trace = generate_trace(s, reader, m);
    (m == InteractionMode::VRDoc ? out.vrdoc : out.baseline) = run(s, trace.samples).metrics;
  }
  return out;
}

namespace io {

inline Json to_json(const MetricsReport& m) {
  Json docs = Json::array();
  for (const auto& d : m.per_document) docs.push_back(Json{{"panel", d.panel}, {"gaze_time_s", d.gaze_time_s}});
  Json counts = Json::object();
  for (const auto& [k, n] : m.event_counts) counts[to_string(k)] = n;
  return Json{{"mode", to_string(m.mode)},
              {"samples", m.samples},
              {"reading_time_s", m.reading_time_s},
              {"per_document", std::move(docs)},
              {"gaze_order", m.gaze_order},
              {"lens_on_s", m.lens_on_s},
              {"lens_active_fraction", m.lens_active_fraction},
              {"scroll_event_count", m.scroll_event_count},
              {"selection_attempts", m.selection_attempts},
              {"snap_count", m.snap_count},
              {"event_counts", std::move(counts)}};
}

}  // namespace io
}  // namespace vrdoc

#endif  // VRDOC_HARNESS_HPP_
