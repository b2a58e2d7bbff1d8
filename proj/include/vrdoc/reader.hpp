#ifndef VRDOC_READER_HPP_
#define VRDOC_READER_HPP_

// Scripted synthetic reader. A reading plan (which documents, in which order)
// is compiled into a 120 Hz gaze trace for one interaction mode. Generation
// runs the real pipeline and engine alongside the script, so the reader sees
// where panels actually are and how far they actually scrolled.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrdoc/document.hpp"
#include "vrdoc/engine.hpp"
#include "vrdoc/gaze.hpp"
#include "vrdoc/geometry.hpp"
#include "vrdoc/rng.hpp"
#include "vrdoc/scenario.hpp"

namespace vrdoc {

/// The script could not be carried out against the engine.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReaderModel {
  double words_per_minute = 200.0;  ///< one fixation per word
  /// RMS angular error of the tracker noise. Zero disables noise; otherwise it
  /// must lie in the 0.5-1.1 degree accuracy band.
  double noise_std_deg = 0.8;
  /// Noise is an AR(1) drift per axis with this correlation time.
  double noise_correlation_s = 2.0;
  double decision_delay_s = 0.6;  ///< pause on a new document before reading
  double blink_rate_hz = 0.2;
  double blink_duration_s = 0.1;
  int rereads = 2;  ///< only for tasks with several documents
  std::uint64_t seed = 1;

  static ReaderModel noise_free(std::uint64_t seed = 1) {
    ReaderModel r;
    r.noise_std_deg = 0.0;
    r.blink_rate_hz = 0.0;
    r.seed = seed;
    return r;
  }

  double fixation_s() const { return 60.0 / words_per_minute; }

  void validate() const {
    if (!(words_per_minute > 0.0)) throw GenerationError("words_per_minute must be > 0");
    if (noise_std_deg != 0.0 && !(noise_std_deg >= 0.5 && noise_std_deg <= 1.1)) {
      throw GenerationError("noise_std_deg must be 0 or within [0.5, 1.1]");
    }
    if (!(noise_correlation_s > 0.0)) throw GenerationError("noise_correlation_s must be > 0");
    if (decision_delay_s < 0.5) throw GenerationError("decision_delay_s must be >= 0.5");
    if (blink_rate_hz < 0.0 || blink_duration_s < 0.0) throw GenerationError("blink parameters must be >= 0");
    if (rereads < 0) throw GenerationError("rereads must be >= 0");
  }
};

struct GeneratedTrace {
  std::vector<GazeSample> samples;
  std::vector<Vec3> script;  ///< noise-free direction the reader aimed at, per sample
};

/// Emits samples one at a time while driving a private pipeline and engine
/// with them. Public so tests can script gaze streams directly.
class TraceBuilder {
 public:
  TraceBuilder(const Scenario& scenario, const ReaderModel& reader, InteractionMode mode)
      : cfg_(with_mode(scenario.config, mode)),
        reader_(reader),
        engine_(build_scene(scenario), cfg_),
        rng_(reader.seed ^ 0x9e3779b97f4a7c15ULL),
        head_(scenario.head_start),
        dt_(1.0 / cfg_.sample_rate_hz) {
    reader_.validate();
    const double sigma_axis = deg_to_rad(reader_.noise_std_deg) / std::sqrt(2.0);
    noise_x_ = sigma_axis * rng_.normal();
    noise_y_ = sigma_axis * rng_.normal();
  }

  const Engine& engine() const { return engine_; }
  const EngineConfig& config() const { return cfg_; }
  const Pose& head() const { return head_; }
  double now() const { return static_cast<double>(index_) * dt_; }
  double dt() const { return dt_; }
  std::vector<InteractionEvent>& events() { return events_; }

  void set_head(const Pose& head) { head_ = head; }
  void turn_head_towards(const Vec3& p) { head_.orientation = Orientation::look_rotation(p - head_.position); }
  ButtonState& buttons() { return buttons_; }
  void set_controller(std::optional<Ray> c) { controller_ = c; }

  /// One sample looking at world point `target`.
  void emit(const Vec3& target) {
    const Vec3 aim = normalized(target - head_.position);
    GazeSample s;
    s.t = now();
    s.head_orientation = head_.orientation;
    s.buttons = buttons_;
    s.controller = controller_;
    s.valid = !blinking(s.t);
    s.ray = {head_.position, s.valid ? perturb(aim) : Vec3{}};
    advance_noise();
    const auto& est = step_pipeline(pipe_, s, cfg_.pipeline());
    auto ev = engine_.step(est, head_pose(s), s.buttons, s.t, s.controller);
    events_.insert(events_.end(), ev.begin(), ev.end());
    trace_.samples.push_back(std::move(s));
    trace_.script.push_back(aim);
    ++index_;
  }

  /// Looks at `target` for `duration` seconds (at least one sample).
  void hold(const Vec3& target, double duration) {
    const auto n = std::max<long long>(1, std::llround(duration / dt_));
    for (long long i = 0; i < n; ++i) emit(target);
  }

  /// Looks at a panel-space point of the panel as it currently stands.
  void look_at(std::size_t panel, Uv uv, double duration) {
    const auto n = std::max<long long>(1, std::llround(duration / dt_));
    for (long long i = 0; i < n; ++i) emit(panel_point(pose_of(panel), extent_of(panel), uv));
  }

  const DocumentPanel& panel(std::size_t i) const { return engine_.scene().panels[i]; }
  const Pose& pose_of(std::size_t i) const { return panel(i).pose; }
  const PanelExtent& extent_of(std::size_t i) const { return panel(i).extent; }

  GeneratedTrace finish() && { return std::move(trace_); }

 private:
  static EngineConfig with_mode(EngineConfig c, InteractionMode m) {
    c.mode = m;
    return c;
  }

  bool blinking(double t) {
    if (t < blink_until_) return true;
    if (reader_.blink_rate_hz > 0.0 && rng_.uniform() < reader_.blink_rate_hz * dt_) {
      blink_until_ = t + reader_.blink_duration_s;
      return true;
    }
    return false;
  }

  Vec3 perturb(const Vec3& d) const {
    if (noise_x_ == 0.0 && noise_y_ == 0.0) return d;
    Vec3 r = cross(d, kWorldUp);
    r = norm(r) < 1e-6 ? Vec3{1.0, 0.0, 0.0} : normalized(r);
    const Vec3 u = cross(r, d);
    return normalized(d + r * std::tan(noise_x_) + u * std::tan(noise_y_));
  }

  void advance_noise() {
    if (reader_.noise_std_deg == 0.0) return;
    const double sigma_axis = deg_to_rad(reader_.noise_std_deg) / std::sqrt(2.0);
    const double rho = std::exp(-dt_ / reader_.noise_correlation_s);
    const double k = sigma_axis * std::sqrt(1.0 - rho * rho);
    noise_x_ = rho * noise_x_ + k * rng_.normal();
    noise_y_ = rho * noise_y_ + k * rng_.normal();
  }

  EngineConfig cfg_;
  ReaderModel reader_;
  Engine engine_;
  PipelineState pipe_;
  Rng rng_;
  Pose head_;
  double dt_;
  long long index_ = 0;
  ButtonState buttons_;
  std::optional<Ray> controller_;
  double noise_x_ = 0.0;
  double noise_y_ = 0.0;
  double blink_until_ = -1.0;
  std::vector<InteractionEvent> events_;
  GeneratedTrace trace_;
};

/// One reading goal. Goals are mode-agnostic; each mode compiles them into
/// its own actions.
struct ReadingGoal {
  std::size_t document = 0;  ///< index into scenario.documents
  bool reread = false;
};

/// Reads every document in placement order, then rereads `reader.rereads`
/// distinct documents picked by seed when the task has more than one.
inline std::vector<ReadingGoal> reading_plan(const Scenario& s, const ReaderModel& reader) {
  std::vector<ReadingGoal> plan;
  std::vector<std::size_t> docs;
  for (std::size_t i = 0; i < s.documents.size(); ++i) {
    if (!s.documents[i].is_document) continue;
    docs.push_back(i);
    plan.push_back({i, false});
  }
  if (docs.size() > 1) {
    Rng rng(reader.seed);
    rng.shuffle(docs.begin(), docs.end());
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(reader.rereads), docs.size());
    for (std::size_t k = 0; k < n; ++k) plan.push_back({docs[k], true});
  }
  return plan;
}

namespace detail {

/// Panel-space centre of each word on a layout line.
inline std::vector<double> word_centres_u(const Layout& layout, const std::string& line) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    out.push_back(column_u(layout, static_cast<double>(start) + 0.5 * static_cast<double>(i - start - 1)));
  }
  return out;
}

class ScriptRunner {
 public:
  ScriptRunner(const Scenario& s, const ReaderModel& r, InteractionMode mode)
      : scenario_(s), reader_(r), mode_(mode), b_(s, r, mode) {}

  GeneratedTrace run() && {
    for (const auto& goal : reading_plan(scenario_, reader_)) {
      if (mode_ == InteractionMode::VRDoc) {
        acquire_vrdoc(goal.document);
      } else {
        acquire_baseline(goal.document);
      }
      read_document(goal.document, goal.reread);
    }
    // settle on the last panel so trailing timers resolve
    b_.hold(b_.head().position + b_.head().orientation.forward(), 0.3);
    return std::move(b_).finish();
  }

 private:
  [[noreturn]] void fail(std::size_t doc, const std::string& what) const {
    std::ostringstream os;
    os << "reader cannot complete document '" << scenario_.documents[doc].panel_id << "' at t=" << b_.now()
       << ": " << what << " (mode " << to_string(mode_) << ", scroll_line " << b_.panel(doc).scroll_line
       << ", lines " << b_.panel(doc).layout.lines.size() << ")";
    throw GenerationError(os.str());
  }

  Vec3 centre(std::size_t doc) const { return b_.pose_of(doc).position; }

  double distance(std::size_t doc) const { return norm(centre(doc) - b_.head().position); }

  bool on_top(std::size_t doc) const { return b_.panel(doc).z_rank == max_z_rank(b_.engine().scene().panels); }

  void acquire_vrdoc(std::size_t doc) {
    b_.turn_head_towards(centre(doc));
    const double delay = reader_.decision_delay_s;
    const bool bring = distance(doc) > 0.6 || !on_top(doc);
    b_.hold(centre(doc), 0.3);
    if (bring) {
      b_.buttons().trigger_pressed = true;
      b_.hold(centre(doc), 0.1);
      b_.buttons().trigger_pressed = false;
      const auto& st = b_.engine().state();
      if (st.snapped != doc || !on_top(doc)) fail(doc, "trigger did not snap the document");
      b_.hold(centre(doc), delay - 0.4);
    } else {
      b_.hold(centre(doc), delay - 0.3);
    }
  }

  Ray aim_controller(std::size_t doc, const Vec3& hand) {
    Ray r = Ray::through(hand, centre(doc));
    b_.set_controller(r);
    return r;
  }

  Vec3 hand_position(std::size_t doc) const {
    const Vec3 dir = normalized(horizontal(centre(doc) - b_.head().position));
    return b_.head().position + dir * 0.25 + Vec3{0.0, -0.3, 0.0};
  }

  void acquire_baseline(std::size_t doc) {
    b_.turn_head_towards(centre(doc));
    const Vec3 hand = hand_position(doc);
    const Ray ray = aim_controller(doc, hand);
    b_.hold(centre(doc), 0.3);
    b_.buttons().trigger_pressed = true;
    b_.hold(centre(doc), 0.1);
    b_.buttons().trigger_pressed = false;
    if (b_.engine().state().selected != doc) fail(doc, "controller ray did not select the document");
    if (distance(doc) > 0.6) {
      // drag the panel to reading distance over one second
      const Vec3 c0 = centre(doc);
      const Vec3 goal = b_.head().position + normalized(c0 - b_.head().position) * scenario_.config.snap_distance_m;
      const Vec3 delta = goal - c0;
      const auto n = std::llround(1.0 / b_.dt());
      b_.buttons().grab_pressed = true;
      for (long long k = 0; k <= n; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(n);
        b_.set_controller(Ray{ray.origin + delta * f, ray.direction});
        b_.emit(centre(doc));
      }
      b_.buttons().grab_pressed = false;
      b_.emit(centre(doc));
      if (distance(doc) > 0.6) fail(doc, "grab did not move the document");
    }
    b_.hold(centre(doc), reader_.decision_delay_s - 0.4);
  }

  void read_line(std::size_t doc, std::size_t line) {
    const DocumentPanel& p = b_.panel(doc);
    const std::size_t row = line - p.scroll_line;
    const double v = row_center_v(p.layout, row, b_.config().scroll_button_strip_frac);
    for (double u : word_centres_u(p.layout, p.layout.lines[line].text)) b_.look_at(doc, {u, v}, reader_.fixation_s());
  }

  void read_document(std::size_t doc, bool reread) {
    std::size_t next = b_.panel(doc).scroll_line;
    const std::size_t total = b_.panel(doc).layout.lines.size();
    int stalls = 0;
    for (;;) {
      const std::size_t top = b_.panel(doc).scroll_line;
      const std::size_t end = std::min(total, top + b_.panel(doc).layout.visible_lines);
      for (std::size_t l = std::max(next, top); l < end; ++l) read_line(doc, l);
      next = std::max(next, end);
      if (next >= total || reread) return;
      const std::size_t before = b_.panel(doc).scroll_line;
      if (mode_ == InteractionMode::VRDoc) {
        scroll_gaze(doc, next);
      } else {
        scroll_trackpad(doc, next);
      }
      if (b_.panel(doc).scroll_line <= before) {
        if (++stalls > 4) fail(doc, "scrolling makes no progress");
      } else {
        stalls = 0;
      }
    }
  }

  /// Dwells on the bottom button for just enough sentences that no unread
  /// line scrolls past the top of the view.
  void scroll_gaze(std::size_t doc, std::size_t next_unread) {
    const DocumentPanel& p = b_.panel(doc);
    long long k = 0;
    std::size_t prev = p.scroll_line;
    for (long long c = 1;; ++c) {
      const auto moved = scroll_by_sentences(p, c).scroll_line;
      if (moved > next_unread || (c > 1 && moved == prev)) break;
      if (moved > p.scroll_line) k = c;
      prev = moved;
    }
    if (k == 0) fail(doc, "no sentence step keeps the next unread line visible");
    const double strip = b_.config().scroll_button_strip_frac;
    b_.look_at(doc, {0.5, 1.0 - 0.5 * strip}, static_cast<double>(k) * b_.config().scroll_dwell_s + 0.1);
  }

  void scroll_trackpad(std::size_t doc, std::size_t next_unread) {
    const std::size_t target = std::min(next_unread, b_.panel(doc).layout.max_scroll());
    long long guard = 0;
    b_.buttons().trackpad_dy = 0.05;
    while (b_.panel(doc).scroll_line < target) {
      b_.look_at(doc, {0.5, 0.5}, b_.dt());
      if (++guard > 10000) break;
    }
    b_.buttons().trackpad_dy = 0.0;
    b_.look_at(doc, {0.5, 0.5}, b_.dt());
  }

  const Scenario& scenario_;
  ReaderModel reader_;
  InteractionMode mode_;
  TraceBuilder b_;
};

}  // namespace detail

/// Compiles the reading plan for `scenario` into a trace for `mode`.
/// Throws GenerationError when the script cannot be completed.
inline GeneratedTrace generate_trace(const Scenario& scenario, const ReaderModel& reader, InteractionMode mode) {
  return detail::ScriptRunner(scenario, reader, mode).run();
}

}  // namespace vrdoc

#endif  // VRDOC_READER_HPP_
