#ifndef VRDOC_SESSION_HPP_
#define VRDOC_SESSION_HPP_

// Live engine sessions behind a line-delimited JSON message protocol.
// SessionManager is transport-agnostic: feed it one client line, get back
// the server lines to send.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vrdoc/engine.hpp"
#include "vrdoc/gaze.hpp"
#include "vrdoc/json_io.hpp"
#include "vrdoc/scenario.hpp"

namespace vrdoc {

class Session {
 public:
  Session(std::string id, Scenario scenario)
      : id_(std::move(id)), scenario_(std::move(scenario)), engine_(build_scene(scenario_), scenario_.config) {}

  const std::string& id() const { return id_; }
  const Scenario& scenario() const { return scenario_; }
  const Engine& engine() const { return engine_; }
  /// Samples exactly as they were fed to the engine.
  const std::vector<GazeSample>& samples() const { return samples_; }
  std::optional<long long> last_seq;

  void set_head_orientation(const Orientation& q) { head_orientation_ = q; }
  void toggle_lens() { pending_toggle_ = true; }

  /// Steps the engine. Throws StreamOrderError on non-increasing t.
  std::vector<InteractionEvent> feed(GazeSample s) {
    if (!s.head_orientation && head_orientation_) s.head_orientation = head_orientation_;
    if (pending_toggle_) s.buttons.lens_toggle_pressed = true;
    const auto& est = step_pipeline(pipe_, s, scenario_.config.pipeline());
    auto events = engine_.step(est, head_pose(s), s.buttons, s.t, s.controller);
    pending_toggle_ = false;
    samples_.push_back(std::move(s));
    return events;
  }

  std::mutex mutex;

 private:
  std::string id_;
  Scenario scenario_;
  Engine engine_;
  PipelineState pipe_;
  std::optional<Orientation> head_orientation_;
  bool pending_toggle_ = false;
  std::vector<GazeSample> samples_;
};

namespace io {

/// Mutable scene state after a step: poses, scroll lines, highlight and lens.
inline Json scene_delta(const Engine& engine) {
  Json panels = Json::array();
  for (const auto& p : engine.scene().panels) panels.push_back(panel_state_json(p));
  const auto& st = engine.state();
  Json lens{{"phase", to_string(st.lens_phase)}};
  lens["region"] = st.lens ? to_json(*st.lens) : Json(nullptr);
  Json j{{"panels", std::move(panels)}};
  j["highlighted"] = st.highlighted ? Json(engine.scene().panels[*st.highlighted].panel_id) : Json(nullptr);
  j["select_phase"] = to_string(st.select_phase);
  j["lens"] = std::move(lens);
  return j;
}

}  // namespace io

class SessionManager {
 public:
  /// Handles one client line. Always returns at least one server message.
  std::vector<Json> handle(const std::string& line) {
    Json msg;
    try {
      msg = Json::parse(line);
    } catch (const std::exception& e) {
      return {error("parse", e.what())};
    }
    return handle(msg);
  }

  std::vector<Json> handle(const Json& msg) {
    if (!msg.is_object()) return {error("parse", "message must be a JSON object")};
    if (!msg.contains("v") || msg["v"] != kFormatVersion) {
      return {error("bad_version", "expected v:" + std::to_string(kFormatVersion))};
    }
    if (!msg.contains("type") || !msg["type"].is_string()) return {error("bad_request", "missing type")};
    if (!msg.contains("seq") || !msg["seq"].is_number_integer()) return {error("bad_request", "missing integer seq")};
    const std::string type = msg["type"];
    const long long seq = msg["seq"];
    if (type == "create_session") return {create(msg, seq)};

    if (!msg.contains("session_id") || !msg["session_id"].is_string()) {
      return {error("bad_request", "missing session_id")};
    }
    const std::string sid = msg["session_id"];
    auto session = find(sid);
    if (!session) return {error("no_session", "unknown session '" + sid + "'", sid)};

    std::lock_guard lock(session->mutex);
    if (session->last_seq && seq <= *session->last_seq) {
      return {error("bad_seq", "seq " + std::to_string(seq) + " not after " + std::to_string(*session->last_seq), sid)};
    }
    try {
      if (type == "sample") {
        GazeSample s = io::sample_from(msg.at("sample"));
        std::vector<InteractionEvent> events;
        try {
          events = session->feed(std::move(s));
        } catch (const StreamOrderError& e) {
          return {error("bad_stream", e.what(), sid)};
        }
        session->last_seq = seq;
        return respond_step(*session, events, seq);
      }
      if (type == "set_head_pose") {
        session->set_head_orientation(io::orientation_from(msg.at("orientation")));
        session->last_seq = seq;
        return {ack(sid, seq)};
      }
      if (type == "toggle_lens") {
        session->toggle_lens();
        session->last_seq = seq;
        return {ack(sid, seq)};
      }
      if (type == "end_session") {
        session->last_seq = seq;
        std::lock_guard map_lock(mutex_);
        sessions_.erase(sid);
        return {Json{{"v", kFormatVersion}, {"type", "session_ended"}, {"session_id", sid}, {"ack_seq", seq}}};
      }
    } catch (const std::exception& e) {
      return {error("bad_request", e.what(), sid)};
    }
    return {error("bad_request", "unknown message type '" + type + "'", sid)};
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  std::size_t size() {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

 private:
  static Json error(const std::string& code, const std::string& message, const std::string& sid = {}) {
    Json j{{"v", kFormatVersion}, {"type", "error"}};
    if (!sid.empty()) j["session_id"] = sid;
    j["code"] = code;
    j["message"] = message;
    return j;
  }

  static Json ack(const std::string& sid, long long seq) {
    return Json{{"v", kFormatVersion}, {"type", "ack"}, {"session_id", sid}, {"ack_seq", seq}};
  }

  Json create(const Json& msg, long long seq) {
    Scenario scenario;
    try {
      if (msg.contains("scenario")) {
        scenario = io::scenario_from(msg["scenario"]);
      } else {
        const auto task = parse_task(msg.value("task", std::string()));
        if (!task) return error("bad_request", "create_session needs a task (T1-T4) or an inline scenario");
        scenario = build_task_scenario(*task, msg.value("seed", std::uint64_t{1}));
      }
      if (msg.contains("overrides")) scenario.config = io::config_from(msg["overrides"], scenario.config);
      if (msg.contains("mode")) apply_override(scenario.config, "mode", msg["mode"].get<std::string>());
      if (scenario.task && msg.contains("overrides") && !msg.contains("scenario")) {
        // layout metrics may have changed; rebuild passages with them
        scenario = build_task_scenario(*scenario.task, scenario.seed, scenario.config);
      }
      validate(scenario);
    } catch (const std::exception& e) {
      return error("bad_request", e.what());
    }
    std::string sid;
    std::shared_ptr<Session> session;
    {
      std::lock_guard lock(mutex_);
      sid = "s" + std::to_string(++next_id_);
      session = std::make_shared<Session>(sid, std::move(scenario));
      session->last_seq = seq;
      sessions_[sid] = session;
    }
    return Json{{"v", kFormatVersion},
                {"type", "session_created"},
                {"session_id", sid},
                {"ack_seq", seq},
                {"scene", io::scene_snapshot(session->engine().scene(), session->engine().config())}};
  }

  static std::vector<Json> respond_step(const Session& s, const std::vector<InteractionEvent>& events, long long seq) {
    const Engine& engine = s.engine();
    const double t = *engine.state().last_t;
    Json list = Json::array();
    for (const auto& e : events) list.push_back(io::to_json(e));
    std::vector<Json> out;
    out.push_back(Json{{"v", kFormatVersion},
                       {"type", "events"},
                       {"session_id", s.id()},
                       {"ack_seq", seq},
                       {"t", t},
                       {"events", std::move(list)},
                       {"progress", Json{{"lens", engine.lens_progress(t)}, {"scroll", engine.scroll_progress(t)}}}});
    if (!events.empty()) {
      Json delta{{"v", kFormatVersion}, {"type", "scene_delta"}, {"session_id", s.id()}, {"ack_seq", seq}};
      delta.update(io::scene_delta(engine));
      out.push_back(std::move(delta));
    }
    return out;
  }

  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 0;
};

}  // namespace vrdoc

#endif  // VRDOC_SESSION_HPP_
