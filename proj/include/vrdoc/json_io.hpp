#ifndef VRDOC_JSON_IO_HPP_
#define VRDOC_JSON_IO_HPP_

// JSON encodings of every file and wire format: scenario files, gaze trace
// lines, event log lines and scene snapshots. Field order is fixed
// (ordered_json) so that serialised logs compare byte for byte.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vrdoc/engine.hpp"
#include "vrdoc/gaze.hpp"
#include "vrdoc/scenario.hpp"

namespace vrdoc {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Malformed input. `line()` is 1-based for line-delimited files, 0 otherwise.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace io {

inline Json to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }
inline Json to_json(const Orientation& q) { return Json::array({q.w, q.x, q.y, q.z}); }
inline Json to_json(const Pose& p) { return Json{{"position", to_json(p.position)}, {"orientation", to_json(p.orientation)}}; }
inline Json to_json(const Uv& uv) { return Json::array({uv.u, uv.v}); }

inline double num(const Json& j, const char* what) {
  if (!j.is_number()) throw std::invalid_argument(std::string(what) + " must be a number");
  return j.get<double>();
}

inline Vec3 vec3_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected [x, y, z]");
  return {num(j[0], "x"), num(j[1], "y"), num(j[2], "z")};
}

// Values that are already unit length to within rounding are kept bit-exact,
// so written logs read back unchanged.
inline Vec3 unit_from(const Vec3& d, const char* what) {
  const double n = norm(d);
  if (!(n > 0.0)) throw std::invalid_argument(std::string("zero ") + what);
  return std::abs(n - 1.0) <= 1e-12 ? d : d / n;
}

inline Orientation unit_from(const Orientation& q) {
  const double n = q.norm();
  if (!(n > 0.0)) throw std::invalid_argument("zero quaternion");
  return std::abs(n - 1.0) <= 1e-12 ? q : q.normalized();
}

inline Orientation orientation_from(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("expected [w, x, y, z]");
  return unit_from(Orientation{num(j[0], "w"), num(j[1], "x"), num(j[2], "y"), num(j[3], "z")});
}

inline Pose pose_from(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("pose must be an object");
  return {vec3_from(j.at("position")), orientation_from(j.at("orientation"))};
}

inline Json to_json(const LensRegion& r) {
  return Json{{"panel", r.panel},
              {"center_uv", to_json(r.center_uv)},
              {"width_uv", r.width_uv},
              {"height_uv", r.height_uv},
              {"magnification", r.magnification},
              {"camera_pose", to_json(r.camera_pose)}};
}

inline LensRegion lens_region_from(const Json& j) {
  LensRegion r;
  r.panel = j.at("panel").get<std::string>();
  const auto& c = j.at("center_uv");
  r.center_uv = {c.at(0).get<double>(), c.at(1).get<double>()};
  r.width_uv = j.at("width_uv").get<double>();
  r.height_uv = j.at("height_uv").get<double>();
  r.magnification = j.at("magnification").get<double>();
  r.camera_pose = pose_from(j.at("camera_pose"));
  return r;
}

// ---- events --------------------------------------------------------------

inline Json to_json(const InteractionEvent& e) {
  Json j{{"t", e.t}, {"kind", to_string(e.kind)}, {"panel", e.panel}};
  if (e.z_rank) j["z_rank"] = *e.z_rank;
  if (e.pose) j["pose"] = to_json(*e.pose);
  if (e.region) j["region"] = to_json(*e.region);
  if (e.direction) j["direction"] = to_string(*e.direction);
  if (e.kind == EventKind::Scroll) j["sentences"] = e.count;
  if (e.kind == EventKind::BaselineScroll) j["lines"] = e.count;
  if (e.line) j["line"] = *e.line;
  return j;
}

inline InteractionEvent event_from(const Json& j) {
  InteractionEvent e;
  e.t = j.at("t").get<double>();
  const auto kind = parse_event_kind(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown event kind");
  e.kind = *kind;
  e.panel = j.at("panel").get<std::string>();
  if (j.contains("z_rank")) e.z_rank = j["z_rank"].get<long long>();
  if (j.contains("pose")) e.pose = pose_from(j["pose"]);
  if (j.contains("region")) e.region = lens_region_from(j["region"]);
  if (j.contains("direction")) {
    const auto d = j["direction"].get<std::string>();
    if (d != "up" && d != "down") throw std::invalid_argument("direction must be up or down");
    e.direction = d == "up" ? ScrollDirection::Up : ScrollDirection::Down;
  }
  if (j.contains("sentences")) e.count = j["sentences"].get<long long>();
  if (j.contains("lines")) e.count = j["lines"].get<long long>();
  if (j.contains("line")) e.line = j["line"].get<std::size_t>();
  return e;
}

inline std::string event_line(const InteractionEvent& e) { return to_json(e).dump(); }

// ---- gaze trace ------------------------------------------------------------

inline Json to_json(const GazeSample& s) {
  Json j{{"t", s.t},
         {"ox", s.ray.origin.x},
         {"oy", s.ray.origin.y},
         {"oz", s.ray.origin.z},
         {"dx", s.ray.direction.x},
         {"dy", s.ray.direction.y},
         {"dz", s.ray.direction.z},
         {"valid", s.valid},
         {"trigger", s.buttons.trigger_pressed},
         {"grab", s.buttons.grab_pressed},
         {"trackpad_dy", s.buttons.trackpad_dy},
         {"lens_toggle", s.buttons.lens_toggle_pressed}};
  if (s.head_orientation) {
    j["qw"] = s.head_orientation->w;
    j["qx"] = s.head_orientation->x;
    j["qy"] = s.head_orientation->y;
    j["qz"] = s.head_orientation->z;
  }
  if (s.controller) {
    j["cox"] = s.controller->origin.x;
    j["coy"] = s.controller->origin.y;
    j["coz"] = s.controller->origin.z;
    j["cdx"] = s.controller->direction.x;
    j["cdy"] = s.controller->direction.y;
    j["cdz"] = s.controller->direction.z;
  }
  return j;
}

inline GazeSample sample_from(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("sample must be a JSON object");
  auto f = [&](const char* k) { return num(j.at(k), k); };
  auto b = [&](const char* k, bool dflt) {
    if (!j.contains(k)) return dflt;
    if (!j[k].is_boolean()) throw std::invalid_argument(std::string(k) + " must be a boolean");
    return j[k].get<bool>();
  };
  GazeSample s;
  s.t = f("t");
  s.valid = b("valid", true);
  s.ray.origin = {f("ox"), f("oy"), f("oz")};
  const Vec3 d{j.value("dx", 0.0), j.value("dy", 0.0), j.value("dz", 0.0)};
  if (s.valid) {
    s.ray.direction = unit_from(d, "direction on a valid sample");
  } else {
    s.ray.direction = d;
  }
  s.buttons.trigger_pressed = b("trigger", false);
  s.buttons.grab_pressed = b("grab", false);
  s.buttons.trackpad_dy = j.contains("trackpad_dy") ? num(j["trackpad_dy"], "trackpad_dy") : 0.0;
  s.buttons.lens_toggle_pressed = b("lens_toggle", false);
  if (j.contains("qw")) {
    s.head_orientation = unit_from(Orientation{f("qw"), f("qx"), f("qy"), f("qz")});
  }
  if (j.contains("cox")) {
    s.controller = Ray{{f("cox"), f("coy"), f("coz")}, unit_from(Vec3{f("cdx"), f("cdy"), f("cdz")}, "controller direction")};
  }
  return s;
}

template <class T, class Parse>
std::vector<T> read_lines(std::istream& in, Parse parse) {
  std::vector<T> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(Json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(n, e.what());
    }
  }
  return out;
}

inline std::vector<GazeSample> read_trace(std::istream& in) { return read_lines<GazeSample>(in, sample_from); }
inline std::vector<InteractionEvent> read_events(std::istream& in) { return read_lines<InteractionEvent>(in, event_from); }

inline void write_trace(std::ostream& out, const std::vector<GazeSample>& trace) {
  for (const auto& s : trace) out << to_json(s).dump() << '\n';
}

inline void write_events(std::ostream& out, const std::vector<InteractionEvent>& events) {
  for (const auto& e : events) out << event_line(e) << '\n';
}

// ---- config ----------------------------------------------------------------

inline Json to_json(const EngineConfig& c) {
  Json j;
  for_each_numeric_field(c, [&](const char* name, const auto& v) { j[name] = v; });
  j["mode"] = to_string(c.mode);
  return j;
}

/// Applies the fields present in `j` on top of `base`.
inline EngineConfig config_from(const Json& j, EngineConfig base = {}) {
  if (!j.is_object()) throw std::invalid_argument("config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (value.is_string()) {
      apply_override(base, key, value.get<std::string>());
    } else if (value.is_number()) {
      apply_override(base, key, value.dump());
    } else {
      throw ConfigError("config value for '" + key + "' must be a number or string");
    }
  }
  return base;
}

// ---- scenario --------------------------------------------------------------

inline Json to_json(const Scenario& s) {
  Json docs = Json::array();
  for (const auto& d : s.documents) {
    docs.push_back(Json{{"panel_id", d.panel_id},
                        {"id", d.content.id},
                        {"kind", to_string(d.content.kind)},
                        {"is_document", d.is_document},
                        {"word_count", d.content.word_count},
                        {"extent", Json::array({d.extent.width, d.extent.height})},
                        {"placement",
                         Json{{"radius_m", d.placement.radius_m},
                              {"angle_deg", d.placement.angle_deg},
                              {"height_m", d.placement.height_m}}},
                        {"sentences", d.content.sentences}});
  }
  Json j{{"v", kFormatVersion}, {"name", s.name}};
  j["task"] = s.task ? Json(to_string(*s.task)) : Json(nullptr);
  j["seed"] = s.seed;
  j["head_start"] = to_json(s.head_start);
  j["tracking_area"] = Json::array({s.tracking_width_m, s.tracking_depth_m});
  j["config"] = to_json(s.config);
  j["documents"] = std::move(docs);
  return j;
}

inline Scenario scenario_from(const Json& j) {
  Scenario s;
  if (j.contains("v") && j["v"] != kFormatVersion) throw std::invalid_argument("unsupported scenario version");
  s.name = j.value("name", std::string("scenario"));
  if (j.contains("task") && !j["task"].is_null()) {
    s.task = parse_task(j["task"].get<std::string>());
    if (!s.task) throw std::invalid_argument("unknown task");
  }
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("head_start")) s.head_start = pose_from(j["head_start"]);
  if (j.contains("tracking_area")) {
    s.tracking_width_m = j["tracking_area"].at(0).get<double>();
    s.tracking_depth_m = j["tracking_area"].at(1).get<double>();
  }
  if (j.contains("config")) s.config = config_from(j["config"]);
  for (const auto& d : j.at("documents")) {
    ScenarioDocument doc;
    doc.panel_id = d.at("panel_id").get<std::string>();
    const std::string kind = d.value("kind", std::string("short"));
    if (kind != "short" && kind != "long") throw std::invalid_argument("document kind must be short or long");
    doc.content = DocumentContent::make(d.value("id", doc.panel_id), d.at("sentences").get<std::vector<std::string>>(),
                                        kind == "short" ? DocumentKind::Short : DocumentKind::Long);
    doc.is_document = d.value("is_document", true);
    if (d.contains("extent")) doc.extent = {d["extent"].at(0).get<double>(), d["extent"].at(1).get<double>()};
    if (d.contains("placement")) {
      const auto& p = d["placement"];
      doc.placement = {p.value("radius_m", 1.0), p.value("angle_deg", 0.0), p.value("height_m", 0.0)};
    }
    s.documents.push_back(std::move(doc));
  }
  validate(s);
  return s;
}

inline Scenario read_scenario(std::istream& in) {
  try {
    return scenario_from(Json::parse(in));
  } catch (const ScenarioError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(0, e.what());
  }
}

// ---- scene snapshots ---------------------------------------------------------

inline Json panel_state_json(const DocumentPanel& p) {
  return Json{{"id", p.panel_id},
              {"pose", to_json(p.pose)},
              {"z_rank", p.z_rank},
              {"scroll_line", p.scroll_line},
              {"highlighted", p.highlighted}};
}

/// Full scene including layouts, sent once when a session starts.
inline Json scene_snapshot(const Scene& scene, const EngineConfig& cfg) {
  Json panels = Json::array();
  for (const auto& p : scene.panels) {
    Json lines = Json::array();
    for (const auto& l : p.layout.lines) lines.push_back(l.text);
    Json pj = panel_state_json(p);
    pj["extent"] = Json::array({p.extent.width, p.extent.height});
    pj["is_document"] = p.is_document;
    pj["content_id"] = p.content_id;
    pj["visible_lines"] = p.layout.visible_lines;
    pj["chars_per_line"] = p.layout.chars_per_line;
    pj["line_spacing"] = p.layout.line_spacing;
    pj["lines"] = std::move(lines);
    panels.push_back(std::move(pj));
  }
  return Json{{"mode", to_string(cfg.mode)},
              {"head", to_json(scene.head)},
              {"strip_frac", cfg.scroll_button_strip_frac},
              {"panels", std::move(panels)}};
}

}  // namespace io
}  // namespace vrdoc

#endif  // VRDOC_JSON_IO_HPP_
