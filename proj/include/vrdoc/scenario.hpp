#ifndef VRDOC_SCENARIO_HPP_
#define VRDOC_SCENARIO_HPP_

// Task scenarios: which passages exist, where their panels stand around the
// reader, and the engine configuration the run uses.

#include <algorithm>
#include <iterator>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vrdoc/document.hpp"
#include "vrdoc/engine.hpp"
#include "vrdoc/geometry.hpp"
#include "vrdoc/rng.hpp"

namespace vrdoc {

enum class Task { T1, T2, T3, T4 };

inline const char* to_string(Task t) {
  switch (t) {
    case Task::T1: return "T1";
    case Task::T2: return "T2";
    case Task::T3: return "T3";
    case Task::T4: return "T4";
  }
  return "?";
}

inline std::optional<Task> parse_task(std::string_view s) {
  if (s == "T1" || s == "t1") return Task::T1;
  if (s == "T2" || s == "t2") return Task::T2;
  if (s == "T3" || s == "t3") return Task::T3;
  if (s == "T4" || s == "t4") return Task::T4;
  return std::nullopt;
}

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Panel placement relative to the head start pose: `radius_m` along the
/// horizontal direction `angle_deg` (0 straight ahead, positive to the
/// right), `height_m` above eye level.
struct Placement {
  double radius_m = 1.0;
  double angle_deg = 0.0;
  double height_m = 0.0;
};

struct ScenarioDocument {
  std::string panel_id;
  DocumentContent content;
  Placement placement;
  PanelExtent extent;
  bool is_document = true;
};

inline constexpr double kEyeHeight = 1.6;
inline constexpr double kTrackingArea = 1.5;
inline constexpr double kArmReach = 0.7;
inline constexpr double kSemicircleRadius = 1.0;

struct Scenario {
  std::string name;
  std::optional<Task> task;
  std::vector<ScenarioDocument> documents;
  Pose head_start{{0.0, kEyeHeight, 0.0}, {}};
  double tracking_width_m = kTrackingArea;
  double tracking_depth_m = kTrackingArea;
  EngineConfig config;
  std::uint64_t seed = 0;

  /// Furthest panel distance a reader can reach by walking inside the
  /// tracking area and extending an arm.
  double reach_m() const { return 0.5 * std::hypot(tracking_width_m, tracking_depth_m) + kArmReach; }
};

struct TaskTemplate {
  int short_docs = 0;
  int long_docs = 0;
};

inline TaskTemplate task_template(Task t) {
  switch (t) {
    case Task::T1: return {5, 0};
    case Task::T2: return {1, 0};
    case Task::T3: return {0, 1};
    case Task::T4: return {2, 1};
  }
  return {};
}

/// Throws ScenarioError describing the first violated invariant.
inline void validate(const Scenario& s) {
  if (s.documents.empty()) throw ScenarioError("scenario has no documents");
  std::set<std::string> ids;
  for (const auto& d : s.documents) {
    if (d.panel_id.empty()) throw ScenarioError("document without panel id");
    if (!ids.insert(d.panel_id).second) throw ScenarioError("duplicate panel id '" + d.panel_id + "'");
    if (!d.extent.valid()) throw ScenarioError("panel '" + d.panel_id + "' has a non-positive extent");
    if (!(d.placement.radius_m > 0.0) || d.placement.radius_m > s.reach_m()) {
      throw ScenarioError("panel '" + d.panel_id + "' is outside the reachable shell");
    }
  }
  if (s.task) {
    const auto tpl = task_template(*s.task);
    int shorts = 0;
    int longs = 0;
    for (const auto& d : s.documents) {
      if (!d.is_document) continue;
      (d.content.kind == DocumentKind::Short ? shorts : longs) += 1;
    }
    if (shorts != tpl.short_docs || longs != tpl.long_docs) {
      throw ScenarioError(std::string("document mix does not match task ") + to_string(*s.task));
    }
  }
  s.config.validate();
}

/// Panel pose for a placement: centred on the placement point, facing the
/// head start position, upright.
inline Pose placement_pose(const Pose& head, const Placement& p) {
  const double a = deg_to_rad(p.angle_deg);
  const Vec3 dir{std::sin(a), 0.0, -std::cos(a)};
  const Vec3 center = head.position + dir * p.radius_m + Vec3{0.0, p.height_m, 0.0};
  return {center, Orientation::look_rotation(dir, kWorldUp)};
}

inline Scene build_scene(const Scenario& s) {
  Scene scene;
  scene.head = s.head_start;
  long long rank = 1;
  for (const auto& d : s.documents) {
    DocumentPanel p;
    p.panel_id = d.panel_id;
    p.pose = placement_pose(s.head_start, d.placement);
    p.extent = d.extent;
    p.content_id = d.content.id;
    p.layout = layout_text(d.content, static_cast<std::size_t>(s.config.chars_per_line),
                           static_cast<std::size_t>(s.config.visible_lines), s.config.line_spacing);
    p.z_rank = rank++;
    p.is_document = d.is_document;
    scene.panels.push_back(std::move(p));
  }
  return scene;
}

namespace detail {

inline constexpr std::string_view kWords[] = {
    "the",  "a",    "of",   "to",   "and",  "in",   "is",   "it",   "you",  "that", "he",   "was",  "for",
    "on",   "are",  "as",   "with", "his",  "they", "at",   "be",   "this", "from", "have", "or",   "by",
    "one",  "had",  "not",  "but",  "what", "all",  "were", "when", "we",   "there", "can", "an",   "your",
    "which", "their", "said", "if",  "do",   "will", "each", "about", "how", "up",   "out",  "them", "then",
    "she",  "many", "some", "so",   "these", "would", "other", "into", "has", "more", "her",  "two",  "like",
    "him",  "see",  "time", "could", "no",  "make", "than", "first", "been", "its",  "who",  "now",  "people",
    "my",   "made", "over", "did",  "down", "only", "way",  "find", "use",  "may",  "water", "long", "little",
    "very", "after", "words", "called", "just", "where", "most", "know", "get", "through", "back", "much",
    "go",   "good", "new",  "write", "our",  "used", "me",   "man",  "day",  "too",  "any",  "same", "right",
    "look", "think", "also", "around", "small",
};

inline std::string make_sentence(Rng& rng, int words) {
  std::string s;
  for (int i = 0; i < words; ++i) {
    std::string w(kWords[rng.below(std::size(kWords))]);
    if (i == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    if (i > 0) s += ' ';
    s += w;
  }
  s += '.';
  return s;
}

}  // namespace detail

/// Deterministic filler passage of about 100 (short) or 500 (long) words in sentences
/// of 7-15 words. Short passages are redrawn until they fit one view box.
inline DocumentContent make_passage(Rng& rng, std::string id, DocumentKind kind, const EngineConfig& cfg) {
  const std::size_t target = kind == DocumentKind::Short ? 100 : 500;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::string> sentences;
    std::size_t words = 0;
    while (words + 4 < target) {
      const auto n = static_cast<int>(std::min<long long>(rng.between(7, 15), static_cast<long long>(target - words)));
      sentences.push_back(detail::make_sentence(rng, n));
      words += static_cast<std::size_t>(n);
    }
    auto content = DocumentContent::make(id, std::move(sentences), kind);
    if (kind == DocumentKind::Long) return content;
    const auto layout = layout_text(content, static_cast<std::size_t>(cfg.chars_per_line),
                                    static_cast<std::size_t>(cfg.visible_lines));
    if (layout.lines.size() <= layout.visible_lines) return content;
  }
  throw ScenarioError("could not generate a short passage that fits the view box");
}

/// Task layouts. T1 and T4 stand on a semicircle of radius 1 m (40 degrees
/// apart, centred ahead); T2 stands at reading distance, T3 just beyond the
/// magnifier range. Passage order across positions is shuffled by `seed`.
inline Scenario build_task_scenario(Task task, std::uint64_t seed, EngineConfig cfg = {}) {
  Scenario s;
  s.name = to_string(task);
  s.task = task;
  s.seed = seed;
  s.config = cfg;
  Rng rng(seed);

  const auto tpl = task_template(task);
  std::vector<DocumentContent> passages;
  for (int i = 0; i < tpl.short_docs; ++i)
    passages.push_back(make_passage(rng, "short-" + std::to_string(i), DocumentKind::Short, cfg));
  for (int i = 0; i < tpl.long_docs; ++i)
    passages.push_back(make_passage(rng, "long-" + std::to_string(i), DocumentKind::Long, cfg));
  rng.shuffle(passages.begin(), passages.end());

  const std::size_t n = passages.size();
  for (std::size_t i = 0; i < n; ++i) {
    ScenarioDocument d;
    d.panel_id = "doc" + std::to_string(i);
    d.content = std::move(passages[i]);
    switch (task) {
      case Task::T1:
      case Task::T4:
        d.placement = {kSemicircleRadius, 40.0 * (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)), 0.0};
        break;
      case Task::T2:
        d.placement = {cfg.snap_distance_m, 0.0, 0.0};
        break;
      case Task::T3:
        d.placement = {0.55, 0.0, 0.0};
        break;
    }
    s.documents.push_back(std::move(d));
  }
  validate(s);
  return s;
}

}  // namespace vrdoc

#endif  // VRDOC_SCENARIO_HPP_
