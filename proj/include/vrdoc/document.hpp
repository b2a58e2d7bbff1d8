#ifndef VRDOC_DOCUMENT_HPP_
#define VRDOC_DOCUMENT_HPP_

// Document text, monospace greedy line layout, the scrollable view box and
// the posed panel that carries them into the scene.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrdoc/geometry.hpp"

namespace vrdoc {

class LayoutError : public std::runtime_error {
 public:
  LayoutError(std::string word, std::size_t chars_per_line)
      : std::runtime_error("word '" + word + "' is longer than " + std::to_string(chars_per_line) +
                           " characters"),
        word_(std::move(word)) {}

  const std::string& word() const { return word_; }

 private:
  std::string word_;
};

enum class DocumentKind { Short, Long };

inline const char* to_string(DocumentKind k) { return k == DocumentKind::Short ? "short" : "long"; }

/// Whitespace-delimited tokens of `text`.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string w; in >> w;) out.push_back(std::move(w));
  return out;
}

struct DocumentContent {
  std::string id;
  std::vector<std::string> sentences;  ///< pre-split; never re-segmented
  std::size_t word_count = 0;
  DocumentKind kind = DocumentKind::Short;

  static DocumentContent make(std::string id, std::vector<std::string> sentences, DocumentKind kind) {
    DocumentContent c{std::move(id), std::move(sentences), 0, kind};
    for (const auto& s : c.sentences) c.word_count += tokenize(s).size();
    return c;
  }
};

struct LayoutLine {
  std::string text;
  std::size_t sentence_index = 0;    ///< sentence of the line's first word
  std::size_t first_word_index = 0;  ///< global index of the line's first word

  friend bool operator==(const LayoutLine&, const LayoutLine&) = default;
};

/// Default view-box metrics: nine visible lines of about 65 characters at
/// 1.2 line spacing.
inline constexpr std::size_t kCharsPerLine = 65;
inline constexpr std::size_t kVisibleLines = 9;
inline constexpr double kLineSpacing = 1.2;

struct Layout {
  std::vector<LayoutLine> lines;
  std::size_t chars_per_line = kCharsPerLine;
  std::size_t visible_lines = kVisibleLines;
  double line_spacing = kLineSpacing;
  /// sentence_starts[s] is the line holding the first word of sentence s.
  std::vector<std::size_t> sentence_starts;
  std::size_t total_words = 0;
  std::size_t total_word_chars = 0;

  std::size_t max_scroll() const { return lines.size() > visible_lines ? lines.size() - visible_lines : 0; }

  /// Mean word width in characters including one trailing space.
  double mean_word_chars() const {
    return total_words == 0 ? 0.0 : static_cast<double>(total_word_chars + total_words) / total_words;
  }
};

/// Greedy word wrap: words flow across sentence boundaries, each line holds
/// as many words as fit in `chars_per_line` with single spaces between them.
inline Layout layout_text(const DocumentContent& content, std::size_t chars_per_line,
                          std::size_t visible_lines = kVisibleLines, double line_spacing = kLineSpacing) {
  Layout layout;
  layout.chars_per_line = chars_per_line;
  layout.visible_lines = visible_lines;
  layout.line_spacing = line_spacing;

  std::size_t word_index = 0;
  std::optional<LayoutLine> current;
  for (std::size_t s = 0; s < content.sentences.size(); ++s) {
    bool first_of_sentence = true;
    for (auto& word : tokenize(content.sentences[s])) {
      if (word.size() > chars_per_line) throw LayoutError(word, chars_per_line);
      if (current && current->text.size() + 1 + word.size() <= chars_per_line) {
        current->text += ' ';
        current->text += word;
      } else {
        if (current) layout.lines.push_back(std::move(*current));
        current = LayoutLine{word, s, word_index};
      }
      if (first_of_sentence) {
        // lines are pushed only when closed, so the open line's index is size()
        layout.sentence_starts.push_back(layout.lines.size());
        first_of_sentence = false;
      }
      layout.total_word_chars += word.size();
      ++word_index;
    }
    if (first_of_sentence) {
      // empty sentence: anchor it on the open line
      layout.sentence_starts.push_back(layout.lines.size());
    }
  }
  if (current) layout.lines.push_back(std::move(*current));
  layout.total_words = word_index;
  return layout;
}

struct DocumentPanel {
  std::string panel_id;
  Pose pose;
  PanelExtent extent;
  std::string content_id;
  Layout layout;
  std::size_t scroll_line = 0;
  long long z_rank = 0;
  bool is_document = true;
  bool highlighted = false;

  Vec3 normal() const { return pose.orientation.back(); }
  bool scrollable() const { return layout.max_scroll() > 0; }
};

/// Lines [scroll_line, scroll_line + visible_lines) that exist.
inline std::span<const LayoutLine> visible_window(const DocumentPanel& panel) {
  const auto& lines = panel.layout.lines;
  const std::size_t first = std::min(panel.scroll_line, lines.size());
  const std::size_t count = std::min(panel.layout.visible_lines, lines.size() - first);
  return {lines.data() + first, count};
}

inline std::size_t clamp_scroll(const DocumentPanel& panel, long long line) {
  return static_cast<std::size_t>(std::clamp<long long>(line, 0, static_cast<long long>(panel.layout.max_scroll())));
}

/// Sets the scroll position, clamped to the valid range.
inline void set_scroll(DocumentPanel& panel, long long line) { panel.scroll_line = clamp_scroll(panel, line); }

/// Distinct lines on which at least one sentence starts, ascending.
inline std::vector<std::size_t> sentence_start_lines(const Layout& layout) {
  std::vector<std::size_t> starts;
  for (std::size_t l : layout.sentence_starts) {
    if (l < layout.lines.size() && (starts.empty() || starts.back() != l)) starts.push_back(l);
  }
  return starts;
}

/// Moves the top of the view n sentence starts forward (n > 0) or backward
/// (n < 0) from the last sentence start at or above the current top line.
/// Sentences beginning on the same line count as one step. The result is
/// clamped to [0, max_scroll]; n == 0 leaves the panel untouched.
inline DocumentPanel scroll_by_sentences(DocumentPanel panel, long long n) {
  if (n == 0) return panel;
  const auto starts = sentence_start_lines(panel.layout);
  if (starts.empty()) return panel;
  const auto it = std::upper_bound(starts.begin(), starts.end(), panel.scroll_line);
  const long long anchor = static_cast<long long>(it - starts.begin()) - 1;  // >= 0, starts[0] == 0
  const long long target = std::clamp<long long>(anchor + n, 0, static_cast<long long>(starts.size()) - 1);
  set_scroll(panel, static_cast<long long>(starts[static_cast<std::size_t>(target)]));
  return panel;
}

/// Maps a panel uv to the visible line under it. The text area spans
/// [strip_frac, 1 - strip_frac] in v, split into visible_lines equal rows of
/// line_spacing-scaled height; the strips and rows past the last line map to
/// nothing.
inline std::optional<std::size_t> uv_to_line(const DocumentPanel& panel, Uv uv, double strip_frac) {
  const double top = strip_frac;
  const double bottom = 1.0 - strip_frac;
  if (uv.v < top || uv.v > bottom) return std::nullopt;
  const auto rows = panel.layout.visible_lines;
  if (rows == 0) return std::nullopt;
  const double row_h = (bottom - top) / static_cast<double>(rows);
  auto row = static_cast<std::size_t>(std::floor((uv.v - top) / row_h));
  row = std::min(row, rows - 1);
  const std::size_t line = panel.scroll_line + row;
  if (line >= panel.layout.lines.size()) return std::nullopt;
  return line;
}

/// Panel-space v at the centre of visible row `row`.
inline double row_center_v(const Layout& layout, std::size_t row, double strip_frac) {
  const double row_h = (1.0 - 2.0 * strip_frac) / static_cast<double>(layout.visible_lines);
  return strip_frac + (static_cast<double>(row) + 0.5) * row_h;
}

/// Panel-space u at the centre of character column `col` (may be fractional).
inline double column_u(const Layout& layout, double col) { return (col + 0.5) / static_cast<double>(layout.chars_per_line); }

}  // namespace vrdoc

#endif  // VRDOC_DOCUMENT_HPP_
