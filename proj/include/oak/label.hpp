#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oak {

enum class LabelKind { Categorical, LabelSet, Point2D, TreePath, BoxSet };

/// Wire tag used in JSONL records: "cat", "set", "pt", "path", "boxes".
std::string_view kind_tag(LabelKind kind);
std::optional<LabelKind> kind_from_tag(std::string_view tag);

struct Categorical {
  std::string value;
  friend bool operator==(const Categorical&, const Categorical&) = default;
};

struct LabelSet {
  std::set<std::string> topics;
  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

struct Point2D {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2D&, const Point2D&) = default;
};

/// Root-to-leaf path in a three-level taxonomy.
struct TreePath {
  std::array<std::string, 3> nodes;
  friend bool operator==(const TreePath&, const TreePath&) = default;
};

/// Half-open integer rectangle: covers cells x0 <= x < x1, y0 <= y < y1.
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  friend auto operator<=>(const Box&, const Box&) = default;
};

/// Fixed-size bit grid, row-major.
class Bitmap {
 public:
  Bitmap() = default;
  Bitmap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool test(int x, int y) const;
  void set(int x, int y);
  std::size_t count() const;
  std::size_t intersection_count(const Bitmap& other) const;
  std::size_t union_count(const Bitmap& other) const;

  friend bool operator==(const Bitmap&, const Bitmap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Set of boxes on a W x H grid. Two box sets compare equal when they cover
/// the same cells; the box list itself is kept for partitioning and output.
class BoxSet {
 public:
  BoxSet() = default;
  /// Throws ValidationError when a box is empty or leaves the grid.
  BoxSet(int width, int height, std::vector<Box> boxes);

  /// Rectangle cover of a bitmap (row runs merged vertically).
  static BoxSet from_bitmap(const Bitmap& bits);

  int width() const { return bits_.width(); }
  int height() const { return bits_.height(); }
  const std::vector<Box>& boxes() const { return boxes_; }
  const Bitmap& bitmap() const { return bits_; }
  std::size_t distinct_boxes() const;

  friend bool operator==(const BoxSet& a, const BoxSet& b) { return a.bits_ == b.bits_; }

 private:
  std::vector<Box> boxes_;
  Bitmap bits_;
};

using Label = std::variant<Categorical, LabelSet, Point2D, TreePath, BoxSet>;

LabelKind kind_of(const Label& label);

/// Short human-readable rendering, for diagnostics only.
std::string describe(const Label& label);

}  // namespace oak
