#include "oak/label.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

#include "oak/error.hpp"

namespace oak {

std::string_view kind_tag(LabelKind kind) {
  switch (kind) {
    case LabelKind::Categorical: return "cat";
    case LabelKind::LabelSet: return "set";
    case LabelKind::Point2D: return "pt";
    case LabelKind::TreePath: return "path";
    case LabelKind::BoxSet: return "boxes";
  }
  return "cat";
}

std::optional<LabelKind> kind_from_tag(std::string_view tag) {
  if (tag == "cat") return LabelKind::Categorical;
  if (tag == "set") return LabelKind::LabelSet;
  if (tag == "pt") return LabelKind::Point2D;
  if (tag == "path") return LabelKind::TreePath;
  if (tag == "boxes") return LabelKind::BoxSet;
  return std::nullopt;
}

Bitmap::Bitmap(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ValidationError("bitmap dimensions must be non-negative");
  const auto cells = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  words_.assign((cells + 63) / 64, 0);
}

bool Bitmap::test(int x, int y) const {
  const auto idx = static_cast<std::size_t>(y) * width_ + x;
  return (words_[idx / 64] >> (idx % 64)) & 1U;
}

void Bitmap::set(int x, int y) {
  const auto idx = static_cast<std::size_t>(y) * width_ + x;
  words_[idx / 64] |= std::uint64_t{1} << (idx % 64);
}

std::size_t Bitmap::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

std::size_t Bitmap::intersection_count(const Bitmap& other) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) n += std::popcount(words_[i] & other.words_[i]);
  return n;
}

std::size_t Bitmap::union_count(const Bitmap& other) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) n += std::popcount(words_[i] | other.words_[i]);
  return n;
}

BoxSet::BoxSet(int width, int height, std::vector<Box> boxes)
    : boxes_(std::move(boxes)), bits_(width, height) {
  for (const auto& b : boxes_) {
    if (b.x0 < 0 || b.y0 < 0 || b.x0 >= b.x1 || b.y0 >= b.y1 || b.x1 > width || b.y1 > height) {
      std::ostringstream msg;
      msg << "box [" << b.x0 << "," << b.y0 << "," << b.x1 << "," << b.y1
          << "] is empty or outside the " << width << "x" << height << " grid";
      throw ValidationError(msg.str());
    }
    for (int y = b.y0; y < b.y1; ++y)
      for (int x = b.x0; x < b.x1; ++x) bits_.set(x, y);
  }
}

BoxSet BoxSet::from_bitmap(const Bitmap& bits) {
  // Open rectangles keyed by their horizontal run [x0, x1).
  std::map<std::pair<int, int>, int> open;
  std::vector<Box> boxes;
  for (int y = 0; y <= bits.height(); ++y) {
    std::map<std::pair<int, int>, int> next;
    if (y < bits.height()) {
      int x = 0;
      while (x < bits.width()) {
        if (!bits.test(x, y)) {
          ++x;
          continue;
        }
        int end = x;
        while (end < bits.width() && bits.test(end, y)) ++end;
        const auto run = std::make_pair(x, end);
        auto it = open.find(run);
        next[run] = it != open.end() ? it->second : y;
        if (it != open.end()) open.erase(it);
        x = end;
      }
    }
    for (const auto& [run, y0] : open) boxes.push_back({run.first, y0, run.second, y});
    open = std::move(next);
  }
  std::sort(boxes.begin(), boxes.end());
  BoxSet out;
  out.boxes_ = std::move(boxes);
  out.bits_ = bits;
  return out;
}

std::size_t BoxSet::distinct_boxes() const {
  std::vector<Box> sorted = boxes_;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

LabelKind kind_of(const Label& label) { return static_cast<LabelKind>(label.index()); }

std::string describe(const Label& label) {
  std::ostringstream out;
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          out << v.value;
        } else if constexpr (std::is_same_v<T, LabelSet>) {
          out << '{';
          bool first = true;
          for (const auto& t : v.topics) {
            out << (first ? "" : ",") << t;
            first = false;
          }
          out << '}';
        } else if constexpr (std::is_same_v<T, Point2D>) {
          out << '(' << v.x << ',' << v.y << ')';
        } else if constexpr (std::is_same_v<T, TreePath>) {
          out << v.nodes[0] << '/' << v.nodes[1] << '/' << v.nodes[2];
        } else {
          out << v.boxes().size() << " boxes on " << v.width() << 'x' << v.height();
        }
      },
      label);
  return out.str();
}

}  // namespace oak
