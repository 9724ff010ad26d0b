#include "oak/partition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oak {
namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <typename F>
void for_each_label(const Dataset& ds, F&& f) {
  for (std::size_t j = 0; j < ds.num_items(); ++j) {
    for (const auto& r : ds.reports(j)) f(r.label);
    if (ds.auditor(j)) f(*ds.auditor(j));
  }
}

}  // namespace

Partitioner Partitioner::single() { return Partitioner{}; }

Partitioner Partitioner::category(std::vector<std::string> categories) {
  Partitioner p;
  p.rule_ = Rule::Category;
  p.vocab_ = sorted_unique(std::move(categories));
  return p;
}

Partitioner Partitioner::topic_singleton(std::vector<std::string> vocabulary) {
  Partitioner p;
  p.rule_ = Rule::TopicSingleton;
  p.vocab_ = sorted_unique(std::move(vocabulary));
  return p;
}

Partitioner Partitioner::tree_root(std::vector<std::string> roots) {
  Partitioner p;
  p.rule_ = Rule::TreeRoot;
  p.vocab_ = sorted_unique(std::move(roots));
  return p;
}

Partitioner Partitioner::box_count() {
  Partitioner p;
  p.rule_ = Rule::BoxCount;
  return p;
}

Partitioner Partitioner::point_grid(std::size_t nx, std::size_t ny, std::array<double, 4> bounds) {
  if (nx == 0 || ny == 0) throw std::invalid_argument("grid partition needs at least one cell");
  Partitioner p;
  p.rule_ = Rule::PointGrid;
  p.nx_ = nx;
  p.ny_ = ny;
  p.bounds_ = bounds;
  return p;
}

std::size_t Partitioner::num_types() const {
  switch (rule_) {
    case Rule::Single: return 1;
    case Rule::Category:
    case Rule::TreeRoot: return std::max<std::size_t>(vocab_.size(), 1);
    case Rule::TopicSingleton: return vocab_.size() + 1;
    case Rule::BoxCount: return kMaxBoxCount + 1;
    case Rule::PointGrid: return nx_ * ny_;
  }
  return 1;
}

std::optional<std::size_t> Partitioner::vocab_index(const std::string& value) const {
  auto it = std::lower_bound(vocab_.begin(), vocab_.end(), value);
  if (it == vocab_.end() || *it != value) return std::nullopt;
  return static_cast<std::size_t>(it - vocab_.begin());
}

std::optional<std::size_t> Partitioner::type_of(const Label& label) const {
  switch (rule_) {
    case Rule::Single: return 0;
    case Rule::Category:
      if (const auto* c = std::get_if<Categorical>(&label)) return vocab_index(c->value);
      break;
    case Rule::TopicSingleton:
      if (const auto* s = std::get_if<LabelSet>(&label)) {
        if (s->topics.size() != 1) return vocab_.size();
        return vocab_index(*s->topics.begin());
      }
      break;
    case Rule::TreeRoot:
      if (const auto* t = std::get_if<TreePath>(&label)) return vocab_index(t->nodes[0]);
      break;
    case Rule::BoxCount:
      if (const auto* b = std::get_if<BoxSet>(&label))
        return std::min(b->distinct_boxes(), kMaxBoxCount);
      break;
    case Rule::PointGrid:
      if (const auto* p = std::get_if<Point2D>(&label)) {
        auto cell = [](double v, double lo, double hi, std::size_t n) {
          if (!(hi > lo)) return std::size_t{0};
          const double f = std::floor((v - lo) / (hi - lo) * static_cast<double>(n));
          return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(n - 1)));
        };
        return cell(p->y, bounds_[2], bounds_[3], ny_) * nx_ +
               cell(p->x, bounds_[0], bounds_[1], nx_);
      }
      break;
  }
  throw std::invalid_argument("label kind does not match the partitioner");
}

Partitioner default_partitioner(const Dataset& dataset) {
  std::vector<std::string> vocab;
  switch (dataset.kind()) {
    case LabelKind::Categorical:
      for_each_label(dataset, [&](const Label& l) { vocab.push_back(std::get<Categorical>(l).value); });
      return Partitioner::category(std::move(vocab));
    case LabelKind::LabelSet:
      for_each_label(dataset, [&](const Label& l) {
        for (const auto& t : std::get<LabelSet>(l).topics) vocab.push_back(t);
      });
      return Partitioner::topic_singleton(std::move(vocab));
    case LabelKind::TreePath:
      for_each_label(dataset, [&](const Label& l) { vocab.push_back(std::get<TreePath>(l).nodes[0]); });
      return Partitioner::tree_root(std::move(vocab));
    case LabelKind::BoxSet: return Partitioner::box_count();
    case LabelKind::Point2D: return Partitioner::single();
  }
  return Partitioner::single();
}

Partitioner make_partitioner(std::string_view key, const Dataset& dataset) {
  if (key == "default") return default_partitioner(dataset);
  if (key == "single") return Partitioner::single();
  if (key.starts_with("grid:")) {
    if (dataset.kind() != LabelKind::Point2D)
      throw std::invalid_argument("grid partition applies to point labels only");
    const auto rest = key.substr(5);
    const auto colon = rest.find(':');
    std::size_t nx = 0;
    std::size_t ny = 0;
    if (colon == std::string_view::npos ||
        std::from_chars(rest.data(), rest.data() + colon, nx).ec != std::errc{} ||
        std::from_chars(rest.data() + colon + 1, rest.data() + rest.size(), ny).ec != std::errc{})
      throw std::invalid_argument("grid partition key must look like grid:NX:NY");
    std::array<double, 4> bounds{std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity()};
    for_each_label(dataset, [&](const Label& l) {
      const auto& p = std::get<Point2D>(l);
      bounds[0] = std::min(bounds[0], p.x);
      bounds[1] = std::max(bounds[1], p.x);
      bounds[2] = std::min(bounds[2], p.y);
      bounds[3] = std::max(bounds[3], p.y);
    });
    if (bounds[0] > bounds[1]) bounds = {0.0, 1.0, 0.0, 1.0};
    return Partitioner::point_grid(nx, ny, bounds);
  }
  throw std::invalid_argument("unknown partitioner key '" + std::string(key) +
                              "' (valid: default, single, grid:NX:NY)");
}

}  // namespace oak
