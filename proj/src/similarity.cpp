#include "oak/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace oak {
namespace {

template <typename T>
const T& as(const Label& label, const SimilarityFn& fn) {
  const T* v = std::get_if<T>(&label);
  if (v == nullptr) {
    throw std::invalid_argument("label of kind '" + std::string(kind_tag(kind_of(label))) +
                                "' passed to a '" + std::string(kind_tag(fn.kind)) +
                                "' similarity");
  }
  return *v;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double tree_similarity(const TreePath& a, const TreePath& b, const SimilarityFn& fn) {
  if (a.nodes[0] != b.nodes[0]) return fn.level_scores[3];
  if (a.nodes[1] != b.nodes[1]) return fn.level_scores[2];
  if (a.nodes[2] != b.nodes[2]) return fn.level_scores[1];
  return fn.level_scores[0];
}

double box_similarity(const BoxSet& a, const BoxSet& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw std::invalid_argument("box sets drawn on different grids");
  const auto uni = a.bitmap().union_count(b.bitmap());
  if (uni == 0) return 1.0;
  return static_cast<double>(a.bitmap().intersection_count(b.bitmap())) /
         static_cast<double>(uni);
}

bool unanimous(std::span<const Label> labels) {
  return std::all_of(labels.begin() + 1, labels.end(),
                     [&](const Label& l) { return l == labels.front(); });
}

/// Weighted plurality over keys, first-seen wins ties.
template <typename Key>
class Plurality {
 public:
  void add(const Key& key, double w) {
    auto [it, inserted] = tally_.try_emplace(key, Entry{0.0, order_});
    if (inserted) ++order_;
    it->second.weight += w;
  }
  Key winner() const {
    const std::pair<const Key, Entry>* best = nullptr;
    for (const auto& kv : tally_) {
      if (best == nullptr || kv.second.weight > best->second.weight ||
          (kv.second.weight == best->second.weight && kv.second.first < best->second.first))
        best = &kv;
    }
    return best->first;
  }

 private:
  struct Entry {
    double weight;
    std::size_t first;
  };
  std::map<Key, Entry> tally_;
  std::size_t order_ = 0;
};

Label aggregate_categorical(std::span<const Label> labels, std::span<const double> w) {
  Plurality<std::string> vote;
  for (std::size_t i = 0; i < labels.size(); ++i)
    vote.add(std::get<Categorical>(labels[i]).value, w[i]);
  return Categorical{vote.winner()};
}

Label aggregate_set(std::span<const Label> labels, std::span<const double> w, double total) {
  std::map<std::string, double> mass;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (const auto& t : std::get<LabelSet>(labels[i]).topics) mass[t] += w[i];
  LabelSet out;
  for (const auto& [topic, m] : mass)
    if (m > 0.5 * total) out.topics.insert(topic);
  return out;
}

Label aggregate_point(std::span<const Label> labels, std::span<const double> w, double total) {
  double x = 0.0;
  double y = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& p = std::get<Point2D>(labels[i]);
    x += w[i] * p.x;
    y += w[i] * p.y;
  }
  return Point2D{x / total, y / total};
}

Label aggregate_path(std::span<const Label> labels, std::span<const double> w) {
  TreePath out;
  std::vector<std::size_t> alive(labels.size());
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  for (std::size_t level = 0; level < 3; ++level) {
    Plurality<std::string> vote;
    for (auto i : alive) vote.add(std::get<TreePath>(labels[i]).nodes[level], w[i]);
    out.nodes[level] = vote.winner();
    std::erase_if(alive, [&](std::size_t i) {
      return std::get<TreePath>(labels[i]).nodes[level] != out.nodes[level];
    });
  }
  return out;
}

Label aggregate_boxes(std::span<const Label> labels, std::span<const double> w, double total) {
  const auto& first = std::get<BoxSet>(labels.front());
  const int width = first.width();
  const int height = first.height();
  std::vector<double> cover(static_cast<std::size_t>(width) * height, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& b = std::get<BoxSet>(labels[i]);
    if (b.width() != width || b.height() != height)
      throw std::invalid_argument("box sets drawn on different grids");
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        if (b.bitmap().test(x, y)) cover[static_cast<std::size_t>(y) * width + x] += w[i];
  }
  Bitmap bits(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (cover[static_cast<std::size_t>(y) * width + x] > 0.5 * total) bits.set(x, y);
  return BoxSet::from_bitmap(bits);
}

}  // namespace

double similarity(const Label& x, const Label& y, const SimilarityFn& fn) {
  switch (fn.kind) {
    case LabelKind::Categorical:
      return as<Categorical>(x, fn).value == as<Categorical>(y, fn).value ? 1.0 : 0.0;
    case LabelKind::LabelSet:
      return jaccard(as<LabelSet>(x, fn).topics, as<LabelSet>(y, fn).topics);
    case LabelKind::Point2D: {
      const auto& a = as<Point2D>(x, fn);
      const auto& b = as<Point2D>(y, fn);
      const double dx = a.x - b.x;
      const double dy = a.y - b.y;
      return std::exp(-(dx * dx + dy * dy) / (2.0 * fn.sigma * fn.sigma));
    }
    case LabelKind::TreePath:
      return tree_similarity(as<TreePath>(x, fn), as<TreePath>(y, fn), fn);
    case LabelKind::BoxSet:
      return box_similarity(as<BoxSet>(x, fn), as<BoxSet>(y, fn));
  }
  throw std::invalid_argument("unknown label kind");
}

Label aggregate(std::span<const Label> labels, std::span<const double> weights, AggMode mode) {
  if (labels.empty()) throw std::invalid_argument("cannot aggregate an empty label list");
  const LabelKind kind = kind_of(labels.front());
  for (const auto& l : labels)
    if (kind_of(l) != kind) throw std::invalid_argument("mixed label kinds in aggregation");
  if (labels.size() == 1 || unanimous(labels)) return labels.front();

  std::vector<double> w(labels.size(), 1.0);
  if (mode != AggMode::Uniform) {
    if (weights.size() != labels.size())
      throw std::invalid_argument("weights and labels differ in length");
    for (double v : weights)
      if (!(v >= 0.0)) throw std::invalid_argument("aggregation weights must be non-negative");
    if (std::accumulate(weights.begin(), weights.end(), 0.0) > 0.0)
      w.assign(weights.begin(), weights.end());
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);

  switch (kind) {
    case LabelKind::Categorical: return aggregate_categorical(labels, w);
    case LabelKind::LabelSet: return aggregate_set(labels, w, total);
    case LabelKind::Point2D: return aggregate_point(labels, w, total);
    case LabelKind::TreePath: return aggregate_path(labels, w);
    case LabelKind::BoxSet: return aggregate_boxes(labels, w, total);
  }
  throw std::invalid_argument("unknown label kind");
}

std::size_t select_sad(std::span<const Label> labels, const SimilarityFn& fn) {
  if (labels.empty()) throw std::invalid_argument("cannot select from an empty label list");
  if (labels.size() == 1) return 0;
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (j != i) sum += similarity(labels[i], labels[j], fn);
    const double score = sum / static_cast<double>(labels.size() - 1);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::size_t select_bau(std::span<const double> confidences) {
  if (confidences.empty()) throw std::invalid_argument("cannot select from an empty label list");
  return static_cast<std::size_t>(std::max_element(confidences.begin(), confidences.end()) -
                                  confidences.begin());
}

Label apply_aggregator(std::span<const Label> labels, std::span<const double> weights,
                       const Aggregator& agg) {
  switch (agg.mode) {
    case AggMode::Sad: return labels[select_sad(labels, agg.similarity)];
    case AggMode::Bau:
      if (weights.size() != labels.size())
        throw std::invalid_argument("confidences and labels differ in length");
      return labels[select_bau(weights)];
    case AggMode::Weight:
    case AggMode::Uniform: return aggregate(labels, weights, agg.mode);
  }
  throw std::invalid_argument("unknown aggregation mode");
}

std::size_t closest_label(std::span<const Label> labels, const Label& target,
                          const SimilarityFn& fn) {
  if (labels.empty()) throw std::invalid_argument("no labels to compare against");
  std::size_t best = 0;
  double best_sim = -1.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double s = similarity(labels[i], target, fn);
    if (s > best_sim) {
      best_sim = s;
      best = i;
    }
  }
  return best;
}

}  // namespace oak
