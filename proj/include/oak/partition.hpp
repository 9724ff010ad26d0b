#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oak/dataset.hpp"
#include "oak/label.hpp"

namespace oak {

/// Maps labels to one of k types (0-based). Labels that fall outside the
/// vocabulary the partitioner was built from map to std::nullopt; estimators
/// treat those as "no per-type information".
class Partitioner {
 public:
  enum class Rule {
    Single,          // every label is type 0
    Category,        // one type per category
    TopicSingleton,  // one type per singleton topic set, one for the rest
    TreeRoot,        // one type per first-level node
    BoxCount,        // number of distinct boxes, clamped to 0..8
    PointGrid,       // nx x ny cells over a bounding rectangle
  };

  static constexpr std::size_t kMaxBoxCount = 8;

  Partitioner() = default;
  static Partitioner single();
  static Partitioner category(std::vector<std::string> categories);
  static Partitioner topic_singleton(std::vector<std::string> vocabulary);
  static Partitioner tree_root(std::vector<std::string> roots);
  static Partitioner box_count();
  static Partitioner point_grid(std::size_t nx, std::size_t ny, std::array<double, 4> bounds);

  Rule rule() const { return rule_; }
  std::size_t num_types() const;
  std::optional<std::size_t> type_of(const Label& label) const;

  /// Sorted vocabulary (categories, topics or roots), empty for other rules.
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::size_t grid_nx() const { return nx_; }
  std::size_t grid_ny() const { return ny_; }
  /// {x_min, x_max, y_min, y_max}
  const std::array<double, 4>& grid_bounds() const { return bounds_; }

 private:
  std::optional<std::size_t> vocab_index(const std::string& value) const;

  Rule rule_ = Rule::Single;
  std::vector<std::string> vocab_;
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
  std::array<double, 4> bounds_{0.0, 1.0, 0.0, 1.0};
};

/// Built-in partition for the dataset's label kind: categories for
/// categorical data, singleton topics plus one "other" type for label sets,
/// first tree level for paths, box count for box sets, one cell for points.
Partitioner default_partitioner(const Dataset& dataset);

/// Resolves a CLI key: "default", "single", or "grid:NX:NY" (points only;
/// bounds taken from the dataset). Throws std::invalid_argument otherwise.
Partitioner make_partitioner(std::string_view key, const Dataset& dataset);

}  // namespace oak
