#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oak/label.hpp"

namespace oak {

/// One reported label as it arrives on the wire.
struct Annotation {
  std::string item_id;
  std::string worker_id;
  Label label;
  std::size_t arrival_index = 0;
};

/// A label inside an item, resolved to the dataset's worker table.
struct Report {
  std::size_t worker = 0;
  Label label;
};

/// Partial worker x item label matrix with optional auditor labels.
///
/// Items keep the order in which they first appear; reports inside an item
/// are sorted by arrival index. Worker and item ids are interned.
class Dataset {
 public:
  Dataset() = default;

  /// Validates the invariants: one label kind throughout (FormatError), unique
  /// (worker, item) pairs, and arrival indices 0..n-1 within every item
  /// (ValidationError). Auditor labels for items without annotations create
  /// label-less items.
  static Dataset build(LabelKind kind, std::vector<Annotation> annotations,
                       std::vector<std::pair<std::string, Label>> auditor = {});

  LabelKind kind() const { return kind_; }
  std::size_t num_workers() const { return worker_ids_.size(); }
  std::size_t num_items() const { return item_ids_.size(); }
  std::size_t num_annotations() const { return num_annotations_; }

  const std::string& worker_id(std::size_t i) const { return worker_ids_[i]; }
  const std::string& item_id(std::size_t j) const { return item_ids_[j]; }
  std::optional<std::size_t> find_worker(std::string_view id) const;
  std::optional<std::size_t> find_item(std::string_view id) const;

  /// N_j, in arrival order.
  std::span<const Report> reports(std::size_t item) const { return items_[item]; }
  const std::optional<Label>& auditor(std::size_t item) const { return auditor_[item]; }
  std::size_t num_audited() const;

  /// M_i as (item, position within the item's reports).
  std::span<const std::pair<std::size_t, std::size_t>> worker_items(std::size_t worker) const {
    return by_worker_[worker];
  }
  /// m_i
  std::size_t items_labelled(std::size_t worker) const { return by_worker_[worker].size(); }
  /// m*_i
  std::size_t audited_items_labelled(std::size_t worker) const;
  /// m_{ii'}
  std::size_t co_labelled(std::size_t worker, std::size_t other) const;

  /// Sub-dataset made of the given items (in the given order).
  Dataset subset(std::span<const std::size_t> items) const;

  /// Flattened annotations, item by item in arrival order.
  std::vector<Annotation> annotations() const;

 private:
  LabelKind kind_ = LabelKind::Categorical;
  std::vector<std::string> worker_ids_;
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, std::size_t> worker_index_;
  std::unordered_map<std::string, std::size_t> item_index_;
  std::vector<std::vector<Report>> items_;
  std::vector<std::optional<Label>> auditor_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_worker_;
  std::size_t num_annotations_ = 0;
};

/// Item-level train/test split. The test side receives round(fraction * m)
/// items, clamped so that both sides are non-empty. Deterministic in `seed`.
/// Throws std::invalid_argument unless 0 < fraction < 1 and m >= 2.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction,
                                  std::uint64_t seed);

}  // namespace oak
