#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "oak/label.hpp"

namespace oak {

/// Labels collected for one item so far, in arrival order, with the ids of
/// the workers who reported them.
struct ItemLabels {
  std::span<const std::string> workers;
  std::span<const Label> labels;

  std::size_t size() const { return labels.size(); }
  ItemLabels first(std::size_t n) const { return {workers.first(n), labels.first(n)}; }
};

struct PredictedItem {
  std::string item_id;
  Label z;
  double confidence = 0.0;
  std::size_t labels_used = 0;
};

}  // namespace oak
