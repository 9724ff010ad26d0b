#pragma once

#include <string_view>

#include "oak/item.hpp"
#include "oak/model.hpp"

namespace oak {

/// Vote weight of one report: the worker's raw unconditional competence, the
/// global mean for unknown workers. Shared by every estimator.
double label_weight(const Model& model, std::string_view worker);

/// Estimated accuracy of `label` credited to `worker`.
double label_confidence(const Model& model, Estimator estimator, std::string_view worker,
                        const Label& label);

/// Aggregate the item's labels, find the worker closest to the aggregate
/// (earliest on ties) and score the aggregate with that worker's estimate.
/// Throws std::invalid_argument on an empty item.
PredictedItem estimate(ItemLabels item, const Model& model, Estimator estimator,
                       const Aggregator& agg);

}  // namespace oak
