#pragma once

#include <map>
#include <span>
#include <vector>

#include "oak/dataset.hpp"
#include "oak/item.hpp"
#include "oak/model.hpp"

namespace oak {

inline constexpr double kConfidenceClamp = 1e-6;

/// g(g^-1(C) + delta + s_bar * epsilon), with C clamped into
/// [1e-6, 1 - 1e-6] first.
double adjust(double confidence, double mean_similarity, const DecisionShift& shift);

/// Mean similarity of `z` to the labels collected so far.
double mean_similarity(const Label& z, std::span<const Label> labels, const SimilarityFn& fn);

enum class ShiftFit {
  CrossEntropy,  // logistic fit with offset g^-1(C), the default
  LogitOls,      // OLS of g^-1(C) - g^-1(c*) on s_bar
};

/// One shift per decision point t = 2..max_points, fitted on audited
/// training items with at least t labels. Fewer than two usable items leave
/// the identity shift for that t.
std::map<int, DecisionShift> learn_multipoint(const Dataset& train, const Model& model,
                                              Estimator estimator, const Aggregator& agg,
                                              int max_points, ShiftFit fit = ShiftFit::CrossEntropy);

struct PipelineOptions {
  Estimator estimator = Estimator::Poak;
  Aggregator aggregator;
  /// tau_1..tau_T. Collection stops at decision point t when tau_t < 1 and
  /// the (adjusted) confidence reaches tau_t. Past the last threshold all
  /// remaining labels are taken.
  std::vector<double> thresholds;
  /// Shifts to apply; null means the model's own multipoint block.
  const std::map<int, DecisionShift>* shifts = nullptr;
};

PredictedItem run_pipeline(ItemLabels item, const Model& model, const PipelineOptions& options);

/// Predictions at every point the pipeline can stop: after labels 1..points
/// and, when more remain, after all of them. Shifts apply from t = 2.
std::vector<PredictedItem> decision_trace(ItemLabels item, const Model& model,
                                          Estimator estimator, const Aggregator& agg,
                                          std::size_t points,
                                          const std::map<int, DecisionShift>& shifts);

/// Index into `trace` where collection stops under `thresholds`.
std::size_t stopping_index(std::span<const PredictedItem> trace,
                           std::span<const double> thresholds);

}  // namespace oak
