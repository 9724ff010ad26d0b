#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "oak/dataset.hpp"
#include "oak/item.hpp"
#include "oak/model.hpp"

namespace oak {

/// A per-worker mean together with the number of terms it averages.
/// `value` is empty when `count` is zero.
struct WorkerStat {
  std::optional<double> value;
  std::size_t count = 0;
};

using TypedStats = std::vector<std::map<std::size_t, WorkerStat>>;

/// pi_i: mean similarity over every pair (own label, other label on the same
/// item); count = m-bar_i.
std::vector<WorkerStat> compute_avg_similarity(const Dataset& train, const SimilarityFn& fn);

/// c0_i: mean similarity to auditor labels; count = m*_i.
std::vector<WorkerStat> compute_supervised_accuracy(const Dataset& train, const SimilarityFn& fn);

/// Same statistics restricted to reports whose own label has type l. The
/// co-label is unrestricted. Labels without a type are skipped.
TypedStats compute_avg_similarity_by_type(const Dataset& train, const SimilarityFn& fn,
                                          const Partitioner& partitioner);
TypedStats compute_supervised_accuracy_by_type(const Dataset& train, const SimilarityFn& fn,
                                               const Partitioner& partitioner);

/// Weighted least-squares line from pi to c0. Empty when fewer than two
/// workers have both values and positive weight, or pi has no spread. A
/// negative slope is clamped to zero (intercept = weighted mean of c0).
std::optional<Line> fit_calibration(std::span<const std::optional<double>> pi,
                                    std::span<const std::optional<double>> c0,
                                    std::span<const double> weights);

/// fit_calibration, falling back to the identity line.
Line calibrate(std::span<const std::optional<double>> pi, std::span<const std::optional<double>> c0,
               std::span<const double> weights);

/// (alpha m* c0 + m L(pi)) / (alpha m* + m) where m counts the worker's reports.
/// One missing side yields the other; both missing yields nullopt.
std::optional<double> combine_semi_supervised(std::optional<double> calibrated_pi,
                                              std::optional<double> c0, double reports,
                                              double audited, double alpha_semi);

/// Additive smoothing: count/(count+gamma) * value + gamma/(count+gamma) * prior.
double shrink(double value, double count, double prior, double gamma);

/// Unconditional competence model. Throws std::invalid_argument on an empty
/// dataset or gamma <= 0 or alpha_semi < 1.
Model oak_learn(const Dataset& train, const SimilarityFn& fn, double gamma = 10.0,
                double alpha_semi = 1.0);

/// Smoothed single-label accuracy of `worker`; the global mean for unknown ids.
double oak_confidence(const Model& model, std::string_view worker);

PredictedItem oak_estimate(ItemLabels item, const Model& model, const Aggregator& agg);

}  // namespace oak
