#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "oak/label.hpp"

namespace oak {

/// Similarity s(x, x') in [0, 1] for one label kind.
///
/// Categorical: Hamming. LabelSet: Jaccard (empty vs empty = 1). Point2D:
/// Gaussian kernel exp(-|x - y|^2 / (2 sigma^2)). TreePath: level_scores[0]
/// for identical paths, [1] when the first two levels match, [2] when only
/// the root matches, [3] otherwise. BoxSet: Jaccard of the covered-cell
/// bitmaps (both empty = 1).
struct SimilarityFn {
  LabelKind kind = LabelKind::Categorical;
  double sigma = 1.0;
  std::array<double, 4> level_scores{1.0, 0.75, 0.5, 0.0};
};

/// Throws std::invalid_argument when either label is not of fn.kind.
double similarity(const Label& x, const Label& y, const SimilarityFn& fn);

enum class AggMode { Weight, Uniform, Sad, Bau };

struct Aggregator {
  AggMode mode = AggMode::Weight;
  SimilarityFn similarity;
};

/// Weighted (or uniform) vote/average. Weights are ignored in Uniform mode;
/// an all-zero weight vector falls back to uniform weights. Ties go to the
/// label that arrived first. Throws std::invalid_argument on empty input.
Label aggregate(std::span<const Label> labels, std::span<const double> weights, AggMode mode);

/// Index of the label with the highest mean similarity to the others.
std::size_t select_sad(std::span<const Label> labels, const SimilarityFn& fn);

/// Index of the highest confidence; first one wins ties.
std::size_t select_bau(std::span<const double> confidences);

/// Dispatch on agg.mode. `weights` carries vote weights for Weight mode and
/// per-label confidences for Bau mode; Sad and Uniform ignore it.
Label apply_aggregator(std::span<const Label> labels, std::span<const double> weights,
                       const Aggregator& agg);

/// Index of the label closest to `target`; lowest index on ties.
std::size_t closest_label(std::span<const Label> labels, const Label& target,
                          const SimilarityFn& fn);

}  // namespace oak
