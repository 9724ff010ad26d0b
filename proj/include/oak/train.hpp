#pragma once

#include <string>

#include "oak/dataset.hpp"
#include "oak/irt.hpp"
#include "oak/model.hpp"
#include "oak/multipoint.hpp"

namespace oak {

struct TrainConfig {
  Estimator estimator = Estimator::Poak;
  AggMode aggregator = AggMode::Weight;
  std::string partitioner = "default";
  SimilarityFn similarity;
  double gamma = 10.0;
  double alpha_semi = 1.0;
  double lambda = 1.0;
  int multipoint = 1;  // decision points; shifts are learned for t = 2..multipoint
  ShiftFit shift_fit = ShiftFit::CrossEntropy;
  IrtFitOptions irt;
};

/// Learns every block the estimator needs: OAK always, per-type cells for
/// the POAK family, the IRT block for poaki / poak-irt, and multipoint shifts
/// when more than one decision point is requested. Throws DegenerateError
/// naming the missing block when the data cannot support the estimator.
Model train_model(const Dataset& train, const TrainConfig& config);

}  // namespace oak
