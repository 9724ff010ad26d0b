#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "oak/dataset.hpp"
#include "oak/error.hpp"
#include "oak/item.hpp"
#include "oak/model.hpp"

namespace oak {

/// OAK block plus one competence cell per (worker, label type) with data.
/// Per-type calibration falls back to the unconditional line.
Model poak_learn(const Dataset& train, const SimilarityFn& fn, const Partitioner& partitioner,
                 double gamma = 10.0, double alpha_semi = 1.0);

/// Smoothed accuracy of a type-`type` label from `worker`. The cell estimate
/// is shrunk toward the worker's estimate on the remaining types, which in
/// turn is shrunk toward the global mean; a missing cell therefore returns
/// the OAK estimate. Unknown workers get the type mean, else the global mean.
double poak_confidence(const Model& model, std::string_view worker,
                       std::optional<std::size_t> type);

PredictedItem poak_estimate(ItemLabels item, const Model& model, const Aggregator& agg);

template <typename Scalar>
struct AkCoefficients {
  Scalar alpha;
  Scalar beta;
};

template <typename Scalar>
struct PopulationType {
  Scalar weight;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> confusion;
};

/// Slope and intercept of E[pi_i^(l)] as a function of c_i^(l) when worker i
/// reports label l. Only the columns of `worker` leading into l matter.
/// Co-workers are drawn from `population` (weights need not be normalised).
/// Throws DegenerateError when worker i never errs into l.
template <typename Scalar>
AkCoefficients<Scalar> conditional_ak_oracle(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& q,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& worker,
    const std::vector<PopulationType<Scalar>>& population, Eigen::Index label) {
  const Eigen::Index k = q.size();
  if (worker.rows() != k || worker.cols() != k || label < 0 || label >= k)
    throw std::invalid_argument("conditional_ak_oracle: shape mismatch");
  if (population.empty()) throw std::invalid_argument("conditional_ak_oracle: empty population");

  // Y: probability mass of reports of l that are errors.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> into = q.cwiseProduct(worker.col(label));
  into(label) = Scalar(0);
  const Scalar y = into.sum();
  if (!(y > Scalar(0)))
    throw DegenerateError("conditional_ak_oracle: worker never reports the label in error");

  Scalar total = 0;
  AkCoefficients<Scalar> out{0, 0};
  for (const auto& p : population) {
    if (p.confusion.rows() != k || p.confusion.cols() != k)
      throw std::invalid_argument("conditional_ak_oracle: shape mismatch");
    const Scalar cross = into.dot(p.confusion.col(label)) / y;
    out.alpha += p.weight * (p.confusion(label, label) - cross);
    out.beta += p.weight * cross;
    total += p.weight;
  }
  out.alpha /= total;
  out.beta /= total;
  return out;
}

}  // namespace oak
