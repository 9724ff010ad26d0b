#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oak/dataset.hpp"
#include "oak/error.hpp"

namespace oak {

/// Generator-side worker: row-stochastic k x k confusion matrix,
/// confusion(tau, l) = Pr[report l | truth tau].
struct WorkerSpec {
  Eigen::MatrixXd confusion;

  double accuracy(Eigen::Index label) const { return confusion(label, label); }
};

/// Pr[z* = l | x_i = l] = q_l p_l / (q_l p_l + sum_{tau != l} q_tau M^{tau -> l}).
/// Throws DegenerateError when the report has probability zero.
template <typename Scalar>
Scalar posterior_oracle(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& q,
                        const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& confusion,
                        Eigen::Index label) {
  const Scalar hit = q(label) * confusion(label, label);
  const Scalar report = q.dot(confusion.col(label));
  if (!(report > Scalar(0))) throw DegenerateError("posterior_oracle: report has probability 0");
  return hit / report;
}

/// One-coin confusion matrix: p on the diagonal, (1 - p) / (k - 1) elsewhere.
WorkerSpec onecoin_worker(double p, Eigen::Index k);

/// n one-coin workers whose accuracies come from `sample_p`.
std::vector<WorkerSpec> onecoin_population(std::size_t n, const std::function<double()>& sample_p,
                                           Eigen::Index k);

/// Per-class accuracies p_tau on the diagonal, (1 - p_tau) / (k - 1) across
/// the rest of row tau.
WorkerSpec per_class_worker(const Eigen::VectorXd& p);

struct WorkerSampler {
  enum class Kind { None, OneCoinValues, OneCoinUniform, PerClassUniform } kind = Kind::None;
  std::vector<double> values;  // OneCoinValues: drawn uniformly from this list
  double low = 0.5;            // OneCoinUniform / PerClassUniform bounds
  double high = 1.0;
};

struct PopulationEntry {
  double frequency = 1.0;
  WorkerSpec spec;
};

struct GeneratorConfig {
  Eigen::Index k = 2;
  Eigen::VectorXd priors;                 // empty means uniform
  std::vector<std::string> categories;    // empty means c0..c{k-1}
  std::size_t num_workers = 10;
  /// Worker sources, first non-empty wins: explicit list, frequency-weighted
  /// population, sampler.
  std::vector<WorkerSpec> workers;
  std::vector<PopulationEntry> population;
  WorkerSampler sampler;
  std::size_t num_items = 1000;
  /// Labels per item. When the weight list is non-empty, weights[L - 1] is
  /// the relative frequency of items with L labels and the count is ignored.
  std::size_t labels_per_item = 2;
  std::vector<double> labels_per_item_weights;
  double auditor_fraction = 0.0;
  LabelKind label_kind = LabelKind::Categorical;
  double point_noise = 1.0;  // Point2D: sigma_i = point_noise * (1 - mean accuracy)
  std::uint64_t seed = 1;
};

struct GeneratedData {
  Dataset dataset;
  std::vector<std::pair<std::string, Label>> truth;
  std::vector<std::size_t> truth_category;
  std::vector<WorkerSpec> workers;
};

/// Throws std::invalid_argument on an invalid configuration.
GeneratedData generate(const GeneratorConfig& config);

/// Label used for category c under the categorical-core wrapping.
Label wrap_category(std::size_t c, const GeneratorConfig& config);

/// SplitMix64 step used to derive independent per-item streams.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace oak
