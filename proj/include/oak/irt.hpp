#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "oak/dataset.hpp"
#include "oak/error.hpp"
#include "oak/irt_params.hpp"
#include "oak/item.hpp"
#include "oak/model.hpp"
#include "oak/regression.hpp"

namespace oak {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Scalar irt_predict(const IrtParamsT<Scalar>& p, Eigen::Index worker, Eigen::Index type) {
  return irt_probability(p.competence(worker), p.difficulty(type), p.separation(type),
                         p.base_rate(type));
}

/// Level-1 block (b = 1, p0 = 0) that reproduces the Bayes posterior of an
/// accuracy-only noise model exactly. k is taken from q.size().
template <typename Scalar>
IrtParamsT<Scalar> accuracy_only_to_irt(const Vec<Scalar>& p, const Vec<Scalar>& q) {
  const Eigen::Index k = q.size();
  if (k < 2) throw std::invalid_argument("accuracy_only_to_irt: need k >= 2");
  if (!((p.array() > 0).all() && (p.array() < 1).all()))
    throw std::domain_error("accuracy_only_to_irt: accuracies must lie in (0, 1)");
  if (!((q.array() > 0).all() && (q.array() < 1).all()))
    throw std::domain_error("accuracy_only_to_irt: priors must lie in (0, 1)");
  auto out = IrtParamsT<Scalar>::level1(k, p.size());
  out.competence = -(p.array().inverse() - Scalar(1)).log().matrix();
  out.difficulty = ((q.array().inverse() - Scalar(1)) / Scalar(k - 1)).log().matrix();
  return out;
}

struct IrtFitOptions {
  int max_rounds = 10;
  double tolerance = 1e-6;
  double min_separation = 1e-3;
  double margin = 1e-6;
  double base_rate_margin = 0.05;
};

template <typename Scalar>
struct IrtFit {
  IrtParamsT<Scalar> params;
  std::vector<Scalar> objective;  // after each round
};

/// Logit-space targets log((1 - p0) / (a - p0) - 1), with accuracies clamped
/// into (p0 + margin, 1 - margin).
template <typename Scalar>
Mat<Scalar> irt_targets(const Mat<Scalar>& accuracy, const Vec<Scalar>& base_rate, Scalar margin) {
  Mat<Scalar> y(accuracy.rows(), accuracy.cols());
  for (Eigen::Index l = 0; l < accuracy.cols(); ++l) {
    const Scalar p0 = base_rate(l);
    for (Eigen::Index i = 0; i < accuracy.rows(); ++i) {
      const Scalar a = std::clamp(accuracy(i, l), p0 + margin, Scalar(1) - margin);
      y(i, l) = std::log((Scalar(1) - p0) / (a - p0) - Scalar(1));
    }
  }
  return y;
}

/// sum_{i,l} w_il (b_l (d_l - c_i) - y_il)^2 with the base rates of `p`.
template <typename Scalar>
Scalar irt_objective(const IrtParamsT<Scalar>& p, const Mat<Scalar>& accuracy,
                     const Mat<Scalar>& weights, Scalar margin = Scalar(1e-6)) {
  const Mat<Scalar> y = irt_targets(accuracy, p.base_rate, margin);
  const Vec<Scalar> bd = p.separation.cwiseProduct(p.difficulty);
  const Mat<Scalar> fitted =
      Vec<Scalar>::Ones(p.num_workers()) * bd.transpose() - p.competence * p.separation.transpose();
  return (weights.array() * (fitted - y).array().square()).sum();
}

/// Alternating weighted least squares for (d, b) per type and c per worker.
/// Rows of `accuracy` are workers, columns are types; zero weight marks a
/// missing cell. Mean competence over workers with data is anchored at 0.
/// Throws DegenerateError when every weight is zero.
template <typename Scalar>
IrtFit<Scalar> fit_irt(const Mat<Scalar>& accuracy, const Mat<Scalar>& weights,
                       const Vec<Scalar>& base_rate, const Vec<Scalar>& initial_competence,
                       const IrtFitOptions& options = {}) {
  const Eigen::Index n = accuracy.rows();
  const Eigen::Index k = accuracy.cols();
  if (weights.rows() != n || weights.cols() != k || base_rate.size() != k ||
      initial_competence.size() != n)
    throw std::invalid_argument("fit_irt: shape mismatch");
  if ((weights.array() < 0).any()) throw std::invalid_argument("fit_irt: negative weight");
  if (!(weights.array() > 0).any()) throw DegenerateError("fit_irt: per-type block is empty");

  const Scalar margin = options.margin;
  const Scalar min_sep = options.min_separation;
  const Mat<Scalar> y = irt_targets(accuracy, base_rate, margin);
  const Eigen::Array<bool, Eigen::Dynamic, 1> active = (weights.rowwise().sum().array() > 0);
  const Vec<Scalar> type_mass = weights.colwise().sum().transpose();

  IrtFit<Scalar> fit;
  auto& p = fit.params;
  p = IrtParamsT<Scalar>::level1(k, n);
  p.base_rate = base_rate;
  p.competence = initial_competence;

  auto anchor = [&] {
    Scalar sum = 0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (active(i)) sum += p.competence(i), ++count;
    const Scalar mu = sum / Scalar(count);
    for (Eigen::Index i = 0; i < n; ++i) p.competence(i) = active(i) ? p.competence(i) - mu : 0;
    p.difficulty.array() -= mu;
  };
  anchor();

  for (int round = 0; round < options.max_rounds; ++round) {
    // Types: y = A + S c with A = b d and S = -b.
    for (Eigen::Index l = 0; l < k; ++l) {
      if (!(type_mass(l) > 0)) continue;
      const auto w = weights.col(l);
      const auto yl = y.col(l);
      Scalar b = p.separation(l);
      std::optional<Scalar> a;
      if (auto line = weighted_line_fit<Scalar>(p.competence, yl, w)) {
        if (-line->slope >= min_sep) {
          b = -line->slope;
          a = line->intercept;
        } else {
          b = min_sep;
        }
      }
      if (!a) a = w.dot((yl + b * p.competence).eval()) / type_mass(l);
      p.separation(l) = b;
      p.difficulty(l) = *a / b;
    }
    // Workers: c_i = sum_l w b (b d - y) / sum_l w b^2.
    const Vec<Scalar> b2 = p.separation.cwiseAbs2();
    const Vec<Scalar> num =
        weights * b2.cwiseProduct(p.difficulty) - weights.cwiseProduct(y) * p.separation;
    const Vec<Scalar> den = weights * b2;
    for (Eigen::Index i = 0; i < n; ++i)
      if (active(i)) p.competence(i) = num(i) / den(i);
    anchor();

    fit.objective.push_back(irt_objective(p, accuracy, weights, margin));
    const std::size_t r = fit.objective.size();
    if (r >= 2 && fit.objective[r - 2] - fit.objective[r - 1] < options.tolerance) break;
  }
  return fit;
}

/// Expected similarity of a label drawn from the empirical prior to the
/// training labels of each type. Auditor labels serve as the prior sample
/// when there are at least 20, reported labels otherwise. Both samples are
/// thinned to at most 256 by a fixed stride.
Eigen::VectorXd estimate_base_rates(const Dataset& train, const SimilarityFn& fn,
                                    const Partitioner& partitioner);

/// Fits the IRT block from the model's per-type cells (weights m-bar) and
/// attaches it. Base rates are clamped to [0, max cell accuracy - margin].
/// Throws DegenerateError when the per-type block is missing or empty.
void attach_irt(Model& model, const Dataset& train, const IrtFitOptions& options = {});

/// P^IRT for a type-`type` label; unknown workers sit at the anchor c = 0.
/// Labels without a type fall back to the OAK estimate.
double poaki_confidence(const Model& model, std::string_view worker,
                        std::optional<std::size_t> type);

/// w * cell + (1 - w) * POAKi with w = m-bar / (m-bar + lambda gamma).
double poak_irt_confidence(const Model& model, std::string_view worker,
                           std::optional<std::size_t> type);

PredictedItem poaki_estimate(ItemLabels item, const Model& model, const Aggregator& agg);
PredictedItem poak_irt_estimate(ItemLabels item, const Model& model, const Aggregator& agg);

}  // namespace oak
