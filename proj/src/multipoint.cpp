#include "oak/multipoint.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oak/estimate.hpp"
#include "oak/regression.hpp"

namespace oak {
namespace {

double clamp_confidence(double c) { return std::clamp(c, kConfidenceClamp, 1.0 - kConfidenceClamp); }

struct Sample {
  double offset;  // g^-1(C)
  double s_bar;
  double actual;  // c*
};

DecisionShift fit_ols(const std::vector<Sample>& samples) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::VectorXd x(n), r(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    x(j) = samples[j].s_bar;
    r(j) = samples[j].offset - logistic_g_inv(clamp_confidence(samples[j].actual));
  }
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (auto line = weighted_line_fit<double>(x, r, w)) return {-line->intercept, -line->slope};
  return {-r.mean(), 0.0};
}

// Minimises the Bernoulli cross-entropy of c* against
// g(offset + delta + epsilon s_bar) by damped Newton steps.
DecisionShift fit_cross_entropy(const std::vector<Sample>& samples) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd features(n, 2);
  Eigen::VectorXd offset(n), target(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    features(j, 0) = 1.0;
    features(j, 1) = samples[j].s_bar;
    offset(j) = samples[j].offset;
    target(j) = std::clamp(samples[j].actual, 0.0, 1.0);
  }
  const bool spread = (features.col(1).array() - features(0, 1)).abs().maxCoeff() > 1e-12;
  const Eigen::Index dims = spread ? 2 : 1;
  const Eigen::MatrixXd x = features.leftCols(dims);
  const double ridge = 1e-9 * static_cast<double>(n);

  // eta is the logit of the predicted accuracy, eta = -(offset + x theta).
  auto loss = [&](const Eigen::VectorXd& theta) {
    const Eigen::ArrayXd eta = -(offset + x * theta).array();
    const Eigen::ArrayXd log1pexp = eta.max(0.0) + (-eta.abs()).exp().log1p();
    return (log1pexp - target.array() * eta).sum() + 0.5 * ridge * theta.squaredNorm();
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dims);
  double current = loss(theta);
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::ArrayXd eta = -(offset + x * theta).array();
    const Eigen::ArrayXd p = 1.0 / (1.0 + (-eta).exp());
    const Eigen::VectorXd grad = -(x.transpose() * (p - target.array()).matrix()) + ridge * theta;
    const Eigen::VectorXd curvature = (p * (1.0 - p)).matrix();
    Eigen::MatrixXd hessian = x.transpose() * curvature.asDiagonal() * x;
    hessian.diagonal().array() += ridge;
    const Eigen::VectorXd step = hessian.ldlt().solve(grad);
    double scale = 1.0;
    Eigen::VectorXd next = theta - step;
    double value = loss(next);
    while (value > current && scale > 1e-8) {
      scale *= 0.5;
      next = theta - scale * step;
      value = loss(next);
    }
    if (!(value <= current)) break;
    const double gain = current - value;
    theta = next;
    current = value;
    if (gain < 1e-12 * (1.0 + std::abs(current))) break;
  }
  return {theta(0), spread ? theta(1) : 0.0};
}

}  // namespace

double adjust(double confidence, double mean_similarity, const DecisionShift& shift) {
  const double u = logistic_g_inv(clamp_confidence(confidence));
  return logistic_g(u + shift.delta + mean_similarity * shift.epsilon);
}

double mean_similarity(const Label& z, std::span<const Label> labels, const SimilarityFn& fn) {
  if (labels.empty()) throw std::invalid_argument("mean_similarity: no labels");
  double sum = 0.0;
  for (const auto& x : labels) sum += similarity(z, x, fn);
  return sum / static_cast<double>(labels.size());
}

std::map<int, DecisionShift> learn_multipoint(const Dataset& train, const Model& model,
                                              Estimator estimator, const Aggregator& agg,
                                              int max_points, ShiftFit fit) {
  std::map<int, DecisionShift> out;
  std::vector<std::string> workers;
  std::vector<Label> labels;
  for (int t = 2; t <= max_points; ++t) {
    std::vector<Sample> samples;
    for (std::size_t j = 0; j < train.num_items(); ++j) {
      const auto& truth = train.auditor(j);
      const auto reports = train.reports(j);
      if (!truth || reports.size() < static_cast<std::size_t>(t)) continue;
      workers.clear();
      labels.clear();
      for (std::size_t r = 0; r < static_cast<std::size_t>(t); ++r) {
        workers.push_back(train.worker_id(reports[r].worker));
        labels.push_back(reports[r].label);
      }
      const PredictedItem pred = estimate({workers, labels}, model, estimator, agg);
      samples.push_back({logistic_g_inv(clamp_confidence(pred.confidence)),
                         mean_similarity(pred.z, labels, model.similarity),
                         similarity(pred.z, *truth, model.similarity)});
    }
    if (samples.size() < 2) {
      out[t] = DecisionShift{};
      continue;
    }
    out[t] = fit == ShiftFit::LogitOls ? fit_ols(samples) : fit_cross_entropy(samples);
  }
  return out;
}

std::vector<PredictedItem> decision_trace(ItemLabels item, const Model& model,
                                          Estimator estimator, const Aggregator& agg,
                                          std::size_t points,
                                          const std::map<int, DecisionShift>& shifts) {
  const std::size_t n = item.size();
  if (n == 0) throw std::invalid_argument("decision_trace: item has no labels");
  std::vector<PredictedItem> trace;
  for (std::size_t t = 1; t <= n; t = t < points ? t + 1 : (t < n ? n : n + 1)) {
    const ItemLabels seen = item.first(t);
    PredictedItem pred = estimate(seen, model, estimator, agg);
    if (t >= 2) {
      auto it = shifts.find(static_cast<int>(t));
      if (it != shifts.end())
        pred.confidence =
            adjust(pred.confidence, mean_similarity(pred.z, seen.labels, model.similarity),
                   it->second);
    }
    trace.push_back(std::move(pred));
  }
  return trace;
}

std::size_t stopping_index(std::span<const PredictedItem> trace,
                           std::span<const double> thresholds) {
  for (std::size_t idx = 0; idx + 1 < trace.size(); ++idx) {
    const std::size_t t = trace[idx].labels_used;
    if (t > thresholds.size()) continue;
    const double tau = thresholds[t - 1];
    if (tau < 1.0 && trace[idx].confidence >= tau) return idx;
  }
  return trace.size() - 1;
}

PredictedItem run_pipeline(ItemLabels item, const Model& model, const PipelineOptions& options) {
  const auto& shifts = options.shifts != nullptr ? *options.shifts : model.multipoint;
  auto trace = decision_trace(item, model, options.estimator, options.aggregator,
                              options.thresholds.size(), shifts);
  return std::move(trace[stopping_index(trace, options.thresholds)]);
}

}  // namespace oak
