#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oak/dataset.hpp"
#include "oak/model.hpp"
#include "oak/train.hpp"

namespace oak {

struct CurvePoint {
  double threshold = 0.0;
  double cost = 0.0;     // mean of labels_used / labels available
  double quality = 0.0;  // mean s(z_hat, z*)
};

/// Expected cost/quality of the coin-flip policy that takes either the first
/// label or all of them: the chord between the two endpoints.
struct BaselineChord {
  double cost_one = 0.0;
  double quality_one = 0.0;
  double quality_all = 0.0;

  double at(double cost) const;
};

struct RaucResult {
  std::string method;
  double rauc = 0.0;
  std::vector<CurvePoint> curve;
  BaselineChord baseline;
};

using TruthMap = std::map<std::string, Label, std::less<>>;

struct TestItem {
  std::string id;
  std::vector<std::string> workers;
  std::vector<Label> labels;
  Label truth;
};

struct TestSet {
  std::vector<TestItem> items;
  std::size_t excluded = 0;  // items without ground truth or without labels
};

/// Ground truth from `truth` when given, else the dataset's auditor labels.
TestSet make_test_set(const Dataset& test, const TruthMap* truth = nullptr);

/// n evenly spaced thresholds over [0, 1].
std::vector<double> default_grid(std::size_t n = 41);

/// One point per threshold, the same threshold at each of `decision_points`
/// points; sorted by cost.
std::vector<CurvePoint> sweep(const TestSet& test, const Model& model, Estimator estimator,
                              const Aggregator& agg, std::span<const double> grid,
                              std::size_t decision_points = 1,
                              const std::map<int, DecisionShift>* shifts = nullptr);

/// Uniform-vote chord. Model-free.
BaselineChord baseline_uniform(const TestSet& test, const SimilarityFn& fn);

/// Model-free coin-flip curves: the chord itself (`sad` false) or the chord
/// ending at the SAD selection over all labels (`sad` true). Two endpoints.
std::vector<CurvePoint> coin_flip_curve(const TestSet& test, const SimilarityFn& fn, bool sad);

/// Mean vertical gap between the curve and the chord over [cost_one, 1].
/// The curve is extended flat beyond its cost range. Throws DegenerateError
/// when cost_one >= 1 or the curve has fewer than two distinct costs.
double rauc(std::span<const CurvePoint> curve, const BaselineChord& baseline);

/// Method keys: poak-weight, poak-bau, oak-weight, oak-bau, poaki, poak-irt,
/// sad, uniform.
const std::vector<std::string>& method_keys();

struct MethodSpec {
  std::string key;
  std::optional<Estimator> estimator;  // empty for the model-free rows
  AggMode aggregator = AggMode::Weight;
};

std::optional<MethodSpec> method_from_key(std::string_view key);

struct EvalConfig {
  std::vector<std::string> methods = method_keys();
  double test_fraction = 0.3;
  int trials = 10;
  std::uint64_t seed = 1;
  std::vector<double> grid = default_grid();
  int decision_points = 1;
  TrainConfig train;  // similarity, partitioner, gamma, alpha_semi, lambda, irt
  int bootstrap = 1000;
  double confidence = 0.95;
};

/// Trains once on `train` and sweeps every configured method on `test`.
std::vector<RaucResult> evaluate_split(const Dataset& train, const TestSet& test,
                                       const EvalConfig& config);

struct MethodSummary {
  std::string method;
  std::vector<double> rauc;  // per trial
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<CurvePoint> curve;  // averaged over trials
};

struct EvalReport {
  std::vector<MethodSummary> methods;
  BaselineChord baseline;  // averaged over trials
  std::size_t excluded = 0;
  int trials = 0;
};

/// Percentile bootstrap interval of the mean.
std::pair<double, double> bootstrap_ci(std::span<const double> values, int resamples,
                                       double confidence, std::uint64_t seed);

/// Repeated seeded re-splits of `data` (seed + trial) fed to evaluate_split.
EvalReport run_trials(const Dataset& data, const TruthMap* truth, const EvalConfig& config);

void write_curves_csv(std::ostream& out, const EvalReport& report);
void write_curves_svg(std::ostream& out, const EvalReport& report);

/// Shortest round-trip decimal.
std::string format_double(double v);

}  // namespace oak
