// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oak/eval.hpp"
#include "oak/io.hpp"
#include "oak/irt.hpp"
#include "oak/multipoint.hpp"
#include "oak/oak.hpp"
#include "oak/poak.hpp"
#include "oak/synth.hpp"
#include "oak/train.hpp"

using namespace oak;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TruthMap truth_map(const GeneratedData& g) {
  TruthMap m;
  for (const auto& [id, z] : g.truth) m.emplace(id, z);
  return m;
}

Eigen::MatrixXd matrix2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

// k = 4, per-class accuracies U[0.2, 1] per worker, skewed label frequencies.
GeneratorConfig heterogeneous(std::size_t items, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.k = 4;
  cfg.priors = Eigen::Vector4d(0.4, 0.3, 0.2, 0.1);
  cfg.num_workers = 30;
  cfg.sampler.kind = WorkerSampler::Kind::PerClassUniform;
  cfg.sampler.low = 0.2;
  cfg.sampler.high = 1.0;
  cfg.num_items = items;
  cfg.labels_per_item = 3;
  cfg.auditor_fraction = 0.2;
  cfg.seed = seed;
  return cfg;
}

Outcome two_type_population() {
  const auto t0 = std::chrono::steady_clock::now();
  GeneratorConfig cfg;
  cfg.k = 2;
  cfg.num_workers = 16;
  cfg.population = {{0.5, {matrix2(1.0, 0.0, 0.5, 0.5)}}, {0.5, {matrix2(0.5, 0.5, 0.0, 1.0)}}};
  cfg.num_items = 100000;
  cfg.labels_per_item = 2;
  cfg.seed = 11;
  const auto g = generate(cfg);
  const auto truth = truth_map(g);
  const auto& ds = g.dataset;

  std::vector<double> hits(ds.num_workers(), 0.0);
  for (std::size_t j = 0; j < ds.num_items(); ++j) {
    const Label& z = truth.at(ds.item_id(j));
    for (const auto& r : ds.reports(j)) hits[r.worker] += r.label == z ? 1.0 : 0.0;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < ds.num_workers(); ++i)
    worst = std::max(worst, std::abs(hits[i] / double(ds.items_labelled(i)) - 0.75));

  const auto pi = compute_avg_similarity(ds, SimilarityFn{});
  double mean_pi = 0.0;
  for (const auto& s : pi) mean_pi += *s.value;
  mean_pi /= double(pi.size());
  const double secs = seconds_since(t0);
  return {worst <= 0.01 && std::abs(mean_pi - 0.625) <= 0.01 && secs < 60.0,
          fmt("max |acc - 0.75| = %.4f, mean pi = %.4f, %.1f s", worst, mean_pi, secs)};
}

Outcome label_frequency() {
  GeneratorConfig cfg;
  cfg.k = 2;
  cfg.priors = Eigen::Vector2d(5.0 / 6.0, 1.0 / 6.0);
  cfg.num_workers = 10;
  cfg.sampler.kind = WorkerSampler::Kind::OneCoinValues;
  cfg.sampler.values = {2.0 / 3.0};
  cfg.num_items = 50000;
  cfg.labels_per_item = 2;
  cfg.auditor_fraction = 0.2;
  cfg.seed = 12;
  const auto g = generate(cfg);
  const SimilarityFn fn;
  const Partitioner part = default_partitioner(g.dataset);
  const Model poak = poak_learn(g.dataset, fn, part);
  const Model oak = oak_learn(g.dataset, fn);
  const std::size_t a = *part.type_of(Categorical{"c0"});
  const std::size_t b = *part.type_of(Categorical{"c1"});

  // Population-level estimates; the per-worker spread is reported alongside.
  const double err_a = std::abs(poak.type_means.at(a) - 10.0 / 11.0);
  const double err_b = std::abs(poak.type_means.at(b) - 2.0 / 7.0);
  const double err_oak = std::abs(oak.global_mean - 2.0 / 3.0);
  double spread = 0.0;
  for (const auto& [id, w] : poak.workers) {
    spread = std::max(spread, std::abs(w.per_type.at(a).c - 10.0 / 11.0));
    spread = std::max(spread, std::abs(w.per_type.at(b).c - 2.0 / 7.0));
  }
  return {err_a <= 0.01 && err_b <= 0.01 && err_oak <= 0.01,
          fmt("reported A %.4f, reported B %.4f, OAK %.4f (max per-worker deviation %.4f)",
              poak.type_means.at(a), poak.type_means.at(b), oak.global_mean, spread)};
}

Outcome conditional_linearity() {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd peer = matrix2(0.8, 0.2, 0.3, 0.7);
  const Eigen::Vector2d q(0.5, 0.5);
  std::vector<double> xs, ys;
  for (int step = 1; step <= 9; ++step) {
    const double p = 0.1 * step;
    const Eigen::MatrixXd worker = matrix2(p, 1.0 - p, 0.2, 0.8);
    // 10^5 reports of A by the worker under test.
    const double report_a = q.dot(worker.col(0));
    GeneratorConfig cfg;
    cfg.k = 2;
    cfg.num_workers = 2;
    cfg.workers = {{worker}, {peer}};
    cfg.num_items = static_cast<std::size_t>(std::ceil(1e5 / report_a));
    cfg.labels_per_item = 2;
    cfg.seed = 300 + static_cast<std::uint64_t>(step);
    const auto g = generate(cfg);
    const Partitioner part = default_partitioner(g.dataset);
    const auto stats = compute_avg_similarity_by_type(g.dataset, SimilarityFn{}, part);
    const std::size_t self = *g.dataset.find_worker("w0");
    xs.push_back(posterior_oracle<double>(q, worker, 0));
    ys.push_back(*stats[self].at(*part.type_of(Categorical{"c0"})).value);
  }
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), Eigen::Index(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), Eigen::Index(ys.size()));
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(x.size());
  const auto line = *weighted_line_fit<double>(x, y, w);
  const double r2 = r_squared(line, x, y);
  const auto oracle =
      conditional_ak_oracle<double>(q, matrix2(0.5, 0.5, 0.2, 0.8), {{1.0, peer}}, 0);
  const double secs = seconds_since(t0);
  return {r2 >= 0.999 && std::abs(line.slope - oracle.alpha) <= 0.02 &&
              std::abs(line.intercept - oracle.beta) <= 0.02 && secs < 120.0,
          fmt("R2 = %.5f, slope %.4f (oracle %.4f), intercept %.4f (oracle %.4f), %.1f s", r2,
              line.slope, oracle.alpha, line.intercept, oracle.beta, secs)};
}

Outcome irt_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::exponential_distribution<double> gamma1(1.0);
  const int ks[] = {2, 3, 5, 10};
  double worst = 0.0;
  for (int model = 0; model < 100; ++model) {
    const int k = ks[model % 4];
    Eigen::VectorXd q(k);
    for (int l = 0; l < k; ++l) q(l) = gamma1(rng) + 1e-3;
    q /= q.sum();
    Eigen::VectorXd p(5);
    for (int i = 0; i < p.size(); ++i) p(i) = unit(rng);
    const auto params = accuracy_only_to_irt<double>(p, q);
    for (int i = 0; i < p.size(); ++i) {
      const WorkerSpec w = onecoin_worker(p(i), k);
      for (int l = 0; l < k; ++l)
        worst = std::max(worst,
                         std::abs(irt_predict(params, i, l) - posterior_oracle<double>(q, w.confusion, l)));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 5.0, fmt("max deviation %.3g over 100 models, %.2f s", worst, secs)};
}

Outcome single_cell_equivalence() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GeneratorConfig cfg;
    cfg.k = 3;
    cfg.num_workers = 6 + seed % 5;
    cfg.sampler.kind = WorkerSampler::Kind::PerClassUniform;
    cfg.sampler.low = 0.3;
    cfg.num_items = 150 + 10 * seed;
    cfg.labels_per_item = 2 + seed % 3;
    cfg.auditor_fraction = 0.1 * double(seed % 4);
    cfg.seed = 500 + seed;
    const auto g = generate(cfg);
    const SimilarityFn fn;
    const Model oak = oak_learn(g.dataset, fn);
    const Model poak = poak_learn(g.dataset, fn, Partitioner::single());
    for (const auto& [id, w] : oak.workers)
      worst = std::max(worst, std::abs(poak_confidence(poak, id, 0) - oak_confidence(oak, id)));
  }
  return {worst <= 1e-12, fmt("max |POAK - OAK| = %.3g over 20 datasets", worst)};
}

Outcome rauc_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = generate(heterogeneous(3000, 60));
  const auto truth = truth_map(g);
  EvalConfig cfg;
  cfg.methods = {"poak-weight", "oak-weight", "uniform"};
  cfg.test_fraction = 1.0 / 3.0;
  cfg.trials = 10;
  cfg.seed = 61;
  const auto report = run_trials(g.dataset, &truth, cfg);
  const auto& poak = report.methods[0].rauc;
  const auto& oak = report.methods[1].rauc;
  const auto& uniform = report.methods[2].rauc;
  int ordered = 0;
  for (std::size_t t = 0; t < poak.size(); ++t) ordered += poak[t] > oak[t] && oak[t] > 0.0;
  const bool zero = std::all_of(uniform.begin(), uniform.end(), [](double v) { return v == 0.0; });
  const double secs = seconds_since(t0);
  return {ordered >= 8 && zero && secs < 300.0,
          fmt("POAK > OAK > 0 in %d/10 trials (means %.4f, %.4f), Uniform zero: %s, %.1f s",
              ordered, report.methods[0].mean, report.methods[1].mean, zero ? "yes" : "no", secs)};
}

Outcome small_training() {
  const auto g = generate(heterogeneous(1200, 70));
  const auto truth = truth_map(g);
  EvalConfig cfg;
  cfg.methods = {"poak-weight", "poak-irt"};
  cfg.test_fraction = 1000.0 / 1200.0;
  cfg.trials = 10;
  cfg.seed = 71;
  const auto report = run_trials(g.dataset, &truth, cfg);
  const double poak = report.methods[0].mean;
  const double blend = report.methods[1].mean;
  return {blend >= poak, fmt("mean RAUC: POAK+IRT %.4f, POAK %.4f", blend, poak)};
}

Outcome calibration_scatter() {
  const auto g = generate(heterogeneous(15000, 80));
  const auto truth = truth_map(g);
  auto [train, test] = split(g.dataset, 5000.0 / 15000.0, 81);
  const Model model = poak_learn(train, SimilarityFn{}, default_partitioner(train));

  std::vector<double> est, actual, weight;
  for (std::size_t i = 0; i < test.num_workers(); ++i) {
    std::map<std::size_t, std::pair<double, double>> by_type;  // hits, reports
    for (auto [item, pos] : test.worker_items(i)) {
      const Label& x = test.reports(item)[pos].label;
      auto& acc = by_type[*model.partitioner.type_of(x)];
      acc.first += x == truth.at(test.item_id(item)) ? 1.0 : 0.0;
      acc.second += 1.0;
    }
    const WorkerModel* w = model.find_worker(test.worker_id(i));
    for (const auto& [type, acc] : by_type) {
      if (w == nullptr || !w->per_type.count(type)) continue;
      est.push_back(w->per_type.at(type).c);
      actual.push_back(acc.first / acc.second);
      weight.push_back(acc.second);
    }
  }
  const auto n = Eigen::Index(est.size());
  const double r = weighted_correlation<double>(Eigen::Map<Eigen::VectorXd>(est.data(), n),
                                        Eigen::Map<Eigen::VectorXd>(actual.data(), n),
                                        Eigen::Map<Eigen::VectorXd>(weight.data(), n));
  return {r >= 0.8, fmt("weighted correlation %.4f over %ld cells", r, long(n))};
}

Outcome multipoint_calibration() {
  const auto g = generate(heterogeneous(3000, 90));
  const auto truth = truth_map(g);
  auto [train, test] = split(g.dataset, 1.0 / 3.0, 91);
  TrainConfig tc;
  tc.multipoint = 2;
  const Model model = train_model(train, tc);
  const Aggregator agg{AggMode::Weight, model.similarity};
  const std::map<int, DecisionShift> none;

  double se_adj = 0.0, se_raw = 0.0;
  std::size_t n = 0;
  for (const auto& item : make_test_set(test, &truth).items) {
    if (item.labels.size() < 2) continue;
    const ItemLabels labels{item.workers, item.labels};
    const auto adj = decision_trace(labels, model, Estimator::Poak, agg, 2, model.multipoint);
    const auto raw = decision_trace(labels, model, Estimator::Poak, agg, 2, none);
    const double target = similarity(adj[1].z, item.truth, model.similarity);
    se_adj += std::pow(adj[1].confidence - target, 2);
    se_raw += std::pow(raw[1].confidence - target, 2);
    ++n;
  }
  const double adj = se_adj / double(n), raw = se_raw / double(n);
  const auto& shift = model.multipoint.at(2);
  return {adj < raw, fmt("second-stage MSE %.5f adjusted vs %.5f raw (delta %.3f, epsilon %.3f)",
                         adj, raw, shift.delta, shift.epsilon)};
}

Outcome invariant_suites() {
  std::vector<std::string> failed;
  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Similarity axioms on random labels of every kind.
  {
    bool ok = true;
    SimilarityFn fns[] = {{LabelKind::Categorical}, {LabelKind::LabelSet}, {LabelKind::Point2D, 1.5},
                          {LabelKind::TreePath}, {LabelKind::BoxSet}};
    for (const auto& fn : fns) {
      GeneratorConfig cfg;
      cfg.k = 5;
      cfg.num_workers = 4;
      cfg.sampler.kind = WorkerSampler::Kind::OneCoinUniform;
      cfg.num_items = 40;
      cfg.labels_per_item = 3;
      cfg.label_kind = fn.kind;
      cfg.seed = 101;
      const auto ann = generate(cfg).dataset.annotations();
      for (const auto& a : ann) {
        ok = ok && similarity(a.label, a.label, fn) == 1.0;
        for (const auto& b : ann) {
          const double s = similarity(a.label, b.label, fn);
          ok = ok && s >= 0.0 && s <= 1.0 && s == similarity(b.label, a.label, fn);
        }
      }
    }
    if (!ok) failed.push_back("similarity");
  }
  // Smoothing is a convex combination of value and prior.
  {
    bool ok = true;
    for (int t = 0; t < 10000; ++t) {
      const double v = unit(rng), prior = unit(rng), count = 1000.0 * unit(rng);
      const double gamma = 0.01 + 100.0 * unit(rng);
      const double s = shrink(v, count, prior, gamma);
      ok = ok && s >= std::min(v, prior) - 1e-15 && s <= std::max(v, prior) + 1e-15;
    }
    if (!ok) failed.push_back("smoothing");
  }
  // Cost is non-decreasing in the threshold.
  {
    const auto g = generate(heterogeneous(600, 102));
    const auto truth = truth_map(g);
    auto [train, test] = split(g.dataset, 0.5, 103);
    const Model model = poak_learn(train, SimilarityFn{}, default_partitioner(train));
    const auto ts = make_test_set(test, &truth);
    const auto grid = default_grid();
    bool ok = true;
    for (auto est : {Estimator::Oak, Estimator::Poak}) {
      auto curve = sweep(ts, model, est, Aggregator{}, grid);
      std::sort(curve.begin(), curve.end(),
                [](const CurvePoint& a, const CurvePoint& b) { return a.threshold < b.threshold; });
      for (std::size_t p = 1; p < curve.size(); ++p) ok = ok && curve[p].cost >= curve[p - 1].cost;
    }
    if (!ok) failed.push_back("cost-monotone");
  }
  // 1/(Z+Y) = (-1/Y) Z/(Z+Y) + 1/Y.
  {
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
      const double z = 1e-3 + 10.0 * unit(rng), y = 1e-3 + 10.0 * unit(rng);
      const double lhs = 1.0 / (z + y);
      worst = std::max(worst, std::abs(lhs - ((-1.0 / y) * z / (z + y) + 1.0 / y)) / lhs);
    }
    if (worst > 1e-12) failed.push_back("Y-Z identity");
  }
  // Model round-trip through JSON.
  {
    const auto g = generate(heterogeneous(800, 104));
    TrainConfig tc;
    tc.estimator = Estimator::PoakIrt;
    tc.multipoint = 2;
    const Model model = train_model(g.dataset, tc);
    const json once = model_to_json(model);
    if (model_to_json(model_from_json(json::parse(once.dump()))) != once)
      failed.push_back("round-trip");
  }
  // Same seed, same bytes.
  {
    auto bytes = [] {
      auto cfg = heterogeneous(500, 105);
      cfg.label_kind = LabelKind::BoxSet;
      const auto g = generate(cfg);
      std::ostringstream out;
      write_annotations(out, g.dataset);
      write_truth(out, g.truth);
      TrainConfig tc;
      tc.similarity.kind = LabelKind::BoxSet;
      out << model_to_json(train_model(g.dataset, tc)).dump();
      return out.str();
    };
    if (bytes() != bytes()) failed.push_back("reproducibility");
  }

  std::string detail = "similarity, smoothing, cost-monotone, Y-Z identity, round-trip, reproducibility";
  if (!failed.empty()) {
    detail = "failed:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

Outcome linear_time() {
  auto median_train = [](std::size_t items) {
    auto cfg = heterogeneous(items, 110);
    const auto g = generate(cfg);
    TrainConfig tc;
    tc.estimator = Estimator::PoakIrt;
    std::vector<double> times;
    for (int run = 0; run < 3; ++run) {
      const auto t0 = std::chrono::steady_clock::now();
      const Model m = train_model(g.dataset, tc);
      times.push_back(seconds_since(t0));
    }
    std::sort(times.begin(), times.end());
    return times[1];
  };
  const double small = median_train(20000);
  const double large = median_train(40000);
  const double ratio = large / small;
  return {ratio <= 2.5, fmt("train %.3f s -> %.3f s, ratio %.2f", small, large, ratio)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"two-type population accuracy and similarity", two_type_population},
      {"label-frequency posteriors", label_frequency},
      {"conditional linearity", conditional_linearity},
      {"IRT equals Bayes posterior", irt_equivalence},
      {"one-cell POAK equals OAK", single_cell_equivalence},
      {"RAUC ordering", rauc_ordering},
      {"small-training regularization", small_training},
      {"calibration scatter", calibration_scatter},
      {"multipoint calibration", multipoint_calibration},
      {"invariant suites", invariant_suites},
      {"linear training time", linear_time},
  };
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", c + 1, criteria[c].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
