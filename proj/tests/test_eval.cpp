#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "oak/error.hpp"
#include "oak/eval.hpp"
#include "oak/oak.hpp"
#include "oak/synth.hpp"

using namespace oak;

namespace {

const BaselineChord kChord{0.25, 0.6, 0.9};

std::vector<CurvePoint> with_gap(std::initializer_list<std::pair<double, double>> cost_gap) {
  std::vector<CurvePoint> out;
  for (auto [c, g] : cost_gap) out.push_back({0.0, c, kChord.at(c) + g});
  return out;
}

TruthMap truth_of(const GeneratedData& g) { return TruthMap(g.truth.begin(), g.truth.end()); }

GeneratorConfig binary(double p, std::size_t items, std::size_t labels, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.k = 2;
  cfg.num_workers = 5;
  cfg.sampler.kind = WorkerSampler::Kind::OneCoinValues;
  cfg.sampler.values = {p};
  cfg.num_items = items;
  cfg.labels_per_item = labels;
  cfg.auditor_fraction = 0.3;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("rauc arithmetic") {
  CHECK(rauc(with_gap({{0.25, 0}, {1.0, 0}}), kChord) == doctest::Approx(0.0));
  CHECK(rauc(with_gap({{0.25, 0.07}, {0.5, 0.07}, {1.0, 0.07}}), kChord) == doctest::Approx(0.07));
  const double mid = 0.625;
  CHECK(rauc(with_gap({{0.25, 0}, {mid, 0}, {mid, 0.1}, {1.0, 0.1}}), kChord) ==
        doctest::Approx(0.05));
  // Linear gap from 0 to 0.1: the trapezoid gives the mean.
  CHECK(rauc(with_gap({{0.25, 0}, {1.0, 0.1}}), kChord) == doctest::Approx(0.05));
}

TEST_CASE("rauc ignores duplicate points and extends flat") {
  const auto base = with_gap({{0.3, 0.02}, {0.6, 0.05}, {0.9, 0.01}});
  auto dup = base;
  dup.push_back(base[1]);
  dup.insert(dup.begin(), base[0]);
  CHECK(rauc(dup, kChord) == doctest::Approx(rauc(base, kChord)));

  // Flat extension on both ends: quality held constant outside [0.3, 0.9].
  const std::vector<CurvePoint> flat = {{0, 0.3, 0.8}, {0, 0.9, 0.8}};
  CHECK(rauc(flat, kChord) == doctest::Approx(0.8 - 0.5 * (kChord.quality_one + kChord.quality_all)));
}

TEST_CASE("rauc degenerate inputs") {
  CHECK_THROWS_AS(rauc(with_gap({{0.5, 0}}), kChord), DegenerateError);
  CHECK_THROWS_AS(rauc(with_gap({{0.25, 0}, {1.0, 0}}), BaselineChord{1.0, 0.5, 0.5}),
                  DegenerateError);

  const auto g = generate(binary(0.8, 50, 1, 1));
  const auto truth = truth_of(g);
  const auto test = make_test_set(g.dataset, &truth);
  const auto chord = baseline_uniform(test, {});
  CHECK(chord.cost_one == 1.0);
  CHECK_THROWS_AS(rauc(coin_flip_curve(test, {}, false), chord), DegenerateError);
}

TEST_CASE("baseline chord") {
  const auto perfect = generate(binary(1.0, 100, 3, 2));
  const auto pt = truth_of(perfect);
  const auto flat = baseline_uniform(make_test_set(perfect.dataset, &pt), {});
  CHECK(flat.quality_one == 1.0);
  CHECK(flat.quality_all == 1.0);
  CHECK(flat.cost_one == doctest::Approx(1.0 / 3));

  const double p = 0.75;
  const double majority = p * p * p + 3 * p * p * (1 - p);
  REQUIRE(majority == doctest::Approx(0.84375));
  const auto noisy = generate(binary(p, 40000, 3, 3));
  const auto nt = truth_of(noisy);
  const auto chord = baseline_uniform(make_test_set(noisy.dataset, &nt), {});
  CHECK(chord.quality_all == doctest::Approx(majority).epsilon(0.01));
  CHECK(chord.quality_one == doctest::Approx(p).epsilon(0.01));
  CHECK(chord.quality_all > chord.quality_one);
}

TEST_CASE("sweep endpoints and monotone cost") {
  const auto g = generate(binary(0.8, 600, 3, 4));
  const auto truth = truth_of(g);
  const auto [train, test_ds] = split(g.dataset, 0.5, 5);
  const auto test = make_test_set(test_ds, &truth);
  const Model m = oak_learn(train, {});
  const Aggregator agg{AggMode::Uniform, m.similarity};
  const auto chord = baseline_uniform(test, m.similarity);
  const std::vector<double> ends = {0.0, 1.0};
  const auto curve = sweep(test, m, Estimator::Oak, agg, ends);
  CHECK(curve.front().cost == doctest::Approx(chord.cost_one));
  CHECK(curve.front().quality == doctest::Approx(chord.quality_one));
  CHECK(curve.back().cost == 1.0);
  CHECK(curve.back().quality == doctest::Approx(chord.quality_all));

  const auto grid = default_grid(41);
  const auto full = sweep(test, m, Estimator::Oak, {AggMode::Weight, m.similarity}, grid);
  for (const auto& pt : full) {
    CHECK(pt.cost > 0.0);
    CHECK(pt.cost <= 1.0);
  }
  // Sorted by cost, so cost is monotone in tau exactly when tau stays sorted.
  for (std::size_t i = 1; i < full.size(); ++i) CHECK(full[i].threshold >= full[i - 1].threshold);
}

TEST_CASE("separating estimator beats the chord") {
  GeneratorConfig cfg;
  cfg.k = 2;
  cfg.workers = {onecoin_worker(1.0, 2), onecoin_worker(1.0, 2), onecoin_worker(0.5, 2),
                 onecoin_worker(0.5, 2)};
  cfg.num_workers = 4;
  cfg.num_items = 2000;
  cfg.labels_per_item = 3;
  cfg.seed = 6;
  const auto g = generate(cfg);
  const auto truth = truth_of(g);
  const auto test = make_test_set(g.dataset, &truth);
  Model m;
  m.meta.gamma = 1e-9;
  for (int i = 0; i < 4; ++i) {
    auto& w = m.workers["w" + std::to_string(i)].overall;
    w.c = i < 2 ? 1.0 : 0.0;
    w.m_bar = 1000;
  }
  const auto chord = baseline_uniform(test, m.similarity);
  const std::vector<double> mid = {0.5};
  const auto pt = sweep(test, m, Estimator::Oak, {AggMode::Weight, m.similarity}, mid).front();
  REQUIRE(pt.cost > chord.cost_one);
  REQUIRE(pt.cost < 1.0);
  CHECK(pt.quality > chord.at(pt.cost));
}

TEST_CASE("method matrix") {
  auto cfg = binary(0.7, 500, 3, 7);
  cfg.k = 3;
  cfg.sampler.kind = WorkerSampler::Kind::PerClassUniform;
  cfg.sampler.low = 0.4;
  cfg.num_workers = 8;
  const auto g = generate(cfg);
  const auto truth = truth_of(g);
  const auto [train, test_ds] = split(g.dataset, 0.4, 8);
  EvalConfig ec;
  ec.methods = {"poak-weight", "oak-weight", "uniform"};
  ec.train.partitioner = "single";
  const auto rows = evaluate_split(train, make_test_set(test_ds, &truth), ec);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rauc == doctest::Approx(rows[1].rauc).epsilon(1e-9));
  CHECK(rows[2].rauc == 0.0);
  ec.methods = {"nope"};
  CHECK_THROWS_AS(evaluate_split(train, make_test_set(test_ds, &truth), ec), std::invalid_argument);
}

TEST_CASE("trials are reproducible") {
  const auto g = generate(binary(0.7, 300, 3, 9));
  const auto truth = truth_of(g);
  EvalConfig ec;
  ec.methods = {"oak-weight", "uniform"};
  ec.trials = 3;
  ec.seed = 10;
  const auto a = run_trials(g.dataset, &truth, ec);
  const auto b = run_trials(g.dataset, &truth, ec);
  std::ostringstream ca, cb;
  write_curves_csv(ca, a);
  write_curves_csv(cb, b);
  CHECK(ca.str() == cb.str());
  CHECK(a.methods[0].rauc == b.methods[0].rauc);
  CHECK(a.methods[0].ci_low <= a.methods[0].mean);
  CHECK(a.methods[0].mean <= a.methods[0].ci_high);
}

TEST_CASE("bootstrap of a constant") {
  const std::vector<double> v(12, 0.3);
  const auto [lo, hi] = bootstrap_ci(v, 200, 0.95, 1);
  CHECK(lo == doctest::Approx(0.3));
  CHECK(hi == doctest::Approx(0.3));
}

TEST_CASE("format double round trips") {
  for (double v : {0.1, 1.0 / 3, 2.5e-17, -7.0})
    CHECK(std::stod(format_double(v)) == v);
}

}  // TEST_SUITE
