#include "oak/eval.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>

#include "oak/error.hpp"
#include "oak/multipoint.hpp"

namespace oak {
namespace {

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double value() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
};

void require_items(const TestSet& test) {
  if (test.items.empty()) throw DegenerateError("test set has no usable items");
}

CurvePoint lerp_point(const CurvePoint& a, const CurvePoint& b, double cost) {
  const double t = (cost - a.cost) / (b.cost - a.cost);
  return {std::lerp(a.threshold, b.threshold, t), cost, std::lerp(a.quality, b.quality, t)};
}

}  // namespace

double BaselineChord::at(double cost) const {
  if (cost_one >= 1.0) return quality_all;
  return std::lerp(quality_one, quality_all, (cost - cost_one) / (1.0 - cost_one));
}

TestSet make_test_set(const Dataset& test, const TruthMap* truth) {
  TestSet out;
  for (std::size_t j = 0; j < test.num_items(); ++j) {
    std::optional<Label> z;
    if (truth != nullptr) {
      auto it = truth->find(test.item_id(j));
      if (it != truth->end()) z = it->second;
    } else {
      z = test.auditor(j);
    }
    const auto reports = test.reports(j);
    if (!z || reports.empty()) {
      ++out.excluded;
      continue;
    }
    TestItem item;
    item.id = test.item_id(j);
    for (const auto& r : reports) {
      item.workers.push_back(test.worker_id(r.worker));
      item.labels.push_back(r.label);
    }
    item.truth = std::move(*z);
    out.items.push_back(std::move(item));
  }
  return out;
}

std::vector<double> default_grid(std::size_t n) {
  if (n < 2) throw std::invalid_argument("threshold grid needs at least two points");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

std::vector<CurvePoint> sweep(const TestSet& test, const Model& model, Estimator estimator,
                              const Aggregator& agg, std::span<const double> grid,
                              std::size_t decision_points,
                              const std::map<int, DecisionShift>* shifts) {
  require_items(test);
  const auto& active = shifts != nullptr ? *shifts : model.multipoint;

  std::vector<std::vector<PredictedItem>> traces;
  std::vector<std::vector<double>> quality;
  traces.reserve(test.items.size());
  for (const auto& item : test.items) {
    traces.push_back(
        decision_trace({item.workers, item.labels}, model, estimator, agg, decision_points, active));
    auto& q = quality.emplace_back();
    for (const auto& p : traces.back()) q.push_back(similarity(p.z, item.truth, model.similarity));
  }

  std::vector<CurvePoint> curve;
  for (double tau : grid) {
    const std::vector<double> thresholds(decision_points, tau);
    Mean cost, qual;
    for (std::size_t j = 0; j < traces.size(); ++j) {
      const std::size_t idx = stopping_index(traces[j], thresholds);
      cost.add(static_cast<double>(traces[j][idx].labels_used) /
               static_cast<double>(test.items[j].labels.size()));
      qual.add(quality[j][idx]);
    }
    curve.push_back({tau, cost.value(), qual.value()});
  }
  std::stable_sort(curve.begin(), curve.end(),
                   [](const CurvePoint& a, const CurvePoint& b) { return a.cost < b.cost; });
  return curve;
}

BaselineChord baseline_uniform(const TestSet& test, const SimilarityFn& fn) {
  require_items(test);
  Mean cost, one, all;
  for (const auto& item : test.items) {
    cost.add(1.0 / static_cast<double>(item.labels.size()));
    one.add(similarity(item.labels.front(), item.truth, fn));
    all.add(similarity(aggregate(item.labels, {}, AggMode::Uniform), item.truth, fn));
  }
  return {cost.value(), one.value(), all.value()};
}

std::vector<CurvePoint> coin_flip_curve(const TestSet& test, const SimilarityFn& fn, bool sad) {
  const BaselineChord chord = baseline_uniform(test, fn);
  double end = chord.quality_all;
  if (sad) {
    Mean q;
    for (const auto& item : test.items)
      q.add(similarity(item.labels[select_sad(item.labels, fn)], item.truth, fn));
    end = q.value();
  }
  return {{0.0, chord.cost_one, chord.quality_one}, {1.0, 1.0, end}};
}

double rauc(std::span<const CurvePoint> curve, const BaselineChord& baseline) {
  const double lo = baseline.cost_one;
  if (!(lo < 1.0)) throw DegenerateError("every item has one label: the cost range is empty");
  std::vector<CurvePoint> pts(curve.begin(), curve.end());
  std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.cost < b.cost || (a.cost == b.cost && a.quality < b.quality);
  });
  if (pts.size() < 2 || !(pts.front().cost < pts.back().cost))
    throw DegenerateError("curve spans fewer than two distinct costs");

  // Flat extension to [lo, 1], then clip to that interval.
  if (pts.front().cost > lo) pts.insert(pts.begin(), {pts.front().threshold, lo, pts.front().quality});
  if (pts.back().cost < 1.0) pts.push_back({pts.back().threshold, 1.0, pts.back().quality});
  std::vector<CurvePoint> clipped;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    CurvePoint a = pts[s];
    CurvePoint b = pts[s + 1];
    if (b.cost <= lo || a.cost >= 1.0) continue;
    if (a.cost < lo) a = lerp_point(a, b, lo);
    if (b.cost > 1.0) b = lerp_point(a, b, 1.0);
    if (clipped.empty() || clipped.back().cost != a.cost || clipped.back().quality != a.quality)
      clipped.push_back(a);
    clipped.push_back(b);
  }

  double area = 0.0;
  for (std::size_t s = 0; s + 1 < clipped.size(); ++s) {
    const auto& a = clipped[s];
    const auto& b = clipped[s + 1];
    const double gap_a = a.quality - baseline.at(a.cost);
    const double gap_b = b.quality - baseline.at(b.cost);
    area += 0.5 * (gap_a + gap_b) * (b.cost - a.cost);
  }
  return area / (1.0 - lo);
}

const std::vector<std::string>& method_keys() {
  static const std::vector<std::string> keys{"poak-weight", "poak-bau", "oak-weight", "oak-bau",
                                             "poaki",       "poak-irt", "sad",        "uniform"};
  return keys;
}

std::optional<MethodSpec> method_from_key(std::string_view key) {
  if (key == "poak-weight") return MethodSpec{std::string(key), Estimator::Poak, AggMode::Weight};
  if (key == "poak-bau") return MethodSpec{std::string(key), Estimator::Poak, AggMode::Bau};
  if (key == "oak-weight") return MethodSpec{std::string(key), Estimator::Oak, AggMode::Weight};
  if (key == "oak-bau") return MethodSpec{std::string(key), Estimator::Oak, AggMode::Bau};
  if (key == "poaki") return MethodSpec{std::string(key), Estimator::Poaki, AggMode::Weight};
  if (key == "poak-irt") return MethodSpec{std::string(key), Estimator::PoakIrt, AggMode::Weight};
  if (key == "sad") return MethodSpec{std::string(key), std::nullopt, AggMode::Sad};
  if (key == "uniform") return MethodSpec{std::string(key), std::nullopt, AggMode::Uniform};
  return std::nullopt;
}

std::vector<RaucResult> evaluate_split(const Dataset& train, const TestSet& test,
                                       const EvalConfig& config) {
  std::vector<MethodSpec> specs;
  bool need_model = false;
  bool need_irt = false;
  for (const auto& key : config.methods) {
    auto spec = method_from_key(key);
    if (!spec) throw std::invalid_argument("unknown method: " + key);
    need_model = need_model || spec->estimator.has_value();
    need_irt = need_irt || spec->estimator == Estimator::Poaki ||
               spec->estimator == Estimator::PoakIrt;
    specs.push_back(std::move(*spec));
  }
  const SimilarityFn& fn = config.train.similarity;
  if (config.decision_points < 1) throw std::invalid_argument("decision points must be >= 1");
  const auto points = static_cast<std::size_t>(config.decision_points);

  Model model;
  if (need_model) {
    TrainConfig tc = config.train;
    tc.estimator = need_irt ? Estimator::Poaki : Estimator::Poak;
    tc.multipoint = 1;
    model = train_model(train, tc);
  }

  const BaselineChord chord = baseline_uniform(test, fn);
  std::vector<RaucResult> out;
  for (const auto& spec : specs) {
    RaucResult r;
    r.method = spec.key;
    r.baseline = chord;
    if (!spec.estimator) {
      r.curve = coin_flip_curve(test, fn, spec.aggregator == AggMode::Sad);
    } else {
      const Aggregator agg{spec.aggregator, fn};
      std::map<int, DecisionShift> shifts;
      if (points >= 2)
        shifts = learn_multipoint(train, model, *spec.estimator, agg, config.decision_points,
                                  config.train.shift_fit);
      r.curve = sweep(test, model, *spec.estimator, agg, config.grid, points, &shifts);
    }
    r.rauc = rauc(r.curve, chord);
    out.push_back(std::move(r));
  }
  return out;
}

std::pair<double, double> bootstrap_ci(std::span<const double> values, int resamples,
                                       double confidence, std::uint64_t seed) {
  if (values.empty()) return {std::nan(""), std::nan("")};
  if (values.size() == 1 || resamples < 1) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {*lo, *hi};
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) sum += values[pick(rng)];
    m = sum / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = 0.5 * (1.0 - confidence);
  const auto b = static_cast<double>(resamples);
  const auto lo = static_cast<std::size_t>(std::clamp(std::floor(tail * b), 0.0, b - 1.0));
  const auto hi = static_cast<std::size_t>(std::clamp(std::ceil((1.0 - tail) * b) - 1.0, 0.0, b - 1.0));
  return {means[lo], means[hi]};
}

EvalReport run_trials(const Dataset& data, const TruthMap* truth, const EvalConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  EvalReport report;
  report.trials = config.trials;
  std::vector<std::vector<std::vector<CurvePoint>>> curves;  // method, trial, point
  Mean c1, q1, qa;
  for (int t = 0; t < config.trials; ++t) {
    auto [train, test] = split(data, config.test_fraction, config.seed + static_cast<std::uint64_t>(t));
    const TestSet ts = make_test_set(test, truth);
    report.excluded += ts.excluded;
    auto results = evaluate_split(train, ts, config);
    if (report.methods.empty()) {
      report.methods.resize(results.size());
      curves.resize(results.size());
    }
    for (std::size_t m = 0; m < results.size(); ++m) {
      report.methods[m].method = results[m].method;
      report.methods[m].rauc.push_back(results[m].rauc);
      auto curve = std::move(results[m].curve);
      std::stable_sort(curve.begin(), curve.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return a.threshold < b.threshold;
      });
      curves[m].push_back(std::move(curve));
    }
    c1.add(results.front().baseline.cost_one);
    q1.add(results.front().baseline.quality_one);
    qa.add(results.front().baseline.quality_all);
  }
  report.baseline = {c1.value(), q1.value(), qa.value()};

  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    auto& s = report.methods[m];
    Mean mean;
    for (double v : s.rauc) mean.add(v);
    s.mean = mean.value();
    std::tie(s.ci_low, s.ci_high) = bootstrap_ci(s.rauc, config.bootstrap, config.confidence,
                                                 config.seed ^ (0x9E3779B97F4A7C15ULL * (m + 1)));
    const auto& first = curves[m].front();
    for (std::size_t p = 0; p < first.size(); ++p) {
      Mean cost, quality;
      for (const auto& c : curves[m]) {
        cost.add(c[p].cost);
        quality.add(c[p].quality);
      }
      s.curve.push_back({first[p].threshold, cost.value(), quality.value()});
    }
    std::stable_sort(s.curve.begin(), s.curve.end(),
                     [](const CurvePoint& a, const CurvePoint& b) { return a.cost < b.cost; });
  }
  return report;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_curves_csv(std::ostream& out, const EvalReport& report) {
  out << "method,tau,cost,quality\n";
  for (const auto& m : report.methods)
    for (const auto& p : m.curve)
      out << m.method << ',' << format_double(p.threshold) << ',' << format_double(p.cost) << ','
          << format_double(p.quality) << '\n';
}

void write_curves_svg(std::ostream& out, const EvalReport& report) {
  constexpr double kW = 640, kH = 480, kPad = 56;
  constexpr std::array<const char*, 8> kColours{"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                                "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  double qmin = report.baseline.quality_one, qmax = report.baseline.quality_all;
  for (const auto& m : report.methods)
    for (const auto& p : m.curve) qmin = std::min(qmin, p.quality), qmax = std::max(qmax, p.quality);
  if (!(qmax > qmin)) qmax = qmin + 1e-3;
  const double cmin = report.baseline.cost_one;
  const double cspan = cmin < 1.0 ? 1.0 - cmin : 1.0;
  auto x = [&](double c) { return kPad + (c - cmin) / cspan * (kW - 2 * kPad); };
  auto y = [&](double q) { return kH - kPad - (q - qmin) / (qmax - qmin) * (kH - 2 * kPad); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 16 << "\" text-anchor=\"middle\">cost</text>\n";
  out << "<text x=\"16\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 16 " << kH / 2
      << ")\" text-anchor=\"middle\">quality</text>\n";
  out << "<line x1=\"" << x(cmin) << "\" y1=\"" << y(report.baseline.quality_one) << "\" x2=\""
      << x(1.0) << "\" y2=\"" << y(report.baseline.quality_all)
      << "\" stroke=\"black\" stroke-dasharray=\"4 4\"/>\n";
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    const char* colour = kColours[m % kColours.size()];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
    for (const auto& p : report.methods[m].curve) out << x(p.cost) << ',' << y(p.quality) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << kW - kPad - 110 << "\" y=\"" << kPad + 16 * static_cast<double>(m)
        << "\" fill=\"" << colour << "\">" << report.methods[m].method << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace oak
