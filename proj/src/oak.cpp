#include "oak/oak.hpp"

#include <algorithm>
#include <stdexcept>

#include "oak/estimate.hpp"

namespace oak {
namespace {

struct Accumulator {
  double sum = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    ++count;
  }
  WorkerStat stat() const {
    WorkerStat s;
    s.count = count;
    if (count > 0) s.value = sum / static_cast<double>(count);
    return s;
  }
};

TypedStats to_stats(const std::vector<std::map<std::size_t, Accumulator>>& acc) {
  TypedStats out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i)
    for (const auto& [type, a] : acc[i]) out[i][type] = a.stat();
  return out;
}

}  // namespace

std::vector<WorkerStat> compute_avg_similarity(const Dataset& train, const SimilarityFn& fn) {
  std::vector<Accumulator> acc(train.num_workers());
  for (std::size_t j = 0; j < train.num_items(); ++j) {
    const auto reports = train.reports(j);
    for (std::size_t a = 0; a < reports.size(); ++a) {
      for (std::size_t b = a + 1; b < reports.size(); ++b) {
        const double s = similarity(reports[a].label, reports[b].label, fn);
        acc[reports[a].worker].add(s);
        acc[reports[b].worker].add(s);
      }
    }
  }
  std::vector<WorkerStat> out;
  out.reserve(acc.size());
  for (const auto& a : acc) out.push_back(a.stat());
  return out;
}

std::vector<WorkerStat> compute_supervised_accuracy(const Dataset& train, const SimilarityFn& fn) {
  std::vector<Accumulator> acc(train.num_workers());
  for (std::size_t j = 0; j < train.num_items(); ++j) {
    const auto& truth = train.auditor(j);
    if (!truth) continue;
    for (const auto& r : train.reports(j)) acc[r.worker].add(similarity(r.label, *truth, fn));
  }
  std::vector<WorkerStat> out;
  out.reserve(acc.size());
  for (const auto& a : acc) out.push_back(a.stat());
  return out;
}

TypedStats compute_avg_similarity_by_type(const Dataset& train, const SimilarityFn& fn,
                                          const Partitioner& partitioner) {
  std::vector<std::map<std::size_t, Accumulator>> acc(train.num_workers());
  std::vector<std::optional<std::size_t>> types;
  for (std::size_t j = 0; j < train.num_items(); ++j) {
    const auto reports = train.reports(j);
    types.clear();
    for (const auto& r : reports) types.push_back(partitioner.type_of(r.label));
    for (std::size_t a = 0; a < reports.size(); ++a) {
      for (std::size_t b = a + 1; b < reports.size(); ++b) {
        const double s = similarity(reports[a].label, reports[b].label, fn);
        if (types[a]) acc[reports[a].worker][*types[a]].add(s);
        if (types[b]) acc[reports[b].worker][*types[b]].add(s);
      }
    }
  }
  return to_stats(acc);
}

TypedStats compute_supervised_accuracy_by_type(const Dataset& train, const SimilarityFn& fn,
                                               const Partitioner& partitioner) {
  std::vector<std::map<std::size_t, Accumulator>> acc(train.num_workers());
  for (std::size_t j = 0; j < train.num_items(); ++j) {
    const auto& truth = train.auditor(j);
    if (!truth) continue;
    for (const auto& r : train.reports(j)) {
      if (auto type = partitioner.type_of(r.label))
        acc[r.worker][*type].add(similarity(r.label, *truth, fn));
    }
  }
  return to_stats(acc);
}

std::optional<Line> fit_calibration(std::span<const std::optional<double>> pi,
                                    std::span<const std::optional<double>> c0,
                                    std::span<const double> weights) {
  if (pi.size() != c0.size() || pi.size() != weights.size())
    throw std::invalid_argument("calibration inputs differ in length");
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] && c0[i] && weights[i] > 0.0) {
      xs.push_back(*pi[i]);
      ys.push_back(*c0[i]);
      ws.push_back(weights[i]);
    }
  }
  const auto n = static_cast<Eigen::Index>(xs.size());
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), n);
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
  const Eigen::Map<const Eigen::VectorXd> w(ws.data(), n);
  auto fit = weighted_line_fit<double>(x, y, w);
  if (!fit) return std::nullopt;
  if (fit->slope < 0.0) {
    fit->slope = 0.0;
    fit->intercept = w.dot(y) / w.sum();
  }
  return fit;
}

Line calibrate(std::span<const std::optional<double>> pi, std::span<const std::optional<double>> c0,
               std::span<const double> weights) {
  return fit_calibration(pi, c0, weights).value_or(Line{});
}

std::optional<double> combine_semi_supervised(std::optional<double> calibrated_pi,
                                              std::optional<double> c0, double reports,
                                              double audited, double alpha_semi) {
  if (!calibrated_pi && !c0) return std::nullopt;
  if (!c0 || audited <= 0.0) return calibrated_pi ? calibrated_pi : c0;
  if (!calibrated_pi || reports <= 0.0) return c0;
  const double sup = alpha_semi * audited;
  return (sup / (sup + reports)) * *c0 + (reports / (sup + reports)) * *calibrated_pi;
}

double shrink(double value, double count, double prior, double gamma) {
  return (count / (count + gamma)) * value + (gamma / (count + gamma)) * prior;
}

Model oak_learn(const Dataset& train, const SimilarityFn& fn, double gamma, double alpha_semi) {
  if (train.num_workers() == 0) throw std::invalid_argument("cannot learn from an empty dataset");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(alpha_semi >= 1.0)) throw std::invalid_argument("alpha_semi must be at least 1");

  const auto avg = compute_avg_similarity(train, fn);
  const auto sup = compute_supervised_accuracy(train, fn);
  const std::size_t n = train.num_workers();

  std::vector<std::optional<double>> pi(n), c0(n);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    pi[i] = avg[i].value;
    c0[i] = sup[i].value;
    weights[i] = static_cast<double>(sup[i].count);
  }

  Model model;
  model.meta.gamma = gamma;
  model.meta.alpha_semi = alpha_semi;
  model.meta.estimator = Estimator::Oak;
  model.similarity = fn;
  model.partitioner = Partitioner::single();
  model.calibration = calibrate(pi, c0, weights);

  std::vector<std::optional<double>> competence(n);
  double mass = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto lpi = pi[i] ? std::optional<double>(model.calibration(*pi[i])) : std::nullopt;
    competence[i] = combine_semi_supervised(
        lpi, c0[i], static_cast<double>(train.items_labelled(i)), weights[i], alpha_semi);
    if (competence[i]) {
      competence[i] = std::clamp(*competence[i], 0.0, 1.0);
      const double m = static_cast<double>(train.items_labelled(i));
      mass += m;
      weighted += m * *competence[i];
    }
  }
  model.global_mean = mass > 0.0 ? weighted / mass : 0.5;

  for (std::size_t i = 0; i < n; ++i) {
    Cell cell;
    cell.m = train.items_labelled(i);
    cell.m_star = sup[i].count;
    cell.pi = pi[i];
    cell.c0 = c0[i];
    if (competence[i]) {
      cell.c = *competence[i];
      cell.m_bar = avg[i].count;
    } else {
      cell.c = model.global_mean;
      cell.m_bar = 0;
    }
    model.workers[train.worker_id(i)].overall = cell;
  }
  return model;
}

double oak_confidence(const Model& model, std::string_view worker) {
  const WorkerModel* w = model.find_worker(worker);
  if (w == nullptr) return model.global_mean;
  return shrink(w->overall.c, static_cast<double>(w->overall.m_bar), model.global_mean,
                model.meta.gamma);
}

PredictedItem oak_estimate(ItemLabels item, const Model& model, const Aggregator& agg) {
  return estimate(item, model, Estimator::Oak, agg);
}

}  // namespace oak
