#include "oak/poak.hpp"

#include <algorithm>

#include "oak/estimate.hpp"
#include "oak/oak.hpp"

namespace oak {

Model poak_learn(const Dataset& train, const SimilarityFn& fn, const Partitioner& partitioner,
                 double gamma, double alpha_semi) {
  Model model = oak_learn(train, fn, gamma, alpha_semi);
  model.meta.estimator = Estimator::Poak;
  model.partitioner = partitioner;
  model.has_per_type = true;

  const auto avg = compute_avg_similarity_by_type(train, fn, partitioner);
  const auto sup = compute_supervised_accuracy_by_type(train, fn, partitioner);
  const std::size_t n = train.num_workers();

  std::vector<std::map<std::size_t, std::size_t>> reports(n);
  for (std::size_t j = 0; j < train.num_items(); ++j)
    for (const auto& r : train.reports(j))
      if (auto type = partitioner.type_of(r.label)) ++reports[r.worker][*type];

  auto lookup = [](const std::map<std::size_t, WorkerStat>& m, std::size_t type) {
    auto it = m.find(type);
    return it == m.end() ? WorkerStat{} : it->second;
  };

  for (std::size_t type = 0; type < partitioner.num_types(); ++type) {
    std::vector<std::optional<double>> pi(n), c0(n);
    std::vector<double> weights(n);
    bool seen = false;
    for (std::size_t i = 0; i < n; ++i) {
      const WorkerStat a = lookup(avg[i], type);
      const WorkerStat s = lookup(sup[i], type);
      pi[i] = a.value;
      c0[i] = s.value;
      weights[i] = static_cast<double>(s.count);
      seen = seen || a.value || s.value;
    }
    if (!seen) continue;
    const Line line = fit_calibration(pi, c0, weights).value_or(model.calibration);
    model.type_calibration[type] = line;

    double mass = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pairs = lookup(avg[i], type).count;
      const auto lpi = pi[i] ? std::optional<double>(line(*pi[i])) : std::nullopt;
      auto c = combine_semi_supervised(lpi, c0[i], static_cast<double>(reports[i][type]),
                                       weights[i], alpha_semi);
      if (!c) continue;
      Cell cell;
      cell.c = std::clamp(*c, 0.0, 1.0);
      cell.m_bar = pairs;
      cell.m = reports[i][type];
      cell.m_star = lookup(sup[i], type).count;
      cell.pi = pi[i];
      cell.c0 = c0[i];
      model.workers[train.worker_id(i)].per_type[type] = cell;
      mass += static_cast<double>(cell.m);
      weighted += static_cast<double>(cell.m) * cell.c;
    }
    if (mass > 0.0) model.type_means[type] = weighted / mass;
  }
  return model;
}

double poak_confidence(const Model& model, std::string_view worker,
                       std::optional<std::size_t> type) {
  if (!type) return oak_confidence(model, worker);
  const WorkerModel* w = model.find_worker(worker);
  if (w == nullptr) {
    auto it = model.type_means.find(*type);
    return it == model.type_means.end() ? model.global_mean : it->second;
  }
  auto cell = w->per_type.find(*type);
  const std::size_t in_type = cell == w->per_type.end() ? 0 : cell->second.m_bar;
  const std::size_t rest = w->overall.m_bar > in_type ? w->overall.m_bar - in_type : 0;
  const double target =
      shrink(w->overall.c, static_cast<double>(rest), model.global_mean, model.meta.gamma);
  if (cell == w->per_type.end()) return target;
  return shrink(cell->second.c, static_cast<double>(in_type), target, model.meta.gamma);
}

PredictedItem poak_estimate(ItemLabels item, const Model& model, const Aggregator& agg) {
  return estimate(item, model, Estimator::Poak, agg);
}

}  // namespace oak
