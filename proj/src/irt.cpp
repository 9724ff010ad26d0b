#include "oak/irt.hpp"

#include "oak/estimate.hpp"
#include "oak/oak.hpp"

namespace oak {
namespace {

constexpr std::size_t kMinAuditorSample = 20;
constexpr std::size_t kSampleCap = 256;

std::vector<const Label*> thin(const std::vector<const Label*>& v) {
  if (v.size() <= kSampleCap) return v;
  std::vector<const Label*> out;
  out.reserve(kSampleCap);
  for (std::size_t s = 0; s < kSampleCap; ++s) out.push_back(v[s * v.size() / kSampleCap]);
  return out;
}

}  // namespace

Eigen::VectorXd estimate_base_rates(const Dataset& train, const SimilarityFn& fn,
                                    const Partitioner& partitioner) {
  const std::size_t k = partitioner.num_types();
  std::vector<const Label*> reported, audited;
  std::vector<std::vector<const Label*>> by_type(k);
  for (std::size_t j = 0; j < train.num_items(); ++j) {
    for (const auto& r : train.reports(j)) {
      reported.push_back(&r.label);
      if (auto t = partitioner.type_of(r.label)) by_type[*t].push_back(&r.label);
    }
    if (train.auditor(j)) audited.push_back(&*train.auditor(j));
  }
  const auto prior = thin(audited.size() >= kMinAuditorSample ? audited : reported);

  Eigen::VectorXd rates = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t l = 0; l < k; ++l) {
    const auto typed = thin(by_type[l]);
    if (typed.empty() || prior.empty()) continue;
    double sum = 0.0;
    for (const Label* y : prior)
      for (const Label* x : typed) sum += similarity(*y, *x, fn);
    rates(static_cast<Eigen::Index>(l)) =
        sum / static_cast<double>(prior.size() * typed.size());
  }
  return rates;
}

void attach_irt(Model& model, const Dataset& train, const IrtFitOptions& options) {
  if (!model.has_per_type) throw DegenerateError("model has no per-type block");
  const auto k = static_cast<Eigen::Index>(model.partitioner.num_types());
  const auto n = static_cast<Eigen::Index>(model.workers.size());

  IrtBlock block;
  Eigen::MatrixXd accuracy = Eigen::MatrixXd::Zero(n, k);
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(n, k);
  Eigen::VectorXd init(n);
  Eigen::Index i = 0;
  for (const auto& [id, w] : model.workers) {
    block.worker_index.emplace(id, i);
    const double c = std::clamp(w.overall.c, options.margin, 1.0 - options.margin);
    init(i) = -logistic_g_inv(c);
    for (const auto& [type, cell] : w.per_type) {
      const auto l = static_cast<Eigen::Index>(type);
      if (l >= k) continue;
      accuracy(i, l) = cell.c;
      weights(i, l) = static_cast<double>(cell.m_bar);
    }
    ++i;
  }
  if (!(weights.array() > 0).any()) throw DegenerateError("per-type block is empty");

  Eigen::VectorXd base = estimate_base_rates(train, model.similarity, model.partitioner);
  for (Eigen::Index l = 0; l < k; ++l) {
    double best = 0.0;
    for (Eigen::Index r = 0; r < n; ++r)
      if (weights(r, l) > 0) best = std::max(best, accuracy(r, l));
    base(l) = std::clamp(base(l), 0.0, std::max(0.0, best - options.base_rate_margin));
  }

  block.params = fit_irt<double>(accuracy, weights, base, init, options).params;
  model.irt = std::move(block);
}

double poaki_confidence(const Model& model, std::string_view worker,
                        std::optional<std::size_t> type) {
  if (!model.irt) throw DegenerateError("model has no IRT block");
  const auto& p = model.irt->params;
  if (!type || static_cast<Eigen::Index>(*type) >= p.num_types())
    return oak_confidence(model, worker);
  auto it = model.irt->worker_index.find(worker);
  const double c = it == model.irt->worker_index.end() ? 0.0 : p.competence(it->second);
  const auto l = static_cast<Eigen::Index>(*type);
  return irt_probability(c, p.difficulty(l), p.separation(l), p.base_rate(l));
}

double poak_irt_confidence(const Model& model, std::string_view worker,
                           std::optional<std::size_t> type) {
  const double base = poaki_confidence(model, worker, type);
  const WorkerModel* w = model.find_worker(worker);
  if (w == nullptr || !type) return base;
  auto cell = w->per_type.find(*type);
  if (cell == w->per_type.end() || cell->second.m_bar == 0) return base;
  const double m = static_cast<double>(cell->second.m_bar);
  const double weight = m / (m + model.meta.lambda * model.meta.gamma);
  return weight * cell->second.c + (1.0 - weight) * base;
}

PredictedItem poaki_estimate(ItemLabels item, const Model& model, const Aggregator& agg) {
  return estimate(item, model, Estimator::Poaki, agg);
}

PredictedItem poak_irt_estimate(ItemLabels item, const Model& model, const Aggregator& agg) {
  return estimate(item, model, Estimator::PoakIrt, agg);
}

}  // namespace oak
