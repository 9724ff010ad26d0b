#include "oak/estimate.hpp"

#include <algorithm>
#include <stdexcept>

#include "oak/irt.hpp"
#include "oak/oak.hpp"
#include "oak/poak.hpp"

namespace oak {

double label_weight(const Model& model, std::string_view worker) {
  const WorkerModel* w = model.find_worker(worker);
  return w == nullptr ? model.global_mean : w->overall.c;
}

double label_confidence(const Model& model, Estimator estimator, std::string_view worker,
                        const Label& label) {
  switch (estimator) {
    case Estimator::Oak: return oak_confidence(model, worker);
    case Estimator::Poak: return poak_confidence(model, worker, model.partitioner.type_of(label));
    case Estimator::Poaki:
      return poaki_confidence(model, worker, model.partitioner.type_of(label));
    case Estimator::PoakIrt:
      return poak_irt_confidence(model, worker, model.partitioner.type_of(label));
  }
  throw std::invalid_argument("unknown estimator");
}

PredictedItem estimate(ItemLabels item, const Model& model, Estimator estimator,
                       const Aggregator& agg) {
  if (item.size() == 0) throw std::invalid_argument("estimate: item has no labels");
  if (item.workers.size() != item.labels.size())
    throw std::invalid_argument("estimate: workers and labels differ in length");

  std::vector<double> weights;
  if (agg.mode == AggMode::Weight || agg.mode == AggMode::Bau) {
    weights.reserve(item.size());
    for (std::size_t k = 0; k < item.size(); ++k) {
      weights.push_back(agg.mode == AggMode::Weight
                            ? label_weight(model, item.workers[k])
                            : label_confidence(model, estimator, item.workers[k], item.labels[k]));
    }
  }

  PredictedItem out;
  out.z = apply_aggregator(item.labels, weights, agg);
  const std::size_t closest = closest_label(item.labels, out.z, model.similarity);
  out.confidence =
      std::clamp(label_confidence(model, estimator, item.workers[closest], out.z), 0.0, 1.0);
  out.labels_used = item.size();
  return out;
}

}  // namespace oak
