#include "oak/train.hpp"

#include <stdexcept>

#include "oak/oak.hpp"
#include "oak/poak.hpp"

namespace oak {

Model train_model(const Dataset& train, const TrainConfig& config) {
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0))
    throw std::invalid_argument("lambda must lie in [0, 1]");
  if (config.similarity.kind != train.kind())
    throw std::invalid_argument("similarity kind does not match the dataset");

  Model model;
  if (config.estimator == Estimator::Oak) {
    model = oak_learn(train, config.similarity, config.gamma, config.alpha_semi);
  } else {
    model = poak_learn(train, config.similarity, make_partitioner(config.partitioner, train),
                       config.gamma, config.alpha_semi);
    if (config.estimator == Estimator::Poaki || config.estimator == Estimator::PoakIrt) {
      bool any = false;
      for (const auto& [id, w] : model.workers) any = any || !w.per_type.empty();
      if (!any) throw DegenerateError("per-type block is empty: no worker has per-type data");
      attach_irt(model, train, config.irt);
    }
  }
  model.meta.estimator = config.estimator;
  model.meta.aggregator = config.aggregator;
  model.meta.lambda = config.lambda;

  if (config.multipoint >= 2) {
    const Aggregator agg{config.aggregator, config.similarity};
    model.multipoint =
        learn_multipoint(train, model, config.estimator, agg, config.multipoint, config.shift_fit);
  }
  return model;
}

}  // namespace oak
