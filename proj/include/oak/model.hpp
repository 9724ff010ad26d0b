#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "oak/irt_params.hpp"
#include "oak/partition.hpp"
#include "oak/regression.hpp"
#include "oak/similarity.hpp"

namespace oak {

enum class Estimator { Oak, Poak, Poaki, PoakIrt };

std::string_view estimator_name(Estimator e);
std::optional<Estimator> estimator_from_name(std::string_view name);
std::string_view agg_mode_name(AggMode m);
std::optional<AggMode> agg_mode_from_name(std::string_view name);

using Line = LineFit<double>;

/// Competence estimate for one worker (or one worker and label type).
struct Cell {
  double c = 0.0;                  // estimated competence in [0, 1]
  std::size_t m_bar = 0;           // pairwise comparisons
  std::size_t m = 0;               // reports
  std::size_t m_star = 0;          // audited reports
  std::optional<double> pi;        // average similarity
  std::optional<double> c0;        // supervised accuracy
};

struct WorkerModel {
  Cell overall;
  std::map<std::size_t, Cell> per_type;
};

struct IrtBlock {
  IrtParams params;
  std::map<std::string, Eigen::Index, std::less<>> worker_index;
};

/// Logit-space shift applied at decision point t >= 2.
struct DecisionShift {
  double delta = 0.0;
  double epsilon = 0.0;
};

struct ModelMeta {
  double gamma = 10.0;
  double alpha_semi = 1.0;
  double lambda = 1.0;
  Estimator estimator = Estimator::Poak;
  AggMode aggregator = AggMode::Weight;
};

/// Trained state shared by every estimator. Treated as immutable once
/// training returns.
struct Model {
  ModelMeta meta;
  SimilarityFn similarity;
  Partitioner partitioner;

  std::map<std::string, WorkerModel, std::less<>> workers;
  Line calibration;
  double global_mean = 0.5;

  bool has_per_type = false;
  std::map<std::size_t, Line> type_calibration;
  std::map<std::size_t, double> type_means;

  std::optional<IrtBlock> irt;
  std::map<int, DecisionShift> multipoint;

  const WorkerModel* find_worker(std::string_view id) const {
    auto it = workers.find(id);
    return it == workers.end() ? nullptr : &it->second;
  }
};

}  // namespace oak
