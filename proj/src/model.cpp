#include "oak/model.hpp"

#include <array>
#include <utility>

namespace oak {
namespace {

constexpr std::array<std::pair<Estimator, std::string_view>, 4> kEstimators{{
    {Estimator::Oak, "oak"},
    {Estimator::Poak, "poak"},
    {Estimator::Poaki, "poaki"},
    {Estimator::PoakIrt, "poak-irt"},
}};

constexpr std::array<std::pair<AggMode, std::string_view>, 4> kAggModes{{
    {AggMode::Weight, "weight"},
    {AggMode::Uniform, "uniform"},
    {AggMode::Sad, "sad"},
    {AggMode::Bau, "bau"},
}};

}  // namespace

std::string_view estimator_name(Estimator e) {
  for (const auto& [v, name] : kEstimators)
    if (v == e) return name;
  return "?";
}

std::optional<Estimator> estimator_from_name(std::string_view name) {
  for (const auto& [v, n] : kEstimators)
    if (n == name) return v;
  return std::nullopt;
}

std::string_view agg_mode_name(AggMode m) {
  for (const auto& [v, name] : kAggModes)
    if (v == m) return name;
  return "?";
}

std::optional<AggMode> agg_mode_from_name(std::string_view name) {
  for (const auto& [v, n] : kAggModes)
    if (n == name) return v;
  return std::nullopt;
}

}  // namespace oak
