#include "oak/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "oak/error.hpp"

namespace oak {

Dataset Dataset::build(LabelKind kind, std::vector<Annotation> annotations,
                       std::vector<std::pair<std::string, Label>> auditor) {
  Dataset ds;
  ds.kind_ = kind;

  auto intern_item = [&ds](const std::string& id) {
    auto [it, inserted] = ds.item_index_.try_emplace(id, ds.item_ids_.size());
    if (inserted) {
      ds.item_ids_.push_back(id);
      ds.items_.emplace_back();
      ds.auditor_.emplace_back();
    }
    return it->second;
  };

  std::vector<std::vector<std::size_t>> arrivals;
  for (auto& a : annotations) {
    if (kind_of(a.label) != kind) {
      throw FormatError("item '" + a.item_id + "', worker '" + a.worker_id + "': label kind '" +
                        std::string(kind_tag(kind_of(a.label))) + "' differs from dataset kind '" +
                        std::string(kind_tag(kind)) + "'");
    }
    const std::size_t item = intern_item(a.item_id);
    auto [wit, inserted] = ds.worker_index_.try_emplace(a.worker_id, ds.worker_ids_.size());
    if (inserted) {
      ds.worker_ids_.push_back(a.worker_id);
      ds.by_worker_.emplace_back();
    }
    const std::size_t worker = wit->second;
    for (const auto& r : ds.items_[item]) {
      if (r.worker == worker)
        throw ValidationError("worker '" + a.worker_id + "' labelled item '" + a.item_id +
                              "' more than once");
    }
    if (arrivals.size() < ds.items_.size()) arrivals.resize(ds.items_.size());
    arrivals[item].push_back(a.arrival_index);
    ds.items_[item].push_back(Report{worker, std::move(a.label)});
    ++ds.num_annotations_;
  }

  arrivals.resize(ds.items_.size());
  for (std::size_t j = 0; j < ds.items_.size(); ++j) {
    auto& reports = ds.items_[j];
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return arrivals[j][a] < arrivals[j][b]; });
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      if (arrivals[j][order[pos]] != pos)
        throw ValidationError("item '" + ds.item_ids_[j] +
                              "': arrival indices must be 0..n-1 without gaps or repeats");
    }
    std::vector<Report> sorted;
    sorted.reserve(reports.size());
    for (auto idx : order) sorted.push_back(std::move(reports[idx]));
    reports = std::move(sorted);
    for (std::size_t pos = 0; pos < reports.size(); ++pos)
      ds.by_worker_[reports[pos].worker].emplace_back(j, pos);
  }

  for (auto& [item_id, label] : auditor) {
    if (kind_of(label) != kind) {
      throw FormatError("auditor label for item '" + item_id + "' has kind '" +
                        std::string(kind_tag(kind_of(label))) + "', dataset kind is '" +
                        std::string(kind_tag(kind)) + "'");
    }
    const std::size_t item = intern_item(item_id);
    if (ds.auditor_[item].has_value())
      throw ValidationError("item '" + item_id + "' has more than one auditor label");
    ds.auditor_[item] = std::move(label);
  }
  return ds;
}

std::optional<std::size_t> Dataset::find_worker(std::string_view id) const {
  auto it = worker_index_.find(std::string(id));
  if (it == worker_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Dataset::find_item(std::string_view id) const {
  auto it = item_index_.find(std::string(id));
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::num_audited() const {
  return static_cast<std::size_t>(
      std::count_if(auditor_.begin(), auditor_.end(), [](const auto& a) { return a.has_value(); }));
}

std::size_t Dataset::audited_items_labelled(std::size_t worker) const {
  std::size_t n = 0;
  for (const auto& [item, pos] : by_worker_[worker])
    if (auditor_[item].has_value()) ++n;
  return n;
}

std::size_t Dataset::co_labelled(std::size_t worker, std::size_t other) const {
  std::size_t n = 0;
  for (const auto& [item, pos] : by_worker_[worker]) {
    for (const auto& r : items_[item])
      if (r.worker == other) {
        ++n;
        break;
      }
  }
  return n;
}

Dataset Dataset::subset(std::span<const std::size_t> items) const {
  std::vector<Annotation> annotations;
  std::vector<std::pair<std::string, Label>> audit;
  for (auto j : items) {
    const auto& reports = items_.at(j);
    for (std::size_t pos = 0; pos < reports.size(); ++pos)
      annotations.push_back({item_ids_[j], worker_ids_[reports[pos].worker], reports[pos].label, pos});
    if (auditor_[j].has_value()) audit.emplace_back(item_ids_[j], *auditor_[j]);
  }
  // Items with neither labels nor an auditor label are dropped.
  return build(kind_, std::move(annotations), std::move(audit));
}

std::vector<Annotation> Dataset::annotations() const {
  std::vector<Annotation> out;
  out.reserve(num_annotations_);
  for (std::size_t j = 0; j < items_.size(); ++j)
    for (std::size_t pos = 0; pos < items_[j].size(); ++pos)
      out.push_back({item_ids_[j], worker_ids_[items_[j][pos].worker], items_[j][pos].label, pos});
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction,
                                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test fraction must lie strictly between 0 and 1");
  const std::size_t m = dataset.num_items();
  if (m < 2) throw std::invalid_argument("need at least two items to split");

  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(m)));
  n_test = std::clamp<std::size_t>(n_test, 1, m - 1);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {dataset.subset(train), dataset.subset(test)};
}

}  // namespace oak
