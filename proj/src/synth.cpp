#include "oak/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oak {
namespace {

constexpr int kGrid = 16;
constexpr double kPointRange = 10.0;

std::vector<std::size_t> allocate(const std::vector<PopulationEntry>& pop, std::size_t n) {
  double total = 0.0;
  for (const auto& e : pop) {
    if (!(e.frequency >= 0.0)) throw std::invalid_argument("population frequency must be >= 0");
    total += e.frequency;
  }
  if (!(total > 0.0)) throw std::invalid_argument("population frequencies sum to zero");
  std::vector<std::size_t> counts(pop.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t used = 0;
  for (std::size_t g = 0; g < pop.size(); ++g) {
    const double exact = pop[g].frequency / total * static_cast<double>(n);
    counts[g] = static_cast<std::size_t>(std::floor(exact));
    used += counts[g];
    remainders.emplace_back(exact - std::floor(exact), g);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < n; ++r, ++used) ++counts[remainders[r % remainders.size()].second];
  return counts;
}

void check_confusion(const Eigen::MatrixXd& m, Eigen::Index k) {
  if (m.rows() != k || m.cols() != k) throw std::invalid_argument("confusion matrix must be k x k");
  if ((m.array() < 0.0).any() || (m.array() > 1.0).any())
    throw std::invalid_argument("confusion entries must lie in [0, 1]");
  if (((m.rowwise().sum().array() - 1.0).abs() > 1e-9).any())
    throw std::invalid_argument("confusion rows must sum to 1");
}

std::vector<WorkerSpec> resolve_workers(const GeneratorConfig& cfg) {
  if (!cfg.workers.empty()) return cfg.workers;
  if (!cfg.population.empty()) {
    const auto counts = allocate(cfg.population, cfg.num_workers);
    std::vector<WorkerSpec> out;
    for (std::size_t g = 0; g < counts.size(); ++g)
      out.insert(out.end(), counts[g], cfg.population[g].spec);
    return out;
  }
  std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x776f726b657273ULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& s = cfg.sampler;
  switch (s.kind) {
    case WorkerSampler::Kind::OneCoinValues: {
      if (s.values.empty()) throw std::invalid_argument("onecoin sampler needs values");
      std::uniform_int_distribution<std::size_t> pick(0, s.values.size() - 1);
      return onecoin_population(cfg.num_workers, [&] { return s.values[pick(rng)]; }, cfg.k);
    }
    case WorkerSampler::Kind::OneCoinUniform:
      return onecoin_population(
          cfg.num_workers, [&] { return s.low + (s.high - s.low) * unit(rng); }, cfg.k);
    case WorkerSampler::Kind::PerClassUniform: {
      std::vector<WorkerSpec> out;
      for (std::size_t i = 0; i < cfg.num_workers; ++i) {
        Eigen::VectorXd p(cfg.k);
        for (Eigen::Index t = 0; t < cfg.k; ++t) p(t) = s.low + (s.high - s.low) * unit(rng);
        out.push_back(per_class_worker(p));
      }
      return out;
    }
    case WorkerSampler::Kind::None: break;
  }
  throw std::invalid_argument("no worker population configured");
}

std::vector<std::size_t> pick_workers(std::size_t n, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> out;
  out.reserve(count);
  if (2 * count <= n) {
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    while (out.size() < count) {
      const std::size_t w = any(rng);
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
    return out;
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t r = 0; r < count; ++r) {
    std::uniform_int_distribution<std::size_t> rest(r, n - 1);
    std::swap(perm[r], perm[rest(rng)]);
  }
  perm.resize(count);
  return perm;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

WorkerSpec onecoin_worker(double p, Eigen::Index k) {
  if (k < 2) throw std::invalid_argument("one-coin worker needs k >= 2");
  WorkerSpec w;
  w.confusion = Eigen::MatrixXd::Constant(k, k, (1.0 - p) / static_cast<double>(k - 1));
  w.confusion.diagonal().setConstant(p);
  return w;
}

std::vector<WorkerSpec> onecoin_population(std::size_t n, const std::function<double()>& sample_p,
                                           Eigen::Index k) {
  std::vector<WorkerSpec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(onecoin_worker(sample_p(), k));
  return out;
}

WorkerSpec per_class_worker(const Eigen::VectorXd& p) {
  const Eigen::Index k = p.size();
  if (k < 2) throw std::invalid_argument("per-class worker needs k >= 2");
  WorkerSpec w;
  w.confusion = ((1.0 - p.array()) / static_cast<double>(k - 1)).matrix().replicate(1, k);
  w.confusion.diagonal() = p;
  return w;
}

Label wrap_category(std::size_t c, const GeneratorConfig& cfg) {
  const auto k = static_cast<std::size_t>(cfg.k);
  const std::string idx = std::to_string(c);
  switch (cfg.label_kind) {
    case LabelKind::Categorical:
      return Categorical{cfg.categories.empty() ? "c" + idx : cfg.categories[c]};
    case LabelKind::LabelSet: {
      LabelSet s;
      s.topics.insert("t" + idx);
      if (c % 2 == 1) s.topics.insert("t" + std::to_string((c + 1) % k));
      return s;
    }
    case LabelKind::TreePath:
      return TreePath{{"r" + std::to_string(c / 2), "s" + idx, "l" + idx}};
    case LabelKind::BoxSet: {
      std::vector<Box> boxes;
      const int ci = static_cast<int>(c);
      for (int b = 0; b <= ci % 3; ++b) {
        const int x0 = (3 * ci + 5 * b) % 12;
        const int y0 = (5 * ci + 3 * b) % 12;
        boxes.push_back({x0, y0, x0 + 4, y0 + 4});
      }
      return BoxSet(kGrid, kGrid, std::move(boxes));
    }
    case LabelKind::Point2D: break;
  }
  throw std::invalid_argument("points are not wrapped categories");
}

GeneratedData generate(const GeneratorConfig& cfg) {
  const Eigen::Index k = cfg.k;
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  Eigen::VectorXd q = cfg.priors.size() == 0
                          ? Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k))
                          : cfg.priors;
  if (q.size() != k) throw std::invalid_argument("priors must have k entries");
  if ((q.array() < 0.0).any() || std::abs(q.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("priors must form a probability vector");
  if (!cfg.categories.empty() && static_cast<Eigen::Index>(cfg.categories.size()) != k)
    throw std::invalid_argument("categories must have k entries");
  if (!(cfg.auditor_fraction >= 0.0 && cfg.auditor_fraction <= 1.0))
    throw std::invalid_argument("auditor fraction must lie in [0, 1]");

  GeneratedData out;
  out.workers = resolve_workers(cfg);
  const std::size_t n = out.workers.size();
  if (n == 0) throw std::invalid_argument("population is empty");
  for (const auto& w : out.workers) check_confusion(w.confusion, k);

  std::vector<double> lpi = cfg.labels_per_item_weights;
  if (lpi.empty()) {
    if (cfg.labels_per_item == 0) throw std::invalid_argument("labels per item must be >= 1");
    lpi.assign(cfg.labels_per_item, 0.0);
    lpi.back() = 1.0;
  }
  if (lpi.size() > n) {
    for (std::size_t l = n; l < lpi.size(); ++l)
      if (lpi[l] > 0.0) throw std::invalid_argument("labels per item exceed the number of workers");
  }
  std::discrete_distribution<std::size_t> draw_count(lpi.begin(), lpi.end());
  std::discrete_distribution<Eigen::Index> draw_truth(q.data(), q.data() + k);
  std::vector<std::vector<std::discrete_distribution<Eigen::Index>>> draw_label(n);
  std::vector<double> noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = out.workers[i].confusion;
    for (Eigen::Index t = 0; t < k; ++t) {
      const Eigen::VectorXd row = m.row(t).transpose();
      draw_label[i].emplace_back(row.data(), row.data() + k);
    }
    noise[i] = cfg.point_noise * (1.0 - m.diagonal().mean());
  }

  std::vector<Annotation> annotations;
  const std::uint64_t base = splitmix64(cfg.seed);
  for (std::size_t j = 0; j < cfg.num_items; ++j) {
    std::mt19937_64 rng(splitmix64(base + j));
    const std::string item = "i" + std::to_string(j);
    const auto z = static_cast<std::size_t>(draw_truth(rng));
    const std::size_t count = draw_count(rng) + 1;
    Label truth;
    Point2D centre;
    if (cfg.label_kind == LabelKind::Point2D) {
      std::uniform_real_distribution<double> pos(0.0, kPointRange);
      centre.x = pos(rng);
      centre.y = pos(rng);
      truth = centre;
    } else {
      truth = wrap_category(z, cfg);
    }
    const auto chosen = pick_workers(n, count, rng);
    for (std::size_t a = 0; a < chosen.size(); ++a) {
      const std::size_t w = chosen[a];
      Label label;
      if (cfg.label_kind == LabelKind::Point2D) {
        std::normal_distribution<double> jitter(0.0, 1.0);
        const double dx = jitter(rng);
        const double dy = jitter(rng);
        label = Point2D{centre.x + noise[w] * dx, centre.y + noise[w] * dy};
      } else {
        label = wrap_category(static_cast<std::size_t>(draw_label[w][z](rng)), cfg);
      }
      annotations.push_back({item, "w" + std::to_string(w), std::move(label), a});
    }
    out.truth.emplace_back(item, std::move(truth));
    out.truth_category.push_back(z);
  }

  std::vector<std::size_t> order(cfg.num_items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 audit_rng(splitmix64(cfg.seed ^ 0x61756469746f72ULL));
  std::shuffle(order.begin(), order.end(), audit_rng);
  const auto audited = static_cast<std::size_t>(
      std::llround(cfg.auditor_fraction * static_cast<double>(cfg.num_items)));
  order.resize(audited);
  std::sort(order.begin(), order.end());
  std::vector<std::pair<std::string, Label>> auditor;
  auditor.reserve(audited);
  for (std::size_t j : order) auditor.push_back(out.truth[j]);

  out.dataset = Dataset::build(cfg.label_kind, std::move(annotations), std::move(auditor));
  return out;
}

}  // namespace oak
