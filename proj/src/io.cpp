#include "oak/io.hpp"

#include <cmath>
#include <stdexcept>

#include "oak/error.hpp"

namespace oak {
namespace {

std::string node_id(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  throw FormatError("tree node ids must be strings or integers");
}

double number(const json& v, const char* what) {
  if (!v.is_number()) throw FormatError(std::string(what) + " must be a number");
  return v.get<double>();
}

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

json line_to_json(const Line& l) { return {{"slope", l.slope}, {"intercept", l.intercept}}; }

Line line_from_json(const json& j) {
  return Line{number(field(j, "slope"), "slope"), number(field(j, "intercept"), "intercept")};
}

json cell_to_json(const Cell& c) {
  json j{{"c", c.c}, {"m_bar", c.m_bar}, {"m", c.m}, {"m_star", c.m_star}};
  if (c.pi) j["pi"] = *c.pi;
  if (c.c0) j["c0"] = *c.c0;
  return j;
}

Cell cell_from_json(const json& j) {
  Cell c;
  c.c = number(field(j, "c"), "c");
  c.m_bar = field(j, "m_bar").get<std::size_t>();
  c.m = j.value("m", std::size_t{0});
  c.m_star = j.value("m_star", std::size_t{0});
  if (j.contains("pi")) c.pi = number(j["pi"], "pi");
  if (j.contains("c0")) c.c0 = number(j["c0"], "c0");
  return c;
}

std::size_t type_key(const std::string& key) {
  std::size_t pos = 0;
  const unsigned long v = std::stoul(key, &pos);
  if (pos != key.size()) throw FormatError("type keys must be integers");
  return v;
}

std::string_view rule_name(Partitioner::Rule r) {
  switch (r) {
    case Partitioner::Rule::Single: return "single";
    case Partitioner::Rule::Category: return "category";
    case Partitioner::Rule::TopicSingleton: return "topic-singleton";
    case Partitioner::Rule::TreeRoot: return "tree-root";
    case Partitioner::Rule::BoxCount: return "box-count";
    case Partitioner::Rule::PointGrid: return "point-grid";
  }
  return "single";
}

json partitioner_to_json(const Partitioner& p) {
  json j{{"rule", rule_name(p.rule())}};
  if (!p.vocabulary().empty()) j["vocabulary"] = p.vocabulary();
  if (p.rule() == Partitioner::Rule::PointGrid) {
    j["grid"] = {p.grid_nx(), p.grid_ny()};
    j["bounds"] = p.grid_bounds();
  }
  return j;
}

Partitioner partitioner_from_json(const json& j) {
  const auto rule = field(j, "rule").get<std::string>();
  const auto vocab = j.value("vocabulary", std::vector<std::string>{});
  if (rule == "single") return Partitioner::single();
  if (rule == "category") return Partitioner::category(vocab);
  if (rule == "topic-singleton") return Partitioner::topic_singleton(vocab);
  if (rule == "tree-root") return Partitioner::tree_root(vocab);
  if (rule == "box-count") return Partitioner::box_count();
  if (rule == "point-grid") {
    const auto grid = field(j, "grid").get<std::array<std::size_t, 2>>();
    return Partitioner::point_grid(grid[0], grid[1], field(j, "bounds").get<std::array<double, 4>>());
  }
  throw FormatError("unknown partition rule '" + rule + "'");
}

json similarity_to_json(const SimilarityFn& fn) {
  return {{"kind", kind_tag(fn.kind)}, {"sigma", fn.sigma}, {"level_scores", fn.level_scores}};
}

SimilarityFn similarity_from_json(const json& j) {
  SimilarityFn fn;
  const auto tag = field(j, "kind").get<std::string>();
  auto kind = kind_from_tag(tag);
  if (!kind) throw FormatError("unknown label kind '" + tag + "'");
  fn.kind = *kind;
  fn.sigma = j.value("sigma", 1.0);
  if (j.contains("level_scores")) fn.level_scores = j["level_scores"].get<std::array<double, 4>>();
  return fn;
}

template <typename Vector>
json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index k) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (static_cast<Eigen::Index>(rows.size()) != k) throw FormatError("confusion matrix must be k x k");
  Eigen::MatrixXd m(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != k)
      throw FormatError("confusion matrix must be k x k");
    for (Eigen::Index c = 0; c < k; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

template <typename F>
auto rethrow_as_format(F&& f, const std::string& where) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

}  // namespace

json label_to_json(const Label& label) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Categorical>) {
          return {{"kind", "cat"}, {"v", v.value}};
        } else if constexpr (std::is_same_v<T, LabelSet>) {
          return {{"kind", "set"}, {"v", v.topics}};
        } else if constexpr (std::is_same_v<T, Point2D>) {
          return {{"kind", "pt"}, {"v", {v.x, v.y}}};
        } else if constexpr (std::is_same_v<T, TreePath>) {
          return {{"kind", "path"}, {"v", v.nodes}};
        } else {
          json boxes = json::array();
          for (const auto& b : v.boxes()) boxes.push_back({b.x0, b.y0, b.x1, b.y1});
          return {{"kind", "boxes"}, {"v", boxes}, {"grid", {v.width(), v.height()}}};
        }
      },
      label);
}

Label label_from_json(const json& j, std::optional<LabelKind> expected) {
  if (!j.is_object()) throw FormatError("label must be an object");
  return rethrow_as_format(
      [&]() -> Label {
        const auto tag = field(j, "kind").get<std::string>();
        const auto kind = kind_from_tag(tag);
        if (!kind) throw FormatError("unknown label kind '" + tag + "'");
        if (expected && *kind != *expected)
          throw FormatError("label kind '" + tag + "' differs from dataset kind '" +
                            std::string(kind_tag(*expected)) + "'");
        const json& v = field(j, "v");
        switch (*kind) {
          case LabelKind::Categorical: return Categorical{v.get<std::string>()};
          case LabelKind::LabelSet: {
            LabelSet s;
            for (const auto& t : v) s.topics.insert(t.get<std::string>());
            return s;
          }
          case LabelKind::Point2D: {
            if (!v.is_array() || v.size() != 2) throw FormatError("point must be [x, y]");
            return Point2D{number(v[0], "x"), number(v[1], "y")};
          }
          case LabelKind::TreePath: {
            if (!v.is_array() || v.size() != 3) throw FormatError("tree path must have 3 levels");
            return TreePath{{node_id(v[0]), node_id(v[1]), node_id(v[2])}};
          }
          case LabelKind::BoxSet: {
            const auto grid = field(j, "grid").get<std::array<int, 2>>();
            std::vector<Box> boxes;
            for (const auto& b : v) {
              const auto c = b.get<std::array<int, 4>>();
              boxes.push_back({c[0], c[1], c[2], c[3]});
            }
            try {
              return BoxSet(grid[0], grid[1], std::move(boxes));
            } catch (const ValidationError& e) {
              throw FormatError(e.what());
            }
          }
        }
        throw FormatError("unknown label kind");
      },
      "label");
}

Dataset read_dataset(std::istream& in, AuditorLabels extra_auditor) {
  std::vector<Annotation> annotations;
  AuditorLabels auditor;
  std::optional<LabelKind> kind;
  std::string line;
  std::size_t number_of_line = 0;
  while (std::getline(in, line)) {
    ++number_of_line;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(number_of_line);
    try {
      const json rec = rethrow_as_format([&] { return json::parse(line); }, where);
      if (!rec.is_object()) throw FormatError("record must be an object");
      rethrow_as_format(
          [&] {
            const auto item = field(rec, "item").get<std::string>();
            if (rec.contains("z")) {
              Label z = label_from_json(rec["z"], kind);
              if (!kind) kind = kind_of(z);
              auditor.emplace_back(item, std::move(z));
              return 0;
            }
            Annotation a;
            a.item_id = item;
            a.worker_id = field(rec, "worker").get<std::string>();
            const json& arrival = field(rec, "arrival");
            if (!arrival.is_number_unsigned()) throw FormatError("arrival must be a non-negative integer");
            a.arrival_index = arrival.get<std::size_t>();
            a.label = label_from_json(field(rec, "label"), kind);
            if (!kind) kind = kind_of(a.label);
            annotations.push_back(std::move(a));
            return 0;
          },
          where);
    } catch (const FormatError& e) {
      const std::string msg = e.what();
      throw FormatError(msg.starts_with("line ") ? msg : where + ": " + msg);
    }
  }
  for (auto& a : extra_auditor) {
    if (!kind) kind = kind_of(a.second);
    auditor.push_back(std::move(a));
  }
  return Dataset::build(kind.value_or(LabelKind::Categorical), std::move(annotations),
                        std::move(auditor));
}

AuditorLabels read_truth(std::istream& in) {
  AuditorLabels out;
  std::optional<LabelKind> kind;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(n);
    rethrow_as_format(
        [&] {
          const json rec = json::parse(line);
          Label z = label_from_json(field(rec, "z"), kind);
          if (!kind) kind = kind_of(z);
          out.emplace_back(field(rec, "item").get<std::string>(), std::move(z));
          return 0;
        },
        where);
  }
  return out;
}

void write_annotations(std::ostream& out, const Dataset& ds) {
  for (const auto& a : ds.annotations()) {
    out << json{{"item", a.item_id},
                {"worker", a.worker_id},
                {"arrival", a.arrival_index},
                {"label", label_to_json(a.label)}}
                .dump()
        << '\n';
  }
}

void write_truth(std::ostream& out, const AuditorLabels& truth) {
  for (const auto& [item, z] : truth)
    out << json{{"item", item}, {"z", label_to_json(z)}}.dump() << '\n';
}

json model_to_json(const Model& m) {
  json meta{{"gamma", m.meta.gamma},
            {"alpha_semi", m.meta.alpha_semi},
            {"lambda", m.meta.lambda},
            {"estimator", estimator_name(m.meta.estimator)},
            {"aggregator", agg_mode_name(m.meta.aggregator)},
            {"partitioner", partitioner_to_json(m.partitioner)},
            {"similarity", similarity_to_json(m.similarity)}};

  json workers = json::object();
  for (const auto& [id, w] : m.workers) {
    json j = cell_to_json(w.overall);
    if (m.has_per_type) {
      json per = json::object();
      for (const auto& [type, cell] : w.per_type) per[std::to_string(type)] = cell_to_json(cell);
      j["per_type"] = per;
    }
    workers[id] = j;
  }

  json calibration = line_to_json(m.calibration);
  if (m.has_per_type) {
    json per = json::object();
    for (const auto& [type, line] : m.type_calibration) per[std::to_string(type)] = line_to_json(line);
    calibration["per_type"] = per;
  }

  json doc{{"version", 1},
           {"meta", meta},
           {"workers", workers},
           {"calibration", calibration},
           {"global_mean", m.global_mean}};
  if (m.has_per_type) {
    json means = json::object();
    for (const auto& [type, v] : m.type_means) means[std::to_string(type)] = v;
    doc["type_means"] = means;
  }
  if (m.irt) {
    const auto& p = m.irt->params;
    json competence = json::object();
    for (const auto& [id, idx] : m.irt->worker_index) competence[id] = p.competence(idx);
    doc["irt"] = {{"difficulty", vector_to_json(p.difficulty)},
                  {"separation", vector_to_json(p.separation)},
                  {"base_rate", vector_to_json(p.base_rate)},
                  {"competence", competence}};
  }
  json mp = json::object();
  for (const auto& [t, s] : m.multipoint)
    mp[std::to_string(t)] = {{"delta", s.delta}, {"epsilon", s.epsilon}};
  doc["multipoint"] = mp;
  return doc;
}

Model model_from_json(const json& doc) {
  return rethrow_as_format(
      [&] {
        if (!doc.is_object() || doc.value("version", 0) != 1)
          throw FormatError("unsupported model version");
        Model m;
        const json& meta = field(doc, "meta");
        m.meta.gamma = number(field(meta, "gamma"), "gamma");
        m.meta.alpha_semi = number(field(meta, "alpha_semi"), "alpha_semi");
        m.meta.lambda = number(field(meta, "lambda"), "lambda");
        const auto est = field(meta, "estimator").get<std::string>();
        const auto agg = field(meta, "aggregator").get<std::string>();
        if (!estimator_from_name(est)) throw FormatError("unknown estimator '" + est + "'");
        if (!agg_mode_from_name(agg)) throw FormatError("unknown aggregator '" + agg + "'");
        m.meta.estimator = *estimator_from_name(est);
        m.meta.aggregator = *agg_mode_from_name(agg);
        m.partitioner = partitioner_from_json(field(meta, "partitioner"));
        m.similarity = similarity_from_json(field(meta, "similarity"));

        m.has_per_type = doc.contains("type_means");
        for (const auto& [id, j] : field(doc, "workers").items()) {
          WorkerModel w;
          w.overall = cell_from_json(j);
          if (j.contains("per_type"))
            for (const auto& [key, c] : j["per_type"].items()) w.per_type[type_key(key)] = cell_from_json(c);
          m.workers.emplace(id, std::move(w));
        }
        const json& cal = field(doc, "calibration");
        m.calibration = line_from_json(cal);
        if (cal.contains("per_type"))
          for (const auto& [key, l] : cal["per_type"].items()) m.type_calibration[type_key(key)] = line_from_json(l);
        m.global_mean = number(field(doc, "global_mean"), "global_mean");
        if (m.has_per_type)
          for (const auto& [key, v] : doc["type_means"].items()) m.type_means[type_key(key)] = number(v, "type mean");

        if (doc.contains("irt") && !doc["irt"].is_null()) {
          const json& irt = doc["irt"];
          IrtBlock block;
          block.params.difficulty = vector_from_json(field(irt, "difficulty"));
          block.params.separation = vector_from_json(field(irt, "separation"));
          block.params.base_rate = vector_from_json(field(irt, "base_rate"));
          const json& comp = field(irt, "competence");
          block.params.competence.resize(static_cast<Eigen::Index>(comp.size()));
          Eigen::Index i = 0;
          for (const auto& [id, c] : comp.items()) {
            block.worker_index.emplace(id, i);
            block.params.competence(i++) = number(c, "competence");
          }
          const auto k = block.params.difficulty.size();
          if (block.params.separation.size() != k || block.params.base_rate.size() != k)
            throw FormatError("irt vectors differ in length");
          m.irt = std::move(block);
        }
        if (doc.contains("multipoint"))
          for (const auto& [key, s] : doc["multipoint"].items())
            m.multipoint[static_cast<int>(type_key(key))] =
                DecisionShift{number(field(s, "delta"), "delta"), number(field(s, "epsilon"), "epsilon")};
        return m;
      },
      "model");
}

json prediction_to_json(const PredictedItem& p) {
  return {{"item", p.item_id},
          {"z", label_to_json(p.z)},
          {"confidence", p.confidence},
          {"labels_used", p.labels_used}};
}

GeneratorConfig generator_config_from_json(const json& j) {
  return rethrow_as_format(
      [&] {
        if (!j.is_object()) throw FormatError("generator config must be an object");
        static const std::vector<std::string> known{
            "k",         "priors",          "categories",       "num_workers", "workers",
            "population", "sampler",        "num_items",        "labels_per_item",
            "auditor_fraction", "label_kind", "point_noise",    "seed"};
        for (const auto& [key, v] : j.items())
          if (std::find(known.begin(), known.end(), key) == known.end())
            throw FormatError("unknown config key '" + key + "'");

        GeneratorConfig c;
        c.k = field(j, "k").get<Eigen::Index>();
        if (c.k < 2) throw FormatError("k must be at least 2");
        if (j.contains("priors")) c.priors = vector_from_json(j["priors"]);
        c.categories = j.value("categories", std::vector<std::string>{});
        c.num_workers = j.value("num_workers", std::size_t{0});
        if (j.contains("workers"))
          for (const auto& m : j["workers"]) c.workers.push_back({matrix_from_json(m, c.k)});
        if (j.contains("population")) {
          for (const auto& e : j["population"]) {
            PopulationEntry entry;
            entry.frequency = number(field(e, "frequency"), "frequency");
            if (e.contains("onecoin"))
              entry.spec = onecoin_worker(number(e["onecoin"], "onecoin"), c.k);
            else
              entry.spec.confusion = matrix_from_json(field(e, "confusion"), c.k);
            c.population.push_back(std::move(entry));
          }
        }
        if (j.contains("sampler")) {
          const json& s = j["sampler"];
          const auto type = field(s, "type").get<std::string>();
          if (type == "onecoin") {
            c.sampler.kind = WorkerSampler::Kind::OneCoinValues;
            c.sampler.values = field(s, "values").get<std::vector<double>>();
          } else if (type == "onecoin_uniform" || type == "per_class_uniform") {
            c.sampler.kind = type == "onecoin_uniform" ? WorkerSampler::Kind::OneCoinUniform
                                                       : WorkerSampler::Kind::PerClassUniform;
            c.sampler.low = number(field(s, "low"), "low");
            c.sampler.high = number(field(s, "high"), "high");
          } else {
            throw FormatError("unknown sampler type '" + type + "'");
          }
        }
        if (c.workers.empty() && c.num_workers == 0)
          throw FormatError("num_workers is required unless workers are listed");
        c.num_items = field(j, "num_items").get<std::size_t>();
        if (j.contains("labels_per_item")) {
          const json& l = j["labels_per_item"];
          if (l.is_array())
            c.labels_per_item_weights = l.get<std::vector<double>>();
          else
            c.labels_per_item = l.get<std::size_t>();
        }
        c.auditor_fraction = j.value("auditor_fraction", 0.0);
        const auto tag = j.value("label_kind", std::string("cat"));
        const auto kind = kind_from_tag(tag);
        if (!kind) throw FormatError("unknown label kind '" + tag + "'");
        c.label_kind = *kind;
        c.point_noise = j.value("point_noise", 1.0);
        c.seed = j.value("seed", std::uint64_t{1});
        return c;
      },
      "config");
}

json eval_report_to_json(const EvalReport& r, const EvalConfig& config) {
  json methods = json::array();
  for (const auto& m : r.methods)
    methods.push_back({{"method", m.method},
                       {"rauc", m.rauc},
                       {"mean", m.mean},
                       {"ci", {m.ci_low, m.ci_high}},
                       {"ci_level", config.confidence}});
  return {{"methods", methods},
          {"baseline",
           {{"cost_one", r.baseline.cost_one},
            {"quality_one", r.baseline.quality_one},
            {"quality_all", r.baseline.quality_all}}},
          {"trials", r.trials},
          {"seed", config.seed},
          {"test_fraction", config.test_fraction},
          {"decision_points", config.decision_points},
          {"excluded", r.excluded}};
}

json parse_json(std::istream& in, const std::string& what) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(what + ": " + e.what());
  }
}

}  // namespace oak
