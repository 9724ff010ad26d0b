// oak: generate synthetic crowd data, train accuracy estimators, score
// incoming labels and run cost/quality evaluations.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oak/error.hpp"
#include "oak/eval.hpp"
#include "oak/io.hpp"
#include "oak/multipoint.hpp"
#include "oak/synth.hpp"
#include "oak/train.hpp"

namespace {

constexpr int kUsageError = 2;

/// Bad invocation or malformed input; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_thresholds(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split_list(s)) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != t.size() || !(v >= 0.0 && v <= 1.0))
      throw UsageError("thresholds must be numbers in [0, 1], got '" + t + "'");
    out.push_back(v);
  }
  return out;
}

oak::Dataset load_dataset(const std::string& path, const std::string& auditor_path) {
  oak::AuditorLabels extra;
  if (!auditor_path.empty()) {
    auto in = open_in(auditor_path);
    extra = oak::read_truth(in);
  }
  auto in = open_in(path);
  return oak::read_dataset(in, std::move(extra));
}

oak::Estimator parse_estimator(const std::string& name) {
  auto e = oak::estimator_from_name(name);
  if (!e) throw UsageError("unknown estimator '" + name + "' (valid: oak, poak, poaki, poak-irt)");
  return *e;
}

oak::AggMode parse_aggregator(const std::string& name) {
  auto a = oak::agg_mode_from_name(name);
  if (!a) throw UsageError("unknown aggregator '" + name + "' (valid: weight, uniform, sad, bau)");
  return *a;
}

struct GenArgs {
  std::string config;
  std::string out;
};

void run_gen(const GenArgs& args) {
  auto in = open_in(args.config);
  const auto cfg = oak::generator_config_from_json(oak::parse_json(in, "config"));
  const auto data = oak::generate(cfg);
  {
    auto out = open_out(args.out + ".dataset.jsonl");
    oak::write_annotations(out, data.dataset);
  }
  {
    auto out = open_out(args.out + ".truth.jsonl");
    oak::write_truth(out, data.truth);
  }
  if (data.dataset.num_audited() > 0) {
    oak::AuditorLabels audited;
    for (std::size_t j = 0; j < data.dataset.num_items(); ++j)
      if (const auto& z = data.dataset.auditor(j)) audited.emplace_back(data.dataset.item_id(j), *z);
    auto out = open_out(args.out + ".auditor.jsonl");
    oak::write_truth(out, audited);
  }
}

struct TrainArgs {
  std::string data;
  std::string auditor;
  std::string estimator = "poak";
  std::string aggregator = "weight";
  std::string partitioner = "default";
  double gamma = 10.0;
  double alpha_semi = 1.0;
  double lambda = 1.0;
  double sigma = 1.0;
  int multipoint = 1;
  int irt_rounds = 10;
  std::string out;
};

void run_train(const TrainArgs& args) {
  const auto ds = load_dataset(args.data, args.auditor);
  if (ds.num_workers() == 0) throw UsageError("training data has no annotations");
  oak::TrainConfig tc;
  tc.estimator = parse_estimator(args.estimator);
  tc.aggregator = parse_aggregator(args.aggregator);
  tc.partitioner = args.partitioner;
  tc.gamma = args.gamma;
  tc.alpha_semi = args.alpha_semi;
  tc.lambda = args.lambda;
  tc.multipoint = args.multipoint;
  tc.similarity.kind = ds.kind();
  tc.similarity.sigma = args.sigma;
  tc.irt.max_rounds = args.irt_rounds;
  const auto model = oak::train_model(ds, tc);
  auto out = open_out(args.out);
  out << oak::model_to_json(model).dump(2) << '\n';
}

struct EstimateArgs {
  std::string model;
  std::string labels;
  std::string out;
  std::string estimator;
  std::string aggregator;
  std::string thresholds;
};

void run_estimate(const EstimateArgs& args) {
  auto min = open_in(args.model);
  const auto model = oak::model_from_json(oak::parse_json(min, "model"));
  auto lin = open_in(args.labels);
  const auto ds = oak::read_dataset(lin);

  oak::PipelineOptions opts;
  opts.estimator = args.estimator.empty() ? model.meta.estimator : parse_estimator(args.estimator);
  opts.aggregator = {args.aggregator.empty() ? model.meta.aggregator : parse_aggregator(args.aggregator),
                     model.similarity};
  opts.thresholds = parse_thresholds(args.thresholds);
  if (ds.num_annotations() > 0 && ds.kind() != model.similarity.kind)
    throw oak::FormatError("label kind does not match the model");

  std::ofstream file;
  if (!args.out.empty()) file = open_out(args.out);
  std::ostream& out = args.out.empty() ? std::cout : file;
  std::vector<std::string> workers;
  std::vector<oak::Label> labels;
  for (std::size_t j = 0; j < ds.num_items(); ++j) {
    const auto reports = ds.reports(j);
    if (reports.empty()) continue;
    workers.clear();
    labels.clear();
    for (const auto& r : reports) {
      workers.push_back(ds.worker_id(r.worker));
      labels.push_back(r.label);
    }
    auto pred = oak::run_pipeline({workers, labels}, model, opts);
    pred.item_id = ds.item_id(j);
    out << oak::prediction_to_json(pred).dump() << '\n';
  }
}

struct EvalArgs {
  std::string train;
  std::string auditor;
  std::string truth;
  double test_fraction = 0.3;
  std::string methods;
  int trials = 10;
  std::uint64_t seed = 1;
  std::string out;
  int decision_points = 1;
  std::string partitioner = "default";
  double gamma = 10.0;
  double alpha_semi = 1.0;
  double lambda = 1.0;
  double sigma = 1.0;
  std::size_t grid = 41;
  bool svg = false;
};

void run_eval(const EvalArgs& args) {
  oak::EvalConfig cfg;
  if (!args.methods.empty()) {
    cfg.methods = split_list(args.methods);
    for (const auto& m : cfg.methods) {
      if (!oak::method_from_key(m)) {
        std::string valid;
        for (const auto& k : oak::method_keys()) valid += (valid.empty() ? "" : ", ") + k;
        throw UsageError("unknown method '" + m + "' (valid: " + valid + ")");
      }
    }
  }
  if (!(args.test_fraction > 0.0 && args.test_fraction < 1.0))
    throw UsageError("--test-fraction must lie in (0, 1)");
  if (args.grid < 2) throw UsageError("--grid needs at least 2 points");

  const auto ds = load_dataset(args.train, args.auditor);
  std::optional<oak::TruthMap> truth;
  if (!args.truth.empty()) {
    auto in = open_in(args.truth);
    truth.emplace();
    for (auto& [item, z] : oak::read_truth(in)) truth->insert_or_assign(item, std::move(z));
  }

  cfg.test_fraction = args.test_fraction;
  cfg.trials = args.trials;
  cfg.seed = args.seed;
  cfg.grid = oak::default_grid(args.grid);
  cfg.decision_points = args.decision_points;
  cfg.train.partitioner = args.partitioner;
  cfg.train.gamma = args.gamma;
  cfg.train.alpha_semi = args.alpha_semi;
  cfg.train.lambda = args.lambda;
  cfg.train.similarity.kind = ds.kind();
  cfg.train.similarity.sigma = args.sigma;

  const auto report = oak::run_trials(ds, truth ? &*truth : nullptr, cfg);

  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  {
    auto out = open_out((dir / "curves.csv").string());
    oak::write_curves_csv(out, report);
  }
  {
    auto out = open_out((dir / "rauc.json").string());
    out << oak::eval_report_to_json(report, cfg).dump(2) << '\n';
  }
  if (args.svg) {
    auto out = open_out((dir / "curves.svg").string());
    oak::write_curves_svg(out, report);
  }
  for (const auto& m : report.methods)
    std::cout << m.method << " rauc " << oak::format_double(m.mean) << " ["
              << oak::format_double(m.ci_low) << ", " << oak::format_double(m.ci_high) << "]\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online accuracy estimation for crowdsourced labels"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--config", gen.config, "Generator config (JSON)")->required();
  gen_cmd->add_option("--out", gen.out, "Output prefix")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--data", train.data, "Annotations (JSONL)")->required();
  train_cmd->add_option("--auditor", train.auditor, "Auditor labels (JSONL)");
  train_cmd->add_option("--estimator", train.estimator, "oak | poak | poaki | poak-irt");
  train_cmd->add_option("--aggregator", train.aggregator, "weight | uniform | sad | bau");
  train_cmd->add_option("--partitioner", train.partitioner, "default | single | grid:NX:NY");
  train_cmd->add_option("--gamma", train.gamma, "Smoothing strength")->check(CLI::PositiveNumber);
  train_cmd->add_option("--alpha-semi", train.alpha_semi, "Auditor weight (>= 1)");
  train_cmd->add_option("--lambda", train.lambda, "POAK+IRT blend in [0, 1]");
  train_cmd->add_option("--sigma", train.sigma, "Gaussian similarity width for points");
  train_cmd->add_option("--multipoint", train.multipoint, "Decision points T")->check(CLI::PositiveNumber);
  train_cmd->add_option("--irt-rounds", train.irt_rounds, "IRT alternation rounds");
  train_cmd->add_option("--out", train.out, "Model output (JSON)")->required();

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Score items with a trained model");
  est_cmd->add_option("--model", est.model, "Model (JSON)")->required();
  est_cmd->add_option("--labels", est.labels, "Annotations (JSONL)")->required();
  est_cmd->add_option("--out", est.out, "Predictions (JSONL); stdout when omitted");
  est_cmd->add_option("--estimator", est.estimator, "Override the model's estimator");
  est_cmd->add_option("--aggregator", est.aggregator, "Override the model's aggregator");
  est_cmd->add_option("--thresholds", est.thresholds, "Comma-separated tau_1,...,tau_T");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Cost/quality evaluation");
  eval_cmd->add_option("--train", ev.train, "Annotations (JSONL)")->required();
  eval_cmd->add_option("--auditor", ev.auditor, "Auditor labels (JSONL)");
  eval_cmd->add_option("--truth", ev.truth, "Ground truth for test items (JSONL)");
  eval_cmd->add_option("--test-fraction", ev.test_fraction, "Fraction of items held out");
  eval_cmd->add_option("--methods", ev.methods, "Comma-separated method keys");
  eval_cmd->add_option("--trials", ev.trials, "Seeded re-splits")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", ev.seed, "Base seed");
  eval_cmd->add_option("--out", ev.out, "Output directory")->required();
  eval_cmd->add_option("--decision-points", ev.decision_points, "Decision points T")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--partitioner", ev.partitioner, "default | single | grid:NX:NY");
  eval_cmd->add_option("--gamma", ev.gamma, "Smoothing strength")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--alpha-semi", ev.alpha_semi, "Auditor weight (>= 1)");
  eval_cmd->add_option("--lambda", ev.lambda, "POAK+IRT blend in [0, 1]");
  eval_cmd->add_option("--sigma", ev.sigma, "Gaussian similarity width for points");
  eval_cmd->add_option("--grid", ev.grid, "Threshold grid size");
  eval_cmd->add_flag("--svg", ev.svg, "Also write curves.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen_cmd) run_gen(gen);
    if (*train_cmd) run_train(train);
    if (*est_cmd) run_estimate(est);
    if (*eval_cmd) run_eval(ev);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const oak::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
