#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oak/dataset.hpp"
#include "oak/eval.hpp"
#include "oak/item.hpp"
#include "oak/model.hpp"
#include "oak/synth.hpp"

namespace oak {

using json = nlohmann::json;

/// {"kind": tag, "v": ...}; box sets also carry "grid": [W, H].
json label_to_json(const Label& label);
/// Throws FormatError on a malformed object or a kind other than `expected`.
Label label_from_json(const json& j, std::optional<LabelKind> expected = std::nullopt);

using AuditorLabels = std::vector<std::pair<std::string, Label>>;

/// Reads annotation records {"item","worker","arrival","label"} and inline
/// auditor records {"item","z"}, one JSON object per line, plus any extra
/// auditor records. Blank lines are skipped. The first label fixes the kind.
/// Throws FormatError (with the line number) or ValidationError.
Dataset read_dataset(std::istream& in, AuditorLabels extra_auditor = {});

/// {"item","z"} records.
AuditorLabels read_truth(std::istream& in);

void write_annotations(std::ostream& out, const Dataset& ds);
void write_truth(std::ostream& out, const AuditorLabels& truth);

json model_to_json(const Model& model);
/// Throws FormatError on an unknown version or a malformed document.
Model model_from_json(const json& j);

json prediction_to_json(const PredictedItem& p);

/// Strict generator config parser; unknown keys are rejected.
GeneratorConfig generator_config_from_json(const json& j);

json eval_report_to_json(const EvalReport& report, const EvalConfig& config);

/// Parses a JSON document, converting parse errors to FormatError.
json parse_json(std::istream& in, const std::string& what);

}  // namespace oak
