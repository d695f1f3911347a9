#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "conceptx/error.hpp"
#include "conceptx/numeric.hpp"

namespace conceptx {

/// One example: the predictor output h(x), the concept values c(x) in schema
/// order, the probability mass p(x) and an optional ground-truth label y.
struct LabeledExample {
  std::string id;
  int prediction = 1;
  std::vector<double> concepts;
  double weight = 0.0;
  std::optional<int> ground_truth;
};

inline bool is_sign(int v) noexcept { return v == 1 || v == -1; }

enum class WeightHandling {
  renormalize,  // divide by the total
  require_unit  // total must already be 1 within kWeightTolerance; weights kept
};

/// Immutable collection of examples over a fixed concept schema. Weights sum to
/// one within kWeightTolerance.
class ConceptDataset {
 public:
  static constexpr double kWeightTolerance = 1e-9;

  static ConceptDataset from_examples(std::vector<std::string> concept_names,
                                      std::vector<LabeledExample> examples,
                                      WeightHandling handling = WeightHandling::renormalize) {
    ConceptDataset d;
    d.concept_names_ = std::move(concept_names);
    for (std::size_t i = 0; i < d.concept_names_.size(); ++i) {
      if (!d.index_.emplace(d.concept_names_[i], i).second) {
        throw SchemaError("duplicate concept name '" + d.concept_names_[i] + "'");
      }
    }
    if (examples.empty()) throw ValidationError("dataset has no examples");

    std::unordered_set<std::string> ids;
    CompensatedSum total;
    for (const auto& ex : examples) {
      validate_example(ex, d.concept_names_.size());
      if (!ids.insert(ex.id).second) {
        throw ValidationError("duplicate example id '" + ex.id + "'");
      }
      total.add(ex.weight);
    }
    const double t = total.value();
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw ValidationError("total example weight must be positive and finite");
    }
    if (handling == WeightHandling::renormalize) {
      for (auto& ex : examples) ex.weight /= t;
    } else if (std::fabs(t - 1.0) > kWeightTolerance) {
      throw ValidationError("weights sum to " + format_double(t) + ", expected 1");
    }
    d.original_weight_total_ = t;
    d.examples_ = std::move(examples);
    d.all_have_ground_truth_ =
        std::all_of(d.examples_.begin(), d.examples_.end(),
                    [](const LabeledExample& e) { return e.ground_truth.has_value(); });
    d.any_has_ground_truth_ =
        std::any_of(d.examples_.begin(), d.examples_.end(),
                    [](const LabeledExample& e) { return e.ground_truth.has_value(); });
    return d;
  }

  const std::vector<LabeledExample>& examples() const noexcept { return examples_; }
  const std::vector<std::string>& concept_names() const noexcept { return concept_names_; }
  std::size_t size() const noexcept { return examples_.size(); }

  /// Weight total seen before normalization (1 if the input was normalized).
  double original_weight_total() const noexcept { return original_weight_total_; }

  bool has_concept(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
  }

  std::size_t concept_index(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) {
      throw SchemaError("unknown concept '" + std::string(name) + "'");
    }
    return it->second;
  }

  bool all_have_ground_truth() const noexcept { return all_have_ground_truth_; }
  bool any_has_ground_truth() const noexcept { return any_has_ground_truth_; }

 private:
  ConceptDataset() = default;

  static void validate_example(const LabeledExample& ex, std::size_t n_concepts) {
    const auto where = [&] { return "example '" + ex.id + "': "; };
    if (!is_sign(ex.prediction)) {
      throw ValidationError(where() + "prediction must be -1 or +1");
    }
    if (ex.ground_truth && !is_sign(*ex.ground_truth)) {
      throw ValidationError(where() + "ground_truth must be -1 or +1");
    }
    if (ex.concepts.size() != n_concepts) {
      throw SchemaError(where() + "expected " + std::to_string(n_concepts) +
                        " concept values, got " + std::to_string(ex.concepts.size()));
    }
    for (double c : ex.concepts) {
      if (!(c >= -1.0 && c <= 1.0)) {
        throw ValidationError(where() + "concept value " + format_double(c) +
                              " outside [-1, 1]");
      }
    }
    if (!(ex.weight >= 0.0) || !std::isfinite(ex.weight)) {
      throw ValidationError(where() + "weight must be finite and non-negative");
    }
  }

  std::vector<std::string> concept_names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<LabeledExample> examples_;
  double original_weight_total_ = 1.0;
  bool all_have_ground_truth_ = false;
  bool any_has_ground_truth_ = false;
};

enum class SchemaMode {
  strict,  // concept keys must equal the caller-supplied schema
  infer    // schema taken from the first record, in file order
};

struct LoadOptions {
  SchemaMode schema_mode = SchemaMode::infer;
  std::vector<std::string> schema;  // used when schema_mode == strict
};

namespace detail {

inline int parse_sign(const nlohmann::ordered_json& v, std::size_t line, const char* field) {
  if (!v.is_number()) {
    throw ValidationError("line " + std::to_string(line) + ": " + field +
                          " must be a number");
  }
  const double x = v.get<double>();
  if (x == 1.0) return 1;
  if (x == -1.0) return -1;
  throw ValidationError("line " + std::to_string(line) + ": " + field + " must be -1 or +1, got " +
                        v.dump());
}

}  // namespace detail

/// Reads one example per line. Blank lines are skipped. Missing weights
/// default to uniform; weights are then renormalized to sum to one.
inline ConceptDataset load_dataset(std::istream& in, const LoadOptions& options = {}) {
  using json = nlohmann::ordered_json;
  std::vector<std::string> schema;
  std::unordered_map<std::string, std::size_t> schema_index;
  bool have_schema = false;
  if (options.schema_mode == SchemaMode::strict) {
    schema = options.schema;
    have_schema = true;
  }
  const auto build_index = [&] {
    schema_index.clear();
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (!schema_index.emplace(schema[i], i).second) {
        throw SchemaError("duplicate concept name '" + schema[i] + "' in schema");
      }
    }
  };
  if (have_schema) build_index();

  std::vector<LabeledExample> examples;
  std::unordered_set<std::string> ids;
  std::size_t n_weighted = 0;
  std::size_t n_unweighted = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
      throw ParseError(line_no, "byte-order mark not allowed");
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    const auto fail = [&](const std::string& what) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + what);
    };
    if (!obj.is_object()) fail("record must be a JSON object");

    LabeledExample ex;
    const auto id_it = obj.find("id");
    if (id_it == obj.end() || !id_it->is_string()) fail("missing string field 'id'");
    ex.id = id_it->get<std::string>();
    if (!ids.insert(ex.id).second) fail("duplicate id '" + ex.id + "'");

    const auto pred_it = obj.find("prediction");
    if (pred_it == obj.end()) fail("missing field 'prediction'");
    ex.prediction = detail::parse_sign(*pred_it, line_no, "prediction");

    const auto gt_it = obj.find("ground_truth");
    if (gt_it != obj.end() && !gt_it->is_null()) {
      ex.ground_truth = detail::parse_sign(*gt_it, line_no, "ground_truth");
    }

    const auto w_it = obj.find("weight");
    if (w_it != obj.end() && !w_it->is_null()) {
      if (!w_it->is_number()) fail("weight must be a number");
      ex.weight = w_it->get<double>();
      if (!(ex.weight >= 0.0) || !std::isfinite(ex.weight)) {
        fail("weight must be finite and non-negative");
      }
      ++n_weighted;
    } else {
      ++n_unweighted;
    }

    const auto c_it = obj.find("concepts");
    if (c_it == obj.end() || !c_it->is_object()) fail("missing object field 'concepts'");
    if (!have_schema) {
      for (const auto& [name, _] : c_it->items()) schema.push_back(name);
      build_index();
      have_schema = true;
    }
    if (c_it->size() != schema.size()) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(schema.size()) + " concepts, got " +
                        std::to_string(c_it->size()));
    }
    ex.concepts.assign(schema.size(), 0.0);
    for (const auto& [name, value] : c_it->items()) {
      const auto s = schema_index.find(name);
      if (s == schema_index.end()) {
        throw SchemaError("line " + std::to_string(line_no) + ": concept '" + name +
                          "' not in schema");
      }
      if (!value.is_number()) fail("concept '" + name + "' must be a number");
      const double c = value.get<double>();
      if (!(c >= -1.0 && c <= 1.0)) {
        fail("concept '" + name + "' value " + value.dump() + " outside [-1, 1]");
      }
      ex.concepts[s->second] = c;
    }
    examples.push_back(std::move(ex));
  }

  if (examples.empty()) throw ValidationError("dataset has no examples");
  if (n_weighted > 0 && n_unweighted > 0) {
    throw ValidationError("either every record or no record may carry a weight");
  }
  if (n_unweighted > 0) {
    const double uniform = 1.0 / static_cast<double>(examples.size());
    for (auto& ex : examples) ex.weight = uniform;
  }
  return ConceptDataset::from_examples(std::move(schema), std::move(examples));
}

/// Writes the dataset in the JSONL exchange format, concepts in schema order.
inline void write_jsonl(const ConceptDataset& d, std::ostream& out) {
  const auto& names = d.concept_names();
  for (const auto& ex : d.examples()) {
    out << "{\"id\": " << nlohmann::json(ex.id).dump()
        << ", \"prediction\": " << ex.prediction << ", \"concepts\": {";
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j > 0) out << ", ";
      out << nlohmann::json(names[j]).dump() << ": " << format_double(ex.concepts[j]);
    }
    out << "}, \"weight\": " << format_double(ex.weight);
    if (ex.ground_truth) out << ", \"ground_truth\": " << *ex.ground_truth;
    out << "}\n";
  }
}

}  // namespace conceptx
