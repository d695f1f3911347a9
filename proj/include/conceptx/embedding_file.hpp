#pragma once

// Shared embedding exchange format:
//   {"dim": D, "vectors": [{"id": "...", "values": [f64; D], "label": "..."}, ...]}
// "label" is optional and carries the true class of an image embedding.

#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "conceptx/error.hpp"
#include "conceptx/numeric.hpp"

namespace conceptx {

struct EmbeddingRecord {
  std::string id;
  std::vector<double> values;
  std::optional<std::string> label;
};

struct EmbeddingSet {
  std::size_t dim = 0;
  std::vector<EmbeddingRecord> vectors;

  const EmbeddingRecord& find(const std::string& id) const {
    for (const auto& r : vectors) {
      if (r.id == id) return r;
    }
    throw ValidationError("no embedding with id '" + id + "'");
  }
};

/// Parses the embedding format and rescales every vector to unit norm.
inline EmbeddingSet load_embeddings(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("malformed embedding JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("embedding file must be a JSON object");
  const auto dim_it = doc.find("dim");
  if (dim_it == doc.end() || !dim_it->is_number_integer() || dim_it->get<long long>() <= 0) {
    throw ValidationError("embedding file needs a positive integer 'dim'");
  }
  const auto vec_it = doc.find("vectors");
  if (vec_it == doc.end() || !vec_it->is_array()) {
    throw ValidationError("embedding file needs a 'vectors' array");
  }
  EmbeddingSet set;
  set.dim = dim_it->get<std::size_t>();
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < vec_it->size(); ++i) {
    const auto& item = (*vec_it)[i];
    const std::string where = "vectors[" + std::to_string(i) + "]";
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string()) {
      throw ValidationError(where + ": missing string 'id'");
    }
    EmbeddingRecord rec;
    rec.id = item["id"].get<std::string>();
    if (!ids.insert(rec.id).second) throw ValidationError(where + ": duplicate id '" + rec.id + "'");
    if (!item.contains("values") || !item["values"].is_array()) {
      throw ValidationError(where + ": missing 'values' array");
    }
    for (const auto& x : item["values"]) {
      if (!x.is_number()) throw ValidationError(where + ": non-numeric value");
      rec.values.push_back(x.get<double>());
    }
    if (rec.values.size() != set.dim) {
      throw ValidationError(where + ": expected " + std::to_string(set.dim) + " values, got " +
                            std::to_string(rec.values.size()));
    }
    try {
      rec.values = normalized(rec.values);
    } catch (const ValidationError&) {
      throw ValidationError(where + " ('" + rec.id + "'): zero or non-finite vector");
    }
    if (item.contains("label") && !item["label"].is_null()) {
      if (!item["label"].is_string()) throw ValidationError(where + ": 'label' must be a string");
      rec.label = item["label"].get<std::string>();
    }
    set.vectors.push_back(std::move(rec));
  }
  return set;
}

inline void write_embeddings(const EmbeddingSet& set, std::ostream& out) {
  out << "{\"dim\": " << set.dim << ", \"vectors\": [";
  for (std::size_t i = 0; i < set.vectors.size(); ++i) {
    const auto& r = set.vectors[i];
    out << (i ? ",\n  " : "\n  ") << "{\"id\": " << nlohmann::json(r.id).dump() << ", \"values\": [";
    for (std::size_t k = 0; k < r.values.size(); ++k) {
      if (k) out << ", ";
      out << format_double(r.values[k]);
    }
    out << "]";
    if (r.label) out << ", \"label\": " << nlohmann::json(*r.label).dump();
    out << "}";
  }
  out << "\n]}\n";
}

}  // namespace conceptx
