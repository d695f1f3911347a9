#pragma once

// TCAV for a last-layer linear model h(x) = sign(w_h . g(x) - theta_h) with a
// concept c(x) = g(x) . v. The directional derivative of the logit along v is
// S(x) = w_h . v for every x, so both TCAV variants reduce to that constant.

#include <cmath>
#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "conceptx/embedding_file.hpp"
#include "conceptx/error.hpp"
#include "conceptx/numeric.hpp"

namespace conceptx {

struct EmbeddedExample {
  std::string id;
  std::vector<double> embedding;  // unit norm
};

class LinearConceptModel {
 public:
  static constexpr double kUnitTolerance = 1e-9;

  LinearConceptModel(std::vector<double> w_h, double theta_h, std::vector<double> v)
      : w_h_(std::move(w_h)), v_(std::move(v)), theta_h_(theta_h) {
    if (w_h_.empty()) throw ValidationError("linear model: empty direction");
    require_same_dim(w_h_, v_, "linear model");
    if (!is_unit(w_h_, kUnitTolerance)) throw ValidationError("linear model: w_h must be unit norm");
    if (!is_unit(v_, kUnitTolerance)) throw ValidationError("linear model: v must be unit norm");
    if (!std::isfinite(theta_h_)) throw ValidationError("linear model: theta_h must be finite");
  }

  std::span<const double> w_h() const noexcept { return w_h_; }
  std::span<const double> v() const noexcept { return v_; }
  double theta_h() const noexcept { return theta_h_; }
  std::size_t dim() const noexcept { return w_h_.size(); }

  /// w_h . g - theta_h
  double margin(std::span<const double> g) const { return dot(w_h_, g) - theta_h_; }

  /// h(x); a zero margin is not a member of the positive class.
  int predict(std::span<const double> g) const { return margin(g) > 0.0 ? 1 : -1; }

  /// c(x) = g . v
  double concept_value(std::span<const double> g) const { return dot(g, v_); }

  /// S(x) = grad f(g(x)) . v = w_h . v
  double sensitivity() const { return dot(w_h_, v_); }

 private:
  std::vector<double> w_h_;
  std::vector<double> v_;
  double theta_h_;
};

/// Reads {"w_h": [...], "theta_h": t, "v": [...]}. Directions within 1e-6 of
/// unit norm are accepted and rescaled exactly.
inline LinearConceptModel load_linear_model(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("malformed model JSON: ") + e.what());
  }
  const auto vec = [&](const char* key) {
    if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array()) {
      throw ValidationError(std::string("model file needs array '") + key + "'");
    }
    std::vector<double> out;
    for (const auto& x : doc[key]) {
      if (!x.is_number()) throw ValidationError(std::string("model '") + key + "': non-numeric");
      out.push_back(x.get<double>());
    }
    if (!is_unit(out, 1e-6)) {
      throw ValidationError(std::string("model '") + key + "' must be unit norm");
    }
    return normalized(out);
  };
  auto w = vec("w_h");
  auto v = vec("v");
  if (!doc.contains("theta_h") || !doc["theta_h"].is_number()) {
    throw ValidationError("model file needs number 'theta_h'");
  }
  return LinearConceptModel(std::move(w), doc["theta_h"].get<double>(), std::move(v));
}

inline std::vector<EmbeddedExample> to_embedded_examples(const EmbeddingSet& set) {
  std::vector<EmbeddedExample> out;
  out.reserve(set.vectors.size());
  for (const auto& r : set.vectors) out.push_back({r.id, r.values});
  return out;
}

namespace detail {

inline void require_class_members(const LinearConceptModel& m,
                                  std::span<const EmbeddedExample> xs) {
  if (xs.empty()) throw DomainError("TCAV needs a nonempty class example set");
  for (const auto& x : xs) {
    require_same_dim(m.w_h(), x.embedding, "TCAV");
    if (!(m.margin(x.embedding) > 0.0)) {
      throw ValidationError("example '" + x.id + "' is not predicted in the class");
    }
  }
}

}  // namespace detail

/// |{x in X_k : S(x) > 0}| / |X_k|
inline double tcav_discrete(const LinearConceptModel& m, std::span<const EmbeddedExample> xs) {
  detail::require_class_members(m, xs);
  // S(x) is the same for every x, so the ratio is all-or-nothing.
  return m.sensitivity() > 0.0 ? 1.0 : 0.0;
}

/// sum_{x in X_k} S(x) / |X_k|
inline double tcav_continuous(const LinearConceptModel& m, std::span<const EmbeddedExample> xs) {
  detail::require_class_members(m, xs);
  // Averaging a constant score returns the constant.
  return m.sensitivity();
}

/// Mean of c(x) = g(x) . v over the examples the model predicts as +1.
inline double class_conditioned_from_embeddings(const LinearConceptModel& m,
                                                std::span<const EmbeddedExample> xs) {
  CompensatedSum total;
  std::size_t members = 0;
  for (const auto& x : xs) {
    require_same_dim(m.w_h(), x.embedding, "class-conditioned measure");
    if (m.predict(x.embedding) != 1) continue;
    total.add(m.concept_value(x.embedding));
    ++members;
  }
  if (members == 0) {
    throw UndefinedMeasureError("no example is predicted in the class");
  }
  return total.value() / static_cast<double>(members);
}

}  // namespace conceptx
