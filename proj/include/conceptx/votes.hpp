#pragma once

// Concept labels from captioner yes/no votes: a concept is labeled present
// when at least k of the votes say "yes". Accuracy and recall at k are then
// measured against the human label.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "conceptx/error.hpp"

namespace conceptx {

enum class Presence { absent, present };

inline std::string_view to_string(Presence p) noexcept {
  return p == Presence::present ? "present" : "absent";
}

struct VoteRecord {
  std::string example_id;
  std::string concept_name;
  std::int64_t yes_count = 0;
  std::int64_t total_votes = 11;
  Presence true_label = Presence::absent;
};

inline void validate_record(const VoteRecord& r) {
  if (r.total_votes <= 0) throw ValidationError("total_votes must be positive");
  if (r.yes_count < 0 || r.yes_count > r.total_votes) {
    throw ValidationError("yes_count must lie in [0, total_votes]");
  }
}

/// present iff yes_count >= k
inline Presence label_at_k(const VoteRecord& r, std::int64_t k) {
  validate_record(r);
  if (k < 0 || k > r.total_votes) {
    throw DomainError("k = " + std::to_string(k) + " outside [0, " +
                      std::to_string(r.total_votes) + "]");
  }
  return r.yes_count >= k ? Presence::present : Presence::absent;
}

struct VoteMetrics {
  std::int64_t k = 0;
  double accuracy = 0.0;
  double recall = 0.0;
};

inline VoteMetrics metrics_at_k(const std::vector<VoteRecord>& records, std::int64_t k) {
  if (records.empty()) throw ValidationError("metrics_at_k: no vote records");
  std::size_t correct = 0;
  std::size_t positives = 0;
  std::size_t hits = 0;
  for (const auto& r : records) {
    const Presence p = label_at_k(r, k);
    if (p == r.true_label) ++correct;
    if (r.true_label == Presence::present) {
      ++positives;
      if (p == Presence::present) ++hits;
    }
  }
  if (positives == 0) {
    throw UndefinedMeasureError("recall undefined: no record is truly present");
  }
  return {k, static_cast<double>(correct) / static_cast<double>(records.size()),
          static_cast<double>(hits) / static_cast<double>(positives)};
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::int64_t parse_count(const std::string& s, std::size_t line, const char* field) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ParseError(line, std::string(field) + " is not an integer: '" + s + "'");
  }
  if (used != s.size()) throw ParseError(line, std::string(field) + " is not an integer: '" + s + "'");
  return v;
}

}  // namespace detail

/// CSV with header example_id,concept,yes_count,total_votes,true_label where
/// true_label is "present" or "absent". Fields are not quoted.
inline std::vector<VoteRecord> load_votes_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<VoteRecord> out;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    for (auto& f : fields) f = detail::trim(f);
    if (!header) {
      const std::vector<std::string> expected{"example_id", "concept", "yes_count", "total_votes",
                                              "true_label"};
      if (fields != expected) {
        throw ParseError(line_no,
                         "expected header example_id,concept,yes_count,total_votes,true_label");
      }
      header = true;
      continue;
    }
    if (fields.size() != 5) {
      throw ParseError(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
    }
    VoteRecord r;
    r.example_id = fields[0];
    r.concept_name = fields[1];
    r.yes_count = detail::parse_count(fields[2], line_no, "yes_count");
    r.total_votes = detail::parse_count(fields[3], line_no, "total_votes");
    if (fields[4] == "present") {
      r.true_label = Presence::present;
    } else if (fields[4] == "absent") {
      r.true_label = Presence::absent;
    } else {
      throw ParseError(line_no, "true_label must be 'present' or 'absent'");
    }
    try {
      validate_record(r);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  if (!header) throw ParseError(0, "empty votes file");
  return out;
}

}  // namespace conceptx
