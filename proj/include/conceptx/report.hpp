#pragma once

// Per-concept measure tables across several labelled datasets, rendered as
// CSV, JSON or a grouped SVG bar chart (one bar per dataset label per concept).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "conceptx/dataset.hpp"
#include "conceptx/error.hpp"
#include "conceptx/measures.hpp"
#include "conceptx/numeric.hpp"
#include "conceptx/parallel.hpp"

namespace conceptx::report {

enum class OutputFormat { csv, json, svg };

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "svg") return OutputFormat::svg;
  throw DomainError("unknown output format '" + std::string(s) + "'");
}

inline constexpr std::string_view kGroundTruthLabel = "ground_truth";

struct ReportSpec {
  std::vector<std::pair<std::string, std::string>> datasets;  // (label, path)
  MeasureKind measure = MeasureKind::symmetric;
  std::optional<double> theta;
  bool include_ground_truth = false;
  OutputFormat output = OutputFormat::csv;
  std::optional<double> delta = 0.05;  // confidence level for ci_radius
  bool figure_filter = false;          // drop concepts whose bars are all zero or n/a
};

inline void validate(const ReportSpec& spec) {
  if (spec.datasets.empty()) throw ValidationError("report needs at least one dataset");
  if ((spec.measure == MeasureKind::concept_conditioned) != spec.theta.has_value()) {
    throw ValidationError(spec.theta ? "theta is only used by the concept-conditioned measure"
                                     : "the concept-conditioned measure requires --theta");
  }
}

struct Cell {
  std::optional<double> value;  // nullopt = undefined measure
  std::optional<double> ci_radius;
  std::string undefined_reason;
};

struct Series {
  std::string label;
  std::vector<Cell> cells;  // aligned with MeasureTable::concepts
};

struct MeasureTable {
  MeasureKind kind = MeasureKind::symmetric;
  std::optional<double> theta;
  std::vector<std::string> concepts;
  std::vector<Series> series;

  bool any_undefined() const {
    for (const auto& s : series) {
      for (const auto& c : s.cells) {
        if (!c.value) return true;
      }
    }
    return false;
  }
};

/// Throws SchemaError listing the concepts missing from / extra in `other`.
inline void require_same_schema(const ConceptDataset& first, const std::string& first_label,
                                const ConceptDataset& other, const std::string& other_label) {
  const std::set<std::string> a(first.concept_names().begin(), first.concept_names().end());
  const std::set<std::string> b(other.concept_names().begin(), other.concept_names().end());
  if (a == b) return;
  std::ostringstream msg;
  msg << "concept schema of '" << other_label << "' differs from '" << first_label << "':";
  for (const auto& n : a) {
    if (!b.count(n)) msg << " -" << n;
  }
  for (const auto& n : b) {
    if (!a.count(n)) msg << " +" << n;
  }
  throw SchemaError(msg.str());
}

/// `datasets` are (label, dataset) pairs. Concept order follows the first
/// dataset. Cells are computed in parallel but placed by index.
inline MeasureTable build_measure_table(
    const std::vector<std::pair<std::string, const ConceptDataset*>>& datasets, MeasureKind kind,
    std::optional<double> theta, bool include_ground_truth, std::optional<double> delta,
    unsigned threads = 1) {
  if (datasets.empty()) throw ValidationError("no datasets");
  const auto& first = *datasets.front().second;
  for (std::size_t i = 1; i < datasets.size(); ++i) {
    require_same_schema(first, datasets.front().first, *datasets[i].second, datasets[i].first);
  }
  MeasureTable t;
  t.kind = kind;
  t.theta = theta;
  t.concepts = first.concept_names();

  struct Job {
    const ConceptDataset* data;
    LabelSource source;
  };
  std::vector<Job> jobs;
  for (const auto& [label, d] : datasets) {
    t.series.push_back({label, {}});
    jobs.push_back({d, LabelSource::prediction});
  }
  if (include_ground_truth) {
    for (const auto& [label, d] : datasets) {
      if (d->any_has_ground_truth() && !d->all_have_ground_truth()) {
        throw ValidationError("dataset '" + label + "' has ground_truth on only some examples");
      }
    }
    const auto it = std::find_if(datasets.begin(), datasets.end(),
                                 [](const auto& p) { return p.second->all_have_ground_truth(); });
    if (it != datasets.end()) {
      t.series.push_back({std::string(kGroundTruthLabel), {}});
      jobs.push_back({it->second, LabelSource::ground_truth});
    }
  }

  const std::size_t nc = t.concepts.size();
  for (auto& s : t.series) s.cells.resize(nc);
  parallel_for(jobs.size() * nc, threads, [&](std::size_t k) {
    const std::size_t si = k / nc;
    const std::size_t ci = k % nc;
    Cell& cell = t.series[si].cells[ci];
    try {
      auto r = compute_measure(*jobs[si].data, kind, t.concepts[ci], theta, jobs[si].source);
      if (delta) r = with_confidence(r, *delta);
      cell.value = r.value;
      cell.ci_radius = r.confidence_radius;
    } catch (const UndefinedMeasureError& e) {
      cell.undefined_reason = e.what();
    }
  });
  return t;
}

/// Drops concepts whose every bar is zero or undefined.
inline MeasureTable filter_for_figure(const MeasureTable& t) {
  MeasureTable out = t;
  out.concepts.clear();
  for (auto& s : out.series) s.cells.clear();
  for (std::size_t c = 0; c < t.concepts.size(); ++c) {
    const bool keep = std::any_of(t.series.begin(), t.series.end(), [&](const Series& s) {
      return s.cells[c].value && *s.cells[c].value != 0.0;
    });
    if (!keep) continue;
    out.concepts.push_back(t.concepts[c]);
    for (std::size_t s = 0; s < t.series.size(); ++s) out.series[s].cells.push_back(t.series[s].cells[c]);
  }
  return out;
}

inline std::string cell_text(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("n/a");
}

/// Quotes a CSV field when it contains a separator, quote or newline.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline void render_csv(const MeasureTable& t, std::ostream& out) {
  out << "concept,label,value,ci_radius\n";
  for (std::size_t c = 0; c < t.concepts.size(); ++c) {
    for (const auto& s : t.series) {
      out << csv_field(t.concepts[c]) << ',' << csv_field(s.label) << ','
          << cell_text(s.cells[c].value) << ',' << cell_text(s.cells[c].ci_radius) << '\n';
    }
  }
}

inline nlohmann::ordered_json to_json(const MeasureTable& t) {
  nlohmann::ordered_json j;
  j["measure"] = std::string(to_string(t.kind));
  j["theta"] = t.theta ? nlohmann::ordered_json(*t.theta) : nlohmann::ordered_json(nullptr);
  j["concepts"] = t.concepts;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < t.concepts.size(); ++c) {
    for (const auto& s : t.series) {
      nlohmann::ordered_json r;
      r["concept"] = t.concepts[c];
      r["label"] = s.label;
      r["value"] = s.cells[c].value ? nlohmann::ordered_json(*s.cells[c].value)
                                    : nlohmann::ordered_json("n/a");
      r["ci_radius"] = s.cells[c].ci_radius ? nlohmann::ordered_json(*s.cells[c].ci_radius)
                                            : nlohmann::ordered_json("n/a");
      rows.push_back(std::move(r));
    }
  }
  j["rows"] = std::move(rows);
  return j;
}

inline void render_json(const MeasureTable& t, std::ostream& out) {
  out << to_json(t).dump(2) << '\n';
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

struct ChartSeries {
  std::string label;
  std::vector<std::optional<double>> values;  // aligned with categories
};

/// Grouped vertical bar chart, categories on the x axis. Self-contained SVG;
/// element order follows categories then series.
inline void render_bar_chart_svg(std::string_view title, const std::vector<std::string>& categories,
                                 const std::vector<ChartSeries>& series, double y_min, double y_max,
                                 std::ostream& out) {
  static constexpr std::array<std::string_view, 8> kPalette{
      "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c"};
  const double left = 60, right = 20, top = 40, bottom = 110;
  const double group_w = std::max<double>(40.0, 18.0 * static_cast<double>(series.size()) + 16.0);
  const double plot_w = group_w * static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  const double plot_h = 260;
  const double width = left + plot_w + right + 140;
  const double height = top + plot_h + bottom;
  const auto y_of = [&](double v) {
    v = std::clamp(v, y_min, y_max);
    return top + plot_h * (y_max - v) / (y_max - y_min);
  };
  const auto f = [](double x) { return format_fixed(x, 2); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f(width) << "\" height=\""
      << f(height) << "\" viewBox=\"0 0 " << f(width) << ' ' << f(height) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << f(width) << "\" height=\"" << f(height)
      << "\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << f(left) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
      << xml_escape(title) << "</text>\n";

  for (int k = 0; k <= 4; ++k) {
    const double v = y_min + (y_max - y_min) * k / 4.0;
    const double y = y_of(v);
    out << "<line x1=\"" << f(left) << "\" y1=\"" << f(y) << "\" x2=\"" << f(left + plot_w)
        << "\" y2=\"" << f(y) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << f(left - 6) << "\" y=\"" << f(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << format_fixed(v, 2)
        << "</text>\n";
  }
  const double baseline = y_of(std::clamp(0.0, y_min, y_max));
  out << "<line x1=\"" << f(left) << "\" y1=\"" << f(baseline) << "\" x2=\"" << f(left + plot_w)
      << "\" y2=\"" << f(baseline) << "\" stroke=\"#000000\"/>\n";

  const double bar_w = (group_w - 16.0) / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = left + group_w * static_cast<double>(c) + 8.0;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const auto& v = series[s].values[c];
      const double x = gx + bar_w * static_cast<double>(s);
      const std::string color(kPalette[s % kPalette.size()]);
      if (!v) {
        out << "<text x=\"" << f(x + bar_w / 2) << "\" y=\"" << f(baseline - 3)
            << "\" font-family=\"sans-serif\" font-size=\"8\" text-anchor=\"middle\">n/a</text>\n";
        continue;
      }
      const double y = y_of(*v);
      const double y0 = std::min(y, baseline);
      const double h = std::max(std::fabs(baseline - y), 0.0);
      out << "<rect x=\"" << f(x) << "\" y=\"" << f(y0) << "\" width=\"" << f(bar_w)
          << "\" height=\"" << f(h) << "\" fill=\"" << color << "\"><title>"
          << xml_escape(categories[c]) << " / " << xml_escape(series[s].label) << ": "
          << format_double(*v) << "</title></rect>\n";
    }
    const double cx = left + group_w * (static_cast<double>(c) + 0.5);
    const double ly = top + plot_h + 12;
    out << "<text x=\"" << f(cx) << "\" y=\"" << f(ly)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-45 "
        << f(cx) << ' ' << f(ly) << ")\">" << xml_escape(categories[c]) << "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const double lx = left + plot_w + 20;
    const double ly = top + 16.0 * static_cast<double>(s);
    out << "<rect x=\"" << f(lx) << "\" y=\"" << f(ly) << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[s % kPalette.size()] << "\"/>\n";
    out << "<text x=\"" << f(lx + 14) << "\" y=\"" << f(ly + 9)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << xml_escape(series[s].label)
        << "</text>\n";
  }
  out << "</svg>\n";
}

inline void render_svg(const MeasureTable& t, std::ostream& out) {
  std::vector<ChartSeries> series;
  for (const auto& s : t.series) {
    ChartSeries cs{s.label, {}};
    for (const auto& c : s.cells) cs.values.push_back(c.value);
    series.push_back(std::move(cs));
  }
  std::string title(to_string(t.kind));
  if (t.theta) title += " (theta = " + format_double(*t.theta) + ")";
  render_bar_chart_svg(title, t.concepts, series, -1.0, 1.0, out);
}

inline void render(const MeasureTable& t, OutputFormat fmt, std::ostream& out) {
  switch (fmt) {
    case OutputFormat::csv:
      render_csv(t, out);
      break;
    case OutputFormat::json:
      render_json(t, out);
      break;
    case OutputFormat::svg:
      render_svg(t, out);
      break;
  }
}

}  // namespace conceptx::report
