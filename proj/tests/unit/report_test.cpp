#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "conceptx/error.hpp"
#include "conceptx/report.hpp"
#include "conceptx/synthetic.hpp"

using namespace conceptx;
using namespace conceptx::report;

namespace {

ConceptDataset planted(std::uint64_t seed, std::optional<double> flip = std::nullopt) {
  return synth::generate_dataset(
      {40, 3, synth::ConceptKind::binary, seed, {{"a", 0.5}, {"b", -0.2}}, flip});
}

std::string csv(const MeasureTable& t) {
  std::ostringstream out;
  render_csv(t, out);
  return out.str();
}

}  // namespace

TEST(ReportSpecValidation, ThetaIffConceptConditioned) {
  ReportSpec s;
  s.datasets = {{"A", "a.jsonl"}};
  EXPECT_NO_THROW(validate(s));
  s.theta = 0.5;
  EXPECT_THROW(validate(s), ValidationError);
  s.measure = MeasureKind::concept_conditioned;
  EXPECT_NO_THROW(validate(s));
  s.theta.reset();
  EXPECT_THROW(validate(s), ValidationError);
  s.datasets.clear();
  EXPECT_THROW(validate(s), ValidationError);
  EXPECT_THROW(parse_output_format("pdf"), DomainError);
}

TEST(MeasureTable, CsvHeaderAndRows) {
  const auto d = planted(1);
  const auto t = build_measure_table({{"LR", &d}}, MeasureKind::symmetric, std::nullopt, false, 0.05);
  const auto text = csv(t);
  EXPECT_EQ(text.substr(0, text.find('\n')), "concept,label,value,ci_radius");
  EXPECT_NE(text.find("\na,LR,0.5,"), std::string::npos) << text;
  // header + one row per concept per series
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 3);
}

TEST(MeasureTable, IdenticalDatasetsGiveIdenticalBars) {
  const auto d1 = planted(2);
  const auto d2 = planted(2);
  const auto t = build_measure_table({{"A", &d1}, {"B", &d2}}, MeasureKind::class_conditioned,
                                     std::nullopt, false, 0.05);
  for (std::size_t c = 0; c < t.concepts.size(); ++c) {
    EXPECT_EQ(t.series[0].cells[c].value, t.series[1].cells[c].value);
    EXPECT_EQ(t.series[0].cells[c].ci_radius, t.series[1].cells[c].ci_radius);
  }
}

TEST(MeasureTable, GroundTruthEqualsModelWhenLabelsMatch) {
  const auto d = planted(3, 0.0);  // ground_truth == prediction
  for (auto kind : {MeasureKind::symmetric, MeasureKind::class_conditioned, MeasureKind::concept_conditioned}) {
    const std::optional<double> theta =
        kind == MeasureKind::concept_conditioned ? std::optional<double>(1.0) : std::nullopt;
    const auto t = build_measure_table({{"M", &d}}, kind, theta, true, 0.05);
    ASSERT_EQ(t.series.size(), 2u);
    EXPECT_EQ(t.series[1].label, "ground_truth");
    for (std::size_t c = 0; c < t.concepts.size(); ++c) {
      EXPECT_EQ(t.series[0].cells[c].value, t.series[1].cells[c].value);
    }
  }
}

TEST(MeasureTable, GroundTruthSeriesOmittedWithoutLabels) {
  const auto d = planted(4);
  const auto t = build_measure_table({{"M", &d}}, MeasureKind::symmetric, std::nullopt, true, 0.05);
  EXPECT_EQ(t.series.size(), 1u);
}

TEST(MeasureTable, SchemaMismatchListsTheDiff) {
  const auto d1 = planted(5);
  const auto d2 = synth::generate_dataset({10, 2, synth::ConceptKind::binary, 5, {{"a", 0.0}, {"z", 0.0}}, {}});
  try {
    build_measure_table({{"A", &d1}, {"B", &d2}}, MeasureKind::symmetric, std::nullopt, false, 0.05);
    FAIL();
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("-b"), std::string::npos) << msg;
    EXPECT_NE(msg.find("+z"), std::string::npos) << msg;
  }
}

TEST(MeasureTable, UndefinedCellsRenderAsNa) {
  std::vector<LabeledExample> ex{{"p", -1, {1.0, 0.5}, 1.0, std::nullopt},
                                 {"q", -1, {-1.0, 0.0}, 1.0, std::nullopt}};
  const auto d = ConceptDataset::from_examples({"u", "v"}, ex);
  const auto t = build_measure_table({{"M", &d}}, MeasureKind::class_conditioned, std::nullopt, false, 0.05);
  EXPECT_TRUE(t.any_undefined());
  const auto text = csv(t);
  EXPECT_NE(text.find("u,M,n/a,n/a"), std::string::npos) << text;
  std::ostringstream js;
  render_json(t, js);
  EXPECT_NE(js.str().find("null"), std::string::npos);
}

TEST(FigureFilter, DropsAllZeroAndUndefinedConcepts) {
  std::vector<LabeledExample> ex{{"p", 1, {1.0, 0.0}, 1.0, std::nullopt},
                                 {"q", -1, {-1.0, 0.0}, 1.0, std::nullopt}};
  const auto d = ConceptDataset::from_examples({"keep", "zero"}, ex);
  const auto t = build_measure_table({{"M", &d}}, MeasureKind::symmetric, std::nullopt, false, 0.05);
  const auto f = filter_for_figure(t);
  EXPECT_EQ(f.concepts, std::vector<std::string>{"keep"});
  EXPECT_EQ(f.series[0].cells.size(), 1u);
  EXPECT_EQ(t.concepts.size(), 2u);
}

TEST(ThreadCount, DoesNotChangeOutput) {
  const auto d1 = planted(6, 0.1);
  const auto d2 = planted(7, 0.1);
  const auto t1 = build_measure_table({{"A", &d1}, {"B", &d2}}, MeasureKind::concept_conditioned, 0.0, true, 0.05, 1);
  const auto t8 = build_measure_table({{"A", &d1}, {"B", &d2}}, MeasureKind::concept_conditioned, 0.0, true, 0.05, 8);
  EXPECT_EQ(csv(t1), csv(t8));
}

TEST(Svg, SelfContainedAndEscaped) {
  std::vector<LabeledExample> ex{{"p", 1, {1.0}, 1.0, std::nullopt}, {"q", -1, {-1.0}, 1.0, std::nullopt}};
  const auto d = ConceptDataset::from_examples({"a<b&c"}, ex);
  const auto t = build_measure_table({{"M\"1", &d}}, MeasureKind::symmetric, std::nullopt, false, 0.05);
  std::ostringstream out;
  render_svg(t, out);
  const auto svg = out.str();
  EXPECT_EQ(svg.rfind("<svg", 0), 0u) << svg.substr(0, 80);
  EXPECT_NE(svg.find("a&lt;b&amp;c"), std::string::npos);
  EXPECT_EQ(svg.find("href"), std::string::npos);
  EXPECT_EQ(svg.find("<script"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(xml_escape("'\"<>&"), "&apos;&quot;&lt;&gt;&amp;");
}

TEST(Csv, QuotesFieldsWithSeparators) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}
