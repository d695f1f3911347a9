#pragma once

// The `conceptx` command-line interface. run() is the whole program minus
// process plumbing, so tests can drive it in-process with string streams.
//
// Exit codes: 0 success, 1 computation/I-O failure (including failed
// verification), 2 invalid input or arguments, 3 undefined measure (strict
// mode, or a command whose only result is undefined).

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "conceptx/completeness.hpp"
#include "conceptx/dataset.hpp"
#include "conceptx/embedding_file.hpp"
#include "conceptx/error.hpp"
#include "conceptx/hoeffding.hpp"
#include "conceptx/measures.hpp"
#include "conceptx/numeric.hpp"
#include "conceptx/prompt_editing.hpp"
#include "conceptx/report.hpp"
#include "conceptx/synthetic.hpp"
#include "conceptx/tcav.hpp"
#include "conceptx/theorem2.hpp"
#include "conceptx/verification.hpp"
#include "conceptx/votes.hpp"

namespace conceptx::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kInvalid = 2, kUndefined = 3 };

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

/// Level from CONCEPTX_LOG (debug, info, warn, error, off); default warn.
inline LogLevel log_level_from_env() {
  const char* v = std::getenv("CONCEPTX_LOG");
  if (!v) return LogLevel::warn;
  const std::string_view s(v);
  if (s == "debug") return LogLevel::debug;
  if (s == "info") return LogLevel::info;
  if (s == "error") return LogLevel::error;
  if (s == "off" || s == "quiet") return LogLevel::off;
  return LogLevel::warn;
}

class Logger {
 public:
  Logger(std::ostream& err, LogLevel level) : err_(err), level_(level) {}
  void log(LogLevel lvl, std::string_view msg) const {
    static constexpr std::string_view kNames[] = {"debug", "info", "warn", "error"};
    if (lvl < level_ || lvl == LogLevel::off) return;
    err_ << "conceptx [" << kNames[static_cast<int>(lvl)] << "] " << msg << '\n';
  }
  void debug(std::string_view m) const { log(LogLevel::debug, m); }
  void info(std::string_view m) const { log(LogLevel::info, m); }
  void warn(std::string_view m) const { log(LogLevel::warn, m); }

 private:
  std::ostream& err_;
  LogLevel level_;
};

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline ConceptDataset read_dataset(const std::string& path, const LoadOptions& opt = {}) {
  auto in = open_input(path);
  try {
    return load_dataset(in, opt);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline EmbeddingSet read_embeddings(const std::string& path) {
  auto in = open_input(path);
  try {
    return load_embeddings(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline nlohmann::json read_json(const std::string& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, path + ": malformed JSON: " + e.what());
  }
}

/// Writes `text` to `path`, or to `out` when path is empty.
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

/// "LABEL=PATH", or a bare path labelled by its file stem.
inline std::pair<std::string, std::string> parse_labelled_path(const std::string& s) {
  const auto eq = s.find('=');
  if (eq != std::string::npos && eq > 0) return {s.substr(0, eq), s.substr(eq + 1)};
  return {std::filesystem::path(s).stem().string(), s};
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  Logger log;
  unsigned threads = 1;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// measure

struct MeasureArgs {
  std::vector<std::string> datasets;
  std::string measure;
  std::optional<double> theta;
  bool ground_truth = false;
  std::string format = "csv";
  std::string output;
  double delta = 0.05;
  bool figure_filter = false;
  bool strict = false;
  std::string schema;
};

inline int cmd_measure(const MeasureArgs& a, detail::Context& ctx) {
  report::ReportSpec spec;
  for (const auto& d : a.datasets) spec.datasets.push_back(detail::parse_labelled_path(d));
  spec.measure = parse_measure_kind(a.measure);
  spec.theta = a.theta;
  spec.include_ground_truth = a.ground_truth;
  spec.output = report::parse_output_format(a.format);
  spec.delta = a.delta;
  spec.figure_filter = a.figure_filter;
  report::validate(spec);

  LoadOptions opt;
  if (!a.schema.empty()) {
    opt.schema_mode = SchemaMode::strict;
    opt.schema = detail::split_list(a.schema);
  }
  std::vector<std::optional<ConceptDataset>> loaded(spec.datasets.size());
  parallel_for(spec.datasets.size(), ctx.threads, [&](std::size_t i) {
    loaded[i] = detail::read_dataset(spec.datasets[i].second, opt);
  });
  std::vector<std::pair<std::string, const ConceptDataset*>> labelled;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    ctx.log.info("loaded " + spec.datasets[i].second + " (" + std::to_string(loaded[i]->size()) +
                 " examples, original weight total " +
                 format_double(loaded[i]->original_weight_total()) + ")");
    labelled.emplace_back(spec.datasets[i].first, &*loaded[i]);
  }
  if (spec.include_ground_truth &&
      std::none_of(loaded.begin(), loaded.end(), [](const auto& d) { return d->all_have_ground_truth(); })) {
    ctx.log.warn("--ground-truth given but no dataset carries ground_truth; series omitted");
  }
  auto table = report::build_measure_table(labelled, spec.measure, spec.theta,
                                           spec.include_ground_truth, spec.delta, ctx.threads);
  if (spec.figure_filter) table = report::filter_for_figure(table);
  for (const auto& s : table.series) {
    for (std::size_t c = 0; c < table.concepts.size(); ++c) {
      if (!s.cells[c].value) ctx.log.info(s.label + "/" + table.concepts[c] + ": " + s.cells[c].undefined_reason);
    }
  }
  std::ostringstream text;
  report::render(table, spec.output, text);
  detail::emit(a.output, text.str(), ctx.out);
  if (a.strict && table.any_undefined()) {
    ctx.log.warn("undefined measures present (strict mode)");
    return kUndefined;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// completeness

struct CompletenessArgs {
  std::string dataset;
  std::vector<std::string> concepts;
  bool oracle = false;
  double random_accuracy = 0.0;
  std::string format = "csv";
  std::string output;
};

inline int cmd_completeness(const CompletenessArgs& a, detail::Context& ctx) {
  const auto fmt = report::parse_output_format(a.format);
  const auto d = detail::read_dataset(a.dataset);
  const auto concepts = a.concepts.empty() ? d.concept_names() : a.concepts;
  struct Row {
    CompletenessScore closed;
    std::optional<CompletenessScore> brute;
  };
  std::vector<std::optional<Row>> rows(concepts.size());
  parallel_for(concepts.size(), ctx.threads, [&](std::size_t i) {
    Row r{completeness_closed_form(d, concepts[i]), std::nullopt};
    if (a.oracle) r.brute = completeness_brute_force(d, concepts[i]);
    rows[i] = r;
  });
  bool mismatch = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i]->brute && std::fabs(rows[i]->brute->value - rows[i]->closed.value) > kIdentityTolerance) {
      mismatch = true;
      ctx.log.log(LogLevel::error, "closed form and brute force disagree on '" + concepts[i] + "'");
    }
  }

  std::ostringstream text;
  if (fmt == report::OutputFormat::csv) {
    text << "concept,value,normalized,pr_pos,abs_mean_pos,pr_neg,abs_mean_neg,brute_force\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& s = rows[i]->closed;
      text << report::csv_field(concepts[i]) << ',' << format_double(s.value) << ','
           << format_double(normalized_completeness(s, a.random_accuracy)) << ','
           << format_double(s.positive.probability) << ','
           << format_double(s.positive.abs_conditional_mean) << ','
           << format_double(s.negative.probability) << ','
           << format_double(s.negative.abs_conditional_mean) << ','
           << (rows[i]->brute ? format_double(rows[i]->brute->value) : std::string("n/a")) << '\n';
    }
  } else if (fmt == report::OutputFormat::json) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& s = rows[i]->closed;
      nlohmann::ordered_json j;
      j["concept"] = concepts[i];
      j["value"] = s.value;
      j["normalized"] = normalized_completeness(s, a.random_accuracy);
      j["per_level_terms"] = {
          {"+1", {{"abs_conditional_mean", s.positive.abs_conditional_mean},
                  {"probability", s.positive.probability}}},
          {"-1", {{"abs_conditional_mean", s.negative.abs_conditional_mean},
                  {"probability", s.negative.probability}}}};
      j["brute_force"] = rows[i]->brute ? nlohmann::ordered_json(rows[i]->brute->value)
                                        : nlohmann::ordered_json(nullptr);
      arr.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["random_accuracy"] = a.random_accuracy;
    doc["concepts"] = std::move(arr);
    text << doc.dump(2) << '\n';
  } else {
    report::ChartSeries closed{"closed_form", {}};
    report::ChartSeries brute{"brute_force", {}};
    for (const auto& r : rows) {
      closed.values.push_back(r->closed.value);
      brute.values.push_back(r->brute ? std::optional<double>(r->brute->value) : std::nullopt);
    }
    std::vector<report::ChartSeries> series{closed};
    if (a.oracle) series.push_back(brute);
    report::render_bar_chart_svg("completeness score", concepts, series, 0.0, 1.0, text);
  }
  detail::emit(a.output, text.str(), ctx.out);
  return mismatch ? kFailure : kOk;
}

// ---------------------------------------------------------------------------
// tcav

struct TcavArgs {
  std::string model;
  std::string embeddings;
  std::string format = "json";
  std::string output;
};

inline int cmd_tcav(const TcavArgs& a, detail::Context& ctx) {
  const auto fmt = report::parse_output_format(a.format);
  if (fmt == report::OutputFormat::svg) throw ValidationError("tcav supports csv or json output");
  auto min = detail::open_input(a.model);
  const auto model = load_linear_model(min);
  const auto set = detail::read_embeddings(a.embeddings);
  if (set.dim != model.dim()) {
    throw ValidationError("embedding dim " + std::to_string(set.dim) + " != model dim " +
                          std::to_string(model.dim()));
  }
  const auto all = to_embedded_examples(set);
  std::vector<EmbeddedExample> members;
  for (const auto& x : all) {
    if (model.predict(x.embedding) == 1) members.push_back(x);
  }
  ctx.log.info(std::to_string(members.size()) + " of " + std::to_string(all.size()) +
               " embeddings predicted in the class");
  const double tcav = tcav_discrete(model, members);
  const double tcav_con = tcav_continuous(model, members);
  const double cc = class_conditioned_from_embeddings(model, all);
  // Smallest eps whose threshold condition theta_h >= 1 - eps^2 / 8 holds.
  const std::optional<double> eps =
      model.theta_h() < 1.0 ? std::optional<double>(std::sqrt(8.0 * (1.0 - model.theta_h())))
                            : std::nullopt;

  std::ostringstream text;
  if (fmt == report::OutputFormat::json) {
    nlohmann::ordered_json j;
    j["n_embeddings"] = all.size();
    j["n_class"] = members.size();
    j["tcav"] = tcav;
    j["tcav_con"] = tcav_con;
    j["class_conditioned"] = cc;
    j["gap"] = std::fabs(cc - tcav_con);
    j["threshold_epsilon"] = eps ? nlohmann::ordered_json(*eps) : nlohmann::ordered_json(nullptr);
    text << j.dump(2) << '\n';
  } else {
    text << "n_embeddings,n_class,tcav,tcav_con,class_conditioned,gap,threshold_epsilon\n"
         << all.size() << ',' << members.size() << ',' << format_double(tcav) << ','
         << format_double(tcav_con) << ',' << format_double(cc) << ','
         << format_double(std::fabs(cc - tcav_con)) << ','
         << (eps ? format_double(*eps) : std::string("n/a")) << '\n';
  }
  detail::emit(a.output, text.str(), ctx.out);
  return kOk;
}

// ---------------------------------------------------------------------------
// plan

struct PlanArgs {
  std::optional<double> epsilon;
  double delta = 0.05;
  std::optional<std::int64_t> n;
};

inline int cmd_plan(const PlanArgs& a, detail::Context& ctx) {
  if (a.n) {
    ctx.out << format_double(hoeffding_radius(*a.n, a.delta)) << '\n';
    return kOk;
  }
  if (!a.epsilon) throw ValidationError("plan needs --epsilon (or --n for a radius)");
  ctx.out << hoeffding_sample_size(*a.epsilon, a.delta) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// edit

struct EditArgs {
  std::string prompts;
  std::string concepts;
  std::string plan;
  std::string images;
  std::string few_shot;
  std::string grid;
  bool renormalize = false;
  std::string edited_output;
  std::string output;
};

inline std::vector<EditPlan> parse_plans(const nlohmann::json& doc) {
  const auto one = [](const nlohmann::json& p) {
    if (!p.is_object() || !p.contains("class_name") || !p["class_name"].is_string()) {
      throw ValidationError("edit plan needs string 'class_name'");
    }
    EditPlan plan;
    plan.class_name = p["class_name"].get<std::string>();
    if (!p.contains("concept_names") || !p["concept_names"].is_array()) {
      throw ValidationError("edit plan needs array 'concept_names'");
    }
    for (const auto& c : p["concept_names"]) {
      if (!c.is_string()) throw ValidationError("concept_names must be strings");
      plan.concept_names.push_back(c.get<std::string>());
    }
    if (p.contains("lambda")) {
      if (!p["lambda"].is_number()) throw ValidationError("lambda must be a number");
      plan.lambda = p["lambda"].get<double>();
    }
    validate_plan(plan);
    return plan;
  };
  std::vector<EditPlan> plans;
  if (doc.is_object() && doc.contains("plans")) {
    if (!doc["plans"].is_array()) throw ValidationError("'plans' must be an array");
    for (const auto& p : doc["plans"]) plans.push_back(one(p));
  } else if (doc.is_array()) {
    for (const auto& p : doc) plans.push_back(one(p));
  } else {
    plans.push_back(one(doc));
  }
  if (plans.empty()) throw ValidationError("no edit plans");
  return plans;
}

inline nlohmann::ordered_json to_json(const Evaluation& e) {
  nlohmann::ordered_json j;
  j["accuracy"] = e.accuracy;
  j["macro_f1"] = e.macro_f1;
  nlohmann::ordered_json pc = nlohmann::ordered_json::object();
  for (const auto& [label, s] : e.per_class) {
    pc[label] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                 {"support", s.support}, {"predicted", s.predicted}};
  }
  j["per_class"] = std::move(pc);
  return j;
}

inline int cmd_edit(const EditArgs& a, detail::Context& ctx) {
  const auto class_set = detail::read_embeddings(a.prompts);
  const auto concept_set = detail::read_embeddings(a.concepts);
  if (class_set.dim != concept_set.dim) throw ValidationError("prompt and concept dims differ");
  const auto class_prompts = prompts_from(class_set, PromptKind::class_prompt);
  const auto concept_prompts = prompts_from(concept_set, PromptKind::concept_prompt);
  auto plans = parse_plans(detail::read_json(a.plan));
  const EditOptions opt{a.renormalize};

  nlohmann::ordered_json report;
  if (!a.few_shot.empty()) {
    const auto shots = labeled_images_from(detail::read_embeddings(a.few_shot));
    std::vector<double> grid = default_lambda_grid();
    if (!a.grid.empty()) {
      grid.clear();
      for (const auto& g : detail::split_list(a.grid)) grid.push_back(std::stod(g));
    }
    auto fits = nlohmann::ordered_json::array();
    for (auto& plan : plans) {
      std::vector<PromptEmbedding> chosen;
      for (const auto& name : plan.concept_names) {
        const auto it = std::find_if(concept_prompts.begin(), concept_prompts.end(),
                                     [&](const PromptEmbedding& p) { return p.name == name; });
        if (it == concept_prompts.end()) throw ValidationError("unknown concept prompt '" + name + "'");
        chosen.push_back(*it);
      }
      const auto fit = fit_lambda_detailed(plan.class_name, shots, class_prompts, chosen, grid, opt);
      plan.lambda = fit.lambda;
      fits.push_back({{"class_name", plan.class_name}, {"lambda", fit.lambda},
                      {"few_shot_macro_f1", fit.macro_f1}});
    }
    report["fitted"] = std::move(fits);
  }

  // Plans apply in order; each edits one class prompt.
  std::vector<PromptEmbedding> edited = class_prompts;
  for (const auto& plan : plans) edited = apply_edit_plan(edited, concept_prompts, plan, opt);

  auto plan_json = nlohmann::ordered_json::array();
  for (const auto& p : plans) {
    plan_json.push_back({{"class_name", p.class_name}, {"concept_names", p.concept_names},
                         {"lambda", p.lambda}});
  }
  report["plans"] = std::move(plan_json);
  auto prompt_json = nlohmann::ordered_json::array();
  for (const auto& p : edited) {
    prompt_json.push_back({{"name", p.name},
                           {"kind", p.kind == PromptKind::edited ? "edited" : "class_prompt"},
                           {"norm", norm(p.vector)}});
  }
  report["prompts"] = std::move(prompt_json);

  if (!a.images.empty()) {
    const auto set = detail::read_embeddings(a.images);
    if (set.dim != class_set.dim) throw ValidationError("image and prompt dims differ");
    bool labelled = true;
    for (const auto& r : set.vectors) labelled = labelled && r.label.has_value();
    std::vector<std::string> before(set.vectors.size()), after(set.vectors.size());
    parallel_for(set.vectors.size(), ctx.threads, [&](std::size_t i) {
      before[i] = classify(set.vectors[i].values, class_prompts);
      after[i] = classify(set.vectors[i].values, edited);
    });
    auto preds = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < set.vectors.size(); ++i) {
      preds.push_back({{"id", set.vectors[i].id}, {"original", before[i]}, {"edited", after[i]}});
    }
    report["predictions"] = std::move(preds);
    if (labelled && !set.vectors.empty()) {
      std::vector<std::string> labels;
      for (const auto& p : class_prompts) labels.push_back(p.name);
      std::vector<PredictionPair> pb, pa;
      for (std::size_t i = 0; i < set.vectors.size(); ++i) {
        pb.emplace_back(before[i], *set.vectors[i].label);
        pa.emplace_back(after[i], *set.vectors[i].label);
      }
      report["evaluation"] = {
          {"original", to_json(evaluate(pb, std::span<const std::string>(labels)))},
          {"edited", to_json(evaluate(pa, std::span<const std::string>(labels)))}};
    } else {
      ctx.log.warn("images carry no labels; evaluation skipped");
    }
  }

  if (!a.edited_output.empty()) {
    EmbeddingSet out_set{class_set.dim, {}};
    for (const auto& p : edited) out_set.vectors.push_back({p.name, p.vector, std::nullopt});
    std::ostringstream es;
    write_embeddings(out_set, es);
    detail::emit(a.edited_output, es.str(), ctx.out);
  }
  detail::emit(a.output, report.dump(2) + "\n", ctx.out);
  return kOk;
}

// ---------------------------------------------------------------------------
// votes

struct VotesArgs {
  std::string votes;
  std::vector<std::int64_t> k{1, 3, 5};
  std::string format = "csv";
  std::string output;
  bool strict = false;
};

inline int cmd_votes(const VotesArgs& a, detail::Context& ctx) {
  const auto fmt = report::parse_output_format(a.format);
  auto in = detail::open_input(a.votes);
  const auto records = load_votes_csv(in);
  struct Row {
    std::int64_t k;
    double accuracy;
    std::optional<double> recall;
  };
  std::vector<Row> rows;
  bool undefined = false;
  for (const auto k : a.k) {
    try {
      const auto m = metrics_at_k(records, k);
      rows.push_back({k, m.accuracy, m.recall});
    } catch (const UndefinedMeasureError& e) {
      undefined = true;
      ctx.log.warn(e.what());
      std::size_t correct = 0;
      for (const auto& r : records) correct += label_at_k(r, k) == r.true_label;
      rows.push_back({k, static_cast<double>(correct) / static_cast<double>(records.size()), std::nullopt});
    }
  }
  std::ostringstream text;
  if (fmt == report::OutputFormat::csv) {
    text << "k,accuracy,recall\n";
    for (const auto& r : rows) {
      text << r.k << ',' << format_double(r.accuracy) << ',' << report::cell_text(r.recall) << '\n';
    }
  } else if (fmt == report::OutputFormat::json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"k", r.k}, {"accuracy", r.accuracy},
                     {"recall", r.recall ? nlohmann::ordered_json(*r.recall) : nlohmann::ordered_json("n/a")}});
    }
    text << nlohmann::ordered_json{{"records", records.size()}, {"thresholds", arr}}.dump(2) << '\n';
  } else {
    std::vector<std::string> cats;
    report::ChartSeries acc{"accuracy", {}}, rec{"recall", {}};
    for (const auto& r : rows) {
      cats.push_back("k=" + std::to_string(r.k));
      acc.values.push_back(r.accuracy);
      rec.values.push_back(r.recall);
    }
    report::render_bar_chart_svg("concept labeling by vote threshold", cats, {acc, rec}, 0.0, 1.0, text);
  }
  detail::emit(a.output, text.str(), ctx.out);
  return (a.strict && undefined) ? kUndefined : kOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::vector<std::string> suites;
  std::size_t trials = 500;
  std::uint64_t seed = 0;
  double epsilon = 0.2;
  double delta = 0.1;
  std::vector<std::size_t> dims{2, 8, 64};
  std::string records;
};

inline int cmd_verify(const VerifyArgs& a, detail::Context& ctx) {
  std::vector<std::string> suites = a.suites;
  if (suites.empty()) suites = {"axioms", "theorem1", "theorem2"};
  std::vector<SuiteResult> results;
  for (const auto& s : suites) {
    if (s == "axioms") {
      results.push_back(run_axioms_suite(a.trials, a.seed, ctx.threads));
    } else if (s == "theorem1") {
      results.push_back(run_theorem1_suite(a.trials, a.seed, ctx.threads));
    } else if (s == "theorem2") {
      for (const auto dim : a.dims) {
        results.push_back(run_theorem2_suite(a.trials, a.seed, a.epsilon, a.delta, dim, ctx.threads));
      }
    } else {
      throw ValidationError("unknown suite '" + s + "' (axioms, theorem1, theorem2)");
    }
  }
  bool all = true;
  std::ostringstream records;
  for (const auto& r : results) {
    all = all && r.passed;
    ctx.out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    for (const auto& rec : r.records) {
      auto line = rec;
      line["suite"] = r.name;
      records << line.dump() << '\n';
      if (r.name != "theorem2") ctx.out << "  failure " << rec.dump() << '\n';
    }
  }
  if (!a.records.empty()) detail::emit(a.records, records.str(), ctx.out);
  return all ? kOk : kFailure;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::size_t n = 100;
  std::size_t concepts = 1;
  std::string kind = "binary";
  std::uint64_t seed = 0;
  std::vector<std::string> plant;
  std::optional<double> ground_truth_flip;
  std::string output;
};

inline int cmd_generate(const GenerateArgs& a, detail::Context& ctx) {
  synth::SyntheticSpec spec;
  spec.n_examples = a.n;
  spec.n_concepts = a.concepts;
  if (a.kind == "binary") {
    spec.concept_kind = synth::ConceptKind::binary;
  } else if (a.kind == "continuous") {
    spec.concept_kind = synth::ConceptKind::continuous;
  } else {
    throw ValidationError("--kind must be binary or continuous");
  }
  spec.seed = a.seed;
  for (const auto& p : a.plant) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--plant expects NAME=VALUE");
    double v = 0.0;
    try {
      v = std::stod(p.substr(eq + 1));
    } catch (const std::exception&) {
      throw ValidationError("--plant value is not a number: '" + p + "'");
    }
    spec.planted_measures.emplace_back(p.substr(0, eq), v);
  }
  spec.n_concepts = std::max(spec.n_concepts, spec.planted_measures.size());
  spec.ground_truth_flip = a.ground_truth_flip;
  const auto d = synth::generate_dataset(spec);
  std::ostringstream text;
  write_jsonl(d, text);
  detail::emit(a.output, text.str(), ctx.out);
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"conceptx: model-agnostic concept importance measures"};
  app.name("conceptx");
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads (output is identical for any count)")
      ->check(CLI::Range(1u, 256u));

  MeasureArgs ma;
  auto* measure = app.add_subcommand("measure", "Per-concept measures for one or more datasets");
  measure->add_option("-d,--dataset", ma.datasets, "Dataset as LABEL=PATH or PATH (repeatable)")
      ->required();
  measure->add_option("-m,--measure", ma.measure, "symmetric | class_conditioned | concept_conditioned")
      ->required();
  measure->add_option("--theta", ma.theta, "Threshold for the concept-conditioned measure");
  measure->add_flag("--ground-truth", ma.ground_truth, "Add the ground-truth series when available");
  measure->add_option("-f,--format", ma.format, "csv | json | svg");
  measure->add_option("-o,--output", ma.output, "Output file (default stdout)");
  measure->add_option("--delta", ma.delta, "Confidence level delta for ci_radius");
  measure->add_flag("--figure-filter", ma.figure_filter, "Drop concepts whose bars are all zero or n/a");
  measure->add_flag("--strict", ma.strict, "Exit 3 when any measure is undefined");
  measure->add_option("--schema", ma.schema, "Comma-separated concept schema to enforce");

  CompletenessArgs ca;
  auto* completeness = app.add_subcommand("completeness", "Completeness-aware score of binary concepts");
  completeness->add_option("-d,--dataset", ca.dataset, "Dataset path")->required();
  completeness->add_option("-c,--concept", ca.concepts, "Concept (repeatable; default all)");
  completeness->add_flag("--oracle", ca.oracle, "Also run the brute-force decoder search and check equality");
  completeness->add_option("--random-accuracy", ca.random_accuracy, "a_r offset for the normalized score");
  completeness->add_option("-f,--format", ca.format, "csv | json | svg");
  completeness->add_option("-o,--output", ca.output, "Output file (default stdout)");

  TcavArgs ta;
  auto* tcav = app.add_subcommand("tcav", "TCAV, TCAV_con and the class-conditioned measure for a linear model");
  tcav->add_option("--model", ta.model, "Model JSON {w_h, theta_h, v}")->required();
  tcav->add_option("--embeddings", ta.embeddings, "Embedding JSON")->required();
  tcav->add_option("-f,--format", ta.format, "json | csv");
  tcav->add_option("-o,--output", ta.output, "Output file (default stdout)");

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Hoeffding sample size for (epsilon, delta), or radius for n");
  plan->add_option("--epsilon", pa.epsilon, "Target deviation in (0, 1)");
  plan->add_option("--delta", pa.delta, "Failure probability in (0, 1)");
  plan->add_option("--n", pa.n, "Sample count; prints the radius instead");

  EditArgs ea;
  auto* edit = app.add_subcommand("edit", "Prompt editing with optional few-shot lambda fitting");
  edit->add_option("--prompts", ea.prompts, "Class prompt embeddings")->required();
  edit->add_option("--concepts", ea.concepts, "Concept prompt embeddings")->required();
  edit->add_option("--plan", ea.plan, "Edit plan JSON")->required();
  edit->add_option("--images", ea.images, "Image embeddings (optional 'label' per vector)");
  edit->add_option("--few-shot", ea.few_shot, "Labelled images used to fit lambda per plan");
  edit->add_option("--grid", ea.grid, "Comma-separated lambda grid (default 0,0.02,...,0.5)");
  edit->add_flag("--renormalize", ea.renormalize, "Rescale edited prompts to unit norm");
  edit->add_option("--edited-output", ea.edited_output, "Write edited prompts as embedding JSON");
  edit->add_option("-o,--output", ea.output, "Report file (default stdout)");

  VotesArgs va;
  auto* votes = app.add_subcommand("votes", "Accuracy and recall of vote-thresholded concept labels");
  votes->add_option("--votes", va.votes, "Votes CSV")->required();
  votes->add_option("-k,--k", va.k, "Thresholds (repeatable; default 1 3 5)");
  votes->add_option("-f,--format", va.format, "csv | json | svg");
  votes->add_option("-o,--output", va.output, "Output file (default stdout)");
  votes->add_flag("--strict", va.strict, "Exit 3 when recall is undefined");

  VerifyArgs ya;
  auto* verify = app.add_subcommand("verify", "Run the built-in verification suites");
  verify->add_option("--suite", ya.suites, "axioms | theorem1 | theorem2 (repeatable; default all)");
  verify->add_option("--trials", ya.trials, "Trials per suite");
  verify->add_option("--seed", ya.seed, "Base seed");
  verify->add_option("--epsilon", ya.epsilon, "theorem2 epsilon");
  verify->add_option("--delta", ya.delta, "theorem2 delta");
  verify->add_option("--dim", ya.dims, "theorem2 embedding dimensions (repeatable)");
  verify->add_option("--records", ya.records, "Write per-trial / failure records as JSONL");

  GenerateArgs ga;
  auto* generate = app.add_subcommand("generate", "Write a synthetic planted dataset as JSONL");
  generate->add_option("-n,--n", ga.n, "Number of examples");
  generate->add_option("--concepts", ga.concepts, "Number of concepts");
  generate->add_option("--kind", ga.kind, "binary | continuous");
  generate->add_option("--seed", ga.seed, "Seed");
  generate->add_option("--plant", ga.plant, "NAME=VALUE planted symmetric measure (repeatable)");
  generate->add_option("--ground-truth-flip", ga.ground_truth_flip, "Emit ground_truth flipped with this probability");
  generate->add_option("-o,--output", ga.output, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  detail::Context ctx{out, err, Logger(err, log_level_from_env()), threads};
  try {
    if (*measure) return cmd_measure(ma, ctx);
    if (*completeness) return cmd_completeness(ca, ctx);
    if (*tcav) return cmd_tcav(ta, ctx);
    if (*plan) return cmd_plan(pa, ctx);
    if (*edit) return cmd_edit(ea, ctx);
    if (*votes) return cmd_votes(va, ctx);
    if (*verify) return cmd_verify(ya, ctx);
    if (*generate) return cmd_generate(ga, ctx);
  } catch (const UndefinedMeasureError& e) {
    err << "conceptx: undefined measure: " << e.what() << '\n';
    return kUndefined;
  } catch (const ParseError& e) {
    err << "conceptx: parse error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ValidationError& e) {
    err << "conceptx: invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const SchemaError& e) {
    err << "conceptx: schema error: " << e.what() << '\n';
    return kInvalid;
  } catch (const DomainError& e) {
    err << "conceptx: domain error: " << e.what() << '\n';
    return kInvalid;
  } catch (const InfeasibleError& e) {
    err << "conceptx: infeasible: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    err << "conceptx: error: " << e.what() << '\n';
    return kFailure;
  }
  return kInvalid;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args), out, err);
}

}  // namespace conceptx::cli
