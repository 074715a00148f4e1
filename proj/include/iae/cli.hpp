// Command implementations behind the `iae` binary. Each command validates its
// configuration, reads its inputs and writes artifacts under `out`.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "iae/appender.hpp"
#include "iae/baselines.hpp"
#include "iae/collocation.hpp"
#include "iae/corpus.hpp"
#include "iae/metrics.hpp"
#include "iae/ngram_lm.hpp"
#include "iae/remote.hpp"
#include "iae/substitution.hpp"
#include "iae/victims.hpp"
#include "json.hpp"

namespace iae::cli {

namespace fs = std::filesystem;

struct RunConfig {
  std::string dataset;
  std::string treebank;
  std::string table;
  std::string lm;
  std::string templates;
  std::string embeddings;
  std::string mapping;
  std::string overrides;
  std::string local_model;
  std::vector<std::string> victim_endpoints;
  std::vector<std::string> victim_models;
  std::string method = "iae";
  std::optional<std::size_t> budget;
  double delta = 1.0;
  std::string denominator = "as-written";
  std::string fallback = kDefaultFallbackWord;
  std::vector<std::string> adjectives{"值得称赞", "棒", "优秀"};
  std::uint64_t seed = 42;
  std::string kind = "naive-bayes";
  std::string features = "word-unigram";
  double learning_rate = 0.5;
  std::size_t epochs = 300;
  std::size_t max_in_flight = 4;
  std::size_t timeout_ms = 10000;
  std::string out = "out";
};

inline void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw Error(std::string("missing required flag ") + flag);
  if (!fs::is_regular_file(path)) throw Error(std::string(flag) + ": no such file: " + path);
}

inline fs::path ensure_out(const RunConfig& cfg) {
  fs::path out(cfg.out);
  fs::create_directories(out);
  return out;
}

inline std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

/// build-collocations: treebank -> collocation table TSV plus summary.
inline TableSummary cmd_build_collocations(const RunConfig& cfg, std::ostream& log) {
  require_file(cfg.treebank, "--treebank");
  if (!cfg.overrides.empty()) require_file(cfg.overrides, "--overrides");
  const auto ds = load_conllu(cfg.treebank);
  const auto overrides = cfg.overrides.empty() ? OverrideMap{} : load_overrides(cfg.overrides);
  const auto table = build_table(ds, PatternConfig{}, overrides);
  const std::string path = cfg.table.empty() ? (ensure_out(cfg) / "collocations.tsv").string() : cfg.table;
  if (!cfg.table.empty() && fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  save_table(table, path);
  const auto s = summarize(table);
  char mean[32];
  std::snprintf(mean, sizeof mean, "%.3f", s.mean_per_noun);
  log << "nouns\t" << s.nouns << "\ncollocations\t" << s.collocations << "\nmax_per_noun\t" << s.max_per_noun
      << "\nmin_per_noun\t" << s.min_per_noun << "\nmean_per_noun\t" << mean << "\ntable\t" << path << '\n';
  return s;
}

/// train-lm: treebank forms (or whitespace-split dataset texts) -> bigram model.
inline NGramModel cmd_train_lm(const RunConfig& cfg, std::ostream& log) {
  std::vector<std::vector<std::string>> sentences;
  if (!cfg.treebank.empty()) {
    require_file(cfg.treebank, "--treebank");
    for (const auto& s : load_conllu(cfg.treebank)) sentences.push_back(s.forms());
  } else {
    require_file(cfg.dataset, "--dataset");
    for (const auto& r : load_labeled_dataset(cfg.dataset, guess_dataset_format(cfg.dataset)))
      sentences.push_back(text::split_whitespace(r.text));
  }
  const auto model = train_bigram(sentences, cfg.delta, parse_denominator_mode(cfg.denominator));
  const std::string path = cfg.lm.empty() ? (ensure_out(cfg) / "lm.tsv").string() : cfg.lm;
  save_model(model, path);
  log << "sentences\t" << sentences.size() << "\nunigrams\t" << model.unigrams().size() << "\nbigrams\t"
      << model.bigrams().size() << "\nlm\t" << path << '\n';
  return model;
}

/// train-victim: labeled dataset -> classifier JSON.
inline LocalClassifier cmd_train_victim(const RunConfig& cfg, std::ostream& log) {
  require_file(cfg.dataset, "--dataset");
  const auto ds = load_labeled_dataset(cfg.dataset, guess_dataset_format(cfg.dataset));
  TrainOptions opt;
  opt.learning_rate = cfg.learning_rate;
  opt.epochs = cfg.epochs;
  opt.seed = cfg.seed;
  const auto model = train(ds, parse_classifier_kind(cfg.kind), parse_feature_mode(cfg.features), opt);
  const auto path = (ensure_out(cfg) / "classifier.json").string();
  save_classifier(model, path);
  std::size_t correct = 0;
  for (const auto& r : ds) correct += model.predict(r.text).label == r.label;
  char acc[32];
  std::snprintf(acc, sizeof acc, "%.3f", static_cast<double>(correct) / static_cast<double>(ds.size()));
  log << "examples\t" << ds.size() << "\nvocabulary\t" << model.vocabulary().size() << "\ntrain_accuracy\t" << acc
      << "\nclassifier\t" << path << '\n';
  return model;
}

struct VictimSpec {
  std::string name;
  std::string endpoint;
  std::string model;
};

inline std::vector<VictimSpec> victim_specs(const RunConfig& cfg) {
  std::vector<VictimSpec> out;
  for (const auto& m : cfg.victim_models) {
    require_file(m, "--victim-model");
    out.push_back({stem(m), "", m});
  }
  for (const auto& e : cfg.victim_endpoints) {
    parse_endpoint(e);
    out.push_back({e, e, ""});
  }
  return out;
}

inline std::vector<Victim> instantiate(const std::vector<VictimSpec>& specs, const RunConfig& cfg) {
  std::vector<Victim> out;
  RemoteOptions ro;
  ro.max_in_flight = cfg.max_in_flight;
  ro.timeout = std::chrono::milliseconds(cfg.timeout_ms);
  for (const auto& s : specs) {
    if (!s.model.empty()) {
      auto model = std::make_shared<LocalClassifier>(load_classifier(s.model));
      out.push_back({s.name, [model](std::span<const std::string> t) { return model->predict_batch(t); }});
    } else {
      out.push_back({s.name, [ep = s.endpoint, ro](std::span<const std::string> t) {
                       return remote_predict(ep, t, ro);
                     }});
    }
  }
  return out;
}

inline std::string method_label(const std::string& method) {
  if (method == "iae") return "IAE";
  if (method == "visual") return "Visual";
  if (method == "homonym") return "Homonym";
  throw Error("unknown method \"" + method + "\" (expected iae, visual or homonym)");
}

inline AttackReport write_report(const fs::path& out, const AttackRun& run, const std::vector<VictimSpec>& specs,
                                 const RunConfig& cfg) {
  const auto victims = instantiate(specs, cfg);
  std::optional<EmbeddingTable> emb;
  ReportOptions ro;
  if (!cfg.embeddings.empty()) {
    require_file(cfg.embeddings, "--embeddings");
    emb = load_embeddings(cfg.embeddings);
    ro.embeddings = &*emb;
  }
  const auto report = build_report({run}, victims, ro);
  text::write_file((out / "report.json").string(), to_json(report).dump(2) + "\n");
  text::write_file((out / "report.txt").string(), format_report(report));
  return report;
}

inline std::vector<AdversarialExample> attack_examples(const RunConfig& cfg,
                                                       const std::vector<AnnotatedSentence>& negatives,
                                                       const LocalClassifier& local) {
  std::vector<AdversarialExample> out;
  if (cfg.method == "iae") {
    require_file(cfg.table, "--table");
    require_file(cfg.lm, "--lm");
    require_file(cfg.templates, "--templates");
    const auto table = load_table(cfg.table);
    const auto lm = load_model(cfg.lm);
    const auto candidates = generate_candidates(cfg.templates, cfg.adjectives);
    IaeConfig ic;
    ic.fallback = cfg.fallback;
    for (const auto& s : negatives) out.push_back(generate_iae(s, table, lm, local, candidates, ic));
    return out;
  }
  if (cfg.mapping.empty()) throw Error("--method " + cfg.method + " requires --mapping");
  require_file(cfg.mapping, "--mapping");
  if (!cfg.budget) throw Error("--method " + cfg.method + " requires --budget");
  const auto mapping = load_mapping(cfg.mapping);
  if (to_string(mapping.kind) != cfg.method)
    throw Error("--mapping declares kind " + std::string(to_string(mapping.kind)) + " but --method is " + cfg.method);
  for (const auto& s : negatives) {
    const auto tokens = s.forms();
    const auto imp = word_importance(local, tokens, Polarity::negative);
    const auto r = mapped_substitution_attack(tokens, mapping, imp, *cfg.budget, local, Polarity::negative);
    AdversarialExample e;
    e.original_text = s.text();
    e.substituted_text = text::join(r.tokens, "");
    e.final_text = e.substituted_text;
    e.replaced = r.replaced;
    e.appendix_flipped_local = false;
    e.original_label = Polarity::negative;
    out.push_back(std::move(e));
  }
  return out;
}

struct AttackOutcome {
  std::vector<AdversarialExample> examples;
  std::optional<AttackReport> report;
};

/// attack: negative test sentences -> adversarial.jsonl, run.json and, when
/// victims are configured, report.json / report.txt.
inline AttackOutcome cmd_attack(const RunConfig& cfg, std::ostream& log) {
  const auto label = method_label(cfg.method);
  require_file(cfg.treebank, "--treebank");
  require_file(cfg.local_model, "--local-model");
  if (cfg.method != "iae" && cfg.mapping.empty()) throw Error("--method " + cfg.method + " requires --mapping");
  const auto specs = victim_specs(cfg);

  std::vector<AnnotatedSentence> negatives;
  for (auto& s : load_conllu(cfg.treebank))
    if (s.label == Polarity::negative) negatives.push_back(std::move(s));
  if (negatives.empty()) throw Error("no negative examples in " + cfg.treebank);

  const auto local = load_classifier(cfg.local_model);
  AttackOutcome outcome;
  outcome.examples = attack_examples(cfg, negatives, local);

  const auto out = ensure_out(cfg);
  text::write_file((out / "adversarial.jsonl").string(), to_jsonl(outcome.examples));

  nlohmann::json manifest = {{"format", "iae-run"},
                             {"version", 1},
                             {"method", label},
                             {"local_model", stem(cfg.local_model)},
                             {"seed", cfg.seed},
                             {"victims", nlohmann::json::array()}};
  for (const auto& s : specs) manifest["victims"].push_back({{"name", s.name}, {"endpoint", s.endpoint}, {"model", s.model}});
  manifest["embeddings"] = cfg.embeddings;
  text::write_file((out / "run.json").string(), manifest.dump(2) + "\n");

  log << "method\t" << label << "\nexamples\t" << outcome.examples.size() << '\n';

  if (!specs.empty()) {
    AttackRun run{label, stem(cfg.local_model), {}, outcome.examples};
    for (const auto& s : specs) run.victims.push_back(s.name);
    outcome.report = write_report(out, run, specs, cfg);
    log << format_report(*outcome.report);
  }
  return outcome;
}

/// eval: rescore a saved run directory (`out`) against its recorded victims,
/// or the victims given on the command line.
inline AttackReport cmd_eval(const RunConfig& cfg, std::ostream& log) {
  const fs::path out(cfg.out);
  const auto manifest_path = (out / "run.json").string();
  const auto examples_path = (out / "adversarial.jsonl").string();
  require_file(manifest_path, "--out (run.json)");
  require_file(examples_path, "--out (adversarial.jsonl)");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(text::read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("run.json: " + std::string(e.what()));
  }
  auto specs = victim_specs(cfg);
  if (specs.empty())
    for (const auto& v : manifest.at("victims"))
      specs.push_back({v.at("name").get<std::string>(), v.at("endpoint").get<std::string>(),
                       v.at("model").get<std::string>()});
  if (specs.empty()) throw Error("eval: no victims configured");
  RunConfig effective = cfg;
  if (effective.embeddings.empty()) effective.embeddings = manifest.value("embeddings", std::string());

  AttackRun run{manifest.at("method").get<std::string>(), manifest.at("local_model").get<std::string>(), {},
                parse_examples_jsonl(text::read_file(examples_path))};
  for (const auto& s : specs) run.victims.push_back(s.name);
  const auto report = write_report(out, run, specs, effective);
  log << format_report(report);
  return report;
}

}  // namespace iae::cli
