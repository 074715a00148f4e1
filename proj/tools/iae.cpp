// iae: build collocation tables, train models, run attacks and score them.

#include <iostream>

#include "CLI11.hpp"
#include "iae/cli.hpp"

namespace {

using iae::cli::RunConfig;

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Ironic adversarial example toolkit"};
  app.set_config("--config", "", "Config file (TOML/INI); command-line flags take precedence");
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build-collocations", "Mine the noun-adjective collocation table");
  build->add_option("--treebank", cfg.treebank, "Labeled CoNLL-U treebank");
  build->add_option("--overrides", cfg.overrides, "Manual polarity overrides TSV");
  build->add_option("--table", cfg.table, "Output table path (default: <out>/collocations.tsv)");
  add_common(build, cfg);

  auto* train_lm = app.add_subcommand("train-lm", "Train the bigram sentence model");
  train_lm->add_option("--treebank", cfg.treebank, "CoNLL-U corpus (token forms)");
  train_lm->add_option("--dataset", cfg.dataset, "Whitespace-segmented dataset (used without --treebank)");
  train_lm->add_option("--delta", cfg.delta, "Additive smoothing")->capture_default_str();
  train_lm->add_option("--denominator", cfg.denominator, "as-written | conventional")
      ->check(CLI::IsMember({"as-written", "conventional"}))
      ->capture_default_str();
  train_lm->add_option("--lm", cfg.lm, "Output model path (default: <out>/lm.tsv)");
  add_common(train_lm, cfg);

  auto* train_victim = app.add_subcommand("train-victim", "Train a local or victim classifier");
  train_victim->add_option("--dataset", cfg.dataset, "Labeled dataset (.jsonl or .tsv)");
  train_victim->add_option("--kind", cfg.kind, "naive-bayes | logistic-regression")
      ->check(CLI::IsMember({"naive-bayes", "logistic-regression"}))
      ->capture_default_str();
  train_victim->add_option("--features", cfg.features, "word-unigram | char-bigram")
      ->check(CLI::IsMember({"word-unigram", "char-bigram"}))
      ->capture_default_str();
  train_victim->add_option("--learning-rate", cfg.learning_rate)->capture_default_str();
  train_victim->add_option("--epochs", cfg.epochs)->capture_default_str();
  add_common(train_victim, cfg);

  auto* attack = app.add_subcommand("attack", "Generate adversarial examples and score victims");
  std::size_t budget = 0;
  attack->add_option("--treebank", cfg.treebank, "Labeled CoNLL-U test set");
  attack->add_option("--table", cfg.table, "Collocation table");
  attack->add_option("--lm", cfg.lm, "Bigram model");
  attack->add_option("--templates", cfg.templates, "Appendix template file");
  attack->add_option("--adjectives", cfg.adjectives, "Adjectives for template expansion")->delimiter(',');
  attack->add_option("--fallback", cfg.fallback, "General evaluation word")->capture_default_str();
  attack->add_option("--local-model", cfg.local_model, "Local substitute classifier JSON");
  attack->add_option("--method", cfg.method, "iae | visual | homonym")
      ->check(CLI::IsMember({"iae", "visual", "homonym"}))
      ->capture_default_str();
  auto* budget_opt = attack->add_option("--budget", budget, "Words to perturb (baselines)")->check(CLI::PositiveNumber);
  attack->add_option("--mapping", cfg.mapping, "Character mapping TSV (baselines)");
  attack->add_option("--embeddings", cfg.embeddings, "Word embeddings for WMD");
  attack->add_option("--victim-endpoint", cfg.victim_endpoints, "Remote victim base URL (repeatable)");
  attack->add_option("--victim-model", cfg.victim_models, "Victim classifier JSON (repeatable)");
  attack->add_option("--max-in-flight", cfg.max_in_flight)->capture_default_str();
  attack->add_option("--timeout-ms", cfg.timeout_ms)->capture_default_str();
  add_common(attack, cfg);

  auto* eval = app.add_subcommand("eval", "Rescore a saved attack run in --out");
  eval->add_option("--embeddings", cfg.embeddings, "Word embeddings for WMD");
  eval->add_option("--victim-endpoint", cfg.victim_endpoints, "Remote victim base URL (repeatable)");
  eval->add_option("--victim-model", cfg.victim_models, "Victim classifier JSON (repeatable)");
  eval->add_option("--max-in-flight", cfg.max_in_flight)->capture_default_str();
  eval->add_option("--timeout-ms", cfg.timeout_ms)->capture_default_str();
  add_common(eval, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (budget_opt->count() > 0) cfg.budget = budget;

  try {
    if (build->parsed()) iae::cli::cmd_build_collocations(cfg, std::cout);
    else if (train_lm->parsed()) iae::cli::cmd_train_lm(cfg, std::cout);
    else if (train_victim->parsed()) iae::cli::cmd_train_victim(cfg, std::cout);
    else if (attack->parsed()) iae::cli::cmd_attack(cfg, std::cout);
    else if (eval->parsed()) iae::cli::cmd_eval(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
