#include <gtest/gtest.h>

#include <sstream>

#include "iae/cli.hpp"
#include "support/synthetic.hpp"

using namespace iae;
using iae::cli::RunConfig;

namespace {

namespace fs = std::filesystem;

const std::string kFixtures = IAE_FIXTURES;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("iae_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// A trained synthetic world: table, LM, local model and one victim model.
struct World {
  fs::path dir;
  synthetic::Files files;
  std::string table, lm, local, victim;

  explicit World(const std::string& name, std::size_t test_size = 10) : dir(scratch(name)) {
    files = synthetic::write_world(dir / "data", test_size);
    std::ostringstream log;
    RunConfig c;
    c.treebank = files.treebank;
    c.out = (dir / "prep").string();
    cli::cmd_build_collocations(c, log);
    cli::cmd_train_lm(c, log);
    table = (dir / "prep" / "collocations.tsv").string();
    lm = (dir / "prep" / "lm.tsv").string();

    RunConfig v;
    v.dataset = files.local_train;
    v.out = (dir / "local").string();
    cli::cmd_train_victim(v, log);
    local = (dir / "local.json").string();
    fs::rename(dir / "local" / "classifier.json", local);
    v.dataset = files.victim_train;
    v.out = (dir / "victim").string();
    cli::cmd_train_victim(v, log);
    victim = (dir / "victim.json").string();
    fs::rename(dir / "victim" / "classifier.json", victim);
  }

  RunConfig attack(const std::string& out) const {
    RunConfig c;
    c.treebank = files.test_set;
    c.table = table;
    c.lm = lm;
    c.templates = files.templates;
    c.local_model = local;
    c.victim_models = {victim};
    c.embeddings = files.embeddings;
    c.out = (dir / out).string();
    return c;
  }
};

}  // namespace

TEST(CliBuildCollocations, FixtureSummary) {
  const auto out = scratch("build");
  RunConfig c;
  c.treebank = kFixtures + "/table1/treebank.conllu";
  c.out = out.string();
  std::ostringstream log;
  const auto s = cli::cmd_build_collocations(c, log);
  EXPECT_EQ(s.nouns, 4u);
  EXPECT_EQ(s.collocations, 6u);
  EXPECT_EQ(s.max_per_noun, 3u);
  EXPECT_EQ(s.min_per_noun, 1u);
  EXPECT_DOUBLE_EQ(s.mean_per_noun, 1.5);
  EXPECT_NE(log.str().find("collocations\t6"), std::string::npos);
  const auto t = load_table((out / "collocations.tsv").string());
  EXPECT_EQ(t.find("男人", "优雅")->freq_pos, 2u);
  EXPECT_EQ(t.find("男人", "恶心")->freq_neg, 2u);
}

TEST(CliBuildCollocations, MissingAndEmptyInput) {
  const auto out = scratch("build_empty");
  RunConfig c;
  c.treebank = (out / "missing.conllu").string();
  c.out = out.string();
  std::ostringstream log;
  EXPECT_THROW(cli::cmd_build_collocations(c, log), Error);
  c.treebank = (out / "empty.conllu").string();
  text::write_file(c.treebank, "");
  const auto s = cli::cmd_build_collocations(c, log);
  EXPECT_EQ(s.nouns, 0u);
  EXPECT_EQ(s.collocations, 0u);
  EXPECT_TRUE(load_table((out / "collocations.tsv").string()).empty());
}

TEST(CliTrainLm, ReloadEqualsInMemory) {
  const auto out = scratch("lm");
  const auto ds = out / "three.tsv";
  text::write_file(ds.string(), "好 天气\tpositive\n好 男人\tpositive\n坏 天气\tnegative\n");
  RunConfig c;
  c.dataset = ds.string();
  c.out = out.string();
  std::ostringstream log;
  const auto m = cli::cmd_train_lm(c, log);
  EXPECT_EQ(load_model((out / "lm.tsv").string()), m);
  EXPECT_NEAR(m.sentence_probability({"好", "天气"}), 2.0 / 3.0, 1e-15);
  c.denominator = "sideways";
  EXPECT_THROW(cli::cmd_train_lm(c, log), Error);
}

TEST(CliTrainVictim, SingleClassFails) {
  const auto out = scratch("victim");
  const auto ds = out / "pos.jsonl";
  text::write_file(ds.string(), "{\"text\":\"好\",\"label\":\"positive\"}\n");
  RunConfig c;
  c.dataset = ds.string();
  c.out = out.string();
  std::ostringstream log;
  EXPECT_THROW(cli::cmd_train_victim(c, log), Error);
}

TEST(CliAttack, TenExampleFixtureReport) {
  const World w("attack10");
  std::ostringstream log;
  const auto outcome = cli::cmd_attack(w.attack("run"), log);
  ASSERT_EQ(outcome.examples.size(), 10u);
  ASSERT_TRUE(outcome.report.has_value());

  // Expected accuracies recomputed straight from the victim model.
  const auto victim = load_classifier(w.victim);
  std::size_t origin_correct = 0, attacked_correct = 0;
  for (const auto& e : outcome.examples) {
    origin_correct += victim.predict(e.original_text).label == Polarity::negative;
    attacked_correct += victim.predict(e.final_text).label == Polarity::negative;
  }
  const auto& r = *outcome.report;
  ASSERT_EQ(r.origin.size(), 1u);
  EXPECT_EQ(r.origin[0].victim, "victim");
  EXPECT_DOUBLE_EQ(r.origin[0].accuracy, origin_correct / 10.0);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].method, "IAE");
  EXPECT_EQ(r.rows[0].local_model, "local");
  EXPECT_DOUBLE_EQ(r.rows[0].accuracy, attacked_correct / 10.0);
  EXPECT_TRUE(r.rows[0].mean_wmd.has_value());
  for (const char* f : {"adversarial.jsonl", "run.json", "report.json", "report.txt"})
    EXPECT_TRUE(fs::exists(w.dir / "run" / f)) << f;

  // eval on the saved run reproduces the in-process report.
  RunConfig e;
  e.out = (w.dir / "run").string();
  EXPECT_EQ(cli::cmd_eval(e, log), r);
}

TEST(CliAttack, DeterministicRerun) {
  const World w("determinism");
  std::ostringstream log;
  cli::cmd_attack(w.attack("a"), log);
  cli::cmd_attack(w.attack("b"), log);
  for (const char* f : {"adversarial.jsonl", "run.json", "report.json", "report.txt"})
    EXPECT_EQ(text::read_file((w.dir / "a" / f).string()), text::read_file((w.dir / "b" / f).string())) << f;
}

TEST(CliAttack, BaselineValidation) {
  const World w("baseline");
  std::ostringstream log;
  auto c = w.attack("homonym");
  c.method = "homonym";
  EXPECT_THROW(cli::cmd_attack(c, log), Error);
  c.mapping = w.files.mapping;
  EXPECT_THROW(cli::cmd_attack(c, log), Error);  // no budget
  c.budget = 3;
  const auto outcome = cli::cmd_attack(c, log);
  EXPECT_EQ(outcome.report->rows.at(0).method, "Homonym");
  c.method = "visual";
  EXPECT_THROW(cli::cmd_attack(c, log), Error);  // mapping declares homonym
}

TEST(CliAttack, NoNegativeExamples) {
  const World w("nonneg");
  const auto pos = w.dir / "positive.conllu";
  text::write_file(pos.string(), write_conllu(synthetic::labeled_treebank(5, 1)));
  auto c = w.attack("x");
  c.treebank = pos.string();
  std::ostringstream log;
  try {
    cli::cmd_attack(c, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no negative examples"), std::string::npos);
  }
}
