// Deterministic synthetic review world for integration tests. Sentiment is
// carried only by evaluation adjectives (plus an optional general-praise or
// complaint tail); filler clauses are drawn identically for both classes.
//
// Geometry of the embedding table: every corpus and template word lies in a
// small cube around the origin (coordinates in [-0.12, 0.12], so any two are
// at most 0.48 apart), while every homonym replacement character sits near
// (10, 0, 0, 0). Any rewrite that stays inside the vocabulary therefore has
// WMD <= 0.48, and any rewrite that introduces replacement characters pays at
// least (their mass) * 9.5.

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "iae/baselines.hpp"
#include "iae/corpus.hpp"
#include "iae/metrics.hpp"

namespace synthetic {

inline const std::vector<std::string> kNouns{"男人", "服务员", "老板", "菜", "汤", "米饭", "环境", "房间"};
inline const std::vector<std::string> kPositive{"优雅", "热情", "可口", "干净", "实惠", "新鲜", "美味", "舒适"};
inline const std::vector<std::string> kNegative{"恶心", "冷漠", "难吃", "肮脏", "昂贵", "糟糕", "难闻", "吵闹"};
inline const std::vector<std::vector<std::string>> kFillers{
    {"我们", "昨天", "去", "了"}, {"和", "朋友", "一起", "吃饭"}, {"周末", "人", "特别", "多"},
    {"等", "了", "半个小时"},     {"下次", "还会", "来"},         {"就", "在", "地铁站", "旁边"}};
inline const std::vector<std::string> kPraise{"值得称赞", "棒"};
inline const std::vector<std::pair<std::string, std::string>> kHomonyms{
    {"恶", "饿"}, {"心", "芯"}, {"冷", "棱"}, {"漠", "寞"}, {"难", "南"}, {"吃", "痴"}, {"肮", "盎"},
    {"脏", "葬"}, {"昂", "卬"}, {"贵", "桂"}, {"糟", "遭"}, {"糕", "羔"}, {"闻", "纹"}, {"吵", "炒"},
    {"闹", "挠"}};

inline const std::vector<std::string>& adjectives_of(bool positive) { return positive ? kPositive : kNegative; }

/// Each noun collocates with two adjectives of each polarity.
inline std::string adjective_for(std::size_t noun, bool positive, std::size_t pick) {
  return adjectives_of(positive)[(noun + pick) % 8];
}

struct Builder {
  iae::AnnotatedSentence s;
  void add(const std::string& form, const std::string& pos, int head, const std::string& rel) {
    s.tokens.push_back({static_cast<int>(s.tokens.size()) + 1, form, pos, head, rel});
  }
};

/// "那个 N 真 A ，<fillers> 。<tail>" (subject-verb) or "A 的 N ，<fillers> 。<tail>"
/// (attributive).
inline iae::AnnotatedSentence make_sentence(const std::string& noun, const std::string& adj, bool attributive,
                                            const std::vector<std::vector<std::string>>& fillers,
                                            const std::vector<std::string>& tail, iae::Polarity label) {
  Builder b;
  int root = 0;
  if (attributive) {
    b.add(adj, "a", 3, "ATT");
    b.add("的", "u", 1, "RAD");
    b.add(noun, "n", 0, "HED");
    root = 3;
  } else {
    b.add("那个", "r", 2, "ATT");
    b.add(noun, "n", 4, "SBV");
    b.add("真", "d", 4, "ADV");
    b.add(adj, "a", 0, "HED");
    root = 4;
  }
  for (const auto& clause : fillers) {
    b.add("，", "wp", root, "WP");
    for (const auto& w : clause) b.add(w, "v", root, "COO");
  }
  b.add("。", "wp", root, "WP");
  for (const auto& w : tail) b.add(w, w == "。" ? "wp" : "v", root, "COO");
  b.s.label = label;
  return b.s;
}

inline iae::AnnotatedSentence random_sentence(std::mt19937& rng, bool positive, bool with_tails) {
  std::uniform_int_distribution<std::size_t> noun_d(0, kNouns.size() - 1), pick_d(0, 1),
      filler_d(0, kFillers.size() - 1), count_d(1, 2);
  std::bernoulli_distribution coin(0.5), tail_coin(0.3);
  const auto noun = noun_d(rng);
  const auto adj = adjective_for(noun, positive, pick_d(rng));
  const bool attributive = coin(rng);
  std::vector<std::vector<std::string>> fillers;
  for (std::size_t k = count_d(rng); k > 0; --k) fillers.push_back(kFillers[filler_d(rng)]);
  std::vector<std::string> tail;
  if (with_tails && tail_coin(rng)) {
    if (positive) tail = {"真是", kPraise[pick_d(rng)], "啊", "。"};
    else tail = {"真是", "让人", "失望", "。"};
  }
  return make_sentence(kNouns[noun], adj, attributive, fillers, tail,
                       positive ? iae::Polarity::positive : iae::Polarity::negative);
}

inline std::vector<iae::AnnotatedSentence> labeled_treebank(unsigned seed, std::size_t n) {
  std::mt19937 rng(seed);
  std::vector<iae::AnnotatedSentence> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_sentence(rng, i % 2 == 0, true));
  return out;
}

/// Whitespace-segmented labeled texts for classifier training.
inline std::vector<iae::LabeledText> labeled_texts(unsigned seed, std::size_t n) {
  std::vector<iae::LabeledText> out;
  for (const auto& s : labeled_treebank(seed, n)) out.push_back({s.text(" "), *s.label});
  return out;
}

/// Straightforward negative test sentences (no tails).
inline std::vector<iae::AnnotatedSentence> negative_test_set(unsigned seed, std::size_t n) {
  std::mt19937 rng(seed);
  std::vector<iae::AnnotatedSentence> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_sentence(rng, false, false));
  return out;
}

inline std::string homonym_mapping_tsv() {
  std::string out = "kind\thomonym\n";
  for (const auto& [from, to] : kHomonyms) out += from + "\t" + to + "\n";
  return out;
}

inline std::vector<std::string> vocabulary() {
  std::vector<std::string> v{"那个", "真", "的", "，", "。", "真是", "啊", "让人", "失望"};
  for (const auto* list : {&kNouns, &kPositive, &kNegative, &kPraise}) v.insert(v.end(), list->begin(), list->end());
  for (const auto& clause : kFillers) v.insert(v.end(), clause.begin(), clause.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline std::string embeddings_text(unsigned seed = 7) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> near(-0.12, 0.12);
  std::string out;
  const auto line = [&](const std::string& w, double offset) {
    out += w;
    for (int k = 0; k < 4; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.6f", (k == 0 ? offset : 0.0) + near(rng));
      out += buf;
    }
    out += '\n';
  };
  const auto vocab = vocabulary();
  std::size_t rows = vocab.size() + kHomonyms.size();
  out = std::to_string(rows) + " 4\n";
  for (const auto& w : vocab) line(w, 0.0);
  for (const auto& [from, to] : kHomonyms) line(to, 10.0);
  return out;
}

inline const char* kTemplates = "真是{ADJ}啊。\n好极了。\n";

struct Files {
  std::string treebank, test_set, local_train, victim_train, templates, mapping, embeddings;
};

/// Writes the full synthetic world under `dir`.
inline Files write_world(const std::filesystem::path& dir, std::size_t test_size = 200) {
  std::filesystem::create_directories(dir);
  Files f;
  f.treebank = (dir / "treebank.conllu").string();
  f.test_set = (dir / "test.conllu").string();
  f.local_train = (dir / "local_train.jsonl").string();
  f.victim_train = (dir / "victim_train.jsonl").string();
  f.templates = (dir / "templates.txt").string();
  f.mapping = (dir / "homonym.tsv").string();
  f.embeddings = (dir / "embeddings.txt").string();
  iae::text::write_file(f.treebank, iae::write_conllu(labeled_treebank(1, 400)));
  iae::text::write_file(f.test_set, iae::write_conllu(negative_test_set(4, test_size)));
  const auto jsonl = [](const std::vector<iae::LabeledText>& xs) {
    std::string out;
    for (const auto& x : xs) out += nlohmann::json{{"text", x.text}, {"label", iae::to_string(x.label)}}.dump() + "\n";
    return out;
  };
  iae::text::write_file(f.local_train, jsonl(labeled_texts(2, 400)));
  iae::text::write_file(f.victim_train, jsonl(labeled_texts(3, 400)));
  iae::text::write_file(f.templates, kTemplates);
  iae::text::write_file(f.mapping, homonym_mapping_tsv());
  iae::text::write_file(f.embeddings, embeddings_text());
  return f;
}

}  // namespace synthetic
