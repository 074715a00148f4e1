#include <gtest/gtest.h>

#include <random>

#include "iae/corpus.hpp"

using namespace iae;

namespace {

const char* kWeather =
    "# sent_id = 1\n"
    "1\t天气\t_\tn\t_\t_\t3\tSBV\t_\t_\n"
    "2\t这么\t_\td\t_\t_\t3\tADV\t_\t_\n"
    "3\t好\t_\ta\t_\t_\t0\tHED\t_\t_\n";

}  // namespace

TEST(LabeledDataset, JsonlRecord) {
  const auto ds = parse_labeled_dataset(R"({"text":"菜很好吃","label":"positive"})", DatasetFormat::jsonl);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].text, "菜很好吃");
  EXPECT_EQ(ds[0].label, Polarity::positive);
}

TEST(LabeledDataset, NumericAndCaseInsensitiveLabels) {
  const auto ds = parse_labeled_dataset("{\"text\":\"a\",\"label\":1}\n{\"text\":\"b\",\"label\":0}\n"
                                        "{\"text\":\"c\",\"label\":\"NEGATIVE\"}\n",
                                        DatasetFormat::jsonl);
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds[0].label, Polarity::positive);
  EXPECT_EQ(ds[1].label, Polarity::negative);
  EXPECT_EQ(ds[2].label, Polarity::negative);
}

TEST(LabeledDataset, EmptyFileIsEmpty) {
  EXPECT_TRUE(parse_labeled_dataset("", DatasetFormat::jsonl).empty());
  EXPECT_TRUE(parse_labeled_dataset("", DatasetFormat::tsv).empty());
}

TEST(LabeledDataset, UnknownLabelNamesLine) {
  try {
    parse_labeled_dataset("{\"text\":\"a\",\"label\":\"positive\"}\n{\"text\":\"b\",\"label\":\"neutral\"}\n",
                          DatasetFormat::jsonl);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown label at line 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("neutral"), std::string::npos);
  }
}

TEST(LabeledDataset, MalformedRecordNamesLine) {
  try {
    parse_labeled_dataset("{\"text\":\"a\",\"label\":1}\n{not json\n", DatasetFormat::jsonl);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_labeled_dataset("{\"label\":1}\n", DatasetFormat::jsonl), ParseError);
  EXPECT_THROW(parse_labeled_dataset("{\"text\":\"   \",\"label\":1}\n", DatasetFormat::jsonl), ParseError);
}

TEST(LabeledDataset, Tsv) {
  const auto ds = parse_labeled_dataset("服务 很 好\tpositive\n菜 太 咸\tNegative\n", DatasetFormat::tsv);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds[0].text, "服务 很 好");
  EXPECT_EQ(ds[1].label, Polarity::negative);
  EXPECT_THROW(parse_labeled_dataset("no tab here\n", DatasetFormat::tsv), ParseError);
  EXPECT_THROW(parse_labeled_dataset("x\tmeh\n", DatasetFormat::tsv), ParseError);
}

TEST(Conllu, ThreeTokenBlockFieldByField) {
  const auto ss = parse_conllu(kWeather);
  ASSERT_EQ(ss.size(), 1u);
  const auto& s = ss[0];
  ASSERT_EQ(s.tokens.size(), 3u);
  EXPECT_EQ(s.tokens[0], (Token{1, "天气", "n", 3, "SBV"}));
  EXPECT_EQ(s.tokens[1], (Token{2, "这么", "d", 3, "ADV"}));
  EXPECT_EQ(s.tokens[2], (Token{3, "好", "a", 0, "HED"}));
  EXPECT_FALSE(s.label.has_value());
  EXPECT_EQ(s.text(), "天气这么好");
}

TEST(Conllu, TwoBlocksAndLabelComment) {
  const std::string two = std::string("# label = positive\n") + kWeather + "\n" + kWeather;
  const auto ss = parse_conllu(two);
  ASSERT_EQ(ss.size(), 2u);
  EXPECT_EQ(ss[0].label, Polarity::positive);
  EXPECT_FALSE(ss[1].label.has_value());
}

TEST(Conllu, XposFallbackWhenUposMissing) {
  const auto ss = parse_conllu("1\t好\t_\t_\ta\t_\t0\tHED\t_\t_\n");
  EXPECT_EQ(ss.at(0).tokens.at(0).pos, "a");
  const auto upos = parse_conllu("1\t好\t_\tADJ\ta\t_\t0\tHED\t_\t_\n", {PosColumn::xpos});
  EXPECT_EQ(upos.at(0).tokens.at(0).pos, "a");
}

TEST(Conllu, HeadOutOfRangeIsRejectedWithOrdinal) {
  const std::string bad = std::string(kWeather) + "\n" +
                          "1\t天气\t_\tn\t_\t_\t3\tSBV\t_\t_\n"
                          "2\t这么\t_\td\t_\t_\t9\tADV\t_\t_\n"
                          "3\t好\t_\ta\t_\t_\t0\tHED\t_\t_\n";
  try {
    parse_conllu(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("sentence 2"), std::string::npos) << e.what();
  }
}

TEST(Conllu, StructuralErrors) {
  // non-contiguous ids
  EXPECT_THROW(parse_conllu("1\ta\t_\tn\t_\t_\t0\tHED\t_\t_\n3\tb\t_\tn\t_\t_\t1\tATT\t_\t_\n"), ParseError);
  // no root
  EXPECT_THROW(parse_conllu("1\ta\t_\tn\t_\t_\t2\tATT\t_\t_\n2\tb\t_\tn\t_\t_\t1\tATT\t_\t_\n"), ParseError);
  // multiword range
  EXPECT_THROW(parse_conllu("1-2\tab\t_\t_\t_\t_\t_\t_\t_\t_\n1\ta\t_\tn\t_\t_\t0\tHED\t_\t_\n"), ParseError);
  // wrong column count
  EXPECT_THROW(parse_conllu("1\ta\tn\t0\n"), ParseError);
}

TEST(Conllu, RoundTripProperty) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AnnotatedSentence> ss;
    const int n_sent = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < n_sent; ++k) {
      AnnotatedSentence s;
      const int n = 1 + static_cast<int>(rng() % 7);
      const int root = 1 + static_cast<int>(rng() % n);
      for (int i = 1; i <= n; ++i) {
        int head = 0;
        if (i != root) {
          do head = 1 + static_cast<int>(rng() % n);
          while (head == i);
        }
        s.tokens.push_back({i, "w" + std::to_string(rng() % 20), rng() % 2 ? "n" : "a", head, i == root ? "HED" : "ATT"});
      }
      if (rng() % 2) s.label = rng() % 2 ? Polarity::positive : Polarity::negative;
      ss.push_back(std::move(s));
    }
    EXPECT_EQ(parse_conllu(write_conllu(ss)), ss);
  }
}

TEST(DatasetStats, TwoTexts) {
  const auto st = dataset_stats({{"a b", Polarity::positive}, {"a b c d", Polarity::negative}});
  EXPECT_EQ(st.max_words, 4u);
  EXPECT_EQ(st.min_words, 2u);
  EXPECT_DOUBLE_EQ(st.avg_words, 3.0);
  EXPECT_EQ(st.class_count, 2u);
  EXPECT_EQ(st.positive_count + st.negative_count, 2u);
}

TEST(DatasetStats, SingleWord) {
  const auto st = dataset_stats({{"好", Polarity::positive}});
  EXPECT_EQ(st.max_words, 1u);
  EXPECT_EQ(st.min_words, 1u);
  EXPECT_DOUBLE_EQ(st.avg_words, 1.0);
  EXPECT_EQ(st.class_count, 1u);
}

TEST(DatasetStats, EmptyIsError) { EXPECT_THROW(dataset_stats(std::vector<LabeledText>{}), Error); }

TEST(DatasetStats, AnnotatedCountsTokensNotCharacters) {
  auto ss = parse_conllu(std::string("# label = negative\n") + kWeather);
  const auto st = dataset_stats(ss);
  EXPECT_EQ(st.max_words, 3u);
  EXPECT_EQ(st.negative_count, 1u);
  ss[0].label.reset();
  EXPECT_THROW(dataset_stats(ss), Error);
}
