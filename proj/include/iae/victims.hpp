// Local substitute / victim sentiment classifiers: multinomial naive Bayes and
// logistic regression over word unigrams or character bigrams.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "iae/common.hpp"
#include "iae/corpus.hpp"
#include "json.hpp"

namespace iae {

/// Label plus [p_negative, p_positive].
struct VictimPrediction {
  Polarity label = Polarity::negative;
  std::array<double, 2> scores{0.5, 0.5};

  bool operator==(const VictimPrediction&) const = default;

  double score(Polarity p) const { return scores[static_cast<std::size_t>(p)]; }

  /// Ties go to negative.
  static VictimPrediction from_scores(double p_negative, double p_positive) {
    VictimPrediction v;
    v.scores = {p_negative, p_positive};
    v.label = p_positive > p_negative ? Polarity::positive : Polarity::negative;
    return v;
  }

  static VictimPrediction from_logits(double negative, double positive) {
    const double m = std::max(negative, positive);
    const double en = std::exp(negative - m);
    const double ep = std::exp(positive - m);
    return from_scores(en / (en + ep), ep / (en + ep));
  }
};

enum class ClassifierKind { naive_bayes, logistic_regression };
enum class FeatureMode { word_unigram, char_bigram };

inline const char* to_string(ClassifierKind k) {
  return k == ClassifierKind::naive_bayes ? "naive-bayes" : "logistic-regression";
}
inline const char* to_string(FeatureMode m) {
  return m == FeatureMode::word_unigram ? "word-unigram" : "char-bigram";
}
inline ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "naive-bayes") return ClassifierKind::naive_bayes;
  if (s == "logistic-regression") return ClassifierKind::logistic_regression;
  throw Error("unknown classifier kind \"" + std::string(s) + "\"");
}
inline FeatureMode parse_feature_mode(std::string_view s) {
  if (s == "word-unigram") return FeatureMode::word_unigram;
  if (s == "char-bigram") return FeatureMode::char_bigram;
  throw Error("unknown feature mode \"" + std::string(s) + "\"");
}

struct TrainOptions {
  double smoothing = 1.0;       // naive Bayes additive smoothing
  double learning_rate = 0.5;   // logistic regression
  std::size_t epochs = 300;
  double l2 = 0.0;
  std::uint64_t seed = 42;
};

/// Character bigrams within whitespace chunks; a one-character chunk
/// contributes itself.
inline std::vector<std::string> char_bigrams(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& chunk : text::split_whitespace(s)) {
    const auto chars = text::utf8_chars(chunk);
    if (chars.size() == 1) out.push_back(chars[0]);
    for (std::size_t i = 1; i < chars.size(); ++i) out.push_back(chars[i - 1] + chars[i]);
  }
  return out;
}

/// A trained two-class linear classifier. Class c scores a feature-count
/// vector x as weights[c] . [x, 1]; the pair of scores is softmaxed. For
/// naive Bayes the weights are log-likelihoods and the bias is the log prior.
class LocalClassifier {
 public:
  using SparseFeatures = std::map<std::size_t, double>;

  LocalClassifier() = default;

  /// Builds a classifier from explicit weights; each row holds one weight per
  /// vocabulary word followed by a bias.
  LocalClassifier(ClassifierKind kind, FeatureMode mode, std::vector<std::string> vocabulary,
                  std::array<std::vector<double>, 2> weights, TrainOptions options = {})
      : kind_(kind), mode_(mode), vocabulary_(std::move(vocabulary)), weights_(std::move(weights)),
        options_(options) {
    for (const auto& w : weights_)
      if (w.size() != vocabulary_.size() + 1)
        throw Error("classifier: weight dimension does not match vocabulary size + 1");
    reindex();
  }

  bool operator==(const LocalClassifier& o) const {
    return kind_ == o.kind_ && mode_ == o.mode_ && vocabulary_ == o.vocabulary_ && weights_ == o.weights_;
  }

  ClassifierKind kind() const { return kind_; }
  FeatureMode feature_mode() const { return mode_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::array<std::vector<double>, 2>& weights() const { return weights_; }
  const TrainOptions& options() const { return options_; }

  std::optional<std::size_t> index_of(const std::string& f) const {
    auto it = index_.find(f);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Word-unigram texts are segmented by maximum matching against the
  // vocabulary, so unspaced Chinese text is featurized the same way as its
  // segmented training form.
  SparseFeatures features(std::string_view text) const {
    if (mode_ == FeatureMode::char_bigram) return count(char_bigrams(text));
    return count(text::max_match(
        text, [this](const std::string& w) { return index_.count(w) > 0; }, max_word_chars_));
  }

  SparseFeatures features(const std::vector<std::string>& tokens) const {
    if (mode_ == FeatureMode::char_bigram) return count(char_bigrams(text::join(tokens, "")));
    return count(tokens);
  }

  VictimPrediction predict_features(const SparseFeatures& x) const {
    std::array<double, 2> s{};
    for (std::size_t c = 0; c < 2; ++c) {
      s[c] = weights_[c].back();
      for (const auto& [i, v] : x) s[c] += v * weights_[c][i];
    }
    return VictimPrediction::from_logits(s[0], s[1]);
  }

  VictimPrediction predict(std::string_view text) const { return predict_features(features(text)); }
  VictimPrediction predict(const std::vector<std::string>& tokens) const {
    return predict_features(features(tokens));
  }

  std::vector<VictimPrediction> predict_batch(std::span<const std::string> texts) const {
    std::vector<VictimPrediction> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(predict(t));
    return out;
  }

  nlohmann::json to_json() const {
    return {{"format", "iae-classifier"},
            {"version", 1},
            {"kind", to_string(kind_)},
            {"feature_mode", to_string(mode_)},
            {"vocabulary", vocabulary_},
            {"weights", {weights_[0], weights_[1]}},
            {"hyperparams",
             {{"smoothing", options_.smoothing},
              {"learning_rate", options_.learning_rate},
              {"epochs", options_.epochs},
              {"l2", options_.l2},
              {"seed", options_.seed}}}};
  }

  static LocalClassifier from_json(const nlohmann::json& j) {
    try {
      if (j.at("format") != "iae-classifier") throw Error("classifier: unexpected format tag");
      if (j.at("version") != 1) throw Error("classifier: unsupported version " + j.at("version").dump());
      TrainOptions opt;
      if (j.contains("hyperparams")) {
        const auto& h = j["hyperparams"];
        opt.smoothing = h.value("smoothing", opt.smoothing);
        opt.learning_rate = h.value("learning_rate", opt.learning_rate);
        opt.epochs = h.value("epochs", opt.epochs);
        opt.l2 = h.value("l2", opt.l2);
        opt.seed = h.value("seed", opt.seed);
      }
      const auto& w = j.at("weights");
      if (!w.is_array() || w.size() != 2) throw Error("classifier: expected two weight rows");
      return LocalClassifier(parse_classifier_kind(j.at("kind").get<std::string>()),
                             parse_feature_mode(j.at("feature_mode").get<std::string>()),
                             j.at("vocabulary").get<std::vector<std::string>>(),
                             {w[0].get<std::vector<double>>(), w[1].get<std::vector<double>>()}, opt);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("classifier: ") + e.what());
    }
  }

 private:
  void reindex() {
    index_.clear();
    max_word_chars_ = 0;
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
      if (!index_.emplace(vocabulary_[i], i).second)
        throw Error("classifier: duplicate vocabulary entry \"" + vocabulary_[i] + "\"");
      max_word_chars_ = std::max(max_word_chars_, text::utf8_length(vocabulary_[i]));
    }
  }

  SparseFeatures count(const std::vector<std::string>& raw) const {
    SparseFeatures x;
    for (const auto& f : raw) {
      auto it = index_.find(f);
      if (it != index_.end()) x[it->second] += 1.0;
    }
    return x;
  }

  ClassifierKind kind_ = ClassifierKind::naive_bayes;
  FeatureMode mode_ = FeatureMode::word_unigram;
  std::vector<std::string> vocabulary_;
  std::array<std::vector<double>, 2> weights_{std::vector<double>{0.0}, std::vector<double>{0.0}};
  TrainOptions options_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t max_word_chars_ = 0;
};

inline std::vector<std::string> raw_features(std::string_view text, FeatureMode mode) {
  return mode == FeatureMode::char_bigram ? char_bigrams(text) : text::split_whitespace(text);
}

/// Trains on whitespace-segmented texts (word unigrams) or raw texts
/// (character bigrams). The vocabulary is sorted.
inline LocalClassifier train(const std::vector<LabeledText>& ds, ClassifierKind kind, FeatureMode mode,
                             const TrainOptions& opt = {}) {
  std::size_t n_pos = 0;
  for (const auto& r : ds) n_pos += r.label == Polarity::positive;
  if (n_pos == 0 || n_pos == ds.size())
    throw Error("train: dataset must contain both positive and negative examples");

  std::vector<std::vector<std::string>> docs;
  std::map<std::string, std::size_t> vocab_set;
  for (const auto& r : ds) {
    docs.push_back(raw_features(r.text, mode));
    for (const auto& f : docs.back()) vocab_set.emplace(f, 0);
  }
  std::vector<std::string> vocab;
  for (auto& [w, idx] : vocab_set) {
    idx = vocab.size();
    vocab.push_back(w);
  }
  const std::size_t V = vocab.size();

  std::array<std::vector<double>, 2> weights{std::vector<double>(V + 1, 0.0),
                                             std::vector<double>(V + 1, 0.0)};

  if (kind == ClassifierKind::naive_bayes) {
    if (!(opt.smoothing > 0.0)) throw Error("train: naive-bayes smoothing must be > 0");
    std::array<std::vector<double>, 2> counts{std::vector<double>(V, 0.0), std::vector<double>(V, 0.0)};
    std::array<double, 2> totals{};
    std::array<double, 2> docs_per_class{};
    for (std::size_t d = 0; d < ds.size(); ++d) {
      const auto c = static_cast<std::size_t>(ds[d].label);
      docs_per_class[c] += 1.0;
      for (const auto& f : docs[d]) {
        counts[c][vocab_set.at(f)] += 1.0;
        totals[c] += 1.0;
      }
    }
    for (std::size_t c = 0; c < 2; ++c) {
      const double denom = totals[c] + opt.smoothing * static_cast<double>(V);
      for (std::size_t i = 0; i < V; ++i) weights[c][i] = std::log((counts[c][i] + opt.smoothing) / denom);
      weights[c][V] = std::log(docs_per_class[c] / static_cast<double>(ds.size()));
    }
  } else {
    // Full-batch gradient descent on the logistic loss from zero weights; the
    // negative-class row stays zero.
    std::vector<std::map<std::size_t, double>> xs(ds.size());
    for (std::size_t d = 0; d < ds.size(); ++d)
      for (const auto& f : docs[d]) xs[d][vocab_set.at(f)] += 1.0;
    auto& w = weights[1];
    std::vector<double> grad(V + 1);
    const double n = static_cast<double>(ds.size());
    for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t d = 0; d < ds.size(); ++d) {
        double z = w[V];
        for (const auto& [i, v] : xs[d]) z += v * w[i];
        const double p = 1.0 / (1.0 + std::exp(-z));
        const double err = p - (ds[d].label == Polarity::positive ? 1.0 : 0.0);
        for (const auto& [i, v] : xs[d]) grad[i] += err * v;
        grad[V] += err;
      }
      for (std::size_t i = 0; i <= V; ++i) {
        const double reg = i < V ? opt.l2 * w[i] : 0.0;
        w[i] -= opt.learning_rate * (grad[i] / n + reg);
      }
    }
  }
  return LocalClassifier(kind, mode, std::move(vocab), std::move(weights), opt);
}

inline VictimPrediction predict(const LocalClassifier& c, std::string_view text) { return c.predict(text); }

inline void save_classifier(const LocalClassifier& c, const std::string& path) {
  text::write_file(path, c.to_json().dump(1) + "\n");
}

inline LocalClassifier load_classifier(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("classifier " + path + ": " + e.what());
  }
  return LocalClassifier::from_json(j);
}

}  // namespace iae
