// Additively smoothed bigram sentence model used to rank substitutions.

#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iae/common.hpp"

namespace iae {

/// Which count normalizes a bigram factor: `as_written` divides by the count
/// of the current word w_i, `conventional` by the previous word w_{i-1}.
enum class DenominatorMode { as_written, conventional };

inline const char* to_string(DenominatorMode m) {
  return m == DenominatorMode::as_written ? "as-written" : "conventional";
}

inline DenominatorMode parse_denominator_mode(std::string_view s) {
  if (s == "as-written") return DenominatorMode::as_written;
  if (s == "conventional") return DenominatorMode::conventional;
  throw Error("unknown denominator mode \"" + std::string(s) + "\"");
}

class NGramModel {
 public:
  using Bigram = std::pair<std::string, std::string>;

  NGramModel() = default;
  NGramModel(double delta, DenominatorMode mode) : delta_(delta), mode_(mode) {
    if (!(delta > 0.0)) throw Error("ngram: smoothing delta must be > 0");
  }

  bool operator==(const NGramModel&) const = default;

  double delta() const { return delta_; }
  DenominatorMode mode() const { return mode_; }
  void set_mode(DenominatorMode m) { mode_ = m; }

  const std::map<std::string, std::size_t>& unigrams() const { return unigrams_; }
  const std::map<Bigram, std::size_t>& bigrams() const { return bigrams_; }

  std::size_t count(const std::string& w) const {
    auto it = unigrams_.find(w);
    return it == unigrams_.end() ? 0 : it->second;
  }

  std::size_t count(const std::string& prev, const std::string& w) const {
    auto it = bigrams_.find({prev, w});
    return it == bigrams_.end() ? 0 : it->second;
  }

  void observe(const std::vector<std::string>& sentence) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      ++unigrams_[sentence[i]];
      if (i > 0) ++bigrams_[{sentence[i - 1], sentence[i]}];
    }
  }

  void set_unigram(const std::string& w, std::size_t n) { unigrams_[w] = n; }
  void set_bigram(const std::string& a, const std::string& b, std::size_t n) { bigrams_[{a, b}] = n; }

  double log_probability(const std::vector<std::string>& tokens) const {
    double lp = 0.0;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const double num = static_cast<double>(count(tokens[i - 1], tokens[i])) + delta_;
      const auto& denom_word = mode_ == DenominatorMode::as_written ? tokens[i] : tokens[i - 1];
      const double den = static_cast<double>(count(denom_word)) + delta_;
      lp += std::log(num) - std::log(den);
    }
    return lp;
  }

  /// Product of smoothed bigram factors; 1 for fewer than two tokens.
  double sentence_probability(const std::vector<std::string>& tokens) const {
    return std::exp(log_probability(tokens));
  }

 private:
  double delta_ = 1.0;
  DenominatorMode mode_ = DenominatorMode::as_written;
  std::map<std::string, std::size_t> unigrams_;
  std::map<Bigram, std::size_t> bigrams_;
};

inline NGramModel train_bigram(const std::vector<std::vector<std::string>>& ds, double delta = 1.0,
                               DenominatorMode mode = DenominatorMode::as_written) {
  NGramModel m(delta, mode);
  for (const auto& s : ds) m.observe(s);
  return m;
}

inline double sentence_probability(const NGramModel& m, const std::vector<std::string>& tokens) {
  return m.sentence_probability(tokens);
}

// Persistence: "delta\t<d>\tmode\t<m>" header, then "[unigrams]" and
// "[bigrams]" sections of sorted tab-separated rows.

inline std::string serialize_model(const NGramModel& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", m.delta());
  std::string out = std::string("delta\t") + buf + "\tmode\t" + to_string(m.mode()) + "\n[unigrams]\n";
  for (const auto& [w, n] : m.unigrams()) out += w + '\t' + std::to_string(n) + '\n';
  out += "[bigrams]\n";
  for (const auto& [bg, n] : m.bigrams())
    out += bg.first + '\t' + bg.second + '\t' + std::to_string(n) + '\n';
  return out;
}

inline NGramModel parse_model(std::string_view content) {
  const auto all = text::lines(content);
  if (all.empty()) throw ParseError("lm: empty model file");
  const auto head = text::split(all[0], '\t');
  if (head.size() != 4 || head[0] != "delta" || head[2] != "mode")
    throw ParseError("lm: bad header line");
  double delta = 0.0;
  try {
    delta = std::stod(head[1]);
  } catch (const std::exception&) {
    throw ParseError("lm: bad delta \"" + head[1] + "\"");
  }
  NGramModel m(delta, parse_denominator_mode(head[3]));
  enum { none, uni, bi } section = none;
  for (std::size_t i = 1; i < all.size(); ++i) {
    const auto& line = all[i];
    if (line.empty()) continue;
    if (line == "[unigrams]") { section = uni; continue; }
    if (line == "[bigrams]") { section = bi; continue; }
    const auto cols = text::split(line, '\t');
    const auto bad = [&] { return ParseError("lm: malformed line " + std::to_string(i + 1)); };
    try {
      if (section == uni && cols.size() == 2) {
        m.set_unigram(cols[0], std::stoull(cols[1]));
      } else if (section == bi && cols.size() == 3) {
        m.set_bigram(cols[0], cols[1], std::stoull(cols[2]));
      } else {
        throw bad();
      }
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  return m;
}

inline void save_model(const NGramModel& m, const std::string& path) {
  text::write_file(path, serialize_model(m));
}

inline NGramModel load_model(const std::string& path) { return parse_model(text::read_file(path)); }

}  // namespace iae
