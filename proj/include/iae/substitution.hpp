// Evaluation-word substitution: locate (central noun, evaluation adjective)
// pairs, retrieve opposite-polarity collocates and keep the candidate sentence
// the bigram model scores highest.

#pragma once

#include <string>
#include <vector>

#include "iae/collocation.hpp"
#include "iae/common.hpp"
#include "iae/corpus.hpp"
#include "iae/ngram_lm.hpp"

namespace iae {

inline constexpr const char* kDefaultFallbackWord = "不错";

struct EvaluationPair {
  int central_index = 0;
  int evaluation_index = 0;
  DependencyPattern pattern = DependencyPattern::subject_verb;

  bool operator==(const EvaluationPair&) const = default;
};

struct Replacement {
  int index = 0;
  std::string original;
  std::string replacement;

  bool operator==(const Replacement&) const = default;
};

struct SubstitutionResult {
  std::vector<std::string> sentence_tokens;
  std::vector<Replacement> replaced;
  std::vector<EvaluationPair> skipped;
  double score = 1.0;
  bool used_fallback = false;
};

struct Alternatives {
  std::vector<std::string> words;
  bool used_fallback = false;
};

inline std::vector<EvaluationPair> locate_pairs(const AnnotatedSentence& s, const PatternConfig& cfg) {
  std::vector<EvaluationPair> out;
  for (const auto& m : match_patterns(s, cfg)) out.push_back({m.noun_index, m.adjective_index, m.pattern});
  return out;
}

/// Adjectives collocating with `central` at `target` polarity, sorted. Falls
/// back to the general evaluation word when there are none.
inline Alternatives retrieve_alternatives(const CollocationTable& t, const std::string& central,
                                          Polarity target, const std::string& fallback = kDefaultFallbackWord) {
  if (fallback.empty()) throw Error("retrieve_alternatives: fallback word must be non-empty");
  Alternatives out;
  if (const auto* adjs = t.collocates(central)) {
    const auto want = as_collocation_polarity(target);
    for (const auto& [adj, c] : *adjs)
      if (c.polarity == want) out.words.push_back(adj);
  }
  if (out.words.empty()) {
    out.words.push_back(fallback);
    out.used_fallback = true;
  }
  return out;
}

/// True when the pair's evaluation should be flipped: its collocation is
/// negative in the table, or the pair is absent from it.
inline bool needs_substitution(const CollocationTable& t, const std::string& central,
                               const std::string& evaluation) {
  const auto* c = t.find(central, evaluation);
  return c == nullptr || c->polarity == CollocationPolarity::negative;
}

/// Substitutes each eligible pair greedily in the given (noun) order. For a
/// pair, every positive alternative is scored in the context of the current
/// sentence; the highest probability wins, ties going to the smaller word.
inline SubstitutionResult substitute(const AnnotatedSentence& s, const std::vector<EvaluationPair>& pairs,
                                     const CollocationTable& t, const NGramModel& m,
                                     const std::string& fallback = kDefaultFallbackWord) {
  if (s.label == Polarity::positive) throw Error("attack applies to negative inputs only");
  if (pairs.empty()) throw Error("no evaluation pair");

  SubstitutionResult r;
  r.sentence_tokens = s.forms();
  const int n = static_cast<int>(s.tokens.size());
  std::vector<bool> touched(static_cast<std::size_t>(n) + 1, false);

  for (const auto& p : pairs) {
    if (p.central_index < 1 || p.central_index > n || p.evaluation_index < 1 || p.evaluation_index > n ||
        p.central_index == p.evaluation_index)
      throw Error("evaluation pair out of sentence bounds");
    const auto& central = s.at(p.central_index).form;
    const auto& evaluation = s.at(p.evaluation_index).form;
    if (touched[static_cast<std::size_t>(p.evaluation_index)] || !needs_substitution(t, central, evaluation)) {
      r.skipped.push_back(p);
      continue;
    }
    const auto alts = retrieve_alternatives(t, central, Polarity::positive, fallback);
    r.used_fallback = r.used_fallback || alts.used_fallback;

    auto& slot = r.sentence_tokens[static_cast<std::size_t>(p.evaluation_index - 1)];
    const std::string* best = nullptr;
    double best_lp = 0.0;
    for (const auto& w : alts.words) {
      slot = w;
      const double lp = m.log_probability(r.sentence_tokens);
      if (best == nullptr || lp > best_lp || (lp == best_lp && w < *best)) {
        best = &w;
        best_lp = lp;
      }
    }
    slot = *best;
    touched[static_cast<std::size_t>(p.evaluation_index)] = true;
    r.replaced.push_back({p.evaluation_index, evaluation, *best});
  }
  r.score = m.sentence_probability(r.sentence_tokens);
  return r;
}

}  // namespace iae
