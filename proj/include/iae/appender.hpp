// Ironic appendix generation and the end-to-end generator: substitute the
// evaluation word, then append a general positive evaluation chosen with the
// local substitute model.

#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "iae/collocation.hpp"
#include "iae/common.hpp"
#include "iae/corpus.hpp"
#include "iae/ngram_lm.hpp"
#include "iae/substitution.hpp"
#include "iae/victims.hpp"
#include "json.hpp"

namespace iae {

struct EvaluationCandidate {
  std::string text;
  std::size_t length = 0;  // in characters

  bool operator==(const EvaluationCandidate&) const = default;
};

inline bool ends_sentence(std::string_view s) {
  static const std::vector<std::string> finals{"。", "！", "？", "…", "～", "!", "?", "."};
  for (const auto& f : finals)
    if (s.size() >= f.size() && s.substr(s.size() - f.size()) == f) return true;
  return false;
}

inline EvaluationCandidate make_candidate(std::string text) {
  if (text.empty()) throw Error("evaluation candidate must be non-empty");
  if (!ends_sentence(text)) throw Error("evaluation candidate lacks sentence-final punctuation: " + text);
  const auto len = text::utf8_length(text);
  return {std::move(text), len};
}

inline constexpr std::string_view kAdjectivePlaceholder = "{ADJ}";

/// Expands template patterns (one per line, "#" comments) over `adjectives`.
/// Order is pattern order then adjective order; duplicates are dropped.
inline std::vector<EvaluationCandidate> expand_templates(std::string_view content,
                                                         const std::vector<std::string>& adjectives) {
  std::vector<std::string> patterns;
  for (const auto& line : text::lines(content)) {
    const auto t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    patterns.emplace_back(t);
  }
  if (patterns.empty()) throw Error("template file has no patterns");

  std::vector<EvaluationCandidate> out;
  std::unordered_set<std::string> seen;
  const auto emit = [&](std::string s) {
    if (seen.insert(s).second) out.push_back(make_candidate(std::move(s)));
  };
  for (const auto& p : patterns) {
    const auto at = p.find(kAdjectivePlaceholder);
    if (at == std::string::npos) {
      emit(p);
      continue;
    }
    for (const auto& adj : adjectives) {
      std::string s = p;
      for (auto pos = s.find(kAdjectivePlaceholder); pos != std::string::npos;
           pos = s.find(kAdjectivePlaceholder, pos + adj.size()))
        s.replace(pos, kAdjectivePlaceholder.size(), adj);
      emit(std::move(s));
    }
  }
  return out;
}

inline std::vector<EvaluationCandidate> generate_candidates(const std::string& template_path,
                                                            const std::vector<std::string>& adjectives) {
  return expand_templates(text::read_file(template_path), adjectives);
}

struct AppendixChoice {
  EvaluationCandidate candidate;
  bool flipped = false;
};

/// First candidate whose appending makes `local` predict positive; otherwise
/// the longest candidate, ties to the lexicographically smallest.
inline AppendixChoice select_appendix(const LocalClassifier& local, const std::string& substituted_text,
                                      const std::vector<EvaluationCandidate>& candidates) {
  if (candidates.empty()) throw Error("select_appendix: empty candidate pool");
  for (const auto& c : candidates)
    if (local.predict(substituted_text + c.text).label == Polarity::positive) return {c, true};
  const EvaluationCandidate* best = &candidates.front();
  for (const auto& c : candidates)
    if (c.length > best->length || (c.length == best->length && c.text < best->text)) best = &c;
  return {*best, false};
}

struct AdversarialExample {
  std::string original_text;
  std::string substituted_text;
  std::string appended_text;
  std::string final_text;
  std::vector<Replacement> replaced;
  bool appendix_flipped_local = false;
  bool used_fallback = false;
  Polarity original_label = Polarity::negative;

  bool operator==(const AdversarialExample&) const = default;
};

inline nlohmann::json to_json(const AdversarialExample& e) {
  nlohmann::json replaced = nlohmann::json::array();
  for (const auto& r : e.replaced)
    replaced.push_back({{"index", r.index}, {"original", r.original}, {"replacement", r.replacement}});
  return {{"original_text", e.original_text},
          {"substituted_text", e.substituted_text},
          {"appended_text", e.appended_text},
          {"final_text", e.final_text},
          {"replaced", replaced},
          {"appendix_flipped_local", e.appendix_flipped_local},
          {"used_fallback", e.used_fallback},
          {"original_label", to_string(e.original_label)}};
}

inline AdversarialExample adversarial_example_from_json(const nlohmann::json& j) {
  try {
    AdversarialExample e;
    e.original_text = j.at("original_text").get<std::string>();
    e.substituted_text = j.at("substituted_text").get<std::string>();
    e.appended_text = j.at("appended_text").get<std::string>();
    e.final_text = j.at("final_text").get<std::string>();
    for (const auto& r : j.at("replaced"))
      e.replaced.push_back({r.at("index").get<int>(), r.at("original").get<std::string>(),
                            r.at("replacement").get<std::string>()});
    e.appendix_flipped_local = j.at("appendix_flipped_local").get<bool>();
    e.used_fallback = j.at("used_fallback").get<bool>();
    const auto label = parse_polarity(j.at("original_label").get<std::string>());
    if (!label) throw ParseError("adversarial example: bad original_label");
    e.original_label = *label;
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("adversarial example: ") + ex.what());
  }
}

inline std::string to_jsonl(const std::vector<AdversarialExample>& xs) {
  std::string out;
  for (const auto& x : xs) out += to_json(x).dump() + '\n';
  return out;
}

inline std::vector<AdversarialExample> parse_examples_jsonl(std::string_view content) {
  std::vector<AdversarialExample> out;
  const auto all = text::lines(content);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (text::trim(all[i]).empty()) continue;
    try {
      out.push_back(adversarial_example_from_json(nlohmann::json::parse(all[i])));
    } catch (const nlohmann::json::parse_error&) {
      throw ParseError("malformed adversarial example at line " + std::to_string(i + 1));
    }
  }
  return out;
}

struct IaeConfig {
  PatternConfig patterns;
  std::string fallback = kDefaultFallbackWord;
  std::string joiner;  // between token forms when rebuilding text
};

/// Runs locate -> substitute -> append on a negative sentence. With no
/// located pair the substitution stage is skipped and `used_fallback` is set.
inline AdversarialExample generate_iae(const AnnotatedSentence& s, const CollocationTable& t, const NGramModel& m,
                                       const LocalClassifier& local,
                                       const std::vector<EvaluationCandidate>& candidates,
                                       const IaeConfig& cfg = {}) {
  if (s.label == Polarity::positive) throw Error("attack applies to negative inputs only");
  AdversarialExample e;
  e.original_label = Polarity::negative;
  e.original_text = s.text(cfg.joiner);

  const auto pairs = locate_pairs(s, cfg.patterns);
  if (pairs.empty()) {
    e.substituted_text = e.original_text;
    e.used_fallback = true;
  } else {
    auto sub = substitute(s, pairs, t, m, cfg.fallback);
    e.substituted_text = text::join(sub.sentence_tokens, cfg.joiner);
    e.replaced = std::move(sub.replaced);
    e.used_fallback = sub.used_fallback;
  }

  if (!candidates.empty()) {
    auto choice = select_appendix(local, e.substituted_text, candidates);
    e.appended_text = std::move(choice.candidate.text);
    e.appendix_flipped_local = choice.flipped;
  }
  e.final_text = e.substituted_text + e.appended_text;
  return e;
}

}  // namespace iae
