// Character-substitution baseline attacks on important words, driven by a
// visual-similarity or homonym character table.

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "iae/common.hpp"
#include "iae/substitution.hpp"
#include "iae/victims.hpp"

namespace iae {

enum class MappingKind { visual, homonym };

inline const char* to_string(MappingKind k) { return k == MappingKind::visual ? "visual" : "homonym"; }

inline MappingKind parse_mapping_kind(std::string_view s) {
  if (s == "visual") return MappingKind::visual;
  if (s == "homonym") return MappingKind::homonym;
  throw Error("unknown mapping kind \"" + std::string(s) + "\"");
}

struct CharMapping {
  MappingKind kind = MappingKind::homonym;
  std::map<std::string, std::vector<std::string>> alternatives;

  void validate() const {
    for (const auto& [ch, alts] : alternatives) {
      if (alts.empty()) throw Error("char mapping: no replacement for \"" + ch + "\"");
      for (const auto& a : alts)
        if (a == ch) throw Error("char mapping: \"" + ch + "\" maps to itself");
    }
  }

  const std::string* first(const std::string& ch) const {
    auto it = alternatives.find(ch);
    return it == alternatives.end() ? nullptr : &it->second.front();
  }
};

/// Mapping TSV: a "kind<TAB>visual|homonym" header line, then
/// "char<TAB>alt1,alt2,..." rows.
inline CharMapping parse_mapping(std::string_view content) {
  CharMapping m;
  bool have_kind = false;
  const auto all = text::lines(content);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& line = all[i];
    if (text::trim(line).empty() || line[0] == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 2) throw ParseError("mapping line " + std::to_string(i + 1) + ": expected 2 columns");
    if (!have_kind) {
      if (cols[0] != "kind") throw ParseError("mapping: first line must declare kind");
      m.kind = parse_mapping_kind(cols[1]);
      have_kind = true;
      continue;
    }
    if (text::utf8_length(cols[0]) != 1)
      throw ParseError("mapping line " + std::to_string(i + 1) + ": key must be one character");
    std::vector<std::string> alts;
    for (auto& a : text::split(cols[1], ',')) {
      auto t = std::string(text::trim(a));
      if (!t.empty()) alts.push_back(std::move(t));
    }
    if (!m.alternatives.emplace(cols[0], std::move(alts)).second)
      throw ParseError("mapping line " + std::to_string(i + 1) + ": duplicate key \"" + cols[0] + "\"");
  }
  if (!have_kind) throw ParseError("mapping: missing kind header");
  m.validate();
  return m;
}

inline CharMapping load_mapping(const std::string& path) { return parse_mapping(text::read_file(path)); }

struct WordImportance {
  std::size_t index = 0;  // 0-based token position
  double importance = 0.0;

  bool operator==(const WordImportance&) const = default;
};

/// Leave-one-out drop in the true-label score, most important first.
inline std::vector<WordImportance> word_importance(const LocalClassifier& local,
                                                   const std::vector<std::string>& tokens, Polarity true_label) {
  if (tokens.empty()) throw Error("word_importance: empty token sequence");
  const double full = local.predict(tokens).score(true_label);
  std::vector<WordImportance> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto reduced = tokens;
    reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back({i, full - local.predict(reduced).score(true_label)});
  }
  std::stable_sort(out.begin(), out.end(), [](const WordImportance& a, const WordImportance& b) {
    return a.importance > b.importance;
  });
  return out;
}

struct BaselineResult {
  std::vector<std::string> tokens;
  std::vector<Replacement> replaced;  // 1-based token indices
  bool flipped_local = false;
};

/// Perturbs words in importance order, replacing every mappable character
/// with its first alternative, until the local model leaves `true_label` or
/// `budget` words have been changed.
inline BaselineResult mapped_substitution_attack(const std::vector<std::string>& tokens, const CharMapping& mapping,
                                                 const std::vector<WordImportance>& importance, std::size_t budget,
                                                 const LocalClassifier& local, Polarity true_label) {
  if (budget < 1) throw Error("mapped_substitution_attack: budget must be >= 1");
  BaselineResult r;
  r.tokens = tokens;
  for (const auto& wi : importance) {
    if (r.replaced.size() >= budget) break;
    if (wi.index >= tokens.size()) throw Error("mapped_substitution_attack: importance index out of range");
    std::string perturbed;
    bool changed = false;
    for (const auto& ch : text::utf8_chars(tokens[wi.index])) {
      if (const auto* alt = mapping.first(ch)) {
        perturbed += *alt;
        changed = true;
      } else {
        perturbed += ch;
      }
    }
    if (!changed) continue;
    r.tokens[wi.index] = perturbed;
    r.replaced.push_back({static_cast<int>(wi.index) + 1, tokens[wi.index], perturbed});
    if (local.predict(r.tokens).label != true_label) {
      r.flipped_local = true;
      break;
    }
  }
  return r;
}

}  // namespace iae
