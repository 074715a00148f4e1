// Noun-adjective collocation mining over dependency-annotated sentences and
// the corpus-frequency polarity rule used to label each collocation.

#pragma once

#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iae/common.hpp"
#include "iae/corpus.hpp"

namespace iae {

enum class DependencyPattern { subject_verb, attributive };

inline const char* to_string(DependencyPattern p) {
  return p == DependencyPattern::subject_verb ? "subject-verb" : "attributive";
}

inline DependencyPattern parse_pattern(std::string_view s) {
  if (s == "subject-verb") return DependencyPattern::subject_verb;
  if (s == "attributive") return DependencyPattern::attributive;
  throw ParseError("unknown dependency pattern \"" + std::string(s) + "\"");
}

/// Polarity of a collocation; `unresolved` marks an unbroken tie.
enum class CollocationPolarity { positive, negative, unresolved };

inline const char* to_string(CollocationPolarity p) {
  switch (p) {
    case CollocationPolarity::positive: return "positive";
    case CollocationPolarity::negative: return "negative";
    case CollocationPolarity::unresolved: return "unresolved";
  }
  return "unresolved";
}

inline CollocationPolarity parse_collocation_polarity(std::string_view s) {
  if (s == "positive") return CollocationPolarity::positive;
  if (s == "negative") return CollocationPolarity::negative;
  if (s == "unresolved") return CollocationPolarity::unresolved;
  throw ParseError("unknown polarity \"" + std::string(s) + "\"");
}

inline CollocationPolarity as_collocation_polarity(Polarity p) {
  return p == Polarity::positive ? CollocationPolarity::positive : CollocationPolarity::negative;
}

/// Tag and relation sets that define the two collocation patterns. The
/// defaults follow the HIT-LTP tagset.
struct PatternConfig {
  std::set<std::string> noun_tags{"n", "nh", "ns", "ni", "nz"};
  std::set<std::string> adjective_tags{"a"};
  std::set<std::string> subject_verb_relations{"SBV"};
  std::set<std::string> attributive_relations{"ATT"};

  void validate() const {
    if (noun_tags.empty() || adjective_tags.empty() || subject_verb_relations.empty() ||
        attributive_relations.empty())
      throw Error("pattern config: tag and relation sets must be non-empty");
    for (const auto& r : subject_verb_relations)
      if (attributive_relations.count(r))
        throw Error("pattern config: relation \"" + r + "\" is both subject-verb and attributive");
  }
};

/// A located (noun, adjective) dependency, by token index.
struct PatternMatch {
  int noun_index = 0;
  int adjective_index = 0;
  DependencyPattern pattern = DependencyPattern::subject_verb;
};

/// Every noun-adjective dependency in `s`, ordered by noun position then
/// adjective position.
inline std::vector<PatternMatch> match_patterns(const AnnotatedSentence& s, const PatternConfig& cfg) {
  std::vector<PatternMatch> out;
  for (const auto& t : s.tokens) {
    if (t.head == 0) continue;
    const Token& h = s.at(t.head);
    if (cfg.noun_tags.count(t.pos) && cfg.adjective_tags.count(h.pos) &&
        cfg.subject_verb_relations.count(t.deprel)) {
      out.push_back({t.index, h.index, DependencyPattern::subject_verb});
    } else if (cfg.adjective_tags.count(t.pos) && cfg.noun_tags.count(h.pos) &&
               cfg.attributive_relations.count(t.deprel)) {
      out.push_back({h.index, t.index, DependencyPattern::attributive});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PatternMatch& a, const PatternMatch& b) {
    return std::pair(a.noun_index, a.adjective_index) < std::pair(b.noun_index, b.adjective_index);
  });
  return out;
}

struct ExtractedCollocation {
  std::string noun;
  std::string adjective;
  DependencyPattern pattern;

  bool operator==(const ExtractedCollocation&) const = default;
};

inline std::vector<ExtractedCollocation> extract_collocations(const AnnotatedSentence& s,
                                                              const PatternConfig& cfg) {
  std::vector<ExtractedCollocation> out;
  for (const auto& m : match_patterns(s, cfg))
    out.push_back({s.at(m.noun_index).form, s.at(m.adjective_index).form, m.pattern});
  return out;
}

/// Polarity from per-polarity sentence frequencies: positive when the
/// positive/negative ratio exceeds 1, negative below 1, and the override (or
/// unresolved) at exactly 1. A zero negative count is an infinite ratio.
inline CollocationPolarity infer_polarity(std::size_t freq_pos, std::size_t freq_neg,
                                          std::optional<Polarity> override_polarity = std::nullopt) {
  if (freq_pos == 0 && freq_neg == 0) throw Error("infer_polarity: collocation was never observed");
  if (freq_pos > freq_neg) return CollocationPolarity::positive;
  if (freq_pos < freq_neg) return CollocationPolarity::negative;
  return override_polarity ? as_collocation_polarity(*override_polarity)
                           : CollocationPolarity::unresolved;
}

struct Collocation {
  std::string noun;
  std::string adjective;
  DependencyPattern pattern = DependencyPattern::subject_verb;
  std::size_t freq_pos = 0;
  std::size_t freq_neg = 0;
  CollocationPolarity polarity = CollocationPolarity::unresolved;

  bool operator==(const Collocation&) const = default;
};

using CollocationKey = std::pair<std::string, std::string>;  // (noun, adjective)
using OverrideMap = std::map<CollocationKey, Polarity>;

class CollocationTable {
 public:
  using AdjectiveMap = std::map<std::string, Collocation>;

  bool operator==(const CollocationTable&) const = default;

  const std::map<std::string, AdjectiveMap>& entries() const { return entries_; }
  const OverrideMap& overrides() const { return overrides_; }

  bool empty() const { return entries_.empty(); }

  std::size_t noun_count() const { return entries_.size(); }

  std::size_t collocation_count() const {
    std::size_t n = 0;
    for (const auto& [noun, adjs] : entries_) n += adjs.size();
    return n;
  }

  const Collocation* find(const std::string& noun, const std::string& adjective) const {
    auto it = entries_.find(noun);
    if (it == entries_.end()) return nullptr;
    auto jt = it->second.find(adjective);
    return jt == it->second.end() ? nullptr : &jt->second;
  }

  const AdjectiveMap* collocates(const std::string& noun) const {
    auto it = entries_.find(noun);
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Adds `pos`/`neg` occurrences. The pattern of a new entry is kept on
  /// later additions. Polarities are stale until `resolve()`.
  void add(const std::string& noun, const std::string& adjective, DependencyPattern pattern,
           std::size_t pos, std::size_t neg) {
    auto& adjs = entries_[noun];
    auto [it, inserted] = adjs.try_emplace(adjective);
    if (inserted) {
      it->second.noun = noun;
      it->second.adjective = adjective;
      it->second.pattern = pattern;
    }
    it->second.freq_pos += pos;
    it->second.freq_neg += neg;
  }

  /// Inserts a fully specified entry; duplicates are rejected.
  void insert(Collocation c) {
    auto& adjs = entries_[c.noun];
    if (adjs.count(c.adjective))
      throw Error("duplicate collocation (" + c.noun + ", " + c.adjective + ")");
    adjs.emplace(c.adjective, std::move(c));
  }

  void set_overrides(OverrideMap overrides) { overrides_ = std::move(overrides); }

  void resolve() {
    for (auto& [noun, adjs] : entries_) {
      for (auto& [adj, c] : adjs) {
        auto o = overrides_.find({noun, adj});
        c.polarity = infer_polarity(c.freq_pos, c.freq_neg,
                                    o == overrides_.end() ? std::nullopt
                                                          : std::optional<Polarity>(o->second));
      }
    }
  }

  /// Sums the counts of `other` into this table. Patterns already present
  /// here win.
  void merge(const CollocationTable& other) {
    for (const auto& [noun, adjs] : other.entries_)
      for (const auto& [adj, c] : adjs) add(noun, adj, c.pattern, c.freq_pos, c.freq_neg);
    for (const auto& [k, v] : other.overrides_) overrides_.emplace(k, v);
    resolve();
  }

 private:
  std::map<std::string, AdjectiveMap> entries_;
  OverrideMap overrides_;
};

namespace detail {

inline CollocationTable count_collocations(const std::vector<AnnotatedSentence>& ds, std::size_t begin,
                                           std::size_t end, const PatternConfig& cfg) {
  CollocationTable t;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& s = ds[i];
    if (!s.label) throw Error("build_table: sentence " + std::to_string(i + 1) + " has no label");
    const bool pos = *s.label == Polarity::positive;
    for (const auto& c : extract_collocations(s, cfg))
      t.add(c.noun, c.adjective, c.pattern, pos ? 1 : 0, pos ? 0 : 1);
  }
  return t;
}

}  // namespace detail

/// Counts collocations per sentence label and resolves each polarity.
/// `shards` > 1 counts contiguous partitions concurrently; the result does
/// not depend on the shard count.
inline CollocationTable build_table(const std::vector<AnnotatedSentence>& ds, const PatternConfig& cfg,
                                    const OverrideMap& overrides = {}, std::size_t shards = 1) {
  cfg.validate();
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!ds[i].label) throw Error("build_table: sentence " + std::to_string(i + 1) + " has no label");

  CollocationTable table;
  table.set_overrides(overrides);
  shards = std::max<std::size_t>(1, std::min(shards, ds.size()));
  if (shards <= 1) {
    table.merge(detail::count_collocations(ds, 0, ds.size(), cfg));
  } else {
    std::vector<std::future<CollocationTable>> parts;
    const std::size_t step = (ds.size() + shards - 1) / shards;
    for (std::size_t b = 0; b < ds.size(); b += step) {
      const std::size_t e = std::min(ds.size(), b + step);
      parts.push_back(std::async(std::launch::async, [&ds, &cfg, b, e] {
        return detail::count_collocations(ds, b, e, cfg);
      }));
    }
    for (auto& p : parts) table.merge(p.get());
  }
  table.resolve();
  return table;
}

inline constexpr std::string_view kTableHeader = "noun\tadjective\tpattern\tfreq_pos\tfreq_neg\tpolarity";

/// Sorted TSV. Overrides follow the rows as "# override" comment lines so a
/// reload reproduces the table exactly.
inline std::string serialize_table(const CollocationTable& t) {
  std::string out(kTableHeader);
  out += '\n';
  for (const auto& [noun, adjs] : t.entries())
    for (const auto& [adj, c] : adjs)
      out += noun + '\t' + adj + '\t' + to_string(c.pattern) + '\t' + std::to_string(c.freq_pos) +
             '\t' + std::to_string(c.freq_neg) + '\t' + to_string(c.polarity) + '\n';
  for (const auto& [key, p] : t.overrides())
    out += "# override\t" + key.first + '\t' + key.second + '\t' + to_string(p) + '\n';
  return out;
}

namespace detail {

inline std::size_t parse_count(const std::string& s, std::size_t row) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    throw ParseError("row " + std::to_string(row) + ": bad count \"" + s + "\"");
  return v;
}

}  // namespace detail

inline CollocationTable parse_table(std::string_view content) {
  CollocationTable t;
  OverrideMap overrides;
  const auto all = text::lines(content);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t row = i + 1;
    const auto& line = all[i];
    if (line.empty()) continue;
    if (line == kTableHeader) continue;
    if (line[0] == '#') {
      const auto cols = text::split(line, '\t');
      if (cols.size() == 4 && cols[0] == "# override") {
        auto p = parse_polarity(cols[3]);
        if (!p) throw ParseError("row " + std::to_string(row) + ": bad override polarity");
        if (!overrides.emplace(CollocationKey{cols[1], cols[2]}, *p).second)
          throw ParseError("row " + std::to_string(row) + ": duplicate override (" + cols[1] + ", " +
                           cols[2] + ")");
      }
      continue;
    }
    const auto cols = text::split(line, '\t');
    if (cols.size() != 6)
      throw ParseError("row " + std::to_string(row) + ": expected 6 columns, got " +
                       std::to_string(cols.size()));
    Collocation c;
    c.noun = cols[0];
    c.adjective = cols[1];
    c.pattern = parse_pattern(cols[2]);
    c.freq_pos = detail::parse_count(cols[3], row);
    c.freq_neg = detail::parse_count(cols[4], row);
    c.polarity = parse_collocation_polarity(cols[5]);
    if (t.find(c.noun, c.adjective))
      throw ParseError("row " + std::to_string(row) + ": duplicate collocation (" + c.noun + ", " +
                       c.adjective + ")");
    t.insert(std::move(c));
  }
  t.set_overrides(std::move(overrides));
  return t;
}

inline void save_table(const CollocationTable& t, const std::string& path) {
  text::write_file(path, serialize_table(t));
}

inline CollocationTable load_table(const std::string& path) { return parse_table(text::read_file(path)); }

/// Override TSV: noun<TAB>adjective<TAB>positive|negative, optional header.
inline OverrideMap parse_overrides(std::string_view content) {
  OverrideMap out;
  const auto all = text::lines(content);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t row = i + 1;
    const auto& line = all[i];
    if (text::trim(line).empty() || line[0] == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 3)
      throw ParseError("override row " + std::to_string(row) + ": expected 3 columns");
    if (row == 1 && cols[0] == "noun" && cols[1] == "adjective") continue;
    auto p = parse_polarity(cols[2]);
    if (!p)
      throw ParseError("override row " + std::to_string(row) + ": unknown polarity \"" + cols[2] + "\"");
    if (!out.emplace(CollocationKey{cols[0], cols[1]}, *p).second)
      throw ParseError("override row " + std::to_string(row) + ": duplicate (" + cols[0] + ", " +
                       cols[1] + ")");
  }
  return out;
}

inline OverrideMap load_overrides(const std::string& path) {
  return parse_overrides(text::read_file(path));
}

struct TableSummary {
  std::size_t nouns = 0;
  std::size_t collocations = 0;
  std::size_t max_per_noun = 0;
  std::size_t min_per_noun = 0;
  double mean_per_noun = 0.0;
};

inline TableSummary summarize(const CollocationTable& t) {
  TableSummary s;
  s.nouns = t.noun_count();
  s.collocations = t.collocation_count();
  if (s.nouns == 0) return s;
  s.min_per_noun = static_cast<std::size_t>(-1);
  for (const auto& [noun, adjs] : t.entries()) {
    s.max_per_noun = std::max(s.max_per_noun, adjs.size());
    s.min_per_noun = std::min(s.min_per_noun, adjs.size());
  }
  s.mean_per_noun = static_cast<double>(s.collocations) / static_cast<double>(s.nouns);
  return s;
}

}  // namespace iae
