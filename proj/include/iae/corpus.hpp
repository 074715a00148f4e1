// Labeled sentiment datasets, CoNLL-U treebanks and dataset statistics.

#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iae/common.hpp"
#include "json.hpp"

namespace iae {

struct LabeledText {
  std::string text;
  Polarity label = Polarity::negative;

  bool operator==(const LabeledText&) const = default;
};

struct Token {
  int index = 1;  // 1-based position in the sentence
  std::string form;
  std::string pos;
  int head = 0;  // 0 designates the root
  std::string deprel;

  bool operator==(const Token&) const = default;
};

struct AnnotatedSentence {
  std::vector<Token> tokens;
  std::optional<Polarity> label;

  bool operator==(const AnnotatedSentence&) const = default;

  const Token& at(int index) const { return tokens.at(static_cast<std::size_t>(index - 1)); }

  std::vector<std::string> forms() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.form);
    return out;
  }

  /// Surface text. Chinese treebanks are unspaced, hence the empty default.
  std::string text(std::string_view joiner = "") const { return text::join(forms(), joiner); }
};

struct DatasetStats {
  std::size_t class_count = 0;
  std::size_t max_words = 0;
  std::size_t min_words = 0;
  double avg_words = 0.0;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
};

enum class DatasetFormat { jsonl, tsv };

/// Accepts "positive"/"negative" in any case.
inline std::optional<Polarity> parse_polarity(std::string_view s) {
  const auto l = text::lower_ascii(text::trim(s));
  if (l == "positive") return Polarity::positive;
  if (l == "negative") return Polarity::negative;
  return std::nullopt;
}

namespace detail {

inline Polarity label_from_json(const nlohmann::json& v, std::size_t line_no) {
  if (v.is_string()) {
    if (auto p = parse_polarity(v.get<std::string>())) return *p;
    throw ParseError("unknown label at line " + std::to_string(line_no) + ": \"" +
                     v.get<std::string>() + "\"");
  }
  if (v.is_number_integer()) {
    const auto n = v.get<long long>();
    if (n == 1) return Polarity::positive;
    if (n == 0) return Polarity::negative;
  }
  throw ParseError("unknown label at line " + std::to_string(line_no) + ": " + v.dump());
}

inline void check_text(const std::string& t, std::size_t line_no) {
  if (text::trim(t).empty())
    throw ParseError("empty text at line " + std::to_string(line_no));
}

}  // namespace detail

inline std::vector<LabeledText> parse_labeled_dataset(std::string_view content, DatasetFormat format) {
  std::vector<LabeledText> out;
  const auto all = text::lines(content);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string& line = all[i];
    if (text::trim(line).empty()) continue;
    LabeledText rec;
    if (format == DatasetFormat::jsonl) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error&) {
        throw ParseError("malformed record at line " + std::to_string(line_no));
      }
      if (!j.is_object() || !j.contains("text") || !j["text"].is_string() || !j.contains("label"))
        throw ParseError("malformed record at line " + std::to_string(line_no) +
                         ": expected fields \"text\" and \"label\"");
      rec.text = j["text"].get<std::string>();
      rec.label = detail::label_from_json(j["label"], line_no);
    } else {
      const auto tab = line.rfind('\t');
      if (tab == std::string::npos)
        throw ParseError("malformed record at line " + std::to_string(line_no) +
                         ": expected text<TAB>label");
      rec.text = line.substr(0, tab);
      const auto label = line.substr(tab + 1);
      auto p = parse_polarity(label);
      if (!p)
        throw ParseError("unknown label at line " + std::to_string(line_no) + ": \"" + label + "\"");
      rec.label = *p;
    }
    detail::check_text(rec.text, line_no);
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<LabeledText> load_labeled_dataset(const std::string& path, DatasetFormat format) {
  return parse_labeled_dataset(text::read_file(path), format);
}

/// Picks the format from the file extension (.tsv, anything else is JSONL).
inline DatasetFormat guess_dataset_format(const std::string& path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".tsv" ? DatasetFormat::tsv
                                                                     : DatasetFormat::jsonl;
}

enum class PosColumn { automatic, upos, xpos };

struct ConlluOptions {
  // automatic: UPOS unless it is "_", then XPOS.
  PosColumn pos_column = PosColumn::automatic;
};

namespace detail {

inline int parse_int_field(const std::string& s, const char* what, std::size_t ordinal) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ParseError("sentence " + std::to_string(ordinal) + ": bad " + what + " \"" + s + "\"");
  return v;
}

inline void validate_sentence(const AnnotatedSentence& s, std::size_t ordinal) {
  const auto fail = [&](const std::string& msg) {
    throw ParseError("sentence " + std::to_string(ordinal) + ": " + msg);
  };
  if (s.tokens.empty()) fail("no tokens");
  int roots = 0;
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const auto& t = s.tokens[static_cast<std::size_t>(i)];
    if (t.index != i + 1) fail("non-contiguous token id " + std::to_string(t.index));
    if (t.head < 0 || t.head > n) fail("head out of range at token " + std::to_string(t.index));
    if (t.head == t.index) fail("token " + std::to_string(t.index) + " is its own head");
    if (t.head == 0) ++roots;
  }
  if (roots == 0) fail("missing root");
  if (roots > 1) fail("multiple roots");
}

}  // namespace detail

/// Parses CoNLL-U blocks. A "# label = positive|negative" comment sets the
/// sentence label; all other comments are ignored.
inline std::vector<AnnotatedSentence> parse_conllu(std::string_view content,
                                                   const ConlluOptions& opts = {}) {
  std::vector<AnnotatedSentence> out;
  AnnotatedSentence current;
  bool open = false;
  std::size_t ordinal = 1;

  const auto flush = [&] {
    if (!open) return;
    detail::validate_sentence(current, ordinal);
    out.push_back(std::move(current));
    current = {};
    open = false;
    ++ordinal;
  };

  for (const auto& raw : text::lines(content)) {
    if (text::trim(raw).empty()) {
      flush();
      continue;
    }
    if (raw[0] == '#') {
      const auto body = text::trim(std::string_view(raw).substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos && text::trim(body.substr(0, eq)) == "label") {
        const auto value = text::trim(body.substr(eq + 1));
        auto p = parse_polarity(value);
        if (!p)
          throw ParseError("sentence " + std::to_string(ordinal) + ": unknown label \"" +
                           std::string(value) + "\"");
        current.label = *p;
        open = true;
      }
      continue;
    }
    open = true;
    const auto cols = text::split(raw, '\t');
    if (cols.size() != 10)
      throw ParseError("sentence " + std::to_string(ordinal) + ": expected 10 columns, got " +
                       std::to_string(cols.size()));
    if (cols[0].find('-') != std::string::npos)
      throw ParseError("sentence " + std::to_string(ordinal) + ": multiword token range " +
                       cols[0] + " not supported");
    if (cols[0].find('.') != std::string::npos)
      throw ParseError("sentence " + std::to_string(ordinal) + ": empty node " + cols[0] +
                       " not supported");
    Token t;
    t.index = detail::parse_int_field(cols[0], "token id", ordinal);
    t.form = cols[1];
    switch (opts.pos_column) {
      case PosColumn::upos: t.pos = cols[3]; break;
      case PosColumn::xpos: t.pos = cols[4]; break;
      case PosColumn::automatic: t.pos = cols[3] != "_" ? cols[3] : cols[4]; break;
    }
    t.head = detail::parse_int_field(cols[6], "head", ordinal);
    t.deprel = cols[7];
    current.tokens.push_back(std::move(t));
  }
  flush();
  return out;
}

inline std::vector<AnnotatedSentence> load_conllu(const std::string& path,
                                                  const ConlluOptions& opts = {}) {
  return parse_conllu(text::read_file(path), opts);
}

/// Writes the consumed columns; the part-of-speech goes to UPOS.
inline std::string write_conllu(const std::vector<AnnotatedSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (s.label) out += std::string("# label = ") + to_string(*s.label) + "\n";
    for (const auto& t : s.tokens) {
      out += std::to_string(t.index) + '\t' + t.form + "\t_\t" + t.pos + "\t_\t_\t" +
             std::to_string(t.head) + '\t' + t.deprel + "\t_\t_\n";
    }
    out += '\n';
  }
  return out;
}

using WordSplitter = std::function<std::size_t(const LabeledText&)>;

inline std::size_t whitespace_word_count(const LabeledText& t) {
  return text::split_whitespace(t.text).size();
}

inline DatasetStats dataset_stats(const std::vector<LabeledText>& ds,
                                  const WordSplitter& words = whitespace_word_count) {
  if (ds.empty()) throw Error("dataset_stats: empty dataset");
  DatasetStats st;
  st.min_words = static_cast<std::size_t>(-1);
  std::size_t total = 0;
  for (const auto& rec : ds) {
    const auto n = words(rec);
    st.max_words = std::max(st.max_words, n);
    st.min_words = std::min(st.min_words, n);
    total += n;
    (rec.label == Polarity::positive ? st.positive_count : st.negative_count)++;
  }
  st.avg_words = static_cast<double>(total) / static_cast<double>(ds.size());
  st.class_count = (st.positive_count > 0 ? 1 : 0) + (st.negative_count > 0 ? 1 : 0);
  return st;
}

/// Statistics over annotated sentences, counting annotation tokens as words.
/// Unlabeled sentences are rejected.
inline DatasetStats dataset_stats(const std::vector<AnnotatedSentence>& ds) {
  std::vector<LabeledText> flat;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!ds[i].label) throw Error("dataset_stats: sentence " + std::to_string(i + 1) + " has no label");
    flat.push_back({ds[i].text(), *ds[i].label});
    counts.push_back(ds[i].tokens.size());
  }
  std::size_t next = 0;
  return dataset_stats(flat, [&](const LabeledText&) { return counts[next++]; });
}

}  // namespace iae
