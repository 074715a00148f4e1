// Attack scoring: victim accuracy under attack and Word Mover's Distance
// between clean and adversarial texts.

#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "iae/appender.hpp"
#include "iae/common.hpp"
#include "iae/victims.hpp"
#include "json.hpp"

namespace iae {

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = 1) : dim_(dim) {
    if (dim == 0) throw Error("embedding dimension must be >= 1");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  void add(const std::string& word, std::vector<double> v) {
    if (v.size() != dim_)
      throw Error("embedding for \"" + word + "\" has dimension " + std::to_string(v.size()) + ", expected " +
                  std::to_string(dim_));
    max_chars_ = std::max(max_chars_, text::utf8_length(word));
    vectors_[word] = std::move(v);
  }

  const std::vector<double>* find(const std::string& word) const {
    auto it = vectors_.find(word);
    return it == vectors_.end() ? nullptr : &it->second;
  }

  /// Maximum-matching segmentation of raw text against the embedded words.
  std::vector<std::string> segment(std::string_view s) const {
    return text::max_match(s, [this](const std::string& w) { return vectors_.count(w) > 0; }, max_chars_);
  }

 private:
  std::size_t dim_;
  std::size_t max_chars_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Text embeddings: optional "count dim" header, then "word v1 ... vd" lines.
inline EmbeddingTable parse_embeddings(std::string_view content) {
  const auto all = text::lines(content);
  std::optional<EmbeddingTable> table;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto cols = text::split_whitespace(all[i]);
    if (cols.empty()) continue;
    if (i == 0 && cols.size() == 2 && cols[0].find_first_not_of("0123456789") == std::string::npos &&
        cols[1].find_first_not_of("0123456789") == std::string::npos) {
      table.emplace(std::stoul(cols[1]));
      continue;
    }
    if (cols.size() < 2) throw ParseError("embeddings line " + std::to_string(i + 1) + ": no vector");
    std::vector<double> v;
    for (std::size_t k = 1; k < cols.size(); ++k) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(cols[k], &used));
        if (used != cols[k].size()) throw std::invalid_argument("trailing");
      } catch (const std::logic_error&) {
        throw ParseError("embeddings line " + std::to_string(i + 1) + ": bad number \"" + cols[k] + "\"");
      }
    }
    if (!table) table.emplace(v.size());
    try {
      table->add(cols[0], std::move(v));
    } catch (const Error& e) {
      throw ParseError("embeddings line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return table ? std::move(*table) : EmbeddingTable{};
}

inline EmbeddingTable load_embeddings(const std::string& path) { return parse_embeddings(text::read_file(path)); }

/// Exact minimum-cost transport from `supply` (n) to `demand` (m) with a
/// row-major n*m cost matrix, by the transportation simplex (northwest-corner
/// start, potentials for pricing, cycle pivots on the basis tree). Supplies
/// and demands must have equal sums.
inline double solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                              const std::vector<double>& cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (n == 0 || m == 0 || cost.size() != n * m) throw Error("solve_transport: bad problem shape");
  const auto at = [m](std::size_t i, std::size_t j) { return i * m + j; };

  std::vector<double> flow(n * m, 0.0);
  std::vector<char> basic(n * m, 0);
  {
    auto s = supply;
    auto d = demand;
    std::size_t i = 0, j = 0;
    while (true) {
      const double q = std::min(s[i], d[j]);
      flow[at(i, j)] = std::max(q, 0.0);
      basic[at(i, j)] = 1;
      s[i] -= q;
      d[j] -= q;
      if (i == n - 1 && j == m - 1) break;
      if (i == n - 1) ++j;
      else if (j == m - 1) ++i;
      else if (s[i] <= d[j]) ++i;
      else ++j;
    }
  }

  double max_cost = 0.0;
  for (double c : cost) max_cost = std::max(max_cost, std::abs(c));
  const double eps = 1e-12 * (1.0 + max_cost);
  const std::size_t nodes = n + m;  // rows 0..n-1, columns n..n+m-1

  std::vector<std::vector<std::size_t>> adj(nodes);
  std::vector<double> pot(nodes);
  std::vector<std::size_t> parent(nodes);
  std::vector<char> seen(nodes);
  std::vector<std::size_t> queue;
  queue.reserve(nodes);

  const auto cell_of = [&](std::size_t a, std::size_t b) {
    return a < n ? at(a, b - n) : at(b, a - n);
  };

  for (std::size_t iter = 0;; ++iter) {
    if (iter > 50 * (n * m + 10)) throw Error("solve_transport: iteration limit reached");
    for (auto& a : adj) a.clear();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (basic[at(i, j)]) {
          adj[i].push_back(n + j);
          adj[n + j].push_back(i);
        }

    // Potentials: u_i + v_j = c_ij on basic cells, u_0 = 0.
    std::fill(seen.begin(), seen.end(), 0);
    queue.assign(1, 0);
    pot[0] = 0.0;
    seen[0] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t a = queue[q];
      for (std::size_t b : adj[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        pot[b] = cost[cell_of(a, b)] - pot[a];
        queue.push_back(b);
      }
    }
    if (queue.size() != nodes) throw Error("solve_transport: basis is not a spanning tree");

    std::size_t enter_i = 0, enter_j = 0;
    double best = -eps;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (basic[at(i, j)]) continue;
        const double r = cost[at(i, j)] - pot[i] - pot[n + j];
        if (r < best) {
          best = r;
          enter_i = i;
          enter_j = j;
          found = true;
        }
      }
    if (!found) break;

    // Tree path from row enter_i to column enter_j.
    std::fill(seen.begin(), seen.end(), 0);
    queue.assign(1, enter_i);
    seen[enter_i] = 1;
    const std::size_t target = n + enter_j;
    for (std::size_t q = 0; q < queue.size() && !seen[target]; ++q) {
      const std::size_t a = queue[q];
      for (std::size_t b : adj[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        parent[b] = a;
        queue.push_back(b);
      }
    }
    std::vector<std::size_t> path_cells;  // from the column end back to the row
    for (std::size_t b = target; b != enter_i; b = parent[b]) path_cells.push_back(cell_of(parent[b], b));

    // Cells at even offsets from the column end lose flow.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = path_cells.front();
    for (std::size_t k = 0; k < path_cells.size(); k += 2)
      if (flow[path_cells[k]] < theta) {
        theta = flow[path_cells[k]];
        leaving = path_cells[k];
      }
    for (std::size_t k = 0; k < path_cells.size(); ++k) flow[path_cells[k]] += (k % 2 == 0 ? -theta : theta);
    flow[at(enter_i, enter_j)] = theta;
    basic[at(enter_i, enter_j)] = 1;
    basic[leaving] = 0;
    flow[leaving] = 0.0;
  }

  double total = 0.0;
  for (std::size_t k = 0; k < n * m; ++k)
    if (basic[k]) total += flow[k] * cost[k];
  return total;
}

struct WordDistribution {
  std::vector<std::string> words;
  std::vector<double> weights;
};

/// Normalized bag of embedded, non-stopword words.
inline WordDistribution bag_of_words(const EmbeddingTable& e, const std::vector<std::string>& doc,
                                     const std::set<std::string>& stopwords, const char* name) {
  std::map<std::string, double> counts;
  double total = 0.0;
  for (const auto& w : doc) {
    if (stopwords.count(w) || e.find(w) == nullptr) continue;
    counts[w] += 1.0;
    total += 1.0;
  }
  if (counts.empty()) throw Error(std::string("wmd: document ") + name + " has no embeddable words");
  WordDistribution d;
  for (const auto& [w, c] : counts) {
    d.words.push_back(w);
    d.weights.push_back(c / total);
  }
  return d;
}

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

inline std::vector<double> ground_costs(const EmbeddingTable& e, const WordDistribution& a,
                                        const WordDistribution& b) {
  std::vector<double> c(a.words.size() * b.words.size());
  for (std::size_t i = 0; i < a.words.size(); ++i)
    for (std::size_t j = 0; j < b.words.size(); ++j)
      c[i * b.words.size() + j] = euclidean(*e.find(a.words[i]), *e.find(b.words[j]));
  return c;
}

inline double wmd(const EmbeddingTable& e, const std::vector<std::string>& doc_a,
                  const std::vector<std::string>& doc_b, const std::set<std::string>& stopwords = {}) {
  const auto a = bag_of_words(e, doc_a, stopwords, "a");
  const auto b = bag_of_words(e, doc_b, stopwords, "b");
  return solve_transport(a.weights, b.weights, ground_costs(e, a, b));
}

/// Relaxed lower bound: each side moves all its mass to the nearest word of
/// the other; the larger of the two one-sided costs.
inline double rwmd(const EmbeddingTable& e, const std::vector<std::string>& doc_a,
                   const std::vector<std::string>& doc_b, const std::set<std::string>& stopwords = {}) {
  const auto a = bag_of_words(e, doc_a, stopwords, "a");
  const auto b = bag_of_words(e, doc_b, stopwords, "b");
  const auto c = ground_costs(e, a, b);
  const std::size_t n = a.words.size(), m = b.words.size();
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) best = std::min(best, c[i * m + j]);
    left += a.weights[i] * best;
  }
  for (std::size_t j = 0; j < m; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, c[i * m + j]);
    right += b.weights[j] * best;
  }
  return std::max(left, right);
}

using BatchPredictor = std::function<std::vector<VictimPrediction>(std::span<const std::string>)>;

struct Victim {
  std::string name;
  BatchPredictor predict;
};

struct LabeledOutput {
  std::string text;
  Polarity label;
};

inline double accuracy_under_attack(const BatchPredictor& victim, const std::vector<LabeledOutput>& examples) {
  if (examples.empty()) throw Error("accuracy_under_attack: no examples");
  std::vector<std::string> texts;
  for (const auto& x : examples) texts.push_back(x.text);
  const auto preds = victim(texts);
  if (preds.size() != examples.size()) throw Error("accuracy_under_attack: victim returned misaligned output");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) correct += preds[i].label == examples[i].label;
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

/// One attack method's outputs, crafted on `local_model`, to be scored
/// against the named victims.
struct AttackRun {
  std::string method;
  std::string local_model;
  std::vector<std::string> victims;
  std::vector<AdversarialExample> examples;
};

struct ReportRow {
  std::string method;
  std::string local_model;
  std::string victim;
  double accuracy = 0.0;
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  std::optional<double> mean_wmd;

  bool operator==(const ReportRow&) const = default;
};

struct OriginRow {
  std::string victim;
  double accuracy = 0.0;
  std::size_t examples = 0;

  bool operator==(const OriginRow&) const = default;
};

struct AttackReport {
  std::vector<OriginRow> origin;
  std::vector<ReportRow> rows;

  bool operator==(const AttackReport&) const = default;
};

struct ReportOptions {
  const EmbeddingTable* embeddings = nullptr;
  std::set<std::string> stopwords;
};

inline AttackReport build_report(const std::vector<AttackRun>& runs, const std::vector<Victim>& victims,
                                 const ReportOptions& opt = {}) {
  std::map<std::string, const Victim*> by_name;
  for (const auto& v : victims)
    if (!by_name.emplace(v.name, &v).second) throw Error("build_report: duplicate victim \"" + v.name + "\"");

  AttackReport report;
  std::vector<std::string> victim_order;
  std::map<std::string, std::vector<LabeledOutput>> originals;
  std::map<std::string, std::set<std::string>> seen_originals;
  for (const auto& run : runs) {
    for (const auto& name : run.victims) {
      if (!by_name.count(name)) throw Error("build_report: unknown victim \"" + name + "\"");
      if (!originals.count(name)) victim_order.push_back(name);
      auto& list = originals[name];
      for (const auto& x : run.examples)
        if (seen_originals[name].insert(x.original_text).second) list.push_back({x.original_text, x.original_label});
    }
  }
  for (const auto& name : victim_order) {
    const auto& list = originals[name];
    if (list.empty()) continue;
    report.origin.push_back({name, accuracy_under_attack(by_name[name]->predict, list), list.size()});
  }

  for (const auto& run : runs) {
    std::optional<double> mean_wmd;
    if (opt.embeddings && !run.examples.empty()) {
      double sum = 0.0;
      for (const auto& x : run.examples)
        sum += wmd(*opt.embeddings, opt.embeddings->segment(x.original_text),
                   opt.embeddings->segment(x.final_text), opt.stopwords);
      mean_wmd = sum / static_cast<double>(run.examples.size());
    }
    std::vector<LabeledOutput> adv;
    for (const auto& x : run.examples) adv.push_back({x.final_text, x.original_label});
    for (const auto& name : run.victims) {
      ReportRow row{run.method, run.local_model, name, 0.0, adv.size(), 0, mean_wmd};
      if (!adv.empty()) {
        row.accuracy = accuracy_under_attack(by_name[name]->predict, adv);
        row.succeeded = adv.size() - static_cast<std::size_t>(std::llround(row.accuracy * adv.size()));
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

inline nlohmann::json to_json(const AttackReport& r) {
  nlohmann::json j = {{"origin", nlohmann::json::array()}, {"rows", nlohmann::json::array()}};
  for (const auto& o : r.origin)
    j["origin"].push_back({{"victim", o.victim}, {"accuracy", o.accuracy}, {"examples", o.examples}});
  for (const auto& row : r.rows) {
    nlohmann::json x = {{"method", row.method},       {"local_model", row.local_model},
                        {"victim", row.victim},       {"accuracy", row.accuracy},
                        {"attempted", row.attempted}, {"succeeded", row.succeeded}};
    x["mean_wmd"] = row.mean_wmd ? nlohmann::json(*row.mean_wmd) : nlohmann::json(nullptr);
    j["rows"].push_back(std::move(x));
  }
  return j;
}

inline AttackReport report_from_json(const nlohmann::json& j) {
  try {
    AttackReport r;
    for (const auto& o : j.at("origin"))
      r.origin.push_back({o.at("victim").get<std::string>(), o.at("accuracy").get<double>(),
                          o.at("examples").get<std::size_t>()});
    for (const auto& x : j.at("rows")) {
      ReportRow row;
      row.method = x.at("method").get<std::string>();
      row.local_model = x.at("local_model").get<std::string>();
      row.victim = x.at("victim").get<std::string>();
      row.accuracy = x.at("accuracy").get<double>();
      row.attempted = x.at("attempted").get<std::size_t>();
      row.succeeded = x.at("succeeded").get<std::size_t>();
      if (!x.at("mean_wmd").is_null()) row.mean_wmd = x["mean_wmd"].get<double>();
      r.rows.push_back(std::move(row));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

namespace detail {

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t width) {
  const auto len = text::utf8_length(s);
  return s + std::string(width > len ? width - len : 0, ' ');
}

}  // namespace detail

/// Human-readable table: one row per (method, local model), one accuracy
/// column per victim, then the mean WMD.
inline std::string format_report(const AttackReport& r) {
  std::vector<std::string> victims;
  for (const auto& o : r.origin) victims.push_back(o.victim);
  for (const auto& row : r.rows)
    if (std::find(victims.begin(), victims.end(), row.victim) == victims.end()) victims.push_back(row.victim);

  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Method", "Local Model"};
  header.insert(header.end(), victims.begin(), victims.end());
  header.push_back("WMD");
  cells.push_back(header);

  std::vector<std::string> origin{"Origin", "-"};
  for (const auto& v : victims) {
    auto it = std::find_if(r.origin.begin(), r.origin.end(), [&](const OriginRow& o) { return o.victim == v; });
    origin.push_back(it == r.origin.end() ? "-" : detail::fixed3(it->accuracy));
  }
  origin.push_back("-");
  cells.push_back(origin);

  std::vector<std::pair<std::string, std::string>> groups;
  for (const auto& row : r.rows) {
    std::pair key{row.method, row.local_model};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }
  for (const auto& [method, local] : groups) {
    std::vector<std::string> line{method, local};
    std::optional<double> w;
    for (const auto& v : victims) {
      auto it = std::find_if(r.rows.begin(), r.rows.end(), [&](const ReportRow& x) {
        return x.method == method && x.local_model == local && x.victim == v;
      });
      line.push_back(it == r.rows.end() ? "-" : detail::fixed3(it->accuracy));
      if (it != r.rows.end() && it->mean_wmd) w = it->mean_wmd;
    }
    line.push_back(w ? detail::fixed3(*w) : "-");
    cells.push_back(line);
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : cells)
    for (std::size_t k = 0; k < line.size(); ++k) widths[k] = std::max(widths[k], text::utf8_length(line[k]));
  std::string out;
  for (const auto& line : cells) {
    std::string s;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (k) s += "  ";
      s += k + 1 == line.size() ? line[k] : detail::pad(line[k], widths[k]);
    }
    out += s + '\n';
  }
  return out;
}

}  // namespace iae
