// Black-box victim client speaking the JSON prediction protocol:
//
//   POST {endpoint}/predict   {"texts": ["...", ...]}
//   200 application/json      {"labels": [0|1, ...], "scores": [[p_neg, p_pos], ...]}

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "iae/common.hpp"
#include "iae/victims.hpp"
#include "json.hpp"

namespace iae {

/// A failed batch. `status` is the HTTP status, or 0 when no response was
/// received; `first_index` is the index of the first input text of the batch
/// (or of the offending entry for schema errors).
class RemoteError : public Error {
 public:
  RemoteError(const std::string& what, int status, std::size_t first_index)
      : Error(what), status_(status), first_index_(first_index) {}

  int status() const { return status_; }
  std::size_t first_index() const { return first_index_; }

 private:
  int status_;
  std::size_t first_index_;
};

struct RemoteOptions {
  std::chrono::milliseconds timeout{10000};
  std::size_t max_in_flight = 4;
  std::size_t batch_size = 16;
  int retries = 2;
};

struct Endpoint {
  std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
  std::string base_path;         // without trailing slash, may be empty

  std::string predict_path() const { return base_path + "/predict"; }
};

inline Endpoint parse_endpoint(std::string_view url) {
  const std::string_view scheme = "http://";
  if (url.substr(0, scheme.size()) != scheme)
    throw Error("victim endpoint must start with http://: " + std::string(url));
  const auto slash = url.find('/', scheme.size());
  Endpoint e;
  e.scheme_host_port = std::string(url.substr(0, slash));
  if (e.scheme_host_port.size() == scheme.size()) throw Error("victim endpoint has no host: " + std::string(url));
  if (slash != std::string_view::npos) {
    e.base_path = std::string(url.substr(slash));
    while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  }
  return e;
}

inline std::string encode_predict_request(std::span<const std::string> texts) {
  nlohmann::json j = {{"texts", nlohmann::json::array()}};
  for (const auto& t : texts) j["texts"].push_back(t);
  return j.dump();
}

inline std::string encode_predict_response(std::span<const VictimPrediction> preds) {
  nlohmann::json j = {{"labels", nlohmann::json::array()}, {"scores", nlohmann::json::array()}};
  for (const auto& p : preds) {
    j["labels"].push_back(static_cast<int>(p.label));
    j["scores"].push_back({p.scores[0], p.scores[1]});
  }
  return j.dump();
}

/// Validates and decodes a response body for `expected` texts. Index
/// positions in errors are offset by `base`.
inline std::vector<VictimPrediction> decode_predict_response(std::string_view body, std::size_t expected,
                                                             std::size_t base = 0, int status = 200) {
  const auto fail = [&](const std::string& msg, std::size_t i) {
    throw RemoteError("victim response: " + msg, status, base + i);
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    fail("body is not JSON", 0);
  }
  if (!j.is_object() || !j.contains("labels") || !j.contains("scores") || !j["labels"].is_array() ||
      !j["scores"].is_array())
    fail("missing \"labels\" or \"scores\" array", 0);
  const auto& labels = j["labels"];
  const auto& scores = j["scores"];
  if (labels.size() != expected || scores.size() != expected)
    fail("expected " + std::to_string(expected) + " predictions, got " + std::to_string(labels.size()),
         std::min(labels.size(), scores.size()));
  std::vector<VictimPrediction> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const auto& l = labels[i];
    const auto& s = scores[i];
    if (!l.is_number_integer() || (l.get<long long>() != 0 && l.get<long long>() != 1))
      fail("label must be 0 or 1", i);
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
      fail("scores entry must be a pair of numbers", i);
    const double pn = s[0].get<double>();
    const double pp = s[1].get<double>();
    if (pn < 0.0 || pp < 0.0 || std::abs(pn + pp - 1.0) > 1e-6) fail("scores must be a probability pair", i);
    VictimPrediction v;
    v.scores = {pn, pp};
    v.label = l.get<long long>() == 1 ? Polarity::positive : Polarity::negative;
    if (v.label != VictimPrediction::from_scores(pn, pp).label) fail("label is not the argmax of scores", i);
    out.push_back(v);
  }
  return out;
}

/// Queries a remote victim. Texts are sent in batches with at most
/// `max_in_flight` outstanding requests; output is aligned with input. The
/// error of the lowest failing batch is rethrown.
inline std::vector<VictimPrediction> remote_predict(const std::string& endpoint, std::span<const std::string> texts,
                                                    const RemoteOptions& opt = {}) {
  const Endpoint ep = parse_endpoint(endpoint);
  const std::size_t batch = std::max<std::size_t>(1, opt.batch_size);
  const std::size_t n_batches = (texts.size() + batch - 1) / batch;
  std::vector<VictimPrediction> out(texts.size());
  std::vector<std::exception_ptr> errors(n_batches);
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    httplib::Client cli(ep.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opt.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opt.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    while (true) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      const std::size_t begin = b * batch;
      const std::size_t end = std::min(texts.size(), begin + batch);
      const auto body = encode_predict_request(texts.subspan(begin, end - begin));
      try {
        int attempt = 0;
        while (true) {
          auto res = cli.Post(ep.predict_path(), body, "application/json");
          const bool transient = !res || res->status >= 500;
          if (transient && attempt < opt.retries) {
            ++attempt;
            continue;
          }
          if (!res)
            throw RemoteError("victim request failed: " + httplib::to_string(res.error()), 0, begin);
          if (res->status != 200)
            throw RemoteError("victim returned HTTP " + std::to_string(res->status), res->status, begin);
          auto preds = decode_predict_response(res->body, end - begin, begin, res->status);
          std::copy(preds.begin(), preds.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
          break;
        }
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };

  const std::size_t n_workers = std::min(std::max<std::size_t>(1, opt.max_in_flight), n_batches);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace iae
