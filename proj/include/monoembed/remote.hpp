#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "monoembed/code_model.hpp"
#include "monoembed/embedding.hpp"
#include "monoembed/error.hpp"

namespace monoembed {

inline constexpr const char* kDefaultInstruction = "Given the source code, retrieve the bounded contexts;\n";

struct RemoteConfig {
  std::string endpoint;  // http(s)://host[:port]/path
  std::string model_name;
  std::optional<std::string> instruction = std::string(kDefaultInstruction);
  int batch_size = 16;
  std::size_t max_chars = 12000;
  int concurrency = 4;
  int retries = 3;
  int backoff_ms = 200;
  int timeout_s = 60;
  std::string api_key;  // sent as a bearer token when non-empty

  void validate() const {
    if (endpoint.empty()) fail_usage("remote provider needs an endpoint");
    if (model_name.empty()) fail_usage("remote provider needs a model name");
    if (batch_size < 1) fail_usage("batch size must be > 0");
    if (concurrency < 1) fail_usage("concurrency must be > 0");
    if (retries < 0) fail_usage("retries must be >= 0");
  }
};

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline Url split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) fail_usage("bad url '" + url + "'");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

/// Cuts at most max_chars bytes without splitting a UTF-8 sequence.
inline std::string truncate_utf8(const std::string& s, std::size_t max_chars) {
  if (s.size() <= max_chars) return s;
  std::size_t cut = max_chars;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return s.substr(0, cut);
}

inline std::string remote_payload(const ClassUnit& c, const RemoteConfig& cfg) {
  return cfg.instruction.value_or("") + truncate_utf8(c.source, cfg.max_chars);
}

namespace detail {

struct BatchResult {
  std::vector<std::vector<double>> rows;
  std::string error;  // empty on success
  bool retryable = false;
};

inline BatchResult post_batch(httplib::Client& client, const Url& url, const RemoteConfig& cfg,
                              const std::vector<std::string>& inputs) {
  BatchResult out;
  nlohmann::json body{{"model", cfg.model_name}, {"input", inputs}};
  httplib::Headers headers;
  if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    out.error = "request failed: " + httplib::to_string(res.error());
    out.retryable = true;
    return out;
  }
  if (res->status != 200) {
    out.error = "HTTP " + std::to_string(res->status);
    out.retryable = res->status == 429 || res->status >= 500;
    return out;
  }
  try {
    const auto doc = nlohmann::json::parse(res->body);
    out.rows.resize(inputs.size());
    std::vector<bool> seen(inputs.size(), false);
    for (const auto& d : doc.at("data")) {
      const auto idx = d.at("index").get<long long>();
      if (idx < 0 || idx >= static_cast<long long>(inputs.size()) || seen[idx]) {
        throw std::runtime_error("bad index " + std::to_string(idx));
      }
      seen[idx] = true;
      out.rows[idx] = d.at("embedding").get<std::vector<double>>();
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw std::runtime_error("missing rows");
  } catch (const std::exception& e) {
    out.rows.clear();
    out.error = std::string("malformed response: ") + e.what();
    out.retryable = false;
  }
  return out;
}

}  // namespace detail

/// Embeds every class through an OpenAI-style embeddings endpoint.
/// Batches run on up to cfg.concurrency threads; rows land in class-id order.
inline EmbeddingMatrix embed_remote(const LabeledCorpus& corpus, const RemoteConfig& cfg) {
  cfg.validate();
  const Url url = split_url(cfg.endpoint);
  const std::size_t n = corpus.classes.size();
  if (n == 0) fail_input("remote: corpus has no classes");
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t num_batches = (n + bs - 1) / bs;

  std::vector<detail::BatchResult> results(num_batches);
  std::optional<std::size_t> dim;  // from the first response to arrive
  std::mutex dim_mu;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    httplib::Client client(url.origin);
    client.set_connection_timeout(cfg.timeout_s);
    client.set_read_timeout(cfg.timeout_s);
    client.set_write_timeout(cfg.timeout_s);
    for (std::size_t b = next++; b < num_batches; b = next++) {
      const std::size_t lo = b * bs, hi = std::min(n, lo + bs);
      std::vector<std::string> inputs;
      for (std::size_t i = lo; i < hi; ++i) inputs.push_back(remote_payload(corpus.classes[i], cfg));
      detail::BatchResult r;
      for (int attempt = 0;; ++attempt) {
        r = detail::post_batch(client, url, cfg, inputs);
        if (r.error.empty() || !r.retryable || attempt >= cfg.retries) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(cfg.backoff_ms << attempt));
      }
      if (r.error.empty()) {
        std::lock_guard<std::mutex> lock(dim_mu);
        if (!dim) dim = r.rows.front().size();
      }
      results[b] = std::move(r);
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(num_batches, static_cast<std::size_t>(cfg.concurrency)));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string failed_ids, last_error;
  for (std::size_t b = 0; b < num_batches; ++b) {
    if (results[b].error.empty()) continue;
    last_error = results[b].error;
    for (std::size_t i = b * bs; i < std::min(n, (b + 1) * bs); ++i) {
      if (!failed_ids.empty()) failed_ids += ',';
      failed_ids += std::to_string(corpus.classes[i].id);
    }
  }
  if (!failed_ids.empty()) {
    fail_network("remote: embedding failed for class ids [" + failed_ids + "] (" + last_error + ")");
  }

  if (*dim == 0) fail_input("remote: empty embedding vectors");
  EmbeddingMatrix e{corpus.app_name, "remote", Matrix(n, *dim), {}};
  for (std::size_t b = 0; b < num_batches; ++b) {
    for (std::size_t k = 0; k < results[b].rows.size(); ++k) {
      const auto& row = results[b].rows[k];
      const std::size_t i = b * bs + k;
      if (row.size() != *dim) {
        fail_input("remote: dimension mismatch for class id " + std::to_string(corpus.classes[i].id) + ": got " +
                   std::to_string(row.size()) + ", expected " + std::to_string(*dim));
      }
      std::copy(row.begin(), row.end(), e.values.row(static_cast<std::size_t>(corpus.classes[i].id)).begin());
    }
  }
  e.class_ids = identity_ids(n);
  e.validate();
  return e;
}

}  // namespace monoembed
