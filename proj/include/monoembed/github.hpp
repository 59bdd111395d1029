#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "monoembed/corpus_builder.hpp"
#include "monoembed/error.hpp"
#include "monoembed/hashing.hpp"

namespace monoembed {

struct GitHubOptions {
  std::string api_base = "https://api.github.com";
  std::string token;                  // MONOEMBED_GH_TOKEN
  std::filesystem::path cache_dir;    // empty disables the cache
  bool offline = false;               // cache only, never touch the network
  int max_rate_wait_s = 900;          // longest sleep for a rate-limit reset
  int per_page = 100;
};

/// GitHub REST search with an on-disk response cache.
class GitHubSearchClient : public SearchClient {
 public:
  explicit GitHubSearchClient(GitHubOptions opts) : opts_(std::move(opts)) {
    if (opts_.offline && opts_.cache_dir.empty()) fail_usage("offline mining needs a cache directory");
  }

  std::vector<nlohmann::json> search(const std::string& query, int page) override {
    const std::string path = "/search/repositories?q=" + httplib::detail::encode_query_param(query) +
                             "&sort=stars&order=desc&per_page=" + std::to_string(opts_.per_page) +
                             "&page=" + std::to_string(page);
    const auto r = get(path, "application/vnd.github+json");
    if (r.status == 422) return {};  // past the 1000-result window
    if (r.status != 200) fail_network("github search failed: HTTP " + std::to_string(r.status));
    std::vector<nlohmann::json> items;
    try {
      const auto doc = nlohmann::json::parse(r.body);
      for (const auto& item : doc.at("items")) items.push_back(item);
    } catch (const nlohmann::json::exception& e) {
      fail_network(std::string("github search: malformed response: ") + e.what());
    }
    return items;
  }

  std::string readme(const nlohmann::json& item) override {
    const auto r = get("/repos/" + item.value("full_name", std::string()) + "/readme", "application/vnd.github.raw");
    return r.status == 200 ? r.body : std::string();
  }

  bool has_java(const nlohmann::json& item) override {
    const auto r = get("/repos/" + item.value("full_name", std::string()) + "/languages", "application/vnd.github+json");
    if (r.status != 200) return SearchClient::has_java(item);
    try {
      return nlohmann::json::parse(r.body).contains("Java");
    } catch (const nlohmann::json::exception&) {
      return SearchClient::has_java(item);
    }
  }

  int network_requests() const { return network_requests_; }

 private:
  struct Reply {
    int status = 0;
    std::string body;
  };

  std::filesystem::path cache_path(const std::string& path, const std::string& accept) const {
    return opts_.cache_dir / (sha256_hex(opts_.api_base + path + '\n' + accept) + ".json");
  }

  Reply get(const std::string& path, const std::string& accept) {
    if (!opts_.cache_dir.empty()) {
      std::ifstream in(cache_path(path, accept), std::ios::binary);
      if (in) {
        try {
          const auto j = nlohmann::json::parse(in);
          return {j.at("status").get<int>(), j.at("body").get<std::string>()};
        } catch (const nlohmann::json::exception&) {
          // corrupt entry, refetch
        }
      }
    }
    if (opts_.offline) fail_network("offline: no cached response for " + path);

    httplib::Client client(opts_.api_base);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(60);
    httplib::Headers headers{{"Accept", accept}, {"User-Agent", "monoembed"}, {"X-GitHub-Api-Version", "2022-11-28"}};
    if (!opts_.token.empty()) headers.emplace("Authorization", "Bearer " + opts_.token);

    for (int attempt = 0;; ++attempt) {
      ++network_requests_;
      auto res = client.Get(path, headers);
      if (!res) {
        if (attempt < 3) {
          std::this_thread::sleep_for(std::chrono::seconds(1 << attempt));
          continue;
        }
        fail_network("github: " + httplib::to_string(res.error()) + " for " + path);
      }
      if (res->status == 401) fail_network("github: authentication failed (check MONOEMBED_GH_TOKEN)");
      if ((res->status == 403 || res->status == 429) && res->get_header_value("X-RateLimit-Remaining") == "0") {
        const long reset = std::atol(res->get_header_value("X-RateLimit-Reset").c_str());
        const long wait = std::max(1L, reset - static_cast<long>(std::time(nullptr)) + 1);
        if (wait > opts_.max_rate_wait_s || attempt >= 3) fail_network("github: rate limit exhausted");
        std::this_thread::sleep_for(std::chrono::seconds(wait));
        continue;
      }
      if (res->status >= 500 && attempt < 3) {
        std::this_thread::sleep_for(std::chrono::seconds(1 << attempt));
        continue;
      }
      Reply r{res->status, res->body};
      if (!opts_.cache_dir.empty() && (r.status == 200 || r.status == 404 || r.status == 422)) {
        std::filesystem::create_directories(opts_.cache_dir);
        std::ofstream(cache_path(path, accept), std::ios::binary) << nlohmann::json{{"status", r.status}, {"body", r.body}}.dump();
      }
      return r;
    }
  }

  GitHubOptions opts_;
  int network_requests_ = 0;
};

}  // namespace monoembed
