#pragma once

// In-process embeddings endpoint used by the tests and by mock_embed_server.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace monoembed::mock {

enum class Mode { ok, mismatch, fail };

struct MockOptions {
  int dims = 4;
  int max_delay_ms = 0;
  std::uint64_t seed = 1;
  Mode mode = Mode::ok;
};

/// Deterministic unit vector for a text (FNV-1a seeded stream).
inline std::vector<double> mock_embedding(const std::string& text, int dims) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::mt19937_64 rng(h);
  std::normal_distribution<double> g;
  std::vector<double> v(static_cast<std::size_t>(dims));
  double norm = 0.0;
  for (auto& x : v) {
    x = g(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm > 0 ? norm : 1.0;
  return v;
}

class MockEmbedServer {
 public:
  explicit MockEmbedServer(MockOptions opts) : opts_(opts), rng_(opts.seed) {
    server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); });
  }
  ~MockEmbedServer() { stop(); }

  /// Binds to host:port (0 picks a free port) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw std::runtime_error("mock server: cannot bind");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  /// Blocks serving requests on the calling thread.
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/embeddings"; }
  int requests() const { return requests_.load(); }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    const int serial = requests_++;
    int delay = 0;
    std::vector<std::size_t> order;
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
      const auto& input = body.at("input");
      for (std::size_t i = 0; i < input.size(); ++i) order.push_back(i);
      std::lock_guard<std::mutex> lock(mu_);
      if (opts_.max_delay_ms > 0) delay = std::uniform_int_distribution<int>(0, opts_.max_delay_ms)(rng_);
      std::shuffle(order.begin(), order.end(), rng_);
    } catch (const std::exception&) {
      res.status = 400;
      res.set_content("{\"error\":\"bad request\"}", "application/json");
      return;
    }
    if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    if (opts_.mode == Mode::fail) {
      res.status = 503;
      res.set_content("{\"error\":\"unavailable\"}", "application/json");
      return;
    }
    const int dims = opts_.mode == Mode::mismatch && serial == 0 ? opts_.dims - 1 : opts_.dims;
    nlohmann::json data = nlohmann::json::array();
    for (std::size_t i : order) {
      data.push_back({{"index", i}, {"embedding", mock_embedding(body["input"][i].get<std::string>(), dims)}});
    }
    res.set_content(nlohmann::json{{"object", "list"}, {"data", data}, {"model", body.value("model", "")}}.dump(),
                    "application/json");
  }

  MockOptions opts_;
  httplib::Server server_;
  std::thread thread_;
  std::atomic<int> requests_{0};
  std::mutex mu_;
  std::mt19937_64 rng_;
  int port_ = -1;
};

}  // namespace monoembed::mock
