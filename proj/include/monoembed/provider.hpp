#pragma once

#include <optional>
#include <string>

#include "monoembed/embedding.hpp"
#include "monoembed/error.hpp"
#include "monoembed/projection.hpp"
#include "monoembed/remote.hpp"

namespace monoembed {

struct ProviderConfig {
  std::string kind = "tfidf";  // bow | tfidf | calls_row | interactions_row | remote | projection
  RemoteConfig remote;
  std::string model_path;  // projection only
  bool symmetric = false;  // graph-row providers

  static bool known_kind(const std::string& k) {
    return k == "bow" || k == "tfidf" || k == "calls_row" || k == "interactions_row" || k == "remote" ||
           k == "projection";
  }

  void validate() const {
    if (!known_kind(kind)) fail_usage("unknown provider '" + kind + "'");
    if (kind == "remote") remote.validate();
    if (kind == "projection" && model_path.empty()) fail_usage("projection provider needs --model");
  }
};

/// Stateful over a run so that a projection model is loaded once.
class ConfiguredProvider {
 public:
  explicit ConfiguredProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.kind == "projection") {
      model_ = load_model(cfg_.model_path);
      if (model_->base.kind == "remote-cached") {
        fail_usage("models trained on cached remote features need the cached embeddings; use apply_projection");
      }
    }
  }

  const ProviderConfig& config() const { return cfg_; }

  EmbeddingMatrix operator()(const LabeledCorpus& corpus) const {
    EmbeddingMatrix e;
    if (cfg_.kind == "bow") {
      e = embed_bow(corpus);
    } else if (cfg_.kind == "tfidf") {
      e = embed_tfidf(corpus);
    } else if (cfg_.kind == "calls_row") {
      e = embed_calls_row(corpus, cfg_.symmetric);
    } else if (cfg_.kind == "interactions_row") {
      e = embed_interactions_row(corpus, cfg_.symmetric);
    } else if (cfg_.kind == "remote") {
      e = embed_remote(corpus, cfg_.remote);
    } else {
      e = apply_projection(*model_, corpus);
    }
    return e;
  }

 private:
  ProviderConfig cfg_;
  std::optional<ProjectionModel> model_;
};

}  // namespace monoembed
