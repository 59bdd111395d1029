#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "monoembed/corpus_builder.hpp"
#include "monoembed/corpus_io.hpp"
#include "monoembed/embedding.hpp"
#include "monoembed/error.hpp"
#include "monoembed/triplet_loss.hpp"

namespace monoembed {

struct TrainConfig {
  double alpha = 1.0;
  int dim_out = 32;
  int epochs = 50;
  double lr = 0.01;
  int batch = 32;
  std::uint64_t seed = 42;
  std::string base_features = "tfidf";  // tfidf | bow | remote-cached

  void validate() const {
    if (!(alpha > 0.0)) fail_usage("train: alpha must be > 0");
    if (dim_out < 2) fail_usage("train: dim_out must be >= 2");
    if (!(lr > 0.0)) fail_usage("train: lr must be > 0");
    if (epochs < 0) fail_usage("train: epochs must be >= 0");
    if (batch < 1) fail_usage("train: batch must be >= 1");
    if (base_features != "tfidf" && base_features != "bow" && base_features != "remote-cached") {
      fail_usage("train: unknown base features '" + base_features + "'");
    }
  }
};

/// Everything needed to rebuild the model input x(c) for a class.
struct BaseFeatureSpec {
  std::string kind = "tfidf";
  std::vector<std::string> vocabulary;  // bow / tfidf
  std::vector<double> idf;              // tfidf only
  int dim = 0;                          // remote-cached: width of the cached embedding

  int dim_in() const { return kind == "remote-cached" ? dim : static_cast<int>(vocabulary.size()); }
};

/// e(c) = W^T x(c) + b with W stored dim_in x dim_out, row-major.
struct ProjectionModel {
  int dim_in = 0;
  int dim_out = 0;
  std::vector<double> W;
  std::vector<double> b;
  BaseFeatureSpec base;
  TrainConfig config;
  std::vector<double> loss_history;

  double& w(int i, int j) { return W[static_cast<std::size_t>(i) * dim_out + j]; }
  double w(int i, int j) const { return W[static_cast<std::size_t>(i) * dim_out + j]; }

  std::vector<double> project(std::span<const double> x) const {
    std::vector<double> e(b);
    for (int i = 0; i < dim_in; ++i) {
      if (x[i] == 0.0) continue;
      const double* wi = &W[static_cast<std::size_t>(i) * dim_out];
      for (int j = 0; j < dim_out; ++j) e[j] += wi[j] * x[i];
    }
    return e;
  }
};

/// Cached base embeddings keyed by app name (remote-cached base features).
using CachedFeatures = std::map<std::string, EmbeddingMatrix>;

/// Frozen vocabulary and idf over the union of all classes of all corpora.
inline BaseFeatureSpec fit_base_features(const std::vector<LabeledCorpus>& corpora, const std::string& kind,
                                         const CachedFeatures* cached = nullptr) {
  BaseFeatureSpec spec;
  spec.kind = kind;
  if (kind == "remote-cached") {
    if (!cached || cached->empty()) fail_input("remote-cached base features need cached embeddings");
    spec.dim = -1;
    for (const auto& c : corpora) {
      const auto it = cached->find(c.app_name);
      if (it == cached->end()) fail_input("no cached embedding for " + c.app_name);
      if (spec.dim >= 0 && static_cast<int>(it->second.m()) != spec.dim) fail_input("cached embeddings differ in width");
      spec.dim = static_cast<int>(it->second.m());
    }
    return spec;
  }
  std::map<std::string, int> df;
  std::size_t n = 0;
  for (const auto& c : corpora) {
    for (const auto& cls : c.classes) {
      ++n;
      for (const auto& [t, k] : cls.terms) ++df[t];
    }
  }
  if (df.empty()) fail_input("no semantic terms in training corpora");
  for (const auto& [t, d] : df) {
    spec.vocabulary.push_back(t);
    if (kind == "tfidf") spec.idf.push_back(smoothed_idf(n, static_cast<std::size_t>(d)));
  }
  return spec;
}

/// Base feature rows for every class of a corpus; out-of-vocabulary terms are dropped.
inline Matrix base_feature_rows(const BaseFeatureSpec& spec, const LabeledCorpus& corpus,
                                const CachedFeatures* cached = nullptr) {
  const std::size_t n = corpus.classes.size();
  if (spec.kind == "remote-cached") {
    if (!cached) fail_input("remote-cached base features need cached embeddings");
    const auto it = cached->find(corpus.app_name);
    if (it == cached->end()) fail_input("no cached embedding for " + corpus.app_name);
    const auto& e = it->second;
    if (static_cast<int>(e.m()) != spec.dim) fail_input("cached embedding width does not match the model");
    Matrix x(n, e.m());
    for (const auto& c : corpus.classes) {
      const int r = e.row_of(c.id);
      if (r < 0) fail_input("cached embedding for " + corpus.app_name + " lacks class " + std::to_string(c.id));
      std::copy(e.values.row(r).begin(), e.values.row(r).end(), x.row(c.id).begin());
    }
    return x;
  }
  Matrix x(n, spec.vocabulary.size());
  for (const auto& c : corpus.classes) {
    for (const auto& [t, k] : c.terms) {
      const auto it = std::lower_bound(spec.vocabulary.begin(), spec.vocabulary.end(), t);
      if (it == spec.vocabulary.end() || *it != t) continue;
      const auto j = static_cast<std::size_t>(it - spec.vocabulary.begin());
      x(c.id, j) = spec.kind == "tfidf" ? k * spec.idf[j] : k;
    }
  }
  return x;
}

namespace detail {

struct IndexedTriplet {
  std::size_t a, p, n;  // rows of the stacked feature matrix
};

/// Mean triplet loss over a set of triplets, with projected rows precomputed.
inline double mean_triplet_loss(const std::vector<std::vector<double>>& e, const std::vector<IndexedTriplet>& ts,
                                double alpha) {
  double s = 0.0;
  for (const auto& t : ts) s += triplet_loss(e[t.a], e[t.p], e[t.n], alpha);
  return s / static_cast<double>(ts.size());
}

}  // namespace detail

/// Mini-batch Adam on the mean triplet loss of projected base features.
/// The bias receives no gradient (the loss is translation invariant) and stays at zero.
inline ProjectionModel train_projection(const std::vector<Triplet>& triplets, const std::vector<LabeledCorpus>& corpora,
                                        const TrainConfig& cfg, const CachedFeatures* cached = nullptr) {
  cfg.validate();
  if (triplets.empty()) fail_input("train: empty triplet list");

  ProjectionModel model;
  model.config = cfg;
  model.base = fit_base_features(corpora, cfg.base_features, cached);
  model.dim_in = model.base.dim_in();
  model.dim_out = cfg.dim_out;

  // Stack the base rows of every class a triplet touches.
  std::map<std::string, const LabeledCorpus*> by_name;
  for (const auto& c : corpora) by_name[c.app_name] = &c;
  std::map<std::string, Matrix> base_rows;
  std::map<std::pair<std::string, std::string>, std::size_t> row_index;
  std::vector<std::vector<double>> x;
  auto row_for = [&](const std::string& repo, const std::string& fqn) {
    const auto key = std::pair{repo, fqn};
    if (auto it = row_index.find(key); it != row_index.end()) return it->second;
    const auto cit = by_name.find(repo);
    if (cit == by_name.end()) fail_input("train: triplet references unknown repo " + repo);
    const auto id = cit->second->find(fqn);
    if (!id) fail_input("train: triplet references unknown class " + repo + ":" + fqn);
    auto bit = base_rows.find(repo);
    if (bit == base_rows.end()) bit = base_rows.emplace(repo, base_feature_rows(model.base, *cit->second, cached)).first;
    const auto r = bit->second.row(*id);
    x.emplace_back(r.begin(), r.end());
    row_index.emplace(key, x.size() - 1);
    return x.size() - 1;
  };
  std::vector<detail::IndexedTriplet> ts;
  ts.reserve(triplets.size());
  for (const auto& t : triplets) ts.push_back({row_for(t.repo, t.anchor), row_for(t.repo, t.positive), row_for(t.repo, t.negative)});

  const int din = model.dim_in, dout = model.dim_out;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> init(0.0, 1.0 / std::sqrt(static_cast<double>(std::max(din, 1))));
  model.W.resize(static_cast<std::size_t>(din) * dout);
  for (auto& v : model.W) v = init(rng);
  model.b.assign(dout, 0.0);

  // Sparse view of the inputs keeps the outer products cheap for term features.
  std::vector<std::vector<std::pair<int, double>>> nz(x.size());
  for (std::size_t r = 0; r < x.size(); ++r) {
    for (int i = 0; i < din; ++i) {
      if (x[r][i] != 0.0) nz[r].emplace_back(i, x[r][i]);
    }
  }
  std::vector<std::vector<double>> e(x.size());
  auto project_all = [&] {
    for (std::size_t r = 0; r < x.size(); ++r) e[r] = model.project(x[r]);
  };
  auto record_loss = [&](int epoch) {
    project_all();
    const double l = detail::mean_triplet_loss(e, ts, cfg.alpha);
    if (!std::isfinite(l)) {
      fail_input("train: non-finite loss at epoch " + std::to_string(epoch) + " (lr " +
                                 std::to_string(cfg.lr) + ", dim_in " + std::to_string(din) + ")");
    }
    model.loss_history.push_back(l);
  };
  record_loss(0);

  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double> m1(model.W.size(), 0.0), m2(model.W.size(), 0.0), grad(model.W.size(), 0.0);
  std::vector<std::size_t> order(ts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
      std::fill(grad.begin(), grad.end(), 0.0);
      bool any = false;
      for (std::size_t q = start; q < stop; ++q) {
        const auto& t = ts[order[q]];
        const auto ea = model.project(x[t.a]), ep = model.project(x[t.p]), en = model.project(x[t.n]);
        const auto g = triplet_loss_gradient(ea, ep, en, cfg.alpha);
        if (g.loss <= 0.0) continue;
        any = true;
        auto accumulate = [&](std::size_t row, const std::vector<double>& ge) {
          for (const auto& [i, xi] : nz[row]) {
            double* gi = &grad[static_cast<std::size_t>(i) * dout];
            for (int j = 0; j < dout; ++j) gi[j] += xi * ge[j];
          }
        };
        accumulate(t.a, g.d_anchor);
        accumulate(t.p, g.d_positive);
        accumulate(t.n, g.d_negative);
      }
      if (!any) continue;
      ++step;
      const double scale = 1.0 / static_cast<double>(stop - start);
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < grad.size(); ++k) {
        const double gk = grad[k] * scale;
        m1[k] = beta1 * m1[k] + (1 - beta1) * gk;
        m2[k] = beta2 * m2[k] + (1 - beta2) * gk * gk;
        model.W[k] -= cfg.lr * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + eps);
      }
    }
    record_loss(epoch);
  }
  return model;
}

inline EmbeddingMatrix apply_projection(const ProjectionModel& model, const LabeledCorpus& corpus,
                                        const CachedFeatures* cached = nullptr) {
  const Matrix x = base_feature_rows(model.base, corpus, cached);
  EmbeddingMatrix out{corpus.app_name, "projection", Matrix(x.rows(), model.dim_out), identity_ids(x.rows())};
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto e = model.project(x.row(r));
    std::copy(e.begin(), e.end(), out.values.row(r).begin());
  }
  out.validate();
  return out;
}

inline constexpr const char* kModelFormat = "monoembed-projection-v1";

inline ojson model_to_json(const ProjectionModel& m) {
  ojson j;
  j["format"] = kModelFormat;
  j["dim_in"] = m.dim_in;
  j["dim_out"] = m.dim_out;
  j["W"] = m.W;
  j["b"] = m.b;
  ojson base;
  base["kind"] = m.base.kind;
  base["vocabulary"] = m.base.vocabulary;
  base["idf"] = m.base.idf;
  base["dim"] = m.base.dim;
  base["terms"] = kTermPolicyVersion;
  j["base"] = std::move(base);
  ojson cfg;
  cfg["alpha"] = m.config.alpha;
  cfg["dim_out"] = m.config.dim_out;
  cfg["epochs"] = m.config.epochs;
  cfg["lr"] = m.config.lr;
  cfg["batch"] = m.config.batch;
  cfg["seed"] = m.config.seed;
  cfg["base_features"] = m.config.base_features;
  j["config"] = std::move(cfg);
  j["loss_history"] = m.loss_history;
  return j;
}

inline ProjectionModel model_from_json(const nlohmann::json& j, const std::string& name = "model") {
  ProjectionModel m;
  try {
    if (j.at("format").get<std::string>() != kModelFormat) fail_input(name + ": not a projection model");
    m.dim_in = j.at("dim_in").get<int>();
    m.dim_out = j.at("dim_out").get<int>();
    m.W = j.at("W").get<std::vector<double>>();
    m.b = j.at("b").get<std::vector<double>>();
    const auto& base = j.at("base");
    m.base.kind = base.at("kind").get<std::string>();
    m.base.vocabulary = base.at("vocabulary").get<std::vector<std::string>>();
    m.base.idf = base.at("idf").get<std::vector<double>>();
    m.base.dim = base.at("dim").get<int>();
    const auto& cfg = j.at("config");
    m.config.alpha = cfg.at("alpha").get<double>();
    m.config.dim_out = cfg.at("dim_out").get<int>();
    m.config.epochs = cfg.at("epochs").get<int>();
    m.config.lr = cfg.at("lr").get<double>();
    m.config.batch = cfg.at("batch").get<int>();
    m.config.seed = cfg.at("seed").get<std::uint64_t>();
    m.config.base_features = cfg.at("base_features").get<std::string>();
    m.loss_history = j.at("loss_history").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail_input(name + ": " + e.what());
  }
  if (m.dim_in != m.base.dim_in() || m.W.size() != static_cast<std::size_t>(m.dim_in) * m.dim_out ||
      static_cast<int>(m.b.size()) != m.dim_out || (m.base.kind == "tfidf" && m.base.idf.size() != m.base.vocabulary.size()) ||
      !std::is_sorted(m.base.vocabulary.begin(), m.base.vocabulary.end())) {
    fail_input(name + ": inconsistent model shapes");
  }
  for (double v : m.W) {
    if (!std::isfinite(v)) fail_input(name + ": non-finite parameter");
  }
  for (double v : m.b) {
    if (!std::isfinite(v)) fail_input(name + ": non-finite parameter");
  }
  return m;
}

inline void save_model(const std::filesystem::path& p, const ProjectionModel& m) {
  auto out = detail::open_out(p);
  out << model_to_json(m).dump(1) << '\n';
}

inline ProjectionModel load_model(const std::filesystem::path& p) {
  auto in = detail::open_in(p);
  try {
    return model_from_json(nlohmann::json::parse(in), p.string());
  } catch (const nlohmann::json::exception& e) {
    fail_input(p.string() + ": " + e.what());
  }
}

}  // namespace monoembed
