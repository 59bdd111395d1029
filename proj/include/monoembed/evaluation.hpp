#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "monoembed/clustering.hpp"
#include "monoembed/code_model.hpp"
#include "monoembed/corpus_io.hpp"
#include "monoembed/embedding.hpp"
#include "monoembed/error.hpp"
#include "monoembed/terms.hpp"

namespace monoembed {

inline constexpr const char* kMetricsVersion = "metrics-v1";
inline constexpr double kQualityEps = 1e-7;

// ---------------------------------------------------------------------------
// Embedding quality
// ---------------------------------------------------------------------------

struct QualityReport {
  std::map<std::string, double> per_app;
  double mean = 0.0;
};

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Balanced log loss of min-max normalized pairwise cosine similarities of the
/// standardized embeddings against same-service labels. Lower is better.
inline double embedding_quality(const EmbeddingMatrix& emb, const std::vector<std::string>& labels,
                                const std::string& app = "corpus") {
  const std::size_t n = emb.n();
  if (n < 2) fail_input(app + ": quality score needs at least 2 classes");
  if (labels.size() != n) fail_input(app + ": label count does not match embedding rows");
  const Matrix z = standardize(emb.values);
  std::vector<double> sim;
  std::vector<char> same;
  sim.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const int ci = emb.class_ids[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const int cj = emb.class_ids[j];
      sim.push_back(cosine_similarity(z.row(i), z.row(j)));
      same.push_back(labels[ci] == labels[cj]);
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(sim.begin(), sim.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) fail_input(app + ": all pairwise similarities are identical");
  double pos = 0.0, neg = 0.0;
  std::size_t npos = 0, nneg = 0;
  for (std::size_t k = 0; k < sim.size(); ++k) {
    const double s = std::clamp((sim[k] - lo) / (hi - lo), kQualityEps, 1.0 - kQualityEps);
    if (same[k]) {
      pos += std::log(s);
      ++npos;
    } else {
      neg += std::log(1.0 - s);
      ++nneg;
    }
  }
  if (npos == 0) fail_input(app + ": no same-service pair");
  if (nneg == 0) fail_input(app + ": single service");
  return -0.5 * (pos / static_cast<double>(npos) + neg / static_cast<double>(nneg));
}

using EmbeddingProvider = std::function<EmbeddingMatrix(const LabeledCorpus&)>;

inline QualityReport embedding_quality_score(const EmbeddingProvider& provider, const std::vector<LabeledCorpus>& corpora) {
  if (corpora.empty()) fail_input("quality score needs at least one corpus");
  QualityReport rep;
  for (const auto& c : corpora) {
    if (!c.labels) fail_input(c.app_name + ": corpus has no labels");
    const auto emb = provider(c);
    if (static_cast<int>(emb.n()) != c.size()) fail_input(c.app_name + ": embedding rows do not match class count");
    if (!rep.per_app.emplace(c.app_name, embedding_quality(emb, *c.labels, c.app_name)).second) {
      fail_input("duplicate app name " + c.app_name);
    }
  }
  for (const auto& [app, s] : rep.per_app) rep.mean += s;
  rep.mean /= static_cast<double>(rep.per_app.size());
  return rep;
}

// ---------------------------------------------------------------------------
// Decomposition vs ground truth
// ---------------------------------------------------------------------------

struct PairCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline PairCounts pair_counts(const Decomposition& predicted, const Decomposition& truth) {
  if (predicted.n() != truth.n()) {
    fail_input("decompositions cover different class universes (" + std::to_string(predicted.n()) + " vs " +
               std::to_string(truth.n()) + ")");
  }
  PairCounts c;
  for (int i = 0; i < predicted.n(); ++i) {
    for (int j = i + 1; j < predicted.n(); ++j) {
      const bool p = co_member(predicted, i, j), t = co_member(truth, i, j);
      if (p && t) ++c.tp;
      else if (p) ++c.fp;
      else if (t) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

/// Pairwise F-beta of co-membership predictions.
inline double pairwise_fbeta(const Decomposition& predicted, const Decomposition& truth, double beta = 0.25) {
  if (!(beta > 0.0)) fail_usage("beta must be > 0");
  const auto c = pair_counts(predicted, truth);
  // Neither side groups any pair: the partitions agree exactly.
  if (c.tp + c.fp == 0 && c.tp + c.fn == 0) return 1.0;
  if (c.tp == 0) return 0.0;
  const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

// ---------------------------------------------------------------------------
// Metric battery
// ---------------------------------------------------------------------------

struct MetricsReport {
  double chm = 0, chd = 0, bcp = 0, icp = 0, ned = 0, cov = 0;
  std::optional<double> fbeta;
  std::optional<double> score;
};

struct UseCaseTraces {
  std::map<std::string, std::set<std::string>> cases;
};

inline UseCaseTraces traces_from_json(const nlohmann::json& j, const std::string& name = "traces") {
  UseCaseTraces t;
  try {
    for (const auto& [uc, fqns] : j.at("cases").items()) {
      t.cases[uc] = fqns.get<std::set<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail_input(name + ": " + e.what());
  }
  if (t.cases.empty()) fail_input(name + ": no use cases");
  return t;
}

inline UseCaseTraces load_traces(const std::filesystem::path& p) {
  auto in = detail::open_in(p);
  try {
    return traces_from_json(nlohmann::json::parse(in), p.string());
  } catch (const nlohmann::json::exception& e) {
    fail_input(p.string() + ": " + e.what());
  }
}

namespace detail {

struct Operation {
  std::set<std::string> params;
  std::string ret;
  std::set<std::string> name_terms;
};

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

/// Published interface of a service: public methods that are not constructors.
inline std::vector<Operation> public_operations(const std::vector<int>& members, const LabeledCorpus& corpus) {
  std::vector<Operation> ops;
  for (int id : members) {
    for (const auto& m : corpus.classes[id].methods) {
      if (m.visibility != "public" || m.is_constructor()) continue;
      TermCounts tc;
      add_terms(m.name, tc, {});
      Operation op{{m.param_types.begin(), m.param_types.end()}, m.return_type, {}};
      for (const auto& [t, k] : tc) op.name_terms.insert(t);
      ops.push_back(std::move(op));
    }
  }
  return ops;
}

template <class Sim>
double service_cohesion(const Decomposition& d, const LabeledCorpus& corpus, Sim sim) {
  if (d.n() != corpus.size()) fail_input("decomposition and corpus sizes differ");
  const auto services = d.services();
  if (services.empty()) fail_input("decomposition has no services");
  double total = 0.0;
  for (const auto& members : services) {
    const auto ops = public_operations(members, corpus);
    if (ops.size() < 2) {
      total += 1.0;
      continue;
    }
    double s = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < ops.size(); ++a) {
      for (std::size_t b = a + 1; b < ops.size(); ++b) {
        s += sim(ops[a], ops[b]);
        ++pairs;
      }
    }
    total += s / static_cast<double>(pairs);
  }
  return total / static_cast<double>(services.size());
}

}  // namespace detail

/// Message-level cohesion: mean pairwise 1/2 (J(params) + J({return})) of public operations.
inline double chm(const Decomposition& d, const LabeledCorpus& corpus) {
  return detail::service_cohesion(d, corpus, [](const detail::Operation& a, const detail::Operation& b) {
    return 0.5 * (detail::jaccard(a.params, b.params) + (a.ret == b.ret ? 1.0 : 0.0));
  });
}

/// Domain-level cohesion: mean pairwise Jaccard of method-name terms.
inline double chd(const Decomposition& d, const LabeledCorpus& corpus) {
  return detail::service_cohesion(d, corpus, [](const detail::Operation& a, const detail::Operation& b) {
    return detail::jaccard(a.name_terms, b.name_terms);
  });
}

/// Mean use-case entropy per service.
inline double bcp(const Decomposition& d, const UseCaseTraces& traces, const LabeledCorpus& corpus) {
  if (d.n() != corpus.size()) fail_input("decomposition and corpus sizes differ");
  std::vector<std::set<int>> cases;
  for (const auto& [name, fqns] : traces.cases) {
    std::set<int> ids;
    for (const auto& f : fqns) {
      const auto id = corpus.find(f);
      if (!id) fail_input("trace '" + name + "' names unknown class " + f);
      ids.insert(*id);
    }
    cases.push_back(std::move(ids));
  }
  const auto services = d.services();
  double total = 0.0;
  bool overlap = false;
  for (const auto& members : services) {
    std::vector<double> counts;
    double sum = 0.0;
    for (const auto& ids : cases) {
      double c = 0;
      for (int m : members) c += ids.count(m);
      counts.push_back(c);
      sum += c;
    }
    if (sum == 0.0) continue;
    overlap = true;
    double h = 0.0;
    for (double c : counts) {
      if (c > 0) h -= (c / sum) * std::log(c / sum);
    }
    total += h;
  }
  if (!overlap) fail_input("traces do not cover any class of the decomposition");
  return total / static_cast<double>(services.size());
}

/// Share of call weight that crosses service boundaries.
inline double icp(const Decomposition& d, const DependencyGraph& calls) {
  if (calls.n != d.n()) fail_input("call graph and decomposition sizes differ");
  double cross = 0.0, total = 0.0;
  for (const auto& e : calls.edges) {
    total += static_cast<double>(e.weight);
    if (!co_member(d, e.src, e.dst)) cross += static_cast<double>(e.weight);
  }
  return total > 0.0 ? cross / total : 0.0;
}

/// Share of classes outside services whose size lies in [lo, hi].
inline double ned(const Decomposition& d, int lo = 5, int hi = 20) {
  if (d.n() == 0) fail_input("empty decomposition");
  std::size_t within = 0;
  for (const auto& m : d.services()) {
    if (static_cast<int>(m.size()) >= lo && static_cast<int>(m.size()) <= hi) within += m.size();
  }
  return 1.0 - static_cast<double>(within) / static_cast<double>(d.n());
}

inline double cov(const Decomposition& d, const LabeledCorpus& corpus) {
  if (d.n() != corpus.size()) fail_input("decomposition and corpus sizes differ");
  if (corpus.size() == 0) fail_input("empty corpus");
  return static_cast<double>(d.assigned()) / static_cast<double>(corpus.size());
}

/// Full battery; BCP is only computed when traces are given (0 otherwise).
inline MetricsReport evaluate_decomposition(const Decomposition& d, const LabeledCorpus& corpus,
                                            const UseCaseTraces* traces = nullptr, const Decomposition* truth = nullptr,
                                            double beta = 0.25) {
  MetricsReport r;
  r.chm = chm(d, corpus);
  r.chd = chd(d, corpus);
  r.bcp = traces ? bcp(d, *traces, corpus) : 0.0;
  r.icp = icp(d, corpus.calls);
  r.ned = ned(d);
  r.cov = cov(d, corpus);
  if (truth) r.fbeta = pairwise_fbeta(d, *truth, beta);
  return r;
}

// ---------------------------------------------------------------------------
// Cross-approach aggregate
// ---------------------------------------------------------------------------

struct MetricWeights {
  double chm = 2, chd = 2, bcp = -2, icp = -2, ned = -1, cov = 1;
};

/// approach -> app -> report
using ReportTable = std::map<std::string, std::map<std::string, MetricsReport>>;

namespace detail {

/// z-scores with the sample standard deviation; zero variance gives zeros.
inline std::vector<double> zscores(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> z(v.size(), 0.0);
  const double scale = std::max({1.0, std::abs(*std::max_element(v.begin(), v.end())),
                                 std::abs(*std::min_element(v.begin(), v.end()))});
  if (sd <= 1e-12 * scale) return z;
  for (std::size_t i = 0; i < v.size(); ++i) z[i] = (v[i] - mean) / sd;
  return z;
}

}  // namespace detail

/// Mean over apps of the weighted sum of per-app z-scored metrics.
inline std::map<std::string, double> aggregate_score(const ReportTable& reports, const MetricWeights& w = {}) {
  if (reports.size() < 2) fail_input("standardization undefined: aggregate SCORE needs at least 2 approaches");
  std::set<std::string> apps;
  for (const auto& [approach, per_app] : reports) {
    for (const auto& [app, r] : per_app) apps.insert(app);
  }
  std::map<std::string, double> sum;
  std::map<std::string, int> count;
  for (const auto& app : apps) {
    std::vector<std::string> names;
    std::vector<const MetricsReport*> rs;
    for (const auto& [approach, per_app] : reports) {
      const auto it = per_app.find(app);
      if (it == per_app.end()) continue;
      names.push_back(approach);
      rs.push_back(&it->second);
    }
    if (rs.size() < 2) fail_input("standardization undefined: app " + app + " has fewer than 2 approaches");
    auto column = [&](double MetricsReport::*field) {
      std::vector<double> v;
      for (const auto* r : rs) v.push_back(r->*field);
      return detail::zscores(v);
    };
    const auto zchm = column(&MetricsReport::chm), zchd = column(&MetricsReport::chd);
    const auto zbcp = column(&MetricsReport::bcp), zicp = column(&MetricsReport::icp);
    const auto zned = column(&MetricsReport::ned), zcov = column(&MetricsReport::cov);
    for (std::size_t a = 0; a < rs.size(); ++a) {
      sum[names[a]] += w.chm * zchm[a] + w.chd * zchd[a] + w.bcp * zbcp[a] + w.icp * zicp[a] + w.ned * zned[a] +
                       w.cov * zcov[a];
      ++count[names[a]];
    }
  }
  std::map<std::string, double> out;
  for (const auto& [name, s] : sum) out[name] = s / count[name];
  return out;
}

inline ojson metrics_to_json(const MetricsReport& r) {
  ojson j;
  j["chm"] = r.chm;
  j["chd"] = r.chd;
  j["bcp"] = r.bcp;
  j["icp"] = r.icp;
  j["ned"] = r.ned;
  j["cov"] = r.cov;
  if (r.fbeta) j["fbeta"] = *r.fbeta;
  if (r.score) j["score"] = *r.score;
  return j;
}

inline MetricsReport metrics_from_json(const nlohmann::json& j, const std::string& name = "report") {
  MetricsReport r;
  try {
    r.chm = j.at("chm").get<double>();
    r.chd = j.at("chd").get<double>();
    r.bcp = j.at("bcp").get<double>();
    r.icp = j.at("icp").get<double>();
    r.ned = j.at("ned").get<double>();
    r.cov = j.at("cov").get<double>();
    if (j.contains("fbeta")) r.fbeta = j["fbeta"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail_input(name + ": " + e.what());
  }
  return r;
}

}  // namespace monoembed
