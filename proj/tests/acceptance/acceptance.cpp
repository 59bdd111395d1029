// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "monoembed/clustering.hpp"
#include "monoembed/corpus_builder.hpp"
#include "monoembed/corpus_io.hpp"
#include "monoembed/evaluation.hpp"
#include "monoembed/projection.hpp"
#include "monoembed/remote.hpp"
#include "monoembed/triplet_loss.hpp"
#include "mock_embed_server.hpp"
#include "quality_oracle.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace monoembed;

namespace {

/// Collects failed expectations for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(15);
    s << what << ": got " << got << ", want " << want << " +/- " << tol;
    expect(std::abs(got - want) <= tol, s.str());
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

/// Runs the CLI binary inside `dir` and returns its exit code.
int run_cli(const fs::path& dir, const std::vector<std::string>& args) {
  std::string cmd = "cd " + quote(dir.string()) + " && " + quote(MONOEMBED_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

LabeledCorpus minipet() {
  const auto dir = testing::fixtures() / "minipet";
  auto c = analyze_source_tree(dir / "src", "minipet");
  apply_labels(c, load_label_map(dir / "labels.json"), "labels.json");
  return c;
}

Decomposition parts(std::vector<int> labels) { return Decomposition::from_labels("t", "x", std::move(labels)); }

// 1 ---------------------------------------------------------------------------
void quality_oracle_check(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::vector<LabeledCorpus> corpora;
  std::map<std::string, EmbeddingMatrix> embeddings;
  for (int t = 0; t < 50; ++t) {
    LabeledCorpus corpus;
    corpus.app_name = "rand" + std::to_string(t);
    const int n = 4 + static_cast<int>(rng() % 7), m = 1 + static_cast<int>(rng() % 6);
    const int services = 2 + static_cast<int>(rng() % 3);
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) {
      // the first two classes share a service and the third differs, the rest are random
      const int s = i < 2 ? 0 : i == 2 ? 1 : static_cast<int>(rng() % services);
      labels.push_back("s" + std::to_string(s));
      corpus.classes.push_back(ClassUnit{i, "p.C" + std::to_string(i)});
    }
    corpus.labels = labels;
    corpus.calls.n = corpus.interactions.n = n;
    EmbeddingMatrix e{corpus.app_name, "random", Matrix(n, m), identity_ids(n)};
    for (double& v : e.values.data()) v = g(rng);
    embeddings.emplace(corpus.app_name, e);
    corpora.push_back(corpus);
  }
  const auto rep = embedding_quality_score([&](const LabeledCorpus& k) { return embeddings.at(k.app_name); }, corpora);
  double mean = 0;
  for (const auto& corpus : corpora) {
    const double want = testing::quality_oracle(embeddings.at(corpus.app_name).values, *corpus.labels);
    c.near(rep.per_app.at(corpus.app_name), want, 1e-12, corpus.app_name);
    mean += want / 50.0;
  }
  c.near(rep.mean, mean, 1e-12, "mean");
  const double secs = seconds_since(t0);
  c.expect(secs < 5.0, "runtime " + std::to_string(secs) + " s");
}

// 2 ---------------------------------------------------------------------------
void calibration_check(Check& c) {
  const auto [flat, flat_labels] = testing::uninformative_embedding(500);
  c.near(embedding_quality(flat, flat_labels), std::log(2.0), 1e-3, "uninformative");

  EmbeddingMatrix blocks{"b", "test", Matrix::from_rows({{1, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}, {0, 1}}), identity_ids(6)};
  const double perfect = embedding_quality(blocks, {"a", "a", "a", "b", "b", "b"});
  c.expect(perfect < 0.01, "perfect blocks scored " + std::to_string(perfect));

  const auto res = analyze_repo(testing::fixtures() / "twin" / "repo", "twin");
  c.expect(res.corpus.has_value(), "twin fixture rejected");
  if (!res.corpus) return;
  const auto& corpus = *res.corpus;
  const auto triplets = sample_triplets({corpus}, {2000, 3, {}});
  const auto model = train_projection(triplets, {corpus}, TrainConfig{});
  const double raw = embedding_quality(embed_tfidf(corpus), *corpus.labels);
  const double trained = embedding_quality(apply_projection(model, corpus), *corpus.labels);
  c.expect(trained < raw, "trained " + std::to_string(trained) + " not below tfidf " + std::to_string(raw));
}

// 3 ---------------------------------------------------------------------------
// Each gradient is a difference of unit vectors, so 1 is the natural floor for the
// denominator; without it an exactly-zero gradient (1-D, p and n on the same side of a)
// turns 1e-10 of rounding into a relative error of 1.
double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0, scale = 1;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    diff += std::pow(analytic[k] - numeric[k], 2);
    scale = std::max(scale, std::hypot(analytic[k], numeric[k]));
  }
  return std::sqrt(diff) / scale;
}

void gradient_check(Check& c) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> ua(0.05, 3.0);
  const double h = 1e-6;
  double worst = 0;
  int checked = 0;
  while (checked < 1000) {
    const std::size_t d = 1 + rng() % 12;
    std::vector<double> a(d), p(d), n(d);
    for (std::size_t k = 0; k < d; ++k) {
      a[k] = g(rng);
      p[k] = g(rng);
      n[k] = g(rng);
    }
    const double alpha = ua(rng);
    // active hinge, and far enough from the kink for a central difference
    if (euclidean_distance(a, p) - euclidean_distance(a, n) + alpha < 1e-6 + 4 * h) continue;
    const auto grad = triplet_loss_gradient(a, p, n, alpha);
    auto numeric = [&](std::vector<double>& x) {
      std::vector<double> out(d);
      for (std::size_t k = 0; k < d; ++k) {
        const double keep = x[k];
        x[k] = keep + h;
        const double up = triplet_loss(a, p, n, alpha);
        x[k] = keep - h;
        const double down = triplet_loss(a, p, n, alpha);
        x[k] = keep;
        out[k] = (up - down) / (2 * h);
      }
      return out;
    };
    worst = std::max({worst, relative_error(grad.d_anchor, numeric(a)), relative_error(grad.d_positive, numeric(p)),
                      relative_error(grad.d_negative, numeric(n))});
    ++checked;
  }
  c.expect(worst < 1e-4, "max relative error " + std::to_string(worst));
}

// 4 ---------------------------------------------------------------------------
void loss_examples_check(Check& c) {
  using V = std::vector<double>;
  // a = p: max(0, -|a-n| + alpha) with |a-n| = 0.5
  c.expect(triplet_loss(V{1, 1}, V{1, 1}, V{1, 1.5}, 1.0) == 0.5, "a=p example");
  // a = n: |a-p| + alpha
  c.expect(triplet_loss(V{0, 0}, V{3, 4}, V{0, 0}, 0.25) == 5.25, "a=n example");
  c.expect(triplet_loss(V{0, 0}, V{3, 4}, V{6, 8}, 1.0) == 0.0, "norms 5 and 10 example");
}

// 5 ---------------------------------------------------------------------------
LabeledCorpus sized_corpus(const std::string& app, const std::vector<int>& sizes) {
  LabeledCorpus c;
  c.app_name = app;
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    for (int j = 0; j < sizes[s]; ++j) {
      c.classes.push_back(ClassUnit{c.size(), app + ".s" + std::to_string(s) + "c" + std::to_string(j)});
      labels.push_back("s" + std::to_string(s));
    }
  }
  c.labels = labels;
  c.calls.n = c.interactions.n = c.size();
  return c;
}

void sampler_check(Check& c) {
  const std::vector<LabeledCorpus> corpora{sized_corpus("alpha", {6, 5, 4}), sized_corpus("beta", {8, 3}),
                                           sized_corpus("gamma", {2, 2, 2, 7}), sized_corpus("excluded", {9, 9})};
  std::map<std::pair<std::string, std::string>, std::string> service;
  for (const auto& corpus : corpora)
    for (const auto& cls : corpus.classes) service[{corpus.app_name, cls.fqn}] = (*corpus.labels)[cls.id];

  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const SamplerConfig cfg{10000, seed, {"excluded"}};
    const auto t = sample_triplets(corpora, cfg);
    c.expect(!t.empty(), "no triplets");
    c.expect(static_cast<std::int64_t>(t.size()) <= cfg.k, "count above K");
    c.expect(std::set<Triplet>(t.begin(), t.end()).size() == t.size(), "duplicate triplet");
    for (const auto& x : t) {
      c.expect(x.repo != "excluded", "excluded repo sampled");
      const auto a = service.find({x.repo, x.anchor}), p = service.find({x.repo, x.positive}),
                 n = service.find({x.repo, x.negative});
      const bool known = a != service.end() && p != service.end() && n != service.end();
      c.expect(known, "class outside its repo: " + x.anchor + " " + x.positive + " " + x.negative);
      if (!known) continue;
      c.expect(x.anchor != x.positive, "anchor equals positive");
      c.expect(a->second == p->second, "anchor/positive in different services");
      c.expect(a->second != n->second, "negative in anchor's service");
    }
    c.expect(sample_triplets(corpora, cfg) == t, "seed not reproducible");
  }
}

// 6 ---------------------------------------------------------------------------
void clustering_check(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto x = standardize(load_embedding(testing::fixtures() / "blobs" / "blobs.emb.csv").values);
  const auto truth = load_decomposition(testing::fixtures() / "blobs" / "truth.json");
  c.expect(x.rows() == 60, "blob fixture size");
  auto run = [&](const std::string& algorithm, std::optional<int> k) {
    ClusterConfig cfg;
    cfg.algorithm = algorithm;
    cfg.k = k;
    cfg.damping = 0.65;
    cfg.eps = 0.5;
    cfg.min_pts = 4;
    cfg.seed = 0;
    return cluster(x, cfg, "blobs");
  };
  for (const auto& [algorithm, k] : std::vector<std::pair<std::string, std::optional<int>>>{
           {"affinity", std::nullopt}, {"kmeans", 3}, {"ward", 3}}) {
    c.near(pairwise_fbeta(run(algorithm, k), truth), 1.0, 0.0, algorithm + " F0.25");
  }
  c.expect(dbscan_noise_count(x, 0.5, 4) == 0, "dbscan noise points");
  c.expect(run("dbscan", std::nullopt).k == 3, "dbscan cluster count");
  const double secs = seconds_since(t0);
  c.expect(secs < 10.0, "runtime " + std::to_string(secs) + " s");
}

// 7 ---------------------------------------------------------------------------
void fbeta_check(Check& c) {
  // truth {a,b},{c,d}; predicted {a,b,c},{d}: P = 1/3, R = 1/2 by enumerating the six pairs
  const double p = 1.0 / 3, r = 0.5, b2 = 0.0625;
  const double hand = (1 + b2) * p * r / (b2 * p + r);
  const double f = pairwise_fbeta(parts({0, 0, 0, 1}), parts({0, 0, 1, 1}));
  c.near(f, hand, 1e-4, "hand enumeration");
  c.near(f, 0.3400, 1e-4, "0.3400");
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng() % 20), k = 1 + static_cast<int>(rng() % 6);
    std::vector<int> a(n), b(n), relabeled(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % k);
      b[i] = static_cast<int>(rng() % k);
      relabeled[i] = 7 * (k - a[i]);
    }
    c.expect(pairwise_fbeta(parts(a), parts(a)) == 1.0, "F(D,D) != 1");
    c.expect(pairwise_fbeta(parts(relabeled), parts(b)) == pairwise_fbeta(parts(a), parts(b)), "relabeling changed F");
    c.expect(pairwise_fbeta(parts(b), parts(relabeled)) == pairwise_fbeta(parts(b), parts(a)), "relabeling truth changed F");
  }
}

// 8 ---------------------------------------------------------------------------
void metrics_check(Check& c) {
  const auto dir = testing::fixtures() / "minipet";
  const auto corpus = minipet();
  const auto traces = load_traces(dir / "traces.json");
  const auto golden = testing::read_json(dir / "golden" / "metrics_split3.json");
  const auto r = evaluate_decomposition(load_decomposition(dir / "split3.json", corpus.size()), corpus, &traces);
  const std::vector<std::pair<std::string, double>> got{{"chm", r.chm}, {"chd", r.chd}, {"icp", r.icp},
                                                        {"bcp", r.bcp}, {"ned", r.ned}, {"cov", r.cov}};
  for (const auto& [key, v] : got) c.near(v, golden.at(key).get<double>(), 1e-9, key);

  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const int k = 1 + static_cast<int>(rng() % 6);
    std::vector<int> labels(corpus.size());
    for (auto& l : labels) l = static_cast<int>(rng() % (k + 1)) - 1;
    if (std::all_of(labels.begin(), labels.end(), [](int l) { return l < 0; })) labels[0] = 0;
    const auto m = evaluate_decomposition(parts(labels), corpus, &traces);
    for (double v : {m.chm, m.chd, m.icp, m.ned, m.cov}) c.expect(v >= 0.0 && v <= 1.0, "metric outside [0,1]");
    c.expect(m.bcp >= 0.0 && m.bcp <= std::log(static_cast<double>(traces.cases.size())) + 1e-12, "bcp outside [0, ln U]");
  }
}

// 9 ---------------------------------------------------------------------------
void aggregate_check(Check& c) {
  const MetricsReport good{0.9, 0.8, 0.1, 0.1, 0.2, 1.0}, bad{0.5, 0.4, 0.7, 0.6, 0.9, 0.7};
  const auto s = aggregate_score({{"good", {{"app", good}}}, {"bad", {{"app", bad}}}});
  c.expect(s.at("good") > 0, "dominant approach not positive");
  c.near(s.at("good"), -s.at("bad"), 1e-12, "symmetry");

  const auto same = aggregate_score({{"a", {{"app", good}}}, {"b", {{"app", good}}}});
  c.expect(same.at("a") == 0.0 && same.at("b") == 0.0, "identical approaches not zero");

  // CHM/CHD count twice in favour, BCP/ICP twice against, NED once against, COV once in favour
  const MetricsReport base{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  const std::vector<std::tuple<std::string, double MetricsReport::*, double>> weights{
      {"chm", &MetricsReport::chm, 2}, {"chd", &MetricsReport::chd, 2}, {"bcp", &MetricsReport::bcp, -2},
      {"icp", &MetricsReport::icp, -2}, {"ned", &MetricsReport::ned, -1}, {"cov", &MetricsReport::cov, 1}};
  for (const auto& [name, field, w] : weights) {
    MetricsReport higher = base;
    higher.*field += 0.1;
    const auto r = aggregate_score({{"base", {{"app", base}}}, {"higher", {{"app", higher}}}});
    c.near(r.at("higher"), w / std::sqrt(2.0), 1e-12, name + " weight");
  }
}

// 10 --------------------------------------------------------------------------
void end_to_end_check(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  testing::TempDir tmp;
  const auto dir = testing::fixtures() / "minipet";
  for (const auto* run : {"run1", "run2"}) {
    const auto work = tmp.path() / run;
    fs::create_directories(work);
    const std::vector<std::vector<std::string>> steps{
        {"analyze", (dir / "src").string(), "-o", "mp.corpus.jsonl", "--app", "minipet"},
        {"embed", "mp.corpus.jsonl", "-o", "mp.emb.csv", "--provider", "tfidf"},
        {"decompose", "mp.emb.csv", "-o", "mp.decomp.json", "--algorithm", "affinity", "--seed", "0"},
        {"eval-decomposition", "mp.decomp.json", "mp.corpus.jsonl", "-o", "mp.metrics.json", "--traces",
         (dir / "traces.json").string(), "--approach", "tfidf-affinity"}};
    for (const auto& step : steps) {
      const int code = run_cli(work, step);
      c.expect(code == 0, std::string(run) + ": " + step[0] + " exited " + std::to_string(code));
      if (code != 0) return;
    }
  }
  const auto a = tmp.path() / "run1", b = tmp.path() / "run2";
  const auto corpus = load_corpus(a / "mp.corpus.jsonl");
  const auto d = load_decomposition(a / "mp.decomp.json", corpus.size());
  c.expect(d.k >= 2, "k = " + std::to_string(d.k));
  std::vector<int> seen(corpus.size(), 0);
  for (const auto& members : d.services())
    for (int id : members) ++seen[id];
  c.expect(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }), "not a partition");
  c.near(testing::read_json(a / "mp.metrics.json")["metrics"]["cov"].get<double>(), 1.0, 0.0, "COV");

  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) names.insert(e.path().filename().string());
  c.expect(names.size() >= 8, "missing outputs");
  for (const auto& name : names) {
    c.expect(fs::exists(a / name) && fs::exists(b / name) && testing::slurp(a / name) == testing::slurp(b / name),
             name + " differs between runs");
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 30.0, "runtime " + std::to_string(secs) + " s");
}

// 11 --------------------------------------------------------------------------
void remote_check(Check& c) {
  testing::TempDir tmp;
  const auto dir = testing::fixtures() / "minipet";
  c.expect(run_cli(tmp.path(), {"analyze", (dir / "src").string(), "-o", "mp.corpus.jsonl"}) == 0, "analyze failed");
  const auto corpus = load_corpus(tmp.path() / "mp.corpus.jsonl");

  auto embed = [&](mock::Mode mode, const std::string& out) {
    mock::MockEmbedServer server({4, 30, 11, mode});
    server.start();
    return run_cli(tmp.path(), {"embed", "mp.corpus.jsonl", "-o", out, "--provider", "remote", "--endpoint",
                                server.endpoint(), "--model-name", "mock", "--batch-size", "2", "--concurrency", "4",
                                "--retries", "2", "--backoff-ms", "5"});
  };

  const int ok = embed(mock::Mode::ok, "remote.csv");
  c.expect(ok == 0, "ok mode exited " + std::to_string(ok));
  if (ok == 0) {
    const auto e = load_embedding(tmp.path() / "remote.csv");
    c.expect(e.class_ids == identity_ids(corpus.classes.size()), "class ids out of order");
    RemoteConfig cfg;
    for (const auto& cls : corpus.classes) {
      const auto want = mock::mock_embedding(remote_payload(cls, cfg), 4);
      for (int j = 0; j < 4; ++j) c.near(e.values(cls.id, j), want[j], 0.0, "row " + std::to_string(cls.id));
    }
  }
  const int mismatch = embed(mock::Mode::mismatch, "mismatch.csv");
  c.expect(mismatch == 3, "dimension mismatch exited " + std::to_string(mismatch));
  const int exhausted = embed(mock::Mode::fail, "fail.csv");
  c.expect(exhausted == 4, "retry exhaustion exited " + std::to_string(exhausted));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"quality score matches brute-force oracle", quality_oracle_check},
      {"quality score calibration", calibration_check},
      {"triplet loss gradient", gradient_check},
      {"triplet loss examples are exact", loss_examples_check},
      {"triplet sampler invariants", sampler_check},
      {"clustering recovers blobs", clustering_check},
      {"pairwise F-beta", fbeta_check},
      {"metric battery on minipet", metrics_check},
      {"aggregate SCORE", aggregate_check},
      {"end-to-end CLI pipeline", end_to_end_check},
      {"remote provider contract", remote_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (c.failures.empty() ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << "\n";
    for (const auto& f : c.failures) std::cout << "    " << f << "\n";
    failed += c.failures.empty() ? 0 : 1;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
