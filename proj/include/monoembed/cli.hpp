#pragma once

// Eigen first: httplib pulls in <resolv.h>, whose _res macro breaks Eigen headers.
#include "monoembed/pca.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "monoembed/clustering.hpp"
#include "monoembed/code_model.hpp"
#include "monoembed/corpus_builder.hpp"
#include "monoembed/corpus_io.hpp"
#include "monoembed/embedding.hpp"
#include "monoembed/error.hpp"
#include "monoembed/evaluation.hpp"
#include "monoembed/github.hpp"
#include "monoembed/manifest.hpp"
#include "monoembed/projection.hpp"
#include "monoembed/provider.hpp"

namespace monoembed::cli {

namespace fs = std::filesystem;

inline std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

inline void write_json_file(const fs::path& p, const ojson& j) {
  auto out = detail::open_out(p);
  out << j.dump(1) << '\n';
}

// ---------------------------------------------------------------------------
// Option groups shared by several commands
// ---------------------------------------------------------------------------

struct ProviderOptions {
  ProviderConfig cfg;
  std::string instruction;
  bool no_instruction = false;

  void attach(CLI::App* sub) {
    sub->add_option("--provider", cfg.kind, "bow, tfidf, calls_row, interactions_row, remote or projection")
        ->capture_default_str();
    sub->add_flag("--symmetric", cfg.symmetric, "Symmetrize graph-row features");
    sub->add_option("--model", cfg.model_path, "Projection model file (provider projection)");
    sub->add_option("--endpoint", cfg.remote.endpoint, "Embeddings endpoint URL (provider remote)");
    sub->add_option("--model-name", cfg.remote.model_name, "Remote model name");
    sub->add_option("--instruction", instruction, "Prefix sent before each class source");
    sub->add_flag("--no-instruction", no_instruction, "Send the bare class source");
    sub->add_option("--batch-size", cfg.remote.batch_size)->capture_default_str();
    sub->add_option("--max-chars", cfg.remote.max_chars)->capture_default_str();
    sub->add_option("--concurrency", cfg.remote.concurrency)->capture_default_str();
    sub->add_option("--retries", cfg.remote.retries)->capture_default_str();
    sub->add_option("--backoff-ms", cfg.remote.backoff_ms)->capture_default_str();
    sub->add_option("--timeout", cfg.remote.timeout_s, "Per-request timeout in seconds")->capture_default_str();
  }

  ProviderConfig resolve() const {
    ProviderConfig c = cfg;
    if (no_instruction) {
      c.remote.instruction.reset();
    } else if (!instruction.empty()) {
      c.remote.instruction = instruction;
    }
    c.remote.api_key = env_or_empty("MONOEMBED_REMOTE_KEY");
    c.validate();
    return c;
  }

  /// Resolved configuration for the manifest (never includes the key).
  static ojson describe(const ProviderConfig& c) {
    ojson j;
    j["provider"] = c.kind;
    if (c.kind == "calls_row" || c.kind == "interactions_row") j["symmetric"] = c.symmetric;
    if (c.kind == "projection") j["model"] = c.model_path;
    if (c.kind == "remote") {
      j["endpoint"] = c.remote.endpoint;
      j["model_name"] = c.remote.model_name;
      j["instruction"] = c.remote.instruction ? ojson(*c.remote.instruction) : ojson(nullptr);
      j["batch_size"] = c.remote.batch_size;
      j["max_chars"] = c.remote.max_chars;
      j["concurrency"] = c.remote.concurrency;
      j["retries"] = c.remote.retries;
    }
    return j;
  }
};

inline void hash_corpus_inputs(RunManifest& m, const fs::path& corpus_file) {
  const auto paths = CorpusPaths::from_corpus(corpus_file);
  m.add_input(paths.corpus);
  if (fs::exists(paths.calls)) m.add_input(paths.calls);
  if (fs::exists(paths.interactions)) m.add_input(paths.interactions);
}

inline void hash_corpora_dir(RunManifest& m, const fs::path& dir) {
  for (const auto& p : list_corpus_files(dir)) hash_corpus_inputs(m, p);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  fs::path src, out, labels;
  std::string app;
};

inline int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  if (!fs::is_directory(a.src)) fail_input("not a directory: " + a.src.string());
  std::string app = a.app;
  if (app.empty()) {
    const auto abs = fs::weakly_canonical(a.src);
    app = abs.filename() == "src" ? abs.parent_path().filename().string() : abs.filename().string();
  }
  std::vector<std::string> warnings;
  auto corpus = analyze_source_tree(a.src, app, {}, &warnings);
  if (corpus.classes.empty()) fail_input("no Java classes found under " + a.src.string());
  RunManifest m;
  m.command = "analyze";
  m.config["app"] = app;
  m.config["terms"] = kTermPolicyVersion;
  m.add_input(a.src);
  if (!a.labels.empty()) {
    apply_labels(corpus, load_label_map(a.labels), a.labels.string());
    m.config["labels"] = a.labels.generic_string();
    m.add_input(a.labels);
  }
  save_corpus(a.out, corpus);
  const auto paths = CorpusPaths::from_corpus(a.out);
  m.add_output(paths.corpus);
  m.add_output(paths.calls);
  m.add_output(paths.interactions);
  m.save(manifest_path_for(a.out));
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  out << app << ": " << corpus.size() << " classes, " << corpus.calls.edges.size() << " call edges, "
      << corpus.interactions.edges.size() << " interaction edges\n";
  return 0;
}

struct MineArgs {
  fs::path repos_file, search_response, workdir = "mine-work", out;
  std::vector<std::string> queries;
  std::string api_base = "https://api.github.com";
  int min_stars = 10;
  int max_pages = 10;
  bool offline = false;
};

inline bool looks_like_url(const std::string& s) {
  return s.find("://") != std::string::npos || s.rfind("git@", 0) == 0;
}

inline std::string repo_name_from_url(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  if (url.ends_with(".git")) url.resize(url.size() - 4);
  const auto cut = url.find_last_of("/:");
  return cut == std::string::npos ? url : url.substr(cut + 1);
}

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

inline int cmd_mine(const MineArgs& a, std::ostream& out) {
  const int modes = !a.repos_file.empty() + !a.search_response.empty() + !a.queries.empty();
  if (modes != 1) fail_usage("mine needs exactly one of --repos, --search-response, --query");
  RunManifest m;
  m.command = "mine";
  m.config["min_stars"] = a.min_stars;
  m.config["offline"] = a.offline;

  // (label, location) pairs; location is a local directory or a git URL
  std::vector<std::pair<std::string, std::string>> sources;
  if (!a.repos_file.empty()) {
    m.add_input(a.repos_file);
    auto in = detail::open_in(a.repos_file);
    std::string line;
    while (std::getline(in, line)) {
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
      if (looks_like_url(line)) {
        sources.emplace_back(line, line);
      } else {
        const fs::path p = fs::path(line).is_absolute() ? fs::path(line) : a.repos_file.parent_path() / line;
        sources.emplace_back(line, p.string());
      }
    }
  } else {
    std::vector<RepoCandidate> found;
    if (!a.search_response.empty()) {
      m.add_input(a.search_response);
      FileSearchClient client(a.search_response);
      found = discover_repos(client, a.min_stars, default_search_queries(), a.max_pages);
    } else {
      m.config["queries"] = a.queries;
      GitHubOptions opts;
      opts.api_base = a.api_base;
      opts.token = env_or_empty("MONOEMBED_GH_TOKEN");
      opts.cache_dir = a.workdir / "cache";
      opts.offline = a.offline;
      GitHubSearchClient client(opts);
      found = discover_repos(client, a.min_stars, a.queries, a.max_pages);
    }
    for (const auto& c : found) sources.emplace_back(c.url, c.url);
  }

  ojson report;
  report["accepted"] = ojson::array();
  report["rejected"] = ojson::array();
  report["warnings"] = ojson::array();
  std::set<std::string> apps;
  for (const auto& [label, location] : sources) {
    fs::path dir;
    std::string app;
    if (looks_like_url(location)) {
      app = repo_name_from_url(location);
      dir = a.workdir / "clones" / app;
      if (!fs::exists(dir)) {
        if (a.offline) fail_network("offline: " + location + " is not cloned under " + dir.string());
        fs::create_directories(dir.parent_path());
        const std::string cmd = "git clone --depth 1 --quiet " + shell_quote(location) + " " + shell_quote(dir.string());
        if (std::system(cmd.c_str()) != 0) {
          report["rejected"].push_back({{"source", label}, {"reason", "clone-failed"}});
          continue;
        }
      }
    } else {
      dir = location;
      if (!fs::is_directory(dir)) fail_input("not a directory: " + location);
      app = fs::weakly_canonical(dir).filename().string();
    }
    if (!apps.insert(app).second) fail_input("two repositories map to the app name '" + app + "'");
    auto res = analyze_repo(dir, app);
    for (const auto& w : res.warnings) report["warnings"].push_back(app + ": " + w);
    if (!res.corpus) {
      report["rejected"].push_back({{"source", label}, {"reason", res.rejection}});
      continue;
    }
    const fs::path file = a.out / (app + ".corpus.jsonl");
    save_corpus(file, *res.corpus);
    const auto paths = CorpusPaths::from_corpus(file);
    m.add_output(paths.corpus);
    m.add_output(paths.calls);
    m.add_output(paths.interactions);
    report["accepted"].push_back({{"source", label},
                                  {"app", app},
                                  {"classes", res.corpus->size()},
                                  {"services", res.corpus->services().size()}});
  }
  const fs::path report_file = a.out / "mining_report.json";
  write_json_file(report_file, report);
  m.add_output(report_file);
  m.save(manifest_path_for(report_file));
  out << report["accepted"].size() << " corpora written, " << report["rejected"].size() << " rejected\n";
  return 0;
}

struct TripletArgs {
  fs::path corpora, out, exclusions;
  std::int64_t k = 1000;
  std::uint64_t seed = 0;
};

inline std::vector<std::string> read_name_list(const fs::path& p) {
  auto in = detail::open_in(p);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    names.push_back(line.substr(b, line.find_last_not_of(" \t\r") - b + 1));
  }
  return names;
}

inline int cmd_triplets(const TripletArgs& a, std::ostream& out) {
  if (a.k < 0) fail_usage("--k must be >= 0");
  SamplerConfig cfg;
  cfg.k = a.k;
  cfg.seed = a.seed;
  RunManifest m;
  m.command = "triplets";
  if (!a.exclusions.empty()) {
    cfg.exclusions = read_name_list(a.exclusions);
    m.add_input(a.exclusions);
  }
  const auto corpora = load_corpora(a.corpora);
  hash_corpora_dir(m, a.corpora);
  for (const auto& c : corpora) {
    const auto why = sampling_ineligibility(c, cfg);
    if (!why.empty()) std::cerr << "skipping " << c.app_name << ": " << why << '\n';
  }
  const auto triplets = sample_triplets(corpora, cfg);
  {
    auto f = detail::open_out(a.out);
    write_triplets(f, triplets, cfg.seed);
  }
  m.config["k"] = cfg.k;
  m.config["exclusions"] = cfg.exclusions;
  m.seeds["sampler"] = cfg.seed;
  m.add_output(a.out);
  m.save(manifest_path_for(a.out));
  out << triplets.size() << " triplets\n";
  return 0;
}

struct EmbedArgs {
  fs::path corpus, out;
  ProviderOptions provider;
};

inline int cmd_embed(const EmbedArgs& a, std::ostream& out) {
  const auto cfg = a.provider.resolve();
  ConfiguredProvider provider(cfg);
  const auto corpus = load_corpus(a.corpus);
  const auto e = provider(corpus);
  save_embedding(a.out, e);
  RunManifest m;
  m.command = "embed";
  m.config = ProviderOptions::describe(cfg);
  hash_corpus_inputs(m, a.corpus);
  if (cfg.kind == "projection") m.add_input(cfg.model_path);
  m.add_output(a.out);
  m.save(manifest_path_for(a.out));
  out << corpus.app_name << ": " << e.n() << " x " << e.m() << " (" << cfg.kind << ")\n";
  return 0;
}

struct TrainArgs {
  fs::path triplets, corpora, out, loss_csv, cached;
  TrainConfig cfg;
};

inline CachedFeatures load_cached_embeddings(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail_input("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  CachedFeatures out;
  for (const auto& f : files) {
    auto e = load_embedding(f);
    const std::string app = e.app_name;
    if (!out.emplace(app, std::move(e)).second) fail_input("two cached embeddings for app " + app);
  }
  return out;
}

inline int cmd_train(const TrainArgs& a, std::ostream& out) {
  a.cfg.validate();
  RunManifest m;
  m.command = "train";
  std::vector<Triplet> triplets;
  {
    auto in = detail::open_in(a.triplets);
    triplets = read_triplets(in, a.triplets.string());
  }
  m.add_input(a.triplets);
  const auto corpora = load_corpora(a.corpora);
  hash_corpora_dir(m, a.corpora);
  std::optional<CachedFeatures> cached;
  if (a.cfg.base_features == "remote-cached") {
    if (a.cached.empty()) fail_usage("--base-features remote-cached needs --cached-embeddings DIR");
    cached = load_cached_embeddings(a.cached);
    m.add_input(a.cached);
  }
  const auto model = train_projection(triplets, corpora, a.cfg, cached ? &*cached : nullptr);
  save_model(a.out, model);
  const fs::path loss_csv = a.loss_csv.empty() ? fs::path(a.out.string() + ".loss.csv") : a.loss_csv;
  {
    auto f = detail::open_out(loss_csv);
    f << "epoch,loss\n";
    for (std::size_t i = 0; i < model.loss_history.size(); ++i) {
      f << i << ',' << format_double(model.loss_history[i]) << '\n';
    }
  }
  m.config = model_to_json(model)["config"];
  m.seeds["init_and_shuffle"] = a.cfg.seed;
  m.add_output(a.out);
  m.add_output(loss_csv);
  m.save(manifest_path_for(a.out));
  out << "loss " << model.loss_history.front() << " -> " << model.loss_history.back() << " over "
      << a.cfg.epochs << " epochs, " << triplets.size() << " triplets\n";
  return 0;
}

struct DecomposeArgs {
  fs::path embedding, out;
  ClusterConfig cfg;
  std::optional<int> k;
  std::optional<double> preference;
  std::string noise = "nearest";
  bool no_standardize = false;
};

inline int cmd_decompose(DecomposeArgs a, std::ostream& out) {
  a.cfg.k = a.k;
  a.cfg.preference = a.preference;
  a.cfg.noise = a.noise == "singletons" ? NoisePolicy::singletons : NoisePolicy::nearest;
  a.cfg.validate();
  const auto e = load_embedding(a.embedding);
  const int n = static_cast<int>(e.n());
  if (a.cfg.k && *a.cfg.k > n) fail_input("k = " + std::to_string(*a.cfg.k) + " exceeds the " + std::to_string(n) + " classes");
  std::vector<int> row_of(n, -1);
  for (int r = 0; r < n; ++r) {
    const int id = e.class_ids[r];
    if (id < 0 || id >= n || row_of[id] >= 0) fail_input(a.embedding.string() + ": class ids must be 0..n-1, each once");
    row_of[id] = r;
  }
  // cluster rows in class-id order so decompositions index classes directly
  Matrix x(e.n(), e.m());
  for (int id = 0; id < n; ++id) {
    std::copy(e.values.row(row_of[id]).begin(), e.values.row(row_of[id]).end(), x.row(id).begin());
  }
  if (!a.no_standardize) x = standardize(x);
  const auto d = cluster(x, a.cfg, e.app_name);
  save_decomposition(a.out, d);

  RunManifest m;
  m.command = "decompose";
  m.config["algorithm"] = a.cfg.algorithm;
  m.config["k"] = a.cfg.k ? ojson(*a.cfg.k) : ojson(nullptr);
  m.config["damping"] = a.cfg.damping;
  m.config["preference"] = a.cfg.preference ? ojson(*a.cfg.preference) : ojson(nullptr);
  m.config["eps"] = a.cfg.eps;
  m.config["min_pts"] = a.cfg.min_pts;
  m.config["noise"] = a.noise;
  m.config["max_iter"] = a.cfg.max_iter;
  m.config["convergence_iter"] = a.cfg.convergence_iter;
  m.config["n_init"] = a.cfg.n_init;
  m.config["standardize"] = !a.no_standardize;
  m.seeds["cluster"] = a.cfg.seed;
  m.add_input(a.embedding);
  m.add_output(a.out);
  m.save(manifest_path_for(a.out));
  out << e.app_name << ": " << d.k << " services (" << a.cfg.algorithm << ")\n";
  if (!d.converged) {
    std::cerr << "warning: " << a.cfg.algorithm << " did not converge within " << a.cfg.max_iter
              << " iterations; output written\n";
    return static_cast<int>(ErrorKind::non_convergence);
  }
  return 0;
}

struct EvalEmbeddingsArgs {
  fs::path corpora, out;
  ProviderOptions provider;
};

inline int cmd_eval_embeddings(const EvalEmbeddingsArgs& a, std::ostream& out) {
  const auto cfg = a.provider.resolve();
  ConfiguredProvider provider(cfg);
  const auto corpora = load_corpora(a.corpora);
  const auto rep = embedding_quality_score(provider, corpora);
  ojson j;
  j["provider"] = cfg.kind;
  ojson per_app = ojson::object();
  for (const auto& [app, s] : rep.per_app) per_app[app] = s;
  j["per_app"] = per_app;
  j["mean"] = rep.mean;
  write_json_file(a.out, j);
  RunManifest m;
  m.command = "eval-embeddings";
  m.config = ProviderOptions::describe(cfg);
  hash_corpora_dir(m, a.corpora);
  if (cfg.kind == "projection") m.add_input(cfg.model_path);
  m.add_output(a.out);
  m.save(manifest_path_for(a.out));
  for (const auto& [app, s] : rep.per_app) out << app << '\t' << s << '\n';
  out << "mean\t" << rep.mean << '\n';
  return 0;
}

struct EvalDecompositionArgs {
  fs::path decomposition, corpus, truth, traces, out;
  std::string approach;
  double beta = 0.25;
};

inline int cmd_eval_decomposition(const EvalDecompositionArgs& a, std::ostream& out) {
  if (!(a.beta > 0.0)) fail_usage("--beta must be > 0");
  RunManifest m;
  m.command = "eval-decomposition";
  const auto corpus = load_corpus(a.corpus);
  hash_corpus_inputs(m, a.corpus);
  const auto d = load_decomposition(a.decomposition, corpus.size());
  m.add_input(a.decomposition);
  if (d.n() != corpus.size()) fail_input("decomposition covers " + std::to_string(d.n()) + " classes, corpus has " + std::to_string(corpus.size()));
  std::optional<Decomposition> truth;
  std::optional<UseCaseTraces> traces;
  if (!a.truth.empty()) {
    truth = load_decomposition(a.truth, corpus.size());
    m.add_input(a.truth);
  }
  if (!a.traces.empty()) {
    traces = load_traces(a.traces);
    m.add_input(a.traces);
  }
  const auto r = evaluate_decomposition(d, corpus, traces ? &*traces : nullptr, truth ? &*truth : nullptr, a.beta);
  ojson j;
  j["format"] = kMetricsVersion;
  j["app"] = corpus.app_name;
  j["approach"] = a.approach.empty() ? d.algorithm : a.approach;
  j["k"] = d.k;
  j["metrics"] = metrics_to_json(r);
  write_json_file(a.out, j);
  m.config["approach"] = j["approach"];
  m.config["beta"] = a.beta;
  m.add_output(a.out);
  m.save(manifest_path_for(a.out));
  for (const auto& [key, v] : j["metrics"].items()) out << key << '\t' << v.dump() << '\n';
  return 0;
}

struct ScoreArgs {
  fs::path reports, out;
};

inline int cmd_score(const ScoreArgs& a, std::ostream& out) {
  if (!fs::is_directory(a.reports)) fail_input("not a directory: " + a.reports.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a.reports)) {
    if (e.is_regular_file() && e.path().extension() == ".json" && !e.path().string().ends_with(".manifest.json")) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  RunManifest m;
  m.command = "score";
  ReportTable table;
  for (const auto& f : files) {
    nlohmann::json j;
    try {
      auto in = detail::open_in(f);
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception&) {
      continue;  // not a report
    }
    if (!j.is_object() || j.value("format", "") != kMetricsVersion) continue;
    const std::string approach = j.value("approach", ""), app = j.value("app", "");
    if (approach.empty() || app.empty()) fail_input(f.string() + ": report lacks app or approach");
    if (!table[approach].emplace(app, metrics_from_json(j.at("metrics"), f.string())).second) {
      fail_input("two reports for approach " + approach + " on " + app);
    }
    m.add_input(f);
  }
  const auto scores = aggregate_score(table);
  ojson j;
  j["weights"] = {{"chm", 2}, {"chd", 2}, {"bcp", -2}, {"icp", -2}, {"ned", -1}, {"cov", 1}};
  ojson s = ojson::object();
  for (const auto& [approach, v] : scores) s[approach] = v;
  j["scores"] = s;
  ojson rows = ojson::object();
  for (const auto& [approach, apps] : table) {
    for (const auto& [app, r] : apps) rows[approach][app] = metrics_to_json(r);
  }
  j["reports"] = rows;
  write_json_file(a.out, j);
  m.add_output(a.out);
  m.save(manifest_path_for(a.out));
  for (const auto& [approach, v] : scores) out << approach << '\t' << v << '\n';
  return 0;
}

struct ProjectArgs {
  fs::path embedding, out, decomposition;
  bool standardize = false;
};

inline int cmd_project(const ProjectArgs& a, std::ostream& out) {
  RunManifest m;
  m.command = "project";
  m.config["standardize"] = a.standardize;
  auto e = load_embedding(a.embedding);
  m.add_input(a.embedding);
  std::optional<Decomposition> d;
  if (!a.decomposition.empty()) {
    d = load_decomposition(a.decomposition, static_cast<int>(e.n()));
    m.add_input(a.decomposition);
    if (d->n() != static_cast<int>(e.n())) fail_input("decomposition size does not match the embedding");
  }
  const Matrix x = a.standardize ? standardize(e.values) : e.values;
  const auto p = pca_project(x, 2);
  {
    auto f = detail::open_out(a.out);
    f << "class_id,x,y,service\n";
    for (std::size_t r = 0; r < e.n(); ++r) {
      const int id = e.class_ids[r];
      std::string service;
      if (d && id >= 0 && id < d->n() && d->assignment[id] >= 0) service = "s" + std::to_string(d->assignment[id]);
      f << id << ',' << format_double(p(r, 0)) << ',' << format_double(p(r, 1)) << ',' << service << '\n';
    }
  }
  m.add_output(a.out);
  m.save(manifest_path_for(a.out));
  out << e.n() << " points projected\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"monoembed: monolith-to-microservice decomposition with contrastive class embeddings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  AnalyzeArgs analyze;
  auto* s_analyze = app.add_subcommand("analyze", "Parse a Java source tree into a corpus with call/interaction graphs");
  s_analyze->add_option("src", analyze.src, "Source directory")->required();
  s_analyze->add_option("-o,--out", analyze.out, "Corpus file (X.corpus.jsonl)")->required();
  s_analyze->add_option("--app", analyze.app, "Application name");
  s_analyze->add_option("--labels", analyze.labels, "JSON map fqn -> service");

  MineArgs mine;
  auto* s_mine = app.add_subcommand("mine", "Discover/clone/analyze microservice repositories into labeled corpora");
  s_mine->add_option("--repos", mine.repos_file, "File listing local repo directories or git URLs");
  s_mine->add_option("--search-response", mine.search_response, "Saved search API response");
  s_mine->add_option("--query", mine.queries, "GitHub search query (repeatable)");
  s_mine->add_option("--min-stars", mine.min_stars)->capture_default_str();
  s_mine->add_option("--max-pages", mine.max_pages)->capture_default_str();
  s_mine->add_option("--workdir", mine.workdir, "Clone and cache directory")->capture_default_str();
  s_mine->add_option("--api-base", mine.api_base, "GitHub API root")->capture_default_str();
  s_mine->add_flag("--offline", mine.offline, "Use only cached responses and existing clones");
  s_mine->add_option("-o,--out", mine.out, "Output directory for corpora")->required();

  TripletArgs trip;
  auto* s_trip = app.add_subcommand("triplets", "Sample hard-negative triplets from labeled corpora");
  s_trip->add_option("corpora", trip.corpora, "Directory of *.corpus.jsonl")->required();
  s_trip->add_option("-o,--out", trip.out)->required();
  s_trip->add_option("--k", trip.k, "Sampling iterations (maximum triplets)")->capture_default_str();
  s_trip->add_option("--seed", trip.seed)->capture_default_str();
  s_trip->add_option("--exclusions", trip.exclusions, "File with app names to skip, one per line");

  EmbedArgs embed;
  auto* s_embed = app.add_subcommand("embed", "Write class embeddings for a corpus");
  s_embed->add_option("corpus", embed.corpus)->required();
  s_embed->add_option("-o,--out", embed.out)->required();
  embed.provider.attach(s_embed);

  TrainArgs train;
  auto* s_train = app.add_subcommand("train", "Train the triplet-loss projection model");
  s_train->add_option("triplets", train.triplets)->required();
  s_train->add_option("corpora", train.corpora)->required();
  s_train->add_option("-o,--out", train.out, "Model file")->required();
  s_train->add_option("--loss-csv", train.loss_csv, "Loss history (default <out>.loss.csv)");
  s_train->add_option("--alpha", train.cfg.alpha, "Triplet margin")->capture_default_str();
  s_train->add_option("--dim-out", train.cfg.dim_out)->capture_default_str();
  s_train->add_option("--epochs", train.cfg.epochs)->capture_default_str();
  s_train->add_option("--lr", train.cfg.lr)->capture_default_str();
  s_train->add_option("--batch", train.cfg.batch)->capture_default_str();
  s_train->add_option("--seed", train.cfg.seed)->capture_default_str();
  s_train->add_option("--base-features", train.cfg.base_features, "tfidf, bow or remote-cached")->capture_default_str();
  s_train->add_option("--cached-embeddings", train.cached, "Directory of embedding CSVs (remote-cached)");

  DecomposeArgs dec;
  auto* s_dec = app.add_subcommand("decompose", "Cluster an embedding into candidate microservices");
  s_dec->add_option("embedding", dec.embedding)->required();
  s_dec->add_option("-o,--out", dec.out)->required();
  s_dec->add_option("--algorithm", dec.cfg.algorithm, "affinity, kmeans, ward or dbscan")->capture_default_str();
  s_dec->add_option("--k", dec.k, "Number of services (kmeans, ward)");
  s_dec->add_option("--damping", dec.cfg.damping)->capture_default_str();
  s_dec->add_option("--preference", dec.preference, "Affinity preference (default: median similarity)");
  s_dec->add_option("--eps", dec.cfg.eps)->capture_default_str();
  s_dec->add_option("--min-pts", dec.cfg.min_pts)->capture_default_str();
  s_dec->add_option("--noise", dec.noise)->check(CLI::IsMember({"nearest", "singletons"}))->capture_default_str();
  s_dec->add_option("--seed", dec.cfg.seed)->capture_default_str();
  s_dec->add_option("--max-iter", dec.cfg.max_iter)->capture_default_str();
  s_dec->add_option("--convergence-iter", dec.cfg.convergence_iter)->capture_default_str();
  s_dec->add_option("--n-init", dec.cfg.n_init)->capture_default_str();
  s_dec->add_flag("--no-standardize", dec.no_standardize, "Cluster the raw embedding");

  EvalEmbeddingsArgs ee;
  auto* s_ee = app.add_subcommand("eval-embeddings", "Embedding quality score over labeled corpora");
  s_ee->add_option("corpora", ee.corpora)->required();
  s_ee->add_option("-o,--out", ee.out)->required();
  ee.provider.attach(s_ee);

  EvalDecompositionArgs ed;
  auto* s_ed = app.add_subcommand("eval-decomposition", "Metrics for one decomposition");
  s_ed->add_option("decomposition", ed.decomposition)->required();
  s_ed->add_option("corpus", ed.corpus)->required();
  s_ed->add_option("-o,--out", ed.out)->required();
  s_ed->add_option("--truth", ed.truth, "Ground-truth decomposition");
  s_ed->add_option("--traces", ed.traces, "Use-case traces");
  s_ed->add_option("--approach", ed.approach, "Approach name for score tables");
  s_ed->add_option("--beta", ed.beta)->capture_default_str();

  ScoreArgs sc;
  auto* s_score = app.add_subcommand("score", "Aggregate SCORE across approaches");
  s_score->add_option("reports", sc.reports, "Directory of eval-decomposition reports")->required();
  s_score->add_option("-o,--out", sc.out)->required();

  ProjectArgs pr;
  auto* s_proj = app.add_subcommand("project", "2-D PCA coordinates for plotting");
  s_proj->add_option("embedding", pr.embedding)->required();
  s_proj->add_option("-o,--out", pr.out)->required();
  s_proj->add_option("--decomposition", pr.decomposition, "Adds a service column");
  s_proj->add_flag("--standardize", pr.standardize, "z-score columns first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return static_cast<int>(ErrorKind::usage);
  }

  try {
    if (*s_analyze) return cmd_analyze(analyze, out);
    if (*s_mine) return cmd_mine(mine, out);
    if (*s_trip) return cmd_triplets(trip, out);
    if (*s_embed) return cmd_embed(embed, out);
    if (*s_train) return cmd_train(train, out);
    if (*s_dec) return cmd_decompose(dec, out);
    if (*s_ee) return cmd_eval_embeddings(ee, out);
    if (*s_ed) return cmd_eval_decomposition(ed, out);
    if (*s_score) return cmd_score(sc, out);
    if (*s_proj) return cmd_project(pr, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::input);
  }
  return static_cast<int>(ErrorKind::usage);
}

}  // namespace monoembed::cli
