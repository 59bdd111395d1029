#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "monoembed/code_model.hpp"
#include "monoembed/corpus_io.hpp"
#include "monoembed/error.hpp"

namespace monoembed {

// ---------------------------------------------------------------------------
// Repository discovery
// ---------------------------------------------------------------------------

struct RepoCandidate {
  std::string url;
  int stars = 0;
  bool has_java = false;
  std::string matched_query;
  std::string description;
};

/// Pattern a repository description (or readme) must contain, case-insensitive.
inline const std::regex& microservice_pattern() {
  static const std::regex re("micro( |-)?services?( |-)(architecture|system|application)",
                             std::regex::ECMAScript | std::regex::icase);
  return re;
}

inline bool matches_microservice_pattern(const std::string& text) {
  return std::regex_search(text, microservice_pattern());
}

/// Code-host search backend. `search` returns the raw result items of one page
/// (GitHub search API shape: full_name, clone_url/html_url, stargazers_count,
/// description, language); an empty page ends the listing.
class SearchClient {
 public:
  virtual ~SearchClient() = default;
  virtual std::vector<nlohmann::json> search(const std::string& query, int page) = 0;
  /// Readme text for a repository, empty when unavailable.
  virtual std::string readme(const nlohmann::json& /*item*/) { return {}; }
  /// Whether the repository has Java sources; defaults to the primary language field.
  virtual bool has_java(const nlohmann::json& item) {
    return item.contains("language") && item["language"].is_string() && item["language"] == "Java";
  }
};

/// Serves a saved search response ({"items": [...]}) for every query, single page.
class FileSearchClient : public SearchClient {
 public:
  explicit FileSearchClient(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail_input("cannot read search response " + file.string());
    try {
      const auto doc = nlohmann::json::parse(in);
      for (const auto& item : doc.at("items")) items_.push_back(item);
    } catch (const nlohmann::json::exception& e) {
      fail_input(file.string() + ": " + e.what());
    }
  }

  std::vector<nlohmann::json> search(const std::string&, int page) override {
    return page == 1 ? items_ : std::vector<nlohmann::json>{};
  }

  std::string readme(const nlohmann::json& item) override {
    return item.contains("readme") && item["readme"].is_string() ? item["readme"].get<std::string>() : "";
  }

  bool has_java(const nlohmann::json& item) override {
    if (item.contains("has_java") && item["has_java"].is_boolean()) return item["has_java"].get<bool>();
    return SearchClient::has_java(item);
  }

 private:
  std::vector<nlohmann::json> items_;
};

inline std::vector<std::string> default_search_queries() {
  return {"microservice architecture language:Java", "microservices system language:Java",
          "microservice application language:Java", "micro-services architecture language:Java"};
}

/// Candidates whose description or readme matches the microservice pattern,
/// with at least `min_stars` stars and Java sources; deduplicated by URL.
inline std::vector<RepoCandidate> discover_repos(SearchClient& client, int min_stars,
                                                 const std::vector<std::string>& queries = default_search_queries(),
                                                 int max_pages = 10) {
  std::vector<RepoCandidate> out;
  std::set<std::string> seen;
  for (const auto& query : queries) {
    for (int page = 1; page <= max_pages; ++page) {
      const auto items = client.search(query, page);
      if (items.empty()) break;
      for (const auto& item : items) {
        RepoCandidate c;
        c.url = item.value("clone_url", item.value("html_url", std::string()));
        if (c.url.empty() || seen.count(c.url)) continue;
        c.stars = item.value("stargazers_count", 0);
        c.description = item.contains("description") && item["description"].is_string()
                            ? item["description"].get<std::string>()
                            : "";
        c.matched_query = query;
        if (c.stars < min_stars) continue;
        if (!matches_microservice_pattern(c.description) && !matches_microservice_pattern(client.readme(item))) {
          continue;
        }
        c.has_java = client.has_java(item);
        if (!c.has_java) continue;
        seen.insert(c.url);
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Repository analysis
// ---------------------------------------------------------------------------

struct ServiceRoot {
  std::string service_name;
  std::filesystem::path root_path;  // absolute
  std::string rel_path;             // relative to the repository, '/' separated
};

inline constexpr const char* kServiceRootPattern = "main/java";

/// Every directory whose relative path ends with `main/java`, sorted by path.
/// Names come from the module directory (the one holding src/main/java),
/// falling back to the full relative root path when two roots collide.
inline std::vector<ServiceRoot> find_service_roots(const std::filesystem::path& repo_dir) {
  namespace fs = std::filesystem;
  std::vector<ServiceRoot> roots;
  std::error_code ec;
  fs::recursive_directory_iterator it(repo_dir, fs::directory_options::skip_permission_denied, ec);
  if (ec) fail_input("cannot read repository " + repo_dir.string() + ": " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    const auto& entry = *it;
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (!name.empty() && name.front() == '.') {
      it.disable_recursion_pending();
      continue;
    }
    const std::string rel = fs::relative(entry.path(), repo_dir).generic_string();
    if (rel == kServiceRootPattern || (rel.size() > 10 && rel.ends_with("/main/java"))) {
      std::vector<std::string> segs;
      for (const auto& part : fs::path(rel)) segs.push_back(part.string());
      std::string service;
      const std::size_t main_idx = segs.size() - 2;
      if (main_idx >= 2 && segs[main_idx - 1] == "src") {
        service = segs[main_idx - 2];
      } else if (main_idx >= 1) {
        service = segs[main_idx - 1];
      } else {
        service = rel;
      }
      roots.push_back({service, entry.path(), rel});
      it.disable_recursion_pending();
    }
  }
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) { return a.rel_path < b.rel_path; });
  std::map<std::string, int> uses;
  for (const auto& r : roots) ++uses[r.service_name];
  for (auto& r : roots) {
    if (uses[r.service_name] > 1) r.service_name = r.rel_path;
  }
  return roots;
}

struct RepoAnalysis {
  std::optional<LabeledCorpus> corpus;
  std::string rejection;  // reason code when corpus is empty
  std::vector<std::string> warnings;
  std::vector<ServiceRoot> roots;
};

namespace rejection {
inline constexpr const char* kNoJava = "no-java";
inline constexpr const char* kFewServices = "<2 services";
}  // namespace rejection

/// Labels every class under a service root with its service; rejects repos
/// with fewer than two non-empty services.
inline RepoAnalysis analyze_repo(const std::filesystem::path& repo_dir, std::string app_name = {},
                                 const ParseOptions& opts = {}) {
  namespace fs = std::filesystem;
  RepoAnalysis res;
  if (app_name.empty()) app_name = fs::absolute(repo_dir).lexically_normal().filename().string();
  if (app_name.empty()) app_name = fs::absolute(repo_dir).lexically_normal().parent_path().filename().string();

  bool any_java = false;
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(repo_dir, fs::directory_options::skip_permission_denied, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (it->is_directory() && it->path().filename().string().starts_with(".")) {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && it->path().extension() == ".java") {
      any_java = true;
      break;
    }
  }
  if (!any_java) {
    res.rejection = rejection::kNoJava;
    return res;
  }
  res.roots = find_service_roots(repo_dir);
  if (res.roots.size() < 2) {
    res.rejection = rejection::kFewServices;
    return res;
  }

  std::vector<ClassUnit> all;
  std::vector<std::string> labels;
  std::set<std::string> nonempty;
  for (const auto& root : res.roots) {
    std::vector<std::string> warnings;
    auto units = parse_class_units(root.root_path, opts, &warnings);
    for (auto& w : warnings) res.warnings.push_back(root.rel_path + "/" + w);
    for (auto& u : units) {
      u.path = root.rel_path + "/" + u.path;
      all.push_back(std::move(u));
      labels.push_back(root.service_name);
    }
    if (!units.empty()) nonempty.insert(root.service_name);
  }
  if (nonempty.size() < 2) {
    res.rejection = rejection::kFewServices;
    return res;
  }

  std::map<std::string, int> fqn_uses;
  for (const auto& u : all) ++fqn_uses[u.fqn];
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (fqn_uses[all[i].fqn] > 1) {
      res.warnings.push_back("duplicate class " + all[i].fqn + " in service " + labels[i] + " renamed");
      all[i].fqn += "@" + labels[i];
    }
  }
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return all[a].fqn < all[b].fqn; });

  LabeledCorpus corpus;
  corpus.app_name = app_name;
  std::vector<std::string> sorted_labels;
  for (std::size_t k = 0; k < order.size(); ++k) {
    ClassUnit u = std::move(all[order[k]]);
    u.id = static_cast<int>(k);
    corpus.classes.push_back(std::move(u));
    sorted_labels.push_back(labels[order[k]]);
  }
  corpus.labels = std::move(sorted_labels);
  auto graphs = build_graphs(corpus.classes);
  corpus.calls = std::move(graphs.calls);
  corpus.interactions = std::move(graphs.interactions);
  res.corpus = std::move(corpus);
  return res;
}

// ---------------------------------------------------------------------------
// Triplet sampling
// ---------------------------------------------------------------------------

struct Triplet {
  std::string repo;
  std::string anchor;
  std::string positive;
  std::string negative;

  auto key() const { return std::tie(repo, anchor, positive, negative); }
  bool operator==(const Triplet& o) const { return key() == o.key(); }
  bool operator<(const Triplet& o) const { return key() < o.key(); }
};

struct SamplerConfig {
  std::int64_t k = 1000;  // iterations, i.e. the maximum number of triplets
  std::uint64_t seed = 0;
  std::vector<std::string> exclusions;
};

/// Unbiased integer in [0, n) from a 64-bit engine (rejection sampling), so
/// streams do not depend on the standard library's distribution code.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

namespace detail {

struct EligibleRepo {
  const LabeledCorpus* corpus;
  std::vector<std::vector<int>> services;  // class ids per service
  std::vector<std::size_t> anchor_services;  // services with >= 2 classes
};

}  // namespace detail

/// Why a corpus cannot be sampled, or empty when it can.
inline std::string sampling_ineligibility(const LabeledCorpus& c, const SamplerConfig& cfg) {
  if (std::find(cfg.exclusions.begin(), cfg.exclusions.end(), c.app_name) != cfg.exclusions.end()) return "excluded";
  if (!c.labels) return "unlabeled";
  std::map<std::string, int> sizes;
  for (const auto& l : *c.labels) ++sizes[l];
  if (sizes.size() < 2) return "fewer than 2 services";
  for (const auto& [s, k] : sizes) {
    if (k >= 2) return {};
  }
  return "no service with 2 or more classes";
}

/// K iterations of repo -> service -> (anchor, positive) -> negative sampling,
/// then exact-duplicate removal (first occurrence kept).
inline std::vector<Triplet> sample_triplets(const std::vector<LabeledCorpus>& corpora, const SamplerConfig& cfg) {
  if (cfg.k <= 0) fail_input("sampler: K must be > 0");
  std::vector<detail::EligibleRepo> repos;
  std::string reasons;
  for (const auto& c : corpora) {
    const std::string why = sampling_ineligibility(c, cfg);
    if (!why.empty()) {
      reasons += "\n  " + c.app_name + ": " + why;
      continue;
    }
    std::map<std::string, std::vector<int>> by_service;
    for (const auto& cls : c.classes) by_service[(*c.labels)[cls.id]].push_back(cls.id);
    detail::EligibleRepo r{&c, {}, {}};
    for (auto& [name, ids] : by_service) {
      if (ids.size() >= 2) r.anchor_services.push_back(r.services.size());
      r.services.push_back(std::move(ids));
    }
    repos.push_back(std::move(r));
  }
  if (repos.empty()) fail_input("no eligible corpus for triplet sampling:" + (reasons.empty() ? " (none given)" : reasons));

  std::mt19937_64 rng(cfg.seed);
  std::vector<Triplet> out;
  std::set<Triplet> seen;
  for (std::int64_t iter = 0; iter < cfg.k; ++iter) {
    const auto& repo = repos[uniform_index(rng, repos.size())];
    const std::size_t s = repo.anchor_services[uniform_index(rng, repo.anchor_services.size())];
    const auto& members = repo.services[s];
    const std::size_t ai = uniform_index(rng, members.size());
    std::size_t pi = uniform_index(rng, members.size() - 1);
    if (pi >= ai) ++pi;
    std::size_t others = 0;
    for (std::size_t t = 0; t < repo.services.size(); ++t) {
      if (t != s) others += repo.services[t].size();
    }
    std::size_t ni = uniform_index(rng, others);
    int negative = -1;
    for (std::size_t t = 0; t < repo.services.size() && negative < 0; ++t) {
      if (t == s) continue;
      if (ni < repo.services[t].size()) {
        negative = repo.services[t][ni];
      } else {
        ni -= repo.services[t].size();
      }
    }
    const auto& cls = repo.corpus->classes;
    Triplet t{repo.corpus->app_name, cls[members[ai]].fqn, cls[members[pi]].fqn, cls[negative].fqn};
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

inline constexpr const char* kTripletFormat = "monoembed-triplets-v1";

inline void write_triplets(std::ostream& out, const std::vector<Triplet>& triplets, std::uint64_t seed) {
  ojson header;
  header["format"] = kTripletFormat;
  header["count"] = triplets.size();
  header["seed"] = seed;
  out << header.dump() << '\n';
  for (const auto& t : triplets) {
    ojson row;
    row["repo"] = t.repo;
    row["anchor"] = t.anchor;
    row["positive"] = t.positive;
    row["negative"] = t.negative;
    out << row.dump() << '\n';
  }
}

inline std::vector<Triplet> read_triplets(std::istream& in, const std::string& name = "triplets") {
  std::string line;
  if (!std::getline(in, line)) fail_input(name + ": empty triplet file");
  const ojson header = detail::parse_json_line(line, name, 1);
  if (header.value("format", "") != kTripletFormat) fail_input(name + ": not a triplet file");
  std::vector<Triplet> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const ojson row = detail::parse_json_line(line, name, lineno);
    try {
      out.push_back({row.at("repo").get<std::string>(), row.at("anchor").get<std::string>(),
                     row.at("positive").get<std::string>(), row.at("negative").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      fail_input(name + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (static_cast<std::size_t>(header.value("count", -1)) != out.size()) {
    fail_input(name + ": header count does not match rows");
  }
  return out;
}

}  // namespace monoembed
