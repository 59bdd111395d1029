#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "monoembed/corpus_builder.hpp"
#include "monoembed/corpus_io.hpp"
#include "monoembed/embedding.hpp"
#include "monoembed/error.hpp"

namespace monoembed {

/// Partition of class ids into services. assignment[id] is a service index,
/// or -1 for a class the decomposition leaves out.
struct Decomposition {
  std::string app_name;
  std::string algorithm;
  std::vector<int> assignment;
  int k = 0;
  bool converged = true;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(assignment.size()); }

  std::vector<std::vector<int>> services() const {
    std::vector<std::vector<int>> out(k);
    for (int i = 0; i < n(); ++i) {
      if (assignment[i] >= 0) out[assignment[i]].push_back(i);
    }
    return out;
  }

  int assigned() const {
    return static_cast<int>(std::count_if(assignment.begin(), assignment.end(), [](int s) { return s >= 0; }));
  }

  /// Renumbers services by their smallest member id and drops empty ones.
  void canonicalize() {
    std::map<int, int> remap;
    for (int& s : assignment) {
      if (s < 0) continue;
      const auto [it, fresh] = remap.emplace(s, static_cast<int>(remap.size()));
      s = it->second;
    }
    k = static_cast<int>(remap.size());
  }

  /// Full-partition check: every class in exactly one service, 1 <= |M_i| < N, k >= 2 unless N < 2.
  void validate_partition() const {
    const auto svc = services();
    for (int i = 0; i < n(); ++i) {
      if (assignment[i] < 0 || assignment[i] >= k) fail_input(app_name + ": class " + std::to_string(i) + " is not assigned");
    }
    for (const auto& m : svc) {
      if (m.empty()) fail_input(app_name + ": empty service");
      if (n() >= 2 && static_cast<int>(m.size()) >= n()) fail_input(app_name + ": a single service holds every class");
    }
    if (n() >= 2 && k < 2) fail_input(app_name + ": decomposition needs at least 2 services");
  }

  static Decomposition from_labels(std::string app, std::string algorithm, std::vector<int> labels) {
    Decomposition d{std::move(app), std::move(algorithm), std::move(labels), 0, true, 0};
    d.canonicalize();
    return d;
  }
};

/// Same-service indicator for an unordered pair; -1 members never co-occur.
inline bool co_member(const Decomposition& d, int i, int j) {
  return d.assignment[i] >= 0 && d.assignment[i] == d.assignment[j];
}

inline ojson decomposition_to_json(const Decomposition& d) {
  ojson j;
  j["app"] = d.app_name;
  j["algorithm"] = d.algorithm;
  j["k"] = d.k;
  ojson services = ojson::object();
  const auto svc = d.services();
  for (int s = 0; s < d.k; ++s) services["s" + std::to_string(s)] = svc[s];
  j["services"] = std::move(services);
  j["converged"] = d.converged;
  j["seed"] = d.seed;
  j["n"] = d.n();
  return j;
}

/// Parses a decomposition file. Without an "n" field the universe is taken
/// from `n` when given, else from the largest id.
inline Decomposition decomposition_from_json(const nlohmann::json& j, const std::string& name = "decomposition",
                                             std::optional<int> n = std::nullopt) {
  Decomposition d;
  try {
    d.app_name = j.value("app", std::string());
    d.algorithm = j.value("algorithm", std::string());
    d.converged = j.value("converged", true);
    d.seed = j.value("seed", std::uint64_t{0});
    int max_id = -1;
    std::vector<std::vector<int>> members;
    for (const auto& [key, ids] : j.at("services").items()) {
      members.push_back(ids.get<std::vector<int>>());
      for (int id : members.back()) {
        if (id < 0) fail_input(name + ": negative class id");
        max_id = std::max(max_id, id);
      }
    }
    int size = j.contains("n") ? j["n"].get<int>() : (n ? *n : max_id + 1);
    if (n && *n != size) fail_input(name + ": covers " + std::to_string(size) + " classes, corpus has " + std::to_string(*n));
    if (max_id >= size) fail_input(name + ": class id " + std::to_string(max_id) + " out of range");
    d.assignment.assign(size, -1);
    for (std::size_t s = 0; s < members.size(); ++s) {
      for (int id : members[s]) {
        if (d.assignment[id] >= 0) fail_input(name + ": class " + std::to_string(id) + " appears in two services");
        d.assignment[id] = static_cast<int>(s);
      }
    }
    d.k = static_cast<int>(members.size());
    if (j.contains("k") && j["k"].get<int>() != d.k) fail_input(name + ": k does not match the service count");
  } catch (const nlohmann::json::exception& e) {
    fail_input(name + ": " + e.what());
  }
  return d;
}

inline void save_decomposition(const std::filesystem::path& p, const Decomposition& d) {
  auto out = detail::open_out(p);
  out << decomposition_to_json(d).dump() << '\n';
}

inline Decomposition load_decomposition(const std::filesystem::path& p, std::optional<int> n = std::nullopt) {
  auto in = detail::open_in(p);
  try {
    return decomposition_from_json(nlohmann::json::parse(in), p.string(), n);
  } catch (const nlohmann::json::exception& e) {
    fail_input(p.string() + ": " + e.what());
  }
}

enum class NoisePolicy { nearest, singletons };

struct ClusterConfig {
  std::string algorithm = "affinity";
  std::optional<int> k;
  double damping = 0.65;
  std::optional<double> preference;
  double eps = 0.5;
  int min_pts = 4;
  std::uint64_t seed = 0;
  int max_iter = 500;
  int convergence_iter = 15;
  int n_init = 10;  // k-means restarts; the lowest inertia wins
  NoisePolicy noise = NoisePolicy::nearest;

  void validate() const {
    static const std::set<std::string> unsupported{"hdbscan", "optics", "meanshift", "mean-shift"};
    if (unsupported.count(algorithm)) {
      fail_usage("algorithm '" + algorithm + "' is not implemented (supported: affinity, kmeans, ward, dbscan)");
    }
    if (algorithm != "affinity" && algorithm != "kmeans" && algorithm != "ward" && algorithm != "dbscan") {
      fail_usage("unknown algorithm '" + algorithm + "'");
    }
    if ((algorithm == "kmeans" || algorithm == "ward") && (!k || *k < 2)) fail_usage(algorithm + " needs --k >= 2");
    if (!(damping >= 0.5 && damping < 1.0)) fail_usage("damping must be in [0.5, 1)");
    if (algorithm == "dbscan" && !(eps > 0.0)) fail_usage("dbscan needs eps > 0");
    if (algorithm == "dbscan" && min_pts < 1) fail_usage("dbscan needs min_pts >= 1");
    if (max_iter < 1) fail_usage("max_iter must be >= 1");
    if (n_init < 1) fail_usage("n_init must be >= 1");
  }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

namespace detail {

inline std::vector<double> pairwise_sq_distances(const Matrix& x) {
  const std::size_t n = x.rows();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = squared_distance(x.row(i), x.row(j));
  }
  return d;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct ApResult {
  std::vector<int> labels;
  bool converged = false;
};

inline ApResult affinity_once(const std::vector<double>& s_in, std::size_t n, double pref, const ClusterConfig& cfg) {
  std::vector<double> s = s_in, r(n * n, 0.0), a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) s[i * n + i] = pref;
  const double lam = cfg.damping;
  std::vector<char> exemplar(n, 0), previous(n, 0);
  int stable = 0;
  bool converged = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    // responsibilities
    for (std::size_t i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity(), second = best;
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double v = a[i * n + k] + s[i * n + k];
        if (v > best) {
          second = best;
          best = v;
          best_k = k;
        } else if (v > second) {
          second = v;
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double fresh = s[i * n + k] - (k == best_k ? second : best);
        r[i * n + k] = lam * r[i * n + k] + (1 - lam) * fresh;
      }
    }
    // availabilities
    for (std::size_t k = 0; k < n; ++k) {
      double pos = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != k) pos += std::max(0.0, r[i * n + k]);
      }
      for (std::size_t i = 0; i < n; ++i) {
        double fresh;
        if (i == k) {
          fresh = pos;
        } else {
          fresh = std::min(0.0, r[k * n + k] + pos - std::max(0.0, r[i * n + k]));
        }
        a[i * n + k] = lam * a[i * n + k] + (1 - lam) * fresh;
      }
    }
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      exemplar[k] = r[k * n + k] + a[k * n + k] > 0.0;
      any = any || exemplar[k];
    }
    stable = (exemplar == previous && any) ? stable + 1 : 0;
    previous = exemplar;
    if (stable >= cfg.convergence_iter) {
      converged = true;
      break;
    }
  }
  ApResult res;
  res.converged = converged;
  res.labels.assign(n, 0);
  std::vector<std::size_t> ex;
  for (std::size_t k = 0; k < n; ++k) {
    if (exemplar[k]) ex.push_back(k);
  }
  if (ex.empty()) return res;  // no exemplar emerged: one group
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t e = 0; e < ex.size(); ++e) {
      if (ex[e] == i) {
        best = e;
        break;
      }
      if (s[i * n + ex[e]] > s[i * n + ex[best]]) best = e;
    }
    res.labels[i] = static_cast<int>(best);
  }
  return res;
}

}  // namespace detail

/// Affinity propagation on negative squared Euclidean similarities.
inline Decomposition affinity_propagation(const Matrix& x, const ClusterConfig& cfg, const std::string& app = {}) {
  const std::size_t n = x.rows();
  if (n < 2) fail_input("affinity propagation needs at least 2 points");
  const auto d = detail::pairwise_sq_distances(x);
  std::vector<double> s(n * n), off;
  off.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      s[i * n + j] = -d[i * n + j];
      if (i != j) off.push_back(s[i * n + j]);
    }
  }
  double pref = cfg.preference ? *cfg.preference : detail::median(off);
  auto res = detail::affinity_once(s, n, pref, cfg);
  Decomposition out = Decomposition::from_labels(app, "affinity", res.labels);
  for (int attempt = 0; attempt < 5 && out.k < 2; ++attempt) {
    pref += std::abs(pref) * 0.5;
    res = detail::affinity_once(s, n, pref, cfg);
    out = Decomposition::from_labels(app, "affinity", res.labels);
  }
  if (out.k < 2) fail_input("affinity propagation found a single service even after raising the preference");
  out.converged = res.converged;
  out.seed = cfg.seed;
  return out;
}

namespace detail {

struct KmeansRun {
  std::vector<int> labels;
  double inertia = 0.0;
  bool converged = false;
};

inline KmeansRun kmeans_once(const Matrix& x, std::size_t k, int max_iter, std::mt19937_64& rng) {
  const std::size_t n = x.rows(), m = x.cols();

  std::vector<std::size_t> seeds{uniform_index(rng, n)};
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(x.row(i), x.row(seeds[0]));
  while (seeds.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      double target = detail::uniform01(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        pick = i;
        if (target < d2[i]) break;
        target -= d2[i];
      }
    } else {
      // Remaining points coincide with chosen seeds; take the lowest unused index.
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (std::find(seeds.begin(), seeds.end(), i) == seeds.end()) pick = i;
      }
    }
    seeds.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(x.row(i), x.row(pick)));
  }
  Matrix centers(k, m);
  for (std::size_t c = 0; c < k; ++c) std::copy(x.row(seeds[c]).begin(), x.row(seeds[c]).end(), centers.row(c).begin());

  std::vector<int> labels(n, -1);
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = squared_distance(x.row(i), centers.row(0));
      for (std::size_t c = 1; c < k; ++c) {
        const double dc = squared_distance(x.row(i), centers.row(c));
        if (dc < bd) {
          bd = dc;
          best = static_cast<int>(c);
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    // empty clusters take the point farthest from its own center
    std::vector<std::size_t> counts(k, 0);
    for (int l : labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[labels[i]] < 2) continue;
        const double di = squared_distance(x.row(i), centers.row(labels[i]));
        if (di > fd) {
          fd = di;
          far = i;
        }
      }
      --counts[labels[far]];
      labels[far] = static_cast<int>(c);
      counts[c] = 1;
      changed = true;
    }
    Matrix next(k, m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) next(labels[i], j) += x(i, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < m; ++j) next(c, j) /= static_cast<double>(counts[c]);
    }
    centers = std::move(next);
    if (!changed) {
      converged = true;
      break;
    }
  }
  KmeansRun run{labels, 0.0, converged};
  for (std::size_t i = 0; i < n; ++i) run.inertia += squared_distance(x.row(i), centers.row(labels[i]));
  return run;
}

}  // namespace detail

/// Best of cfg.n_init runs of k-means++ seeding followed by Lloyd iterations.
inline Decomposition kmeans(const Matrix& x, const ClusterConfig& cfg, const std::string& app = {}) {
  const std::size_t n = x.rows();
  if (!cfg.k || *cfg.k < 1) fail_usage("kmeans needs k");
  const std::size_t k = static_cast<std::size_t>(*cfg.k);
  if (k > n) fail_input("k = " + std::to_string(k) + " exceeds the number of classes (" + std::to_string(n) + ")");
  std::mt19937_64 rng(cfg.seed);
  detail::KmeansRun best;
  for (int r = 0; r < std::max(1, cfg.n_init); ++r) {
    auto run = detail::kmeans_once(x, k, cfg.max_iter, rng);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  Decomposition out = Decomposition::from_labels(app, "kmeans", best.labels);
  out.converged = best.converged;
  out.seed = cfg.seed;
  return out;
}

struct WardMerge {
  int a, b;     // slot indices, a < b; the merged cluster keeps slot a
  double cost;  // Lance-Williams Ward distance at merge time
};

/// Agglomerative Ward merging down to k clusters. Returns the merge sequence
/// and the final labels (slot order).
inline std::pair<std::vector<WardMerge>, std::vector<int>> ward_linkage(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  if (k < 1 || k > n) fail_input("k = " + std::to_string(k) + " exceeds the number of classes (" + std::to_string(n) + ")");
  std::vector<double> d = detail::pairwise_sq_distances(x);
  std::vector<std::size_t> size(n, 1);
  std::vector<char> active(n, 1);
  std::vector<int> slot(n);
  for (std::size_t i = 0; i < n; ++i) slot[i] = static_cast<int>(i);
  std::vector<WardMerge> merges;
  for (std::size_t clusters = n; clusters > k; --clusters) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && d[i * n + j] < best) {
          best = d[i * n + j];
          bi = i;
          bj = j;
        }
      }
    }
    merges.push_back({static_cast<int>(bi), static_cast<int>(bj), best});
    const double ni = static_cast<double>(size[bi]), nj = static_cast<double>(size[bj]);
    for (std::size_t q = 0; q < n; ++q) {
      if (!active[q] || q == bi || q == bj) continue;
      const double nq = static_cast<double>(size[q]);
      const double v = ((ni + nq) * d[q * n + bi] + (nj + nq) * d[q * n + bj] - nq * d[bi * n + bj]) / (ni + nj + nq);
      d[q * n + bi] = d[bi * n + q] = v;
    }
    size[bi] += size[bj];
    active[bj] = 0;
    for (auto& s : slot) {
      if (s == static_cast<int>(bj)) s = static_cast<int>(bi);
    }
  }
  return {merges, slot};
}

inline Decomposition ward_hierarchical(const Matrix& x, const ClusterConfig& cfg, const std::string& app = {}) {
  if (!cfg.k || *cfg.k < 1) fail_usage("ward needs k");
  auto [merges, labels] = ward_linkage(x, static_cast<std::size_t>(*cfg.k));
  Decomposition out = Decomposition::from_labels(app, "ward", labels);
  out.seed = cfg.seed;
  return out;
}

/// Density clustering; noise is folded back in according to cfg.noise.
inline Decomposition dbscan(const Matrix& x, const ClusterConfig& cfg, const std::string& app = {}) {
  const std::size_t n = x.rows();
  const double eps2 = cfg.eps * cfg.eps;
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (squared_distance(x.row(i), x.row(j)) <= eps2) nbrs[i].push_back(j);
    }
  }
  std::vector<char> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = static_cast<int>(nbrs[i].size()) >= cfg.min_pts;
  std::vector<int> labels(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || labels[i] >= 0) continue;
    labels[i] = next;
    std::vector<std::size_t> frontier{i};
    while (!frontier.empty()) {
      const std::size_t p = frontier.back();
      frontier.pop_back();
      for (std::size_t q : nbrs[p]) {
        if (labels[q] >= 0) continue;
        labels[q] = next;
        if (core[q]) frontier.push_back(q);
      }
    }
    ++next;
  }
  if (next == 0) fail_input("no clusters at eps " + format_double(cfg.eps));
  const std::vector<int> clustered = labels;
  for (std::size_t i = 0; i < n; ++i) {
    if (clustered[i] >= 0) continue;
    if (cfg.noise == NoisePolicy::singletons) {
      labels[i] = next++;
      continue;
    }
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (!core[j]) continue;
      const double dj = squared_distance(x.row(i), x.row(j));
      if (dj < bd) {
        bd = dj;
        labels[i] = clustered[j];
      }
    }
  }
  Decomposition out = Decomposition::from_labels(app, "dbscan", labels);
  if (n >= 2 && out.k < 2) fail_input("dbscan produced a single service; a decomposition needs at least 2");
  out.seed = cfg.seed;
  return out;
}

/// Number of points dbscan leaves as noise before the noise policy applies.
inline std::size_t dbscan_noise_count(const Matrix& x, double eps, int min_pts) {
  const std::size_t n = x.rows();
  std::vector<char> core(n, 0), reached(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int cnt = 0;
    for (std::size_t j = 0; j < n; ++j) cnt += squared_distance(x.row(i), x.row(j)) <= eps * eps;
    core[i] = cnt >= min_pts;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n && !reached[i]; ++j) {
      reached[i] = core[j] && squared_distance(x.row(i), x.row(j)) <= eps * eps;
    }
  }
  return static_cast<std::size_t>(std::count(reached.begin(), reached.end(), 0));
}

inline Decomposition cluster(const Matrix& x, const ClusterConfig& cfg, const std::string& app = {}) {
  cfg.validate();
  Decomposition d;
  if (cfg.algorithm == "affinity") {
    d = affinity_propagation(x, cfg, app);
  } else if (cfg.algorithm == "kmeans") {
    d = kmeans(x, cfg, app);
  } else if (cfg.algorithm == "ward") {
    d = ward_hierarchical(x, cfg, app);
  } else {
    d = dbscan(x, cfg, app);
  }
  d.validate_partition();
  return d;
}

}  // namespace monoembed
