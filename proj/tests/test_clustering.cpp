#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "monoembed/clustering.hpp"
#include "monoembed/evaluation.hpp"
#include "test_util.hpp"

namespace monoembed {
namespace {

EmbeddingMatrix blobs() { return load_embedding(testing::fixtures() / "blobs" / "blobs.emb.csv"); }
Decomposition blob_truth() { return load_decomposition(testing::fixtures() / "blobs" / "truth.json"); }

ClusterConfig config(const std::string& algorithm, std::optional<int> k = std::nullopt) {
  ClusterConfig c;
  c.algorithm = algorithm;
  c.k = k;
  c.seed = 17;
  return c;
}

/// Same co-membership structure, ignoring service numbering.
bool same_partition(const Decomposition& a, const Decomposition& b) {
  if (a.n() != b.n()) return false;
  for (int i = 0; i < a.n(); ++i) {
    for (int j = i + 1; j < a.n(); ++j) {
      if (co_member(a, i, j) != co_member(b, i, j)) return false;
    }
  }
  return true;
}

void expect_partition(const Decomposition& d, int n) {
  ASSERT_EQ(d.n(), n);
  std::vector<int> seen(n, 0);
  for (const auto& m : d.services()) {
    EXPECT_FALSE(m.empty());
    for (int id : m) ++seen[id];
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

}  // namespace

TEST(Decomposition, JsonRoundTrip) {
  const auto d = Decomposition::from_labels("app", "kmeans", {2, 2, 0, 1});
  EXPECT_EQ(d.assignment, (std::vector<int>{0, 0, 1, 2}));
  const auto j = decomposition_to_json(d);
  EXPECT_EQ(j.dump(), R"({"app":"app","algorithm":"kmeans","k":3,"services":{"s0":[0,1],"s1":[2],"s2":[3]},"converged":true,"seed":0,"n":4})");
  const auto back = decomposition_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.assignment, d.assignment);
  EXPECT_EQ(back.k, 3);
}

TEST(Decomposition, RejectsOverlapAndBadPartitions) {
  EXPECT_THROW(decomposition_from_json(nlohmann::json::parse(R"({"services":{"a":[0,1],"b":[1]}})")), Error);
  EXPECT_THROW(decomposition_from_json(nlohmann::json::parse(R"({"services":{"a":[0,5]}})"), "d", 3), Error);
  EXPECT_THROW(Decomposition::from_labels("a", "x", {0, 0, 0}).validate_partition(), Error);
  EXPECT_THROW(Decomposition::from_labels("a", "x", {0, -1, 1}).validate_partition(), Error);
  EXPECT_NO_THROW(Decomposition::from_labels("a", "x", {0, 1, 1}).validate_partition());
}

TEST(Affinity, RecoversBlobs) {
  const auto x = standardize(blobs().values);
  const auto d = cluster(x, config("affinity"), "blobs");
  EXPECT_EQ(d.k, 3);
  EXPECT_TRUE(d.converged);
  EXPECT_DOUBLE_EQ(pairwise_fbeta(d, blob_truth()), 1.0);
}

TEST(Affinity, DampingStability) {
  const auto x = standardize(blobs().values);
  auto c = config("affinity");
  const auto a = cluster(x, c);
  c.damping = 0.75;
  EXPECT_TRUE(same_partition(a, cluster(x, c)));
}

TEST(Affinity, IdenticalPointsCannotSplit) {
  EXPECT_THROW(cluster(Matrix::from_rows({{1, 1}, {1, 1}}), config("affinity")), Error);
}

TEST(Affinity, SingleGroupRaisesPreference) {
  // A very low preference makes one exemplar; raising it must yield k >= 2.
  auto c = config("affinity");
  c.preference = -0.5;
  const auto d = cluster(Matrix::from_rows({{0}, {0.1}, {1.0}, {1.1}}), c);
  EXPECT_GE(d.k, 2);
}

TEST(Kmeans, RecoversBlobs) {
  const auto x = standardize(blobs().values);
  const auto d = cluster(x, config("kmeans", 3));
  EXPECT_EQ(d.k, 3);
  EXPECT_DOUBLE_EQ(pairwise_fbeta(d, blob_truth()), 1.0);
}

TEST(Kmeans, KEqualsN) {
  const auto d = cluster(Matrix::from_rows({{0}, {1}, {5}, {9}}), config("kmeans", 4));
  EXPECT_EQ(d.k, 4);
}

TEST(Kmeans, KAboveNFails) { EXPECT_THROW(cluster(Matrix::from_rows({{0}, {1}}), config("kmeans", 3)), Error); }

TEST(Kmeans, DuplicatesCoClustered) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 12; ++i) rows.push_back({g(rng), g(rng)});
    rows.push_back(rows[3]);
    rows.push_back(rows[7]);
    auto c = config("kmeans", 3);
    c.seed = static_cast<std::uint64_t>(trial);
    const auto d = cluster(Matrix::from_rows(rows), c);
    EXPECT_TRUE(co_member(d, 3, 12));
    EXPECT_TRUE(co_member(d, 7, 13));
  }
}

TEST(Ward, RecoversBlobs) {
  const auto x = standardize(blobs().values);
  const auto d = cluster(x, config("ward", 3));
  EXPECT_DOUBLE_EQ(pairwise_fbeta(d, blob_truth()), 1.0);
}

TEST(Ward, TwoPointsTwoSingletons) {
  const auto d = cluster(Matrix::from_rows({{0}, {3}}), config("ward", 2));
  EXPECT_EQ(d.assignment, (std::vector<int>{0, 1}));
}

TEST(Ward, MergeOrderOnLine) {
  const auto [merges, labels] = ward_linkage(Matrix::from_rows({{0}, {1}, {10}, {11}}), 1);
  ASSERT_EQ(merges.size(), 3u);
  EXPECT_EQ(merges[0].a, 0);
  EXPECT_EQ(merges[0].b, 1);
  EXPECT_EQ(merges[1].a, 2);
  EXPECT_EQ(merges[1].b, 3);
  EXPECT_DOUBLE_EQ(merges[0].cost, 1.0);
  // {0,1} vs {10,11}: 2 * (2*2/4) * 10^2
  EXPECT_DOUBLE_EQ(merges[2].cost, 200.0);
}

TEST(Dbscan, RecoversBlobsWithoutNoise) {
  const auto x = standardize(blobs().values);
  auto c = config("dbscan");
  c.eps = 0.5;
  c.min_pts = 4;
  EXPECT_EQ(dbscan_noise_count(x, 0.5, 4), 0u);
  const auto d = cluster(x, c);
  EXPECT_EQ(d.k, 3);
  EXPECT_DOUBLE_EQ(pairwise_fbeta(d, blob_truth()), 1.0);
}

TEST(Dbscan, OutlierPolicies) {
  auto rows = std::vector<std::vector<double>>{{0, 0}, {0, 0.1}, {0.1, 0}, {5, 5}, {5, 5.1}, {5.1, 5}, {100, 100}};
  auto c = config("dbscan");
  c.eps = 0.5;
  c.min_pts = 3;
  const auto x = Matrix::from_rows(rows);
  const auto nearest = cluster(x, c);
  EXPECT_EQ(nearest.k, 2);
  EXPECT_TRUE(co_member(nearest, 6, 3));
  c.noise = NoisePolicy::singletons;
  const auto single = cluster(x, c);
  EXPECT_EQ(single.k, 3);
  EXPECT_EQ(single.services()[2], std::vector<int>{6});
}

TEST(Dbscan, HugeEpsIsSingleClusterError) {
  auto c = config("dbscan");
  c.eps = 1e9;
  EXPECT_THROW(cluster(standardize(blobs().values), c), Error);
}

TEST(Dbscan, AllNoiseError) {
  auto c = config("dbscan");
  c.eps = 1e-6;
  try {
    cluster(standardize(blobs().values), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no clusters at eps"), std::string::npos);
  }
}

TEST(ClusterConfig, RejectsUnsupported) {
  EXPECT_THROW(config("hdbscan").validate(), Error);
  EXPECT_THROW(config("kmeans").validate(), Error);
  auto c = config("affinity");
  c.damping = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c.damping = 0.4;
  EXPECT_THROW(c.validate(), Error);
}

TEST(ClusterProperties, PartitionDeterminismAndPermutationEquivariance) {
  const auto x = standardize(blobs().values);
  const int n = static_cast<int>(x.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix px(x.rows(), x.cols());
  for (int i = 0; i < n; ++i) std::copy(x.row(perm[i]).begin(), x.row(perm[i]).end(), px.row(i).begin());
  for (const auto& algo : {"affinity", "kmeans", "ward", "dbscan"}) {
    const auto c = config(algo, 3);
    const auto d = cluster(x, c);
    expect_partition(d, n);
    const auto again = cluster(x, c);
    EXPECT_EQ(decomposition_to_json(d).dump(), decomposition_to_json(again).dump()) << algo;
    const auto pd = cluster(px, c);
    std::vector<int> back(n);
    for (int i = 0; i < n; ++i) back[perm[i]] = pd.assignment[i];
    EXPECT_TRUE(same_partition(d, Decomposition::from_labels("", "", back))) << algo;
  }
}

TEST(ClusterProperties, RandomDataAlwaysPartitions) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + trial % 20;
    Matrix x(n, 3);
    for (auto& v : x.data()) v = g(rng);
    for (const auto& algo : {"affinity", "kmeans", "ward"}) {
      auto c = config(algo, 2 + trial % 3);
      c.seed = static_cast<std::uint64_t>(trial);
      expect_partition(cluster(x, c), n);
    }
  }
}

}  // namespace monoembed
