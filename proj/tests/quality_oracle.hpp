#pragma once

// Brute-force reference for the embedding quality score, written without any
// of the library's numeric helpers so the two can be compared.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "monoembed/embedding.hpp"

namespace monoembed::testing {

inline double quality_oracle(const Matrix& x, const std::vector<std::string>& labels, double eps = 1e-7) {
  const std::size_t n = x.rows(), m = x.cols();
  std::vector<std::vector<double>> z(n, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j) / static_cast<double>(n);
    double var = 0;
    for (std::size_t i = 0; i < n; ++i) var += std::pow(x(i, j) - mean, 2) / static_cast<double>(n - 1);
    if (var == 0) continue;
    for (std::size_t i = 0; i < n; ++i) z[i][j] = (x(i, j) - mean) / std::sqrt(var);
  }
  // unit rows, zero rows stay zero
  for (auto& r : z) {
    double norm = 0;
    for (double v : r) norm += v * v;
    if (norm > 0)
      for (double& v : r) v /= std::sqrt(norm);
  }
  struct Pair {
    double cos;
    bool same;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      double dot = 0;
      for (std::size_t j = 0; j < m; ++j) dot += z[a][j] * z[b][j];
      pairs.push_back({dot, labels[a] == labels[b]});
    }
  }
  double lo = pairs[0].cos, hi = pairs[0].cos;
  for (const auto& p : pairs) {
    lo = std::min(lo, p.cos);
    hi = std::max(hi, p.cos);
  }
  std::vector<double> pos, neg;
  for (const auto& p : pairs) {
    double s = (p.cos - lo) / (hi - lo);
    s = s < eps ? eps : (s > 1 - eps ? 1 - eps : s);
    (p.same ? pos : neg).push_back(p.same ? std::log(s) : std::log(1 - s));
  }
  double sp = 0, sn = 0;
  for (double v : pos) sp += v;
  for (double v : neg) sn += v;
  return -(sp / static_cast<double>(pos.size()) + sn / static_cast<double>(neg.size())) / 2;
}

/// Rows +e_k (service a) and -e_k (service b) for k < m, plus two rows +e_m in a
/// and one row -2 e_m in b. Pairwise cosines are 0 except m + 2 cross-service
/// pairs at -1 and one same-service pair at +1, so almost every normalized
/// similarity is exactly 1/2.
inline std::pair<EmbeddingMatrix, std::vector<std::string>> uninformative_embedding(std::size_t m) {
  const std::size_t n = 2 * m + 3;
  EmbeddingMatrix e{"flat", "test", Matrix(n, m + 1), identity_ids(n)};
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < m; ++k) {
    e.values(2 * k, k) = 1;
    e.values(2 * k + 1, k) = -1;
    labels.push_back("a");
    labels.push_back("b");
  }
  e.values(2 * m, m) = 1;
  e.values(2 * m + 1, m) = 1;
  e.values(2 * m + 2, m) = -2;
  labels.insert(labels.end(), {"a", "a", "b"});
  return {e, labels};
}

/// Closed-form score of uninformative_embedding(m).
inline double uninformative_expected(std::size_t m, double eps = 1e-7) {
  const double na = static_cast<double>(m + 2), nb = static_cast<double>(m + 1);
  const double npos = na * (na - 1) / 2 + nb * (nb - 1) / 2, nneg = na * nb;
  const double extreme_neg = static_cast<double>(m + 2);
  const double pos = ((npos - 1) * std::log(0.5) + std::log(1 - eps)) / npos;
  const double neg = ((nneg - extreme_neg) * std::log(0.5) + extreme_neg * std::log(1 - eps)) / nneg;
  return -0.5 * (pos + neg);
}

}  // namespace monoembed::testing
