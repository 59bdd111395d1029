#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "monoembed/embedding.hpp"
#include "monoembed/error.hpp"

namespace monoembed {

/// Scores on the leading principal components of the column-centred matrix.
/// Each axis is signed so that its largest-magnitude loading is positive;
/// missing components (fewer columns or rank) are zero.
inline Matrix pca_project(const Matrix& x, int components = 2) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto m = static_cast<Eigen::Index>(x.cols());
  if (n < 1) fail_input("pca: empty matrix");
  Eigen::MatrixXd a(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = x(i, j);
  }
  a.rowwise() -= a.colwise().mean();

  Matrix out(x.rows(), static_cast<std::size_t>(components));
  if (m == 0 || a.isZero(0.0)) return out;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double tol = s(0) * 1e-12 * static_cast<double>(std::max(n, m));
  const Eigen::Index k = std::min<Eigen::Index>(components, s.size());
  for (Eigen::Index c = 0; c < k; ++c) {
    if (s(c) <= tol) break;
    Eigen::Index arg = 0;
    svd.matrixV().col(c).cwiseAbs().maxCoeff(&arg);
    const double sign = svd.matrixV()(arg, c) < 0 ? -1.0 : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) = sign * svd.matrixU()(i, c) * s(c);
    }
  }
  return out;
}

}  // namespace monoembed
