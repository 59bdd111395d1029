#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "monoembed/error.hpp"

namespace monoembed {

inline double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return std::sqrt(s);
}

namespace detail {

inline void check_triplet_args(std::size_t da, std::size_t dp, std::size_t dn, double alpha) {
  if (da != dp || da != dn) {
    fail_input("triplet_loss: dimension mismatch (" + std::to_string(da) + ", " + std::to_string(dp) + ", " +
               std::to_string(dn) + ")");
  }
  if (!(alpha > 0.0)) fail_input("triplet_loss: margin must be > 0");
}

}  // namespace detail

/// max(0, |a - p| - |a - n| + alpha) with Euclidean norms.
inline double triplet_loss(std::span<const double> a, std::span<const double> p, std::span<const double> n,
                           double alpha) {
  detail::check_triplet_args(a.size(), p.size(), n.size(), alpha);
  const double v = euclidean_distance(a, p) - euclidean_distance(a, n) + alpha;
  return v > 0.0 || std::isnan(v) ? v : 0.0;  // NaN must reach the caller's finiteness check
}

struct TripletGradient {
  double loss = 0.0;
  std::vector<double> d_anchor, d_positive, d_negative;
};

/// Loss and its gradient with respect to each embedding. Inactive hinge gives
/// zero gradients; a zero-length difference contributes the zero subgradient.
inline TripletGradient triplet_loss_gradient(std::span<const double> a, std::span<const double> p,
                                             std::span<const double> n, double alpha) {
  const std::size_t d = a.size();
  TripletGradient g;
  g.loss = triplet_loss(a, p, n, alpha);
  g.d_anchor.assign(d, 0.0);
  g.d_positive.assign(d, 0.0);
  g.d_negative.assign(d, 0.0);
  if (g.loss <= 0.0) return g;
  const double dap = euclidean_distance(a, p);
  const double dan = euclidean_distance(a, n);
  for (std::size_t k = 0; k < d; ++k) {
    const double up = dap > 0.0 ? (a[k] - p[k]) / dap : 0.0;
    const double un = dan > 0.0 ? (a[k] - n[k]) / dan : 0.0;
    g.d_anchor[k] = up - un;
    g.d_positive[k] = -up;
    g.d_negative[k] = un;
  }
  return g;
}

}  // namespace monoembed
