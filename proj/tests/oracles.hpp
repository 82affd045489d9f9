#pragma once

// Test-only oracles, kept independent of the library paths they check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mrect/geom.hpp"
#include "mrect/rng.hpp"

namespace oracles {

using mrect::Mat;
using mrect::Vec;

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

// shoelace area of a triangle in R^2
inline double shoelace(const Vec& a, const Vec& b, const Vec& c) {
  return 0.5 * std::abs((b(0) - a(0)) * (c(1) - a(1)) - (b(1) - a(1)) * (c(0) - a(0)));
}

// max pairwise distance
inline double pairwise_max(const std::vector<Vec>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, (pts[i] - pts[j]).norm());
  return best;
}

// Allard's identity: ||proj_P - proj_Q|| = max over unit u in Q of
// |reject_P(u)|, sampled over many random unit vectors of Q.
inline double plane_distance_by_rejection(const mrect::Plane& P, const mrect::Plane& Q,
                                          mrect::Rng& rng, int samples = 4000) {
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec coef(Q.dim());
    for (int k = 0; k < Q.dim(); ++k) coef(k) = rng.next_normal();
    if (coef.norm() < 1e-12) continue;
    Vec u = Q.basis() * coef;
    u /= u.norm();
    best = std::max(best, P.reject(u).norm());
  }
  return best;
}

// random n x n rotation via Gram-Schmidt on Gaussian columns
inline Mat random_rotation(int n, mrect::Rng& rng) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.next_normal();
  for (int c = 0; c < n; ++c) {
    for (int k = 0; k < c; ++k) g.col(c) -= g.col(k).dot(g.col(c)) * g.col(k);
    g.col(c) /= g.col(c).norm();
  }
  if (g.determinant() < 0) g.col(0) = -g.col(0);
  return g;
}

inline Vec random_vec(int n, mrect::Rng& rng, double scale = 1.0) {
  Vec v(n);
  for (int k = 0; k < n; ++k) v(k) = scale * rng.next_normal();
  return v;
}

inline std::vector<Vec> random_tuple(int count, int n, mrect::Rng& rng, double scale = 1.0) {
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) pts.push_back(random_vec(n, rng, scale));
  return pts;
}

}  // namespace oracles
