#include "mrect/geom.hpp"

#include <cmath>

namespace mrect {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

namespace {

double gram_volume_cols(const Mat& cols) {
  const auto k = cols.cols();
  if (k == 0) return 1.0;
  Mat g = cols.transpose() * cols;
  double det = g.determinant();
  if (det <= 0.0) return 0.0;  // exact Gram determinants are nonnegative
  return std::sqrt(det);
}

}  // namespace

double gram_volume(const std::vector<Vec>& vs) {
  if (vs.empty()) return 1.0;
  const auto n = vs[0].size();
  Mat cols(n, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != n) throw DimensionMismatch("gram_volume: mixed ambient dimensions");
    cols.col(static_cast<Eigen::Index>(i)) = vs[i];
  }
  return gram_volume_cols(cols);
}

namespace {

// Modified Gram-Schmidt with one re-orthogonalization pass. Directions whose
// residual drops below drop_tol * (own norm) are skipped when allow_drop,
// otherwise reported via *degenerate.
Mat orthonormalize(const std::vector<Vec>& vs, bool allow_drop, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (vs.empty()) return Mat(0, 0);
  const auto n = vs[0].size();
  Mat basis(n, static_cast<Eigen::Index>(vs.size()));
  Eigen::Index k = 0;
  for (const Vec& v : vs) {
    if (v.size() != n) throw DimensionMismatch("orthonormalize: mixed ambient dimensions");
    Vec u = v;
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < k; ++j) u -= basis.col(j).dot(u) * basis.col(j);
    double r = u.norm();
    if (r <= 1e-12 * std::max(1e-300, v.norm())) {
      if (degenerate) *degenerate = true;
      if (allow_drop) continue;
      return Mat(n, 0);
    }
    basis.col(k++) = u / r;
  }
  return basis.leftCols(k);
}

}  // namespace

Plane Plane::from_spanning(const std::vector<Vec>& vs, std::optional<Vec> offset) {
  if (vs.empty()) throw DegenerateSpan("from_spanning: no vectors");
  double max_norm = 0.0;
  for (const Vec& v : vs) max_norm = std::max(max_norm, v.norm());
  if (gram_volume(vs) <= rank_tolerance(max_norm, static_cast<int>(vs.size())))
    throw DegenerateSpan("from_spanning: wedge volume below rank tolerance");
  bool degenerate = false;
  Mat basis = orthonormalize(vs, false, &degenerate);
  if (degenerate) throw DegenerateSpan("from_spanning: dependent directions");
  Plane p;
  p.basis_ = std::move(basis);
  p.offset_ = std::move(offset);
  return p;
}

Plane Plane::from_orthonormal(Mat basis, std::optional<Vec> offset) {
  Mat g = basis.transpose() * basis;
  if (!g.isIdentity(1e-12))
    throw GeomError("from_orthonormal: basis is not orthonormal");
  Plane p;
  p.basis_ = std::move(basis);
  p.offset_ = std::move(offset);
  return p;
}

Plane Plane::affine_hull(const std::vector<Vec>& pts) {
  if (pts.empty()) throw GeomError("affine_hull: no points");
  std::vector<Vec> diffs;
  diffs.reserve(pts.size() - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) diffs.push_back(pts[i] - pts[0]);
  Plane p;
  p.basis_ = orthonormalize(diffs, true, nullptr);
  if (p.basis_.size() == 0) p.basis_ = Mat(pts[0].size(), 0);
  p.offset_ = pts[0];
  return p;
}

double plane_distance(const Plane& P, const Plane& Q) {
  if (P.is_affine() || Q.is_affine())
    throw GeomError("plane_distance: affine planes have no Grassmannian distance");
  if (P.ambient() != Q.ambient() || P.dim() != Q.dim())
    throw DimensionMismatch("plane_distance: dimension mismatch");
  Mat d = P.projector() - Q.projector();
  Eigen::JacobiSVD<Mat> svd(d);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

SimplexTuple::SimplexTuple(std::vector<Vec> pts) : pts_(std::move(pts)) {
  if (pts_.size() < 3) throw GeomError("SimplexTuple: needs at least 3 points (m >= 1)");
  const auto n = pts_[0].size();
  for (const Vec& p : pts_)
    if (p.size() != n) throw DimensionMismatch("SimplexTuple: mixed ambient dimensions");
  if (static_cast<Eigen::Index>(pts_.size()) - 2 >= n)
    throw GeomError("SimplexTuple: requires m < n");
  const auto k = static_cast<Eigen::Index>(pts_.size());
  dist_.setZero(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) {
      double d = (pts_[static_cast<std::size_t>(i)] - pts_[static_cast<std::size_t>(j)]).norm();
      dist_(i, j) = dist_(j, i) = d;
      diam_ = std::max(diam_, d);
    }
}

std::vector<Vec> SimplexTuple::edge_vectors(std::size_t anchor) const {
  std::vector<Vec> out;
  out.reserve(pts_.size() - 1);
  for (std::size_t j = 0; j < pts_.size(); ++j)
    if (j != anchor) out.push_back(pts_[j] - pts_[anchor]);
  return out;
}

double simplex_volume(const SimplexTuple& T) {
  return gram_volume(T.edge_vectors(0)) / factorial(T.m() + 2 - 1);
}

}  // namespace mrect
