#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mrect {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct GeomError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : GeomError {
  using GeomError::GeomError;
};
struct DegenerateSpan : GeomError {
  using GeomError::GeomError;
};

// |v_1 ^ ... ^ v_k| = sqrt(det G), G_ij = <v_i, v_j>. Tiny negative
// determinants from roundoff are clamped to zero.
double gram_volume(const std::vector<Vec>& vs);

// Span tolerance used by Plane::from_spanning: Gram determinants underflow
// quadratically, so the cutoff scales with (max input norm)^k.
inline double rank_tolerance(double max_norm, int k) {
  double s = 1.0;
  for (int i = 0; i < k; ++i) s *= max_norm;
  return 1e-10 * s;
}

// eta / sqrt(1 + eta^2): Grassmannian distance between a graph plane of slope
// eta and its base plane. Strictly increasing, range [0,1).
inline double tilt_norm(double eta_norm) {
  return eta_norm / std::sqrt(1.0 + eta_norm * eta_norm);
}

// An m-dimensional linear (or, with an offset, affine) subspace of R^n held
// as an orthonormal basis.
class Plane {
 public:
  Plane() = default;

  // Orthonormalizes spanning vectors by modified Gram-Schmidt with one
  // re-orthogonalization pass. Throws DegenerateSpan when the wedge volume
  // is at or below rank_tolerance.
  static Plane from_spanning(const std::vector<Vec>& vs,
                             std::optional<Vec> offset = std::nullopt);

  // Columns must already be orthonormal (checked to 1e-12).
  static Plane from_orthonormal(Mat basis, std::optional<Vec> offset = std::nullopt);

  // Smallest affine flat containing the points. Rank-adaptive: affinely
  // dependent inputs yield a lower-dimensional flat, never an error.
  static Plane affine_hull(const std::vector<Vec>& pts);

  int dim() const { return static_cast<int>(basis_.cols()); }
  int ambient() const { return static_cast<int>(basis_.rows()); }
  bool is_affine() const { return offset_.has_value(); }
  const Mat& basis() const { return basis_; }
  const Vec& offset() const { return *offset_; }

  Plane linear_part() const { return from_orthonormal(basis_); }
  Plane translated(Vec offset) const { return from_orthonormal(basis_, std::move(offset)); }

  // Orthogonal projection / rejection of a direction vector (offset ignored).
  Vec project(const Vec& v) const { return basis_ * (basis_.transpose() * v); }
  Vec reject(const Vec& v) const { return v - project(v); }
  double reject_norm(const Vec& v) const { return reject(v).norm(); }

  // Distance from a point to the (affine) flat.
  double dist_to_point(const Vec& x) const {
    return offset_ ? reject(x - *offset_).norm() : reject(x).norm();
  }

  Mat projector() const { return basis_ * basis_.transpose(); }

 private:
  Mat basis_;  // n x dim, orthonormal columns
  std::optional<Vec> offset_;
};

// Operator-norm distance ||proj_P - proj_Q|| via singular values of the
// projector difference. Both planes must be linear and of equal dimension.
double plane_distance(const Plane& P, const Plane& Q);

// dist(x, A) for an affine flat A of any dimension.
inline double dist_to_affine(const Vec& x, const Plane& A) { return A.dist_to_point(x); }

// Ordered tuple of m+2 points in R^n with cached pairwise distances.
class SimplexTuple {
 public:
  explicit SimplexTuple(std::vector<Vec> pts);

  int m() const { return static_cast<int>(pts_.size()) - 2; }
  int ambient() const { return static_cast<int>(pts_[0].size()); }
  std::size_t size() const { return pts_.size(); }
  const Vec& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<Vec>& points() const { return pts_; }

  double dist(std::size_t i, std::size_t j) const { return dist_(i, j); }
  double diam() const { return diam_; }

  // a_j - a_anchor for all j != anchor, in index order.
  std::vector<Vec> edge_vectors(std::size_t anchor = 0) const;

 private:
  std::vector<Vec> pts_;
  Mat dist_;
  double diam_ = 0.0;
};

// H^{m+1} measure of the convex hull: wedge volume / (m+1)!.
double simplex_volume(const SimplexTuple& T);

double factorial(int k);

}  // namespace mrect
