#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "mrect/geom.hpp"

namespace mrect {

struct CloudError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyBall : CloudError {
  using CloudError::CloudError;
};
struct ZeroDirection : CloudError {
  using CloudError::CloudError;
};
struct CsvError : CloudError {
  using CloudError::CloudError;
};

// Lebesgue measure of the unit ball in R^m.
double unit_ball_volume(int m);

// Per-dyadic-radius density ratios mu(B(a,r)) / (w_m r^m).
struct DensityProfile {
  std::vector<double> radii;   // strictly decreasing
  std::vector<double> ratios;  // >= 0; zero flags an empty ball
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

// Density stratum label: smallest j (then k) whose dyadic ratio window
// certifies; unbounded when no j <= j_max does.
struct StratumLabel {
  int j = 0;
  int k = 0;
  bool unbounded = true;
};

struct ContainmentDefect {
  double ratio_form = 0.0;   // r^-m sum w |rej(T, b-a)| / |b-a|
  double height_form = 0.0;  // r^-m-1 sum w |rej(T, b-a)|
};

// Weighted point cloud standing in for a Radon measure. Immutable after
// construction; all queries are read-only.
class PointCloud {
 public:
  // points: one column per point (n x N); weights: positive, one per point.
  PointCloud(Mat points, Vec weights, int m);

  static PointCloud from_points(const std::vector<Vec>& pts, const std::vector<double>& w, int m);

  int ambient() const { return static_cast<int>(pts_.rows()); }
  int intrinsic() const { return m_; }
  Eigen::Index size() const { return pts_.cols(); }
  Vec point(Eigen::Index i) const { return pts_.col(i); }
  const Mat& points() const { return pts_; }
  double weight(Eigen::Index i) const { return w_(i); }
  const Vec& weights() const { return w_; }
  double total_mass() const { return total_mass_; }

  // Bounding-box diagonal: cheap upper proxy for the support diameter.
  double bbox_diameter() const { return (bbox_max_ - bbox_min_).norm(); }

  // Median nearest-neighbour distance (subsampled for large clouds): the
  // honest resolution floor of any multiscale statement about this cloud.
  double spacing() const { return spacing_; }

  // Indices of points in the closed ball, ascending. Exact: the spatial index
  // only prefilters, membership is always the literal |x-a| <= r test.
  std::vector<int> ball(const Vec& a, double r) const;
  double ball_mass(const Vec& a, double r) const;
  double mass_of(const std::vector<int>& idx) const;

  DensityProfile density_profile(const Vec& a, double r0, int depth) const;

  std::vector<StratumLabel> stratify(int j_max, int k_max, double r0) const;

  // Points b for which some t > 0 brings t(b-a) within eps of v. Membership
  // is decided by the closed-form minimum of |t(b-a) - v| over t > 0, so
  // there is no tolerance knob.
  std::vector<int> cone_members(const Vec& a, const Vec& v, double eps) const;

  ContainmentDefect tangent_containment_defect(const Vec& a, const Plane& T, double r) const;

 private:
  void build_index();
  std::uint64_t cell_key(const Eigen::ArrayXi& c) const;

  Mat pts_;
  Vec w_;
  int m_;
  double total_mass_ = 0.0;
  Vec bbox_min_, bbox_max_;
  double spacing_ = 0.0;

  bool use_grid_ = false;
  double cell_ = 0.0;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

// CSV with header x1,...,xn[,w]. When the weight column is absent every
// point gets default_total_mass / count.
PointCloud read_csv(const std::string& path, int m, double default_total_mass = 1.0);
void write_csv(const std::string& path, const PointCloud& cloud);

}  // namespace mrect
