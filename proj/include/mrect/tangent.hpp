#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrect/energy.hpp"
#include "mrect/generators.hpp"

namespace mrect {

// Chebyshev bad-tuple filter: marks leading tuples whose kernel (or, in the
// l = m+2 variant, tail integral) exceeds M times its mean. l = 1 marks
// nothing. The marked weighted tuple-mass fraction is at most 1/M.
class BadSetY {
 public:
  // Builds the filter at (a, r): estimates the energy, fixes the threshold.
  BadSetY(const PointCloud& cloud, CurvatureKind kind, const Vec& a, double r, int l, double p,
          double alpha, double M, std::size_t budget = 200000, std::uint64_t seed = 1);

  // tuple: m cloud point indices inside the ball.
  bool contains(const std::vector<int>& tuple) const;

  double threshold() const { return threshold_; }
  double energy() const { return energy_; }
  double big_m() const { return M_; }
  int l() const { return l_; }

 private:
  const PointCloud& cloud_;
  CurvatureKind kind_;
  Vec a_;
  double r_;
  int l_;
  double p_, alpha_, M_;
  double energy_ = 0.0;
  double threshold_ = 0.0;
  std::vector<int> ball_;
  std::uint64_t seed_;
};

// Distance-outlier filter of the l = m+2 route: points of the ball whose
// dist(c-a, Q)^p exceeds M times its weighted mean over the ball.
std::vector<int> bad_set_Z(const PointCloud& cloud, const Vec& a, double r, const Plane& Q,
                           double p, double M);

struct PlaneAtScale {
  Plane plane;
  std::vector<int> tuple;  // the m spanning point indices
  double gram = 0.0;       // wedge volume of the spanning vectors
  double rho = 0.0;
  double delta = 0.0;
};

// First tuple of X_delta(a, r) \ Y in decreasing wedge-volume order, turned
// into a plane through the spanning directions. Nullopt when the sample has
// no fat unfiltered tuple (reported, not thrown).
std::optional<PlaneAtScale> plane_at_scale(const PointCloud& cloud, const Vec& a, double r,
                                           double delta, const BadSetY& filter,
                                           const std::vector<int>* exclude_points = nullptr,
                                           std::size_t budget = 200000, std::uint64_t seed = 1,
                                           std::string* issue = nullptr);

struct ScaleRecord {
  double rho = 0.0;
  std::optional<PlaneAtScale> plane;
  double drift = -1.0;          // plane distance to the limit plane; -1 = n/a
  double energy = -1.0;         // K estimate at this scale
  double lemma72_bound = -1.0;  // m delta_eff^-1 eps_eff for the next scale's tuple
  double lemma72_actual = -1.0; // measured consecutive plane distance
  std::string issue;
};

enum class FitStatus { Ok, Flat, Insufficient };

struct TangentEstimate {
  Vec a;
  double r0 = 0.0;
  int depth = 0;
  std::vector<ScaleRecord> scales;
  std::optional<Plane> limit_plane;
  bool reference_is_external = false;
  double alpha_fit = 0.0;
  double fit_r2 = 0.0;
  FitStatus fit_status = FitStatus::Insufficient;
  int fit_points = 0;
};

struct TangentParams {
  CurvatureKind kind = CurvatureKind::KappaH;
  int l = 2;
  double p = 2.0;
  double alpha = 0.5;
  double delta = 0.25;
  double M = 0.0;  // 0: use the proof formula (2^(m+m^2) A^(2m) + 2) / sigma
  double A = 1.0;
  double sigma = 0.5;
  std::size_t budget = 200000;
  std::uint64_t seed = 1;
};

double default_chebyshev_m(int m, double A, double sigma);

// Dyadic plane sequence at rho_i = 2^-i r0. For 2 <= l <= m+1 (and l = 1)
// each scale picks its plane through X_delta \ Y; for l = m+2 the scales are
// chained through the Z/W distance-outlier filters of the previous scale.
// The drift regression excludes the deepest two scales when the limit plane
// is the deepest one (self-comparison); an external reference plane (e.g. an
// analytic tangent oracle) uses every scale.
TangentEstimate dyadic_plane_sequence(const PointCloud& cloud, const Vec& a, double r0, int depth,
                                      const TangentParams& params,
                                      std::optional<Plane> reference = std::nullopt);

struct ScaleProfile {
  std::vector<double> radii;
  std::vector<double> values;
  double max_value = 0.0;
  double trend_slope = 0.0;  // log-log slope of value vs radius
  bool trend_valid = false;
};

// Pointwise Schatzle-type diagnostic: at each dyadic radius,
// r^-m sum_{b in ball, b != a} w_b |rej(T, b-a)| / |b-a|^(1+alpha).
// Bounded profiles are the discrete trace of the integral condition.
ScaleProfile schatzle_diagnostic(const PointCloud& cloud, const Vec& a, const Plane& T,
                                 double alpha, double r0, int depth);

struct TaylorSandwich {
  double lhs = 0.0;     // |rej(Tan_a, b - a)|
  double mid = 0.0;     // |f(y) - f(x) - Df(x)(y - x)|
  double factor = 0.0;  // 1 - |Df(x)| / sqrt(1 + |Df(x)|^2)
  bool holds(double slack = 1e-9) const {
    return lhs <= mid + slack && lhs >= factor * mid - slack;
  }
};

// Both Taylor-distance inequalities on a sampled graph with known f and Df.
TaylorSandwich taylor_sandwich_check(const LacunaryGraph& graph, const Vec& x, const Vec& y);

}  // namespace mrect
