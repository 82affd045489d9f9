#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mrect/cloud.hpp"
#include "mrect/curvature.hpp"

namespace mrect {

// Beyond this many tuples an enumeration switches to Monte Carlo.
inline constexpr double kExhaustiveCap = 2e6;

struct EnergyParams {
  CurvatureKind kind = CurvatureKind::Kappa;
  int l = 0;
  double p = 2.0;
  double alpha = 0.0;
  double r = 0.0;  // infinity() = whole cloud
  Vec a;
};

struct EnergyEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 in exhaustive mode
  std::size_t tuples_evaluated = 0;
  bool exhaustive = true;
  EnergyParams params;
};

// Integrand of the multiscale energy for an explicit tuple; the first entry
// of the tuple is the base point. Dispatches to an allocation-free path for
// m = 1.
double tuple_integrand(CurvatureKind kind, const std::vector<Vec>& tuple, int l, double p,
                       double alpha);

// Essential supremum over the m+2-l tail slots, realised as the maximum of
// the integrand over tail tuples of cloud atoms in the closed ball. For a
// measure with atoms this maximum *is* the essential supremum, so the value
// is exact for the discrete surrogate whenever the enumeration is
// exhaustive; beyond the cap it is a Monte Carlo maximum (a lower bound).
// `leading` holds the l-1 leading point indices; throws EmptyBall.
double k_kernel(const PointCloud& cloud, CurvatureKind kind, const Vec& a, double r, int l,
                double p, double alpha, const std::vector<int>& leading,
                std::size_t budget = 200000, std::uint64_t seed = 1);

// The multiscale energy at (a, r): an (l-1)-fold weighted sum of k_kernel
// over leading tuples from the closed ball. Exhaustive under the cap,
// otherwise uniform Monte Carlo over index tuples with weight products
// (unbiased for the discretized quantity).
// `cap` exists so tests can force the Monte Carlo path on small fixtures.
EnergyEstimate k_energy(const PointCloud& cloud, CurvatureKind kind, const Vec& a, double r,
                        int l, double p, double alpha, std::size_t budget = 200000,
                        std::uint64_t seed = 1, double cap = kExhaustiveCap);

// Integral Menger curvature over a ball (or the whole cloud): the (m+2)-fold
// weighted sum of H^{m+1}(conv T)^2 / diam^{(m+2)(m+1)}. In exhaustive mode
// this is by construction the exact sum over atoms of w_a * k_energy(a) with
// kind = kappa, l = m+2, p = 2, alpha = 0.
EnergyEstimate menger_energy(const PointCloud& cloud,
                             std::optional<std::pair<Vec, double>> ball = std::nullopt,
                             std::size_t budget = 200000, std::uint64_t seed = 1,
                             double cap = kExhaustiveCap);

struct BetaNumber {
  double value = 0.0;
  Plane plane;      // best affine m-plane found
  double p = 2.0;
  Vec x;
  double r = 0.0;
  bool exact = true;  // p == 2 PCA is exact; general p is an upper bound
};

// Jones beta number: r^-1 (r^-m integral of dist(y, L)^p)^(1/p), minimised
// over affine m-planes L. p = 2 is solved exactly by weighted PCA through
// the weighted centroid; other p descend from that plane by iteratively
// reweighted fits and report an upper bound.
BetaNumber beta_number(const PointCloud& cloud, const Vec& x, double r, double p = 2.0);

// J energy: sum over points of B of the dyadic dr/r discretisation of
// beta_q(x, r)^p, each dyadic slice weighted ln 2.
double j_energy(const PointCloud& cloud, std::optional<std::pair<Vec, double>> ball, double p,
                double q, int depth);

}  // namespace mrect
