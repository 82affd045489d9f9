#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrect/cloud.hpp"

namespace mrect {

// Constants from the two alternatives of the dichotomy.
inline double balanced_gamma1(int n) { return std::pow(2.0, n + 1); }
inline double balanced_gamma2(int m) { return 4.0 * std::pow(20.0, m); }

struct BalancedBranch {
  std::vector<Vec> directions;       // x_{k+1}, ..., x_m
  std::vector<Plane> planes;         // L_{k+1}, ..., L_m (linear)
  std::optional<Plane> start_flat;   // L_k; absent when k = 0
  Vec a, b;
  double r = 0, t = 0, gamma = 0;
  int k = 0;
};

struct ConcentratedBranch {
  int lambda = 0;
  Plane flat;                // L_lambda, linear part; centers lie on b + L_lambda
  std::vector<Vec> centers;  // y_1, ..., y_N
  Vec a, b;
  double r = 0, gamma = 0;
  int k = 0;
};

struct Dichotomy {
  enum class Kind { Balanced, Concentrated, NoValidBranch };
  Kind kind = Kind::NoValidBranch;
  std::optional<BalancedBranch> balanced;
  std::optional<ConcentratedBranch> concentrated;
  std::vector<std::string> issues;
};

// Full invariant lists of the two alternatives, checked against the cloud.
bool verify_balanced(const PointCloud& cloud, const BalancedBranch& br,
                     std::vector<std::string>* why = nullptr);
bool verify_concentrated(const PointCloud& cloud, const ConcentratedBranch& br,
                         std::vector<std::string>* why = nullptr);

// Constructive dichotomy: greedily picks mass-maximising directions away from
// the growing flat; when the candidate mass supply dies, covers the strip
// around the flat by a thinned net and extracts disjoint heavy balls. The
// returned branch always has its invariants verified; NoValidBranch is a
// reportable outcome for (gamma, t) outside the workable regime, not a
// failure.
Dichotomy balanced_dichotomy(const PointCloud& cloud, const Vec& a, const Vec& b, double r,
                             double t, double gamma, int k,
                             std::optional<Plane> L_k = std::nullopt);

struct FatSimplexStat {
  double delta = 0.0;
  double fraction = 0.0;  // weighted fraction of m-tuples spanning >= delta r^m
  double std_error = 0.0;
  bool exhaustive = true;
};

// Wedge-volume test |(b_1-a) ^ ... ^ (b_m-a)| >= delta r^m.
bool x_delta_member(const Vec& a, double r, double delta, const std::vector<Vec>& pts);

FatSimplexStat fat_fraction(const PointCloud& cloud, const Vec& a, double r, double delta,
                            std::size_t budget = 200000, std::uint64_t seed = 1);

// Largest delta whose fat fraction stays >= sigma, by bisection on the
// monotone map delta -> fraction, to resolution 1e-3.
double fat_simplex_search(const PointCloud& cloud, const Vec& a, double r, double sigma,
                          std::size_t budget = 200000, std::uint64_t seed = 1);

}  // namespace mrect
