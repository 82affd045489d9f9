#pragma once

#include <cstdint>
#include <vector>

#include "mrect/cloud.hpp"

namespace mrect {

// A synthetic cloud with its analytic tangent oracle attached.
struct FlatSample {
  PointCloud cloud;
  Plane plane;              // the exact containing m-flat (linear part)
  std::vector<Vec> params;  // parameter points
  Plane tangent_at(std::size_t) const { return plane; }
};

struct SphereSample {
  PointCloud cloud;
  std::vector<Vec> params;  // unit directions
  int m = 1;
  Plane tangent_at(std::size_t i) const;
};

// Uniform-density samples of [-1,1]^m embedded in the first m coordinates;
// weights sum to the parameter-space area 2^m.
FlatSample gen_plane(int m, int n, Eigen::Index count, std::uint64_t seed, bool grid = false);

// m = 1 line segment [-1,1] x {0}^(n-1).
FlatSample gen_segment(int n, Eigen::Index count, std::uint64_t seed, bool grid = false);

// Unit circle in R^2 (m = 1) or unit sphere in R^3 (m = 2); weights sum to
// the surface measure.
SphereSample gen_sphere(int m, Eigen::Index count, std::uint64_t seed, bool grid = false);

struct GraphSpec {
  int m = 1;
  int n = 2;
  double beta = 0.5;       // Hoelder exponent of Df
  int series_depth = 8;    // lacunary truncation: scales down to 4^-depth
  double amplitude = 0.6;
  Eigen::Index count = 2000;
  std::uint64_t seed = 0;
  bool grid = true;        // grid over [-1,1]^m vs uniform random parameters
};

// f(x) = amplitude * sum_j 4^{-j(1+beta)} sin(2 pi 4^j u_j.x + phase_j)
// per output component; Df is then beta-Hoelder down to the truncation
// scale, with closed-form derivatives everywhere.
class LacunaryGraph {
 public:
  explicit LacunaryGraph(const GraphSpec& spec);

  const GraphSpec& spec() const { return spec_; }
  Vec f(const Vec& x) const;            // (n-m)-vector
  Mat df(const Vec& x) const;           // (n-m) x m
  double df_norm(const Vec& x) const;   // spectral norm
  Vec embed(const Vec& x) const;        // (x, f(x)) in R^n
  Plane tangent_at(const Vec& x) const; // linear tangent plane of the graph
  double area_element(const Vec& x) const;  // sqrt det(I + Df^T Df)

 private:
  GraphSpec spec_;
  Mat dirs_;    // series_depth+1 rows x (m * (n-m)) packed unit directions
  Mat phases_;  // (series_depth+1) x (n-m)
};

struct GraphSample {
  GraphSpec spec;
  LacunaryGraph graph;
  std::vector<Vec> params;
  PointCloud cloud;
  double hoelder_measured = 0.0;  // realized |Df|_beta on a fine grid
  double hoelder_target = 0.0;    // calibrated envelope estimate
  Plane tangent_at(std::size_t i) const { return graph.tangent_at(params[i]); }
};

GraphSample gen_c1beta_graph(const GraphSpec& spec);

// Corner points of the four-corner Cantor construction at the given level:
// 4^level points of equal weight, total mass 1 (m = 1, n = 2).
PointCloud gen_cantor4(int level);

// JSON sidecar describing a generated fixture (oracle metadata).
std::string sidecar_json(const GraphSample& gs);

}  // namespace mrect
