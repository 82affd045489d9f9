#pragma once

#include <string>

#include "mrect/geom.hpp"

namespace mrect {

struct RepeatedVertex : GeomError {
  using GeomError::GeomError;
};

enum class CurvatureKind { Kappa, KappaH, KappaMin, KappaMax, KappaDls };

CurvatureKind curvature_kind_from_string(const std::string& s);
std::string to_string(CurvatureKind k);

// H^{m+1}(conv T) / diam^{m+1}; zero on a single-point tuple.
double kappa(const SimplexTuple& T);

// Minimal distance from a vertex to the affine hull of the remaining m+1
// points. If those points are affinely dependent their true
// (lower-dimensional) hull is used.
double h_min(const SimplexTuple& T);

// h_min / diam; zero on a single-point tuple.
double kappa_h(const SimplexTuple& T);

// |(a_1-a_0) ^ ... ^ (a_{m+1}-a_0)| / prod_{j != i} |a_j - a_i|.
// The wedge in the numerator is anchored at a_0 for every i, exactly as the
// definition displays it. This is not an asymmetry in disguise: the wedge of
// the difference vectors has the same norm for any anchor (it equals
// (m+1)! H^{m+1}(conv T)), so only the denominator depends on i.
// Requires h_min(T) > 0; callers use the zero convention otherwise.
double pm_sin(const SimplexTuple& T, int i);

// min / max of pm_sin over all vertices; zero when h_min = 0.
double kappa_min(const SimplexTuple& T);
double kappa_max(const SimplexTuple& T);

// Least-squares kernel: root sum of squared vertex distances to the best
// affine m-plane, over diam. The minimizing plane passes through the vertex
// centroid and is spanned by the top-m principal directions, so the value is
// computed exactly from the scatter-matrix eigenvalues. Zero when h_min = 0.
double kappa_dls(const SimplexTuple& T);

double curvature(CurvatureKind kind, const SimplexTuple& T);

// All five kernels from one pass (h_min and the wedge are shared).
struct KernelValues {
  double kappa = 0.0;
  double h_min = 0.0;
  double kappa_h = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double kappa_dls = 0.0;
};
KernelValues all_kernels(const SimplexTuple& T);

// curvature(T)^p / diam(T)^{m(l-1) + alpha p}; zero when diam = 0.
double k_integrand(CurvatureKind kind, const SimplexTuple& T, int l, double p, double alpha);

}  // namespace mrect
