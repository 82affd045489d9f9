#include "mrect/curvature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace mrect {

CurvatureKind curvature_kind_from_string(const std::string& s) {
  if (s == "kappa") return CurvatureKind::Kappa;
  if (s == "kappa_h") return CurvatureKind::KappaH;
  if (s == "kappa_min") return CurvatureKind::KappaMin;
  if (s == "kappa_max") return CurvatureKind::KappaMax;
  if (s == "kappa_dls") return CurvatureKind::KappaDls;
  throw GeomError("unknown curvature kind: " + s);
}

std::string to_string(CurvatureKind k) {
  switch (k) {
    case CurvatureKind::Kappa: return "kappa";
    case CurvatureKind::KappaH: return "kappa_h";
    case CurvatureKind::KappaMin: return "kappa_min";
    case CurvatureKind::KappaMax: return "kappa_max";
    case CurvatureKind::KappaDls: return "kappa_dls";
  }
  return "?";
}

double kappa(const SimplexTuple& T) {
  double d = T.diam();
  if (d <= 0.0) return 0.0;
  double v = simplex_volume(T);
  return v / std::pow(d, T.m() + 1);
}

double h_min(const SimplexTuple& T) {
  double best = -1.0;
  const auto& pts = T.points();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    std::vector<Vec> rest;
    rest.reserve(pts.size() - 1);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != j) rest.push_back(pts[i]);
    double d = Plane::affine_hull(rest).dist_to_point(pts[j]);
    if (best < 0.0 || d < best) best = d;
  }
  return best;
}

double kappa_h(const SimplexTuple& T) {
  double d = T.diam();
  if (d <= 0.0) return 0.0;
  return h_min(T) / d;
}

double pm_sin(const SimplexTuple& T, int i) {
  double wedge = gram_volume(T.edge_vectors(0));
  double denom = 1.0;
  for (std::size_t j = 0; j < T.size(); ++j) {
    if (static_cast<int>(j) == i) continue;
    double d = T.dist(static_cast<std::size_t>(i), j);
    if (d == 0.0)
      throw RepeatedVertex("pm_sin: repeated vertex with h_min > 0 signals corrupt input");
    denom *= d;
  }
  return wedge / denom;
}

namespace {

void min_max_pm_sin(const SimplexTuple& T, double& lo, double& hi) {
  lo = hi = pm_sin(T, 0);
  for (std::size_t i = 1; i < T.size(); ++i) {
    double s = pm_sin(T, static_cast<int>(i));
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
}

double dls_from_scatter(const SimplexTuple& T) {
  const auto& pts = T.points();
  const auto n = pts[0].size();
  Vec centroid = Vec::Zero(n);
  for (const Vec& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  Mat scatter = Mat::Zero(n, n);
  for (const Vec& p : pts) {
    Vec d = p - centroid;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(scatter);
  double sum = 0.0;  // the n-m smallest eigenvalues; Eigen sorts increasing
  for (Eigen::Index i = 0; i < n - T.m(); ++i) sum += std::max(0.0, es.eigenvalues()(i));
  return std::sqrt(sum) / T.diam();
}

}  // namespace

double kappa_min(const SimplexTuple& T) {
  if (h_min(T) == 0.0) return 0.0;
  double lo, hi;
  min_max_pm_sin(T, lo, hi);
  return lo;
}

double kappa_max(const SimplexTuple& T) {
  if (h_min(T) == 0.0) return 0.0;
  double lo, hi;
  min_max_pm_sin(T, lo, hi);
  return hi;
}

double kappa_dls(const SimplexTuple& T) {
  if (T.diam() <= 0.0 || h_min(T) == 0.0) return 0.0;
  return dls_from_scatter(T);
}

double curvature(CurvatureKind kind, const SimplexTuple& T) {
  switch (kind) {
    case CurvatureKind::Kappa: return kappa(T);
    case CurvatureKind::KappaH: return kappa_h(T);
    case CurvatureKind::KappaMin: return kappa_min(T);
    case CurvatureKind::KappaMax: return kappa_max(T);
    case CurvatureKind::KappaDls: return kappa_dls(T);
  }
  return 0.0;
}

KernelValues all_kernels(const SimplexTuple& T) {
  KernelValues k;
  k.h_min = h_min(T);
  double d = T.diam();
  if (d <= 0.0) return k;
  k.kappa = kappa(T);
  k.kappa_h = k.h_min / d;
  if (k.h_min > 0.0) {
    min_max_pm_sin(T, k.kappa_min, k.kappa_max);
    k.kappa_dls = dls_from_scatter(T);
  }
  return k;
}

double k_integrand(CurvatureKind kind, const SimplexTuple& T, int l, double p, double alpha) {
  double d = T.diam();
  if (d <= 0.0) return 0.0;
  double c = curvature(kind, T);
  if (c <= 0.0) return 0.0;
  double expo = T.m() * (l - 1) + alpha * p;
  return std::pow(c, p) / std::pow(d, expo);
}

}  // namespace mrect
