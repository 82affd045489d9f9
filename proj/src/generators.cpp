#include "mrect/generators.hpp"

#include <cmath>
#include <sstream>

#include "mrect/rng.hpp"

namespace mrect {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Vec> param_points(int m, Eigen::Index count, std::uint64_t seed, bool grid) {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  if (grid && m == 1) {
    for (Eigen::Index i = 0; i < count; ++i) {
      Vec x(1);
      x(0) = count == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(count - 1);
      out.push_back(x);
    }
    return out;
  }
  if (grid && m == 2) {
    Eigen::Index side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(count))));
    side = std::max<Eigen::Index>(side, 2);
    for (Eigen::Index i = 0; i < side; ++i)
      for (Eigen::Index j = 0; j < side; ++j) {
        Vec x(2);
        x(0) = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(side - 1);
        x(1) = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(side - 1);
        out.push_back(x);
      }
    return out;
  }
  Rng rng(seed);
  for (Eigen::Index i = 0; i < count; ++i) {
    Vec x(m);
    for (int k = 0; k < m; ++k) x(k) = rng.next_in(-1.0, 1.0);
    out.push_back(x);
  }
  return out;
}

}  // namespace

FlatSample gen_plane(int m, int n, Eigen::Index count, std::uint64_t seed, bool grid) {
  if (count < 1) throw CloudError("gen_plane: count >= 1 required");
  if (!(1 <= m && m < n)) throw CloudError("gen_plane: requires 1 <= m < n");
  auto params = param_points(m, count, seed, grid);
  double area = std::pow(2.0, m);
  double w = area / static_cast<double>(params.size());
  std::vector<Vec> pts;
  pts.reserve(params.size());
  for (const Vec& x : params) {
    Vec p = Vec::Zero(n);
    p.head(m) = x;
    pts.push_back(p);
  }
  FlatSample s{PointCloud::from_points(pts, std::vector<double>(params.size(), w), m),
               Plane::from_orthonormal(Mat::Identity(n, n).leftCols(m)), std::move(params)};
  return s;
}

FlatSample gen_segment(int n, Eigen::Index count, std::uint64_t seed, bool grid) {
  return gen_plane(1, n, count, seed, grid);
}

Plane SphereSample::tangent_at(std::size_t i) const {
  const Vec& u = params[i];
  if (m == 1) {
    Vec t(2);
    t(0) = -u(1);
    t(1) = u(0);
    return Plane::from_spanning({t});
  }
  // m = 2: the orthogonal complement of the radial direction
  std::vector<Vec> span;
  for (int e = 0; e < 3 && static_cast<int>(span.size()) < 2; ++e) {
    Vec cand = Vec::Zero(3);
    cand(e) = 1.0;
    cand -= u.dot(cand) * u;
    for (const Vec& b : span) cand -= b.dot(cand) * b;
    if (cand.norm() > 0.3) span.push_back(cand / cand.norm());
  }
  return Plane::from_spanning(span);
}

SphereSample gen_sphere(int m, Eigen::Index count, std::uint64_t seed, bool grid) {
  if (count < 1) throw CloudError("gen_sphere: count >= 1 required");
  if (m != 1 && m != 2) throw CloudError("gen_sphere: m must be 1 (circle) or 2 (sphere)");
  std::vector<Vec> pts;
  Rng rng(seed);
  if (m == 1) {
    for (Eigen::Index i = 0; i < count; ++i) {
      double theta = grid ? 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count)
                          : rng.next_in(0.0, 2.0 * kPi);
      Vec u(2);
      u << std::cos(theta), std::sin(theta);
      pts.push_back(u);
    }
  } else {
    // Fibonacci lattice (grid) or normalized Gaussians (random)
    for (Eigen::Index i = 0; i < count; ++i) {
      Vec u(3);
      if (grid) {
        double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
        double phi = 2.0 * kPi * static_cast<double>(i) * 0.6180339887498949;
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        u << rho * std::cos(phi), rho * std::sin(phi), z;
      } else {
        do {
          for (int k = 0; k < 3; ++k) u(k) = rng.next_normal();
        } while (u.norm() < 1e-12);
        u /= u.norm();
      }
      pts.push_back(u);
    }
  }
  double area = m == 1 ? 2.0 * kPi : 4.0 * kPi;
  SphereSample s{
      PointCloud::from_points(pts, std::vector<double>(pts.size(), area / static_cast<double>(count)), m),
      pts, m};
  return s;
}

LacunaryGraph::LacunaryGraph(const GraphSpec& spec) : spec_(spec) {
  if (!(spec.beta > 0.0 && spec.beta <= 1.0))
    throw CloudError("LacunaryGraph: beta must lie in (0,1]");
  if (!(1 <= spec.m && spec.m < spec.n)) throw CloudError("LacunaryGraph: requires 1 <= m < n");
  const int J = spec.series_depth;
  const int q = spec.n - spec.m;
  phases_.resize(J + 1, q);
  dirs_.resize(J + 1, spec.m * q);
  for (int j = 0; j <= J; ++j)
    for (int c = 0; c < q; ++c) {
      // component 0 reuses the plain (seed, j) phase table so that m = 1,
      // n = 2 fixtures are bit-reproducible from the seed alone
      std::uint64_t h = c == 0 ? hash_mix(spec.seed, static_cast<std::uint64_t>(j))
                               : hash_mix(hash_mix(spec.seed, 4096 + static_cast<std::uint64_t>(c)),
                                          static_cast<std::uint64_t>(j));
      phases_(j, c) = 2.0 * kPi * (static_cast<double>(h >> 11) * 0x1.0p-53);
      if (spec.m == 1) {
        dirs_(j, c) = 1.0;
      } else {
        Rng rng(hash_mix(hash_mix(spec.seed, 777 + static_cast<std::uint64_t>(c)),
                         static_cast<std::uint64_t>(j)));
        Vec u(spec.m);
        do {
          for (int k = 0; k < spec.m; ++k) u(k) = rng.next_normal();
        } while (u.norm() < 1e-12);
        u /= u.norm();
        for (int k = 0; k < spec.m; ++k) dirs_(j, c * spec.m + k) = u(k);
      }
    }
}

Vec LacunaryGraph::f(const Vec& x) const {
  const int J = spec_.series_depth;
  const int q = spec_.n - spec_.m;
  Vec out = Vec::Zero(q);
  for (int c = 0; c < q; ++c) {
    double s = 0.0;
    for (int j = 0; j <= J; ++j) {
      double dot = 0.0;
      for (int k = 0; k < spec_.m; ++k) dot += dirs_(j, c * spec_.m + k) * x(k);
      s += std::pow(4.0, -j * (1.0 + spec_.beta)) *
           std::sin(2.0 * kPi * std::pow(4.0, j) * dot + phases_(j, c));
    }
    out(c) = spec_.amplitude * s;
  }
  return out;
}

Mat LacunaryGraph::df(const Vec& x) const {
  const int J = spec_.series_depth;
  const int q = spec_.n - spec_.m;
  Mat out = Mat::Zero(q, spec_.m);
  for (int c = 0; c < q; ++c)
    for (int j = 0; j <= J; ++j) {
      double dot = 0.0;
      for (int k = 0; k < spec_.m; ++k) dot += dirs_(j, c * spec_.m + k) * x(k);
      double g = 2.0 * kPi * spec_.amplitude * std::pow(4.0, -j * spec_.beta) *
                 std::cos(2.0 * kPi * std::pow(4.0, j) * dot + phases_(j, c));
      for (int k = 0; k < spec_.m; ++k) out(c, k) += g * dirs_(j, c * spec_.m + k);
    }
  return out;
}

double LacunaryGraph::df_norm(const Vec& x) const {
  Mat d = df(x);
  if (d.size() == 1) return std::abs(d(0, 0));
  Eigen::JacobiSVD<Mat> svd(d);
  return svd.singularValues()(0);
}

Vec LacunaryGraph::embed(const Vec& x) const {
  Vec p(spec_.n);
  p.head(spec_.m) = x;
  p.tail(spec_.n - spec_.m) = f(x);
  return p;
}

Plane LacunaryGraph::tangent_at(const Vec& x) const {
  Mat d = df(x);
  std::vector<Vec> span;
  for (int k = 0; k < spec_.m; ++k) {
    Vec v = Vec::Zero(spec_.n);
    v(k) = 1.0;
    v.tail(spec_.n - spec_.m) = d.col(k);
    span.push_back(v);
  }
  return Plane::from_spanning(span);
}

double LacunaryGraph::area_element(const Vec& x) const {
  Mat d = df(x);
  Mat g = Mat::Identity(spec_.m, spec_.m) + d.transpose() * d;
  return std::sqrt(std::max(0.0, g.determinant()));
}

GraphSample gen_c1beta_graph(const GraphSpec& spec) {
  if (spec.count < 1) throw CloudError("gen_c1beta_graph: count >= 1 required");
  LacunaryGraph graph(spec);
  auto params = param_points(spec.m, spec.count, hash_mix(spec.seed, 0x5EED), spec.grid);

  double param_area = std::pow(2.0, spec.m);
  double cell = param_area / static_cast<double>(params.size());
  std::vector<Vec> pts;
  std::vector<double> ws;
  pts.reserve(params.size());
  for (const Vec& x : params) {
    pts.push_back(graph.embed(x));
    ws.push_back(cell * graph.area_element(x));
  }

  GraphSample gs{spec, graph, std::move(params),
                 PointCloud::from_points(pts, ws, spec.m), 0.0, 0.0};

  // realized Hoelder seminorm of Df along axis separations 4^-i
  const int J = spec.series_depth;
  double measured = 0.0;
  Rng rng(hash_mix(spec.seed, 0xA0));
  for (int axis = 0; axis < spec.m; ++axis) {
    for (int i = 0; i <= J; ++i) {
      double h = std::pow(4.0, -i);
      int anchors = 512;
      for (int aidx = 0; aidx < anchors; ++aidx) {
        Vec x(spec.m);
        for (int k = 0; k < spec.m; ++k) x(k) = rng.next_in(-1.0, 1.0 - (k == axis ? h : 0.0));
        Vec y = x;
        y(axis) += h;
        double q = (graph.df(y) - graph.df(x)).norm() / std::pow(h, spec.beta);
        measured = std::max(measured, q);
      }
    }
  }
  gs.hoelder_measured = measured;

  // calibrated envelope target: max over dyadic separations of the term-wise
  // bound sum_j min(2, 2 pi 4^j h) 2 pi amp 4^{-j beta} / h^beta
  double target = 0.0;
  for (int kk = 0; kk <= J; ++kk) {
    double h = std::pow(4.0, -kk);
    double s = 0.0;
    for (int j = 0; j <= J; ++j)
      s += std::min(2.0, 2.0 * kPi * std::pow(4.0, j) * h) * 2.0 * kPi * spec.amplitude *
           std::pow(4.0, -j * spec.beta);
    target = std::max(target, s / std::pow(h, spec.beta));
  }
  gs.hoelder_target = 0.75 * target * std::sqrt(static_cast<double>(spec.n - spec.m));
  return gs;
}

PointCloud gen_cantor4(int level) {
  if (level < 1) throw CloudError("gen_cantor4: level >= 1 required");
  std::vector<Vec> pts;
  Vec z = Vec::Zero(2);
  pts.push_back(z);
  const double offs[4][2] = {{0.0, 0.0}, {0.75, 0.0}, {0.0, 0.75}, {0.75, 0.75}};
  for (int l = 0; l < level; ++l) {
    std::vector<Vec> next;
    next.reserve(pts.size() * 4);
    for (const Vec& p : pts)
      for (const auto& o : offs) {
        Vec q(2);
        q(0) = o[0] + p(0) / 4.0;
        q(1) = o[1] + p(1) / 4.0;
        next.push_back(q);
      }
    pts = std::move(next);
  }
  double w = 1.0 / static_cast<double>(pts.size());
  return PointCloud::from_points(pts, std::vector<double>(pts.size(), w), 1);
}

std::string sidecar_json(const GraphSample& gs) {
  std::ostringstream os;
  os.precision(17);
  os << "{\n"
     << "  \"generator\": \"c1beta\",\n"
     << "  \"m\": " << gs.spec.m << ",\n"
     << "  \"n\": " << gs.spec.n << ",\n"
     << "  \"beta\": " << gs.spec.beta << ",\n"
     << "  \"amplitude\": " << gs.spec.amplitude << ",\n"
     << "  \"series_depth\": " << gs.spec.series_depth << ",\n"
     << "  \"count\": " << gs.cloud.size() << ",\n"
     << "  \"seed\": " << gs.spec.seed << ",\n"
     << "  \"grid\": " << (gs.spec.grid ? "true" : "false") << ",\n"
     << "  \"hoelder_measured\": " << gs.hoelder_measured << ",\n"
     << "  \"hoelder_target\": " << gs.hoelder_target << "\n"
     << "}\n";
  return os.str();
}

}  // namespace mrect
