#include "mrect/energy.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "mrect/parallel.hpp"
#include "mrect/rng.hpp"

namespace mrect {

namespace {

struct SumSq {
  double s = 0.0, s2 = 0.0;
  SumSq operator+(const SumSq& o) const { return {s + o.s, s2 + o.s2}; }
};

// ---- fast m = 1 path: triangle kernels on raw coordinates ----

struct TriGeom {
  double d01, d02, d12, diam, wedge;  // wedge = |u ^ v|, twice the area
};

TriGeom tri_geom(const double* A, const double* B, const double* C, int n) {
  double uu = 0, vv = 0, uv = 0, ww = 0;
  for (int k = 0; k < n; ++k) {
    double u = B[k] - A[k], v = C[k] - A[k], w = C[k] - B[k];
    uu += u * u;
    vv += v * v;
    uv += u * v;
    ww += w * w;
  }
  TriGeom t;
  t.d01 = std::sqrt(uu);
  t.d02 = std::sqrt(vv);
  t.d12 = std::sqrt(ww);
  t.diam = std::max({t.d01, t.d02, t.d12});
  double det = uu * vv - uv * uv;
  t.wedge = det > 0.0 ? std::sqrt(det) : 0.0;
  return t;
}

double tri_kernel(CurvatureKind kind, const double* A, const double* B, const double* C, int n,
                  const TriGeom& t) {
  if (t.diam <= 0.0) return 0.0;
  switch (kind) {
    case CurvatureKind::Kappa:
      return 0.5 * t.wedge / (t.diam * t.diam);
    case CurvatureKind::KappaH:
      // min height of a triangle = wedge / longest side
      return t.wedge / (t.diam * t.diam);
    case CurvatureKind::KappaMin:
    case CurvatureKind::KappaMax: {
      if (t.wedge <= 0.0) return 0.0;
      if (t.d01 == 0.0 || t.d02 == 0.0 || t.d12 == 0.0) return 0.0;
      double s0 = t.wedge / (t.d01 * t.d02);
      double s1 = t.wedge / (t.d01 * t.d12);
      double s2 = t.wedge / (t.d02 * t.d12);
      return kind == CurvatureKind::KappaMin ? std::min({s0, s1, s2}) : std::max({s0, s1, s2});
    }
    case CurvatureKind::KappaDls: {
      if (t.wedge <= 0.0) return 0.0;
      // centered Gram invariants give the two nonzero scatter eigenvalues
      double g00 = 0, g01 = 0, g02 = 0, g11 = 0, g12 = 0, g22 = 0;
      for (int k = 0; k < n; ++k) {
        double mk = (A[k] + B[k] + C[k]) / 3.0;
        double c0 = A[k] - mk, c1 = B[k] - mk, c2 = C[k] - mk;
        g00 += c0 * c0;
        g01 += c0 * c1;
        g02 += c0 * c2;
        g11 += c1 * c1;
        g12 += c1 * c2;
        g22 += c2 * c2;
      }
      double tr = g00 + g11 + g22;
      double fr = g00 * g00 + g11 * g11 + g22 * g22 + 2 * (g01 * g01 + g02 * g02 + g12 * g12);
      double disc = 2 * fr - tr * tr;
      double lmax = 0.5 * (tr + std::sqrt(disc > 0.0 ? disc : 0.0));
      double resid = tr - lmax;
      return std::sqrt(resid > 0.0 ? resid : 0.0) / t.diam;
    }
  }
  return 0.0;
}

double tri_integrand(CurvatureKind kind, const double* A, const double* B, const double* C, int n,
                     int l, double p, double alpha) {
  TriGeom t = tri_geom(A, B, C, n);
  if (t.diam <= 0.0) return 0.0;
  double c = tri_kernel(kind, A, B, C, n, t);
  if (c <= 0.0) return 0.0;
  double num = (p == 2.0) ? c * c : std::pow(c, p);
  double expo = (l - 1) + alpha * p;  // m = 1
  return num / std::pow(t.diam, expo);
}

// Evaluates integrands for tuples (a, cloud points...) without building a
// SimplexTuple when m = 1.
class TupleEval {
 public:
  TupleEval(const PointCloud& cloud, CurvatureKind kind, Vec a, int l, double p, double alpha)
      : cloud_(cloud), kind_(kind), a_(std::move(a)), l_(l), p_(p), alpha_(alpha) {
    m_ = cloud.intrinsic();
    scratch_.assign(static_cast<std::size_t>(m_) + 2, Vec(cloud.ambient()));
    scratch_[0] = a_;
  }

  // idx: the m+1 cloud indices following the base point
  double operator()(const int* idx) const {
    const int n = cloud_.ambient();
    if (m_ == 1)
      return tri_integrand(kind_, a_.data(), cloud_.points().col(idx[0]).data(),
                           cloud_.points().col(idx[1]).data(), n, l_, p_, alpha_);
    for (int s = 0; s < m_ + 1; ++s)
      scratch_[static_cast<std::size_t>(s) + 1] = cloud_.points().col(idx[s]);
    return k_integrand(kind_, SimplexTuple(scratch_), l_, p_, alpha_);
  }

 private:
  const PointCloud& cloud_;
  CurvatureKind kind_;
  Vec a_;
  int l_, m_;
  double p_, alpha_;
  mutable std::vector<Vec> scratch_;
};

double ipow_count(double c, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= c;
  return r;
}

}  // namespace

double tuple_integrand(CurvatureKind kind, const std::vector<Vec>& tuple, int l, double p,
                       double alpha) {
  const int m = static_cast<int>(tuple.size()) - 2;
  if (m == 1)
    return tri_integrand(kind, tuple[0].data(), tuple[1].data(), tuple[2].data(),
                         static_cast<int>(tuple[0].size()), l, p, alpha);
  return k_integrand(kind, SimplexTuple(tuple), l, p, alpha);
}

double k_kernel(const PointCloud& cloud, CurvatureKind kind, const Vec& a, double r, int l,
                double p, double alpha, const std::vector<int>& leading, std::size_t budget,
                std::uint64_t seed) {
  const int m = cloud.intrinsic();
  if (l < 1 || l > m + 2) throw CloudError("k_kernel: l must be in 1..m+2");
  if (static_cast<int>(leading.size()) != l - 1)
    throw CloudError("k_kernel: leading tuple must have l-1 points");
  std::vector<int> ball = cloud.ball(a, r);
  if (ball.empty()) throw EmptyBall("k_kernel: no cloud points in the ball");

  TupleEval eval(cloud, kind, a, l, p, alpha);
  const int tail = m + 2 - l;
  std::vector<int> idx(static_cast<std::size_t>(m) + 1);
  for (int s = 0; s < l - 1; ++s) idx[static_cast<std::size_t>(s)] = leading[static_cast<std::size_t>(s)];
  if (tail == 0) return eval(idx.data());

  const std::size_t c = ball.size();
  double total = ipow_count(static_cast<double>(c), tail);
  double best = 0.0;
  if (total <= kExhaustiveCap) {
    std::size_t count = static_cast<std::size_t>(total);
    for (std::size_t t = 0; t < count; ++t) {
      std::size_t rem = t;
      for (int s = 0; s < tail; ++s) {
        idx[static_cast<std::size_t>(l - 1 + s)] = ball[rem % c];
        rem /= c;
      }
      best = std::max(best, eval(idx.data()));
    }
  } else {
    Rng rng(seed);
    for (std::size_t t = 0; t < budget; ++t) {
      for (int s = 0; s < tail; ++s)
        idx[static_cast<std::size_t>(l - 1 + s)] = ball[rng.next_below(c)];
      best = std::max(best, eval(idx.data()));
    }
  }
  return best;
}

namespace {

// shared worker: leading enumeration / sampling with the tail esssup inside
EnergyEstimate k_energy_impl(const PointCloud& cloud, CurvatureKind kind, const Vec& a, double r,
                             int l, double p, double alpha, std::size_t budget,
                             std::uint64_t seed, double cap) {
  const int m = cloud.intrinsic();
  if (l < 1 || l > m + 2) throw CloudError("k_energy: l must be in 1..m+2");
  std::vector<int> ball = cloud.ball(a, r);
  if (ball.empty()) throw EmptyBall("k_energy: no cloud points in the ball");

  EnergyEstimate est;
  est.params = {kind, l, p, alpha, r, a};

  const std::size_t c = ball.size();
  const int lead = l - 1;
  const int tail = m + 2 - l;
  const double n_lead = ipow_count(static_cast<double>(c), lead);
  const double n_tail = ipow_count(static_cast<double>(c), tail);
  const double n_all = n_lead * n_tail;
  est.exhaustive = n_all <= cap;

  const TupleEval eval(cloud, kind, a, l, p, alpha);

  // per-kernel tail treatment
  const bool lead_exhaustive = est.exhaustive || n_lead <= cap;
  const std::size_t lead_count =
      lead_exhaustive ? static_cast<std::size_t>(n_lead) : budget;
  const double tail_cap =
      est.exhaustive ? n_tail
                     : std::max(64.0, static_cast<double>(budget) /
                                          std::max<double>(1.0, static_cast<double>(lead_count)));
  const bool tail_exhaustive = n_tail <= tail_cap;
  const std::size_t tail_budget = static_cast<std::size_t>(tail_cap);

  auto kernel_at = [&](const int* lead_idx, std::uint64_t stream) {
    std::vector<int> idx(static_cast<std::size_t>(m) + 1);
    for (int s = 0; s < lead; ++s) idx[static_cast<std::size_t>(s)] = lead_idx[s];
    if (tail == 0) return eval(idx.data());
    double best = 0.0;
    if (tail_exhaustive) {
      std::size_t count = static_cast<std::size_t>(n_tail);
      for (std::size_t t = 0; t < count; ++t) {
        std::size_t rem = t;
        for (int s = 0; s < tail; ++s) {
          idx[static_cast<std::size_t>(lead + s)] = ball[rem % c];
          rem /= c;
        }
        best = std::max(best, eval(idx.data()));
      }
    } else {
      Rng rng(hash_mix(stream, 0x7441));
      for (std::size_t t = 0; t < tail_budget; ++t) {
        for (int s = 0; s < tail; ++s)
          idx[static_cast<std::size_t>(lead + s)] = ball[rng.next_below(c)];
        best = std::max(best, eval(idx.data()));
      }
    }
    return best;
  };

  if (l == 1) {
    est.value = kernel_at(nullptr, seed);
    est.tuples_evaluated = tail_exhaustive ? static_cast<std::size_t>(n_tail) : tail_budget;
    est.exhaustive = tail_exhaustive;
    return est;
  }

  if (lead_exhaustive) {
    auto chunk_fn = [&](std::size_t begin, std::size_t end) {
      std::vector<int> lid(static_cast<std::size_t>(lead));
      double s = 0.0;
      for (std::size_t t = begin; t < end; ++t) {
        std::size_t rem = t;
        double wprod = 1.0;
        for (int sidx = 0; sidx < lead; ++sidx) {
          int pi = ball[rem % c];
          lid[static_cast<std::size_t>(sidx)] = pi;
          wprod *= cloud.weight(pi);
          rem /= c;
        }
        s += wprod * kernel_at(lid.data(), hash_mix(seed, t));
      }
      return s;
    };
    est.value = deterministic_sum(lead_count, chunk_fn, 1 << 12);
    est.std_error = 0.0;
    est.tuples_evaluated = lead_count;
    if (!tail_exhaustive) est.exhaustive = false;
    return est;
  }

  // Monte Carlo over leading index tuples: pre-generate the index stream so
  // the sample sequence is independent of threading.
  std::vector<int> samples(lead_count * static_cast<std::size_t>(lead));
  {
    Rng rng(seed);
    for (std::size_t t = 0; t < lead_count; ++t)
      for (int s = 0; s < lead; ++s)
        samples[t * static_cast<std::size_t>(lead) + static_cast<std::size_t>(s)] =
            ball[rng.next_below(c)];
  }
  auto chunk_fn = [&](std::size_t begin, std::size_t end) {
    SumSq acc;
    for (std::size_t t = begin; t < end; ++t) {
      const int* lid = &samples[t * static_cast<std::size_t>(lead)];
      double wprod = 1.0;
      for (int s = 0; s < lead; ++s) wprod *= cloud.weight(lid[s]);
      double v = wprod * kernel_at(lid, hash_mix(seed, 0x5A5A + t));
      acc.s += v;
      acc.s2 += v * v;
    }
    return acc;
  };
  SumSq acc = deterministic_reduce<SumSq>(lead_count, chunk_fn, SumSq{}, 1 << 12);
  double mean = acc.s / static_cast<double>(lead_count);
  double var = std::max(0.0, acc.s2 / static_cast<double>(lead_count) - mean * mean);
  est.value = n_lead * mean;
  est.std_error = n_lead * std::sqrt(var / static_cast<double>(lead_count));
  est.tuples_evaluated = lead_count;
  est.exhaustive = false;
  return est;
}

}  // namespace

EnergyEstimate k_energy(const PointCloud& cloud, CurvatureKind kind, const Vec& a, double r,
                        int l, double p, double alpha, std::size_t budget, std::uint64_t seed,
                        double cap) {
  return k_energy_impl(cloud, kind, a, r, l, p, alpha, budget, seed, cap);
}

EnergyEstimate menger_energy(const PointCloud& cloud, std::optional<std::pair<Vec, double>> ball,
                             std::size_t budget, std::uint64_t seed, double cap) {
  const int m = cloud.intrinsic();
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<int> idx;
  if (ball) {
    idx = cloud.ball(ball->first, ball->second);
  } else {
    idx.resize(static_cast<std::size_t>(cloud.size()));
    for (Eigen::Index i = 0; i < cloud.size(); ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
  }

  EnergyEstimate est;
  est.params = {CurvatureKind::Kappa, m + 2, 2.0, 0.0, ball ? ball->second : inf, Vec()};
  if (idx.empty()) return est;

  const std::size_t c = idx.size();
  const double n_all = ipow_count(static_cast<double>(c), m + 2);

  if (n_all <= cap) {
    // literally the weighted sum over atoms of k_energy at each base point,
    // restricted to the selected region
    std::vector<Vec> pts;
    std::vector<double> ws;
    pts.reserve(c);
    for (int i : idx) {
      pts.push_back(cloud.point(i));
      ws.push_back(cloud.weight(i));
    }
    PointCloud sub = PointCloud::from_points(pts, ws, m);
    double total = 0.0;
    std::size_t tuples = 0;
    for (Eigen::Index i = 0; i < sub.size(); ++i) {
      EnergyEstimate e =
          k_energy(sub, CurvatureKind::Kappa, sub.point(i), inf, m + 2, 2.0, 0.0, budget, seed, cap);
      total += sub.weight(i) * e.value;
      tuples += e.tuples_evaluated;
    }
    est.value = total;
    est.tuples_evaluated = tuples;
    est.exhaustive = true;
    return est;
  }

  // Monte Carlo over full (m+2)-tuples
  const int slots = m + 2;
  std::vector<int> samples(budget * static_cast<std::size_t>(slots));
  {
    Rng rng(seed);
    for (std::size_t t = 0; t < budget * static_cast<std::size_t>(slots); ++t)
      samples[t] = idx[rng.next_below(c)];
  }
  auto chunk_fn = [&](std::size_t begin, std::size_t end) {
    SumSq acc;
    std::vector<Vec> tuple(static_cast<std::size_t>(slots), Vec(cloud.ambient()));
    for (std::size_t t = begin; t < end; ++t) {
      const int* tid = &samples[t * static_cast<std::size_t>(slots)];
      double wprod = 1.0;
      for (int s = 0; s < slots; ++s) {
        tuple[static_cast<std::size_t>(s)] = cloud.point(tid[s]);
        wprod *= cloud.weight(tid[s]);
      }
      double v = wprod * tuple_integrand(CurvatureKind::Kappa, tuple, m + 2, 2.0, 0.0);
      acc.s += v;
      acc.s2 += v * v;
    }
    return acc;
  };
  SumSq acc = deterministic_reduce<SumSq>(budget, chunk_fn, SumSq{}, 1 << 12);
  double mean = acc.s / static_cast<double>(budget);
  double var = std::max(0.0, acc.s2 / static_cast<double>(budget) - mean * mean);
  est.value = n_all * mean;
  est.std_error = n_all * std::sqrt(var / static_cast<double>(budget));
  est.tuples_evaluated = budget;
  est.exhaustive = false;
  return est;
}

namespace {

// weighted PCA plane: weighted centroid + top-m eigenvectors of the weighted
// scatter; also returns the residual (sum of the n-m smallest eigenvalues)
Plane weighted_pca_plane(const PointCloud& cloud, const std::vector<int>& idx, const Vec& omega,
                         double* residual) {
  const int n = cloud.ambient();
  const int m = cloud.intrinsic();
  double wsum = 0.0;
  Vec centroid = Vec::Zero(n);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    wsum += omega(static_cast<Eigen::Index>(t));
    centroid += omega(static_cast<Eigen::Index>(t)) * cloud.point(idx[t]);
  }
  centroid /= wsum;
  Mat scatter = Mat::Zero(n, n);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    Vec d = cloud.point(idx[t]) - centroid;
    scatter += omega(static_cast<Eigen::Index>(t)) * d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(scatter);
  if (residual) {
    double s = 0.0;
    for (int i = 0; i < n - m; ++i) s += std::max(0.0, es.eigenvalues()(i));
    *residual = s;
  }
  Mat basis = es.eigenvectors().rightCols(m);
  return Plane::from_orthonormal(basis, centroid);
}

}  // namespace

BetaNumber beta_number(const PointCloud& cloud, const Vec& x, double r, double p) {
  if (r <= 0.0) throw CloudError("beta_number: r > 0 required");
  if (p < 1.0) throw CloudError("beta_number: p >= 1 required");
  const int m = cloud.intrinsic();
  const int n = cloud.ambient();
  std::vector<int> idx = cloud.ball(x, r);
  if (idx.empty()) throw EmptyBall("beta_number: no cloud points in the ball");

  BetaNumber out;
  out.p = p;
  out.x = x;
  out.r = r;

  if (static_cast<int>(idx.size()) <= m) {
    // m+1 or fewer points always fit inside some affine m-flat exactly
    std::vector<Vec> pts;
    for (int i : idx) pts.push_back(cloud.point(i));
    Plane hull = Plane::affine_hull(pts);
    Mat basis = hull.basis();
    // pad with standard directions to reach dimension m
    std::vector<Vec> span;
    for (Eigen::Index c = 0; c < basis.cols(); ++c) span.push_back(basis.col(c));
    for (int e = 0; e < n && static_cast<int>(span.size()) < m; ++e) {
      Vec cand = Vec::Zero(n);
      cand(e) = 1.0;
      for (const Vec& b : span) cand -= b.dot(cand) * b;
      if (cand.norm() > 0.5) span.push_back(cand / cand.norm());
    }
    out.plane = Plane::from_spanning(span, cloud.point(idx[0]));
    out.value = 0.0;
    return out;
  }

  Vec w0(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t t = 0; t < idx.size(); ++t) w0(static_cast<Eigen::Index>(t)) = cloud.weight(idx[t]);

  double residual2 = 0.0;
  Plane plane = weighted_pca_plane(cloud, idx, w0, &residual2);

  if (p == 2.0) {
    out.plane = plane;
    out.value = std::pow(std::max(0.0, residual2) / std::pow(r, m), 1.0 / 2.0) / r;
    return out;
  }

  // general p: iteratively reweighted fits descending from the p = 2 plane;
  // the reported value is an upper bound on the true infimum
  auto objective = [&](const Plane& pl) {
    double s = 0.0;
    for (int i : idx) s += cloud.weight(i) * std::pow(pl.dist_to_point(cloud.point(i)), p);
    return s;
  };
  double best_obj = objective(plane);
  Plane best_plane = plane;
  Vec omega = w0;
  for (int it = 0; it < 200; ++it) {
    for (std::size_t t = 0; t < idx.size(); ++t) {
      double d = best_plane.dist_to_point(cloud.point(idx[t]));
      omega(static_cast<Eigen::Index>(t)) = w0(static_cast<Eigen::Index>(t)) *
                                            std::pow(std::max(d, 1e-14 * r), p - 2.0);
    }
    Plane cand = weighted_pca_plane(cloud, idx, omega, nullptr);
    double obj = objective(cand);
    if (obj < best_obj) {
      double rel = (best_obj - obj) / std::max(best_obj, 1e-300);
      best_obj = obj;
      best_plane = cand;
      if (rel < 1e-8) break;
    } else {
      break;
    }
  }
  out.plane = best_plane;
  out.value = std::pow(best_obj / std::pow(r, m), 1.0 / p) / r;
  out.exact = false;
  return out;
}

double j_energy(const PointCloud& cloud, std::optional<std::pair<Vec, double>> ball, double p,
                double q, int depth) {
  if (depth < 1) throw CloudError("j_energy: depth >= 1 required");
  std::vector<int> idx;
  double diam_b;
  if (ball) {
    idx = cloud.ball(ball->first, ball->second);
    diam_b = 2.0 * ball->second;
  } else {
    idx.resize(static_cast<std::size_t>(cloud.size()));
    for (Eigen::Index i = 0; i < cloud.size(); ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(i);
    diam_b = cloud.bbox_diameter();
  }
  if (idx.empty() || diam_b <= 0.0) return 0.0;

  const double ln2 = std::log(2.0);
  double total = 0.0;
  for (int j = 0; j < depth; ++j) {
    double rj = diam_b * std::pow(2.0, -j);
    double slice = 0.0;
    for (int i : idx) {
      double b = beta_number(cloud, cloud.point(i), rj, q).value;
      slice += cloud.weight(i) * std::pow(b, p);
    }
    total += ln2 * slice;
  }
  return total;
}

}  // namespace mrect
