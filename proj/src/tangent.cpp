#include "mrect/tangent.hpp"

#include <algorithm>
#include <cmath>

#include "mrect/rng.hpp"

namespace mrect {

BadSetY::BadSetY(const PointCloud& cloud, CurvatureKind kind, const Vec& a, double r, int l,
                 double p, double alpha, double M, std::size_t budget, std::uint64_t seed)
    : cloud_(cloud), kind_(kind), a_(a), r_(r), l_(l), p_(p), alpha_(alpha), M_(M), seed_(seed) {
  const int m = cloud.intrinsic();
  if (l < 1 || l > m + 2) throw CloudError("BadSetY: l must be in 1..m+2");
  if (!(M > 1.0)) throw CloudError("BadSetY: M > 1 required");
  ball_ = cloud.ball(a, r);
  if (ball_.empty()) throw EmptyBall("BadSetY: empty ball");
  if (l_ == 1) return;  // Y(a,r) is empty for l = 1
  double mass = cloud.mass_of(ball_);
  energy_ = k_energy(cloud, kind, a, r, l, p, alpha, budget, seed).value;
  // mean of the filtered functional over mu^(l-1) (or mu^m when l = m+2)
  int denom_pow = (l_ == m + 2) ? m : l_ - 1;
  threshold_ = M_ * energy_ / std::pow(mass, denom_pow);
}

bool BadSetY::contains(const std::vector<int>& tuple) const {
  const int m = cloud_.intrinsic();
  if (l_ == 1) return false;
  if (static_cast<int>(tuple.size()) != m) throw CloudError("BadSetY: tuple must have m points");
  if (l_ <= m + 1) {
    std::vector<int> leading(tuple.begin(), tuple.begin() + (l_ - 1));
    double kv = k_kernel(cloud_, kind_, a_, r_, l_, p_, alpha_, leading, 200000, seed_);
    return kv > threshold_;
  }
  // l = m+2: weighted tail integral of the full-tuple integrand over the ball
  std::vector<Vec> pts(static_cast<std::size_t>(m) + 2, Vec(cloud_.ambient()));
  pts[0] = a_;
  for (int s = 0; s < m; ++s) pts[static_cast<std::size_t>(s) + 1] = cloud_.point(tuple[static_cast<std::size_t>(s)]);
  double integral = 0.0;
  for (int c : ball_) {
    pts[static_cast<std::size_t>(m) + 1] = cloud_.point(c);
    integral += cloud_.weight(c) * tuple_integrand(kind_, pts, l_, p_, alpha_);
  }
  return integral > threshold_;
}

std::vector<int> bad_set_Z(const PointCloud& cloud, const Vec& a, double r, const Plane& Q,
                           double p, double M) {
  std::vector<int> ball = cloud.ball(a, r);
  if (ball.empty()) return {};
  double mean = 0.0, mass = 0.0;
  std::vector<double> dp(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) {
    double d = Q.reject(cloud.point(ball[i]) - a).norm();
    dp[i] = std::pow(d, p);
    mean += cloud.weight(ball[i]) * dp[i];
    mass += cloud.weight(ball[i]);
  }
  mean /= mass;
  std::vector<int> out;
  for (std::size_t i = 0; i < ball.size(); ++i)
    if (dp[i] > M * mean) out.push_back(ball[i]);
  return out;
}

std::optional<PlaneAtScale> plane_at_scale(const PointCloud& cloud, const Vec& a, double r,
                                           double delta, const BadSetY& filter,
                                           const std::vector<int>* exclude_points,
                                           std::size_t budget, std::uint64_t seed,
                                           std::string* issue) {
  const int m = cloud.intrinsic();
  std::vector<int> ball = cloud.ball(a, r);
  if (ball.empty()) {
    if (issue) *issue = "empty ball";
    return std::nullopt;
  }

  // enumerate or sample candidate m-tuples, then scan by decreasing wedge
  // volume so the accepted tuple maximizes the Lemma 7.2 delta
  const std::size_t c = ball.size();
  double n_all = 1.0;
  for (int i = 0; i < m; ++i) n_all *= static_cast<double>(c);

  struct Cand {
    double gram;
    std::vector<int> tuple;
  };
  std::vector<Cand> cands;
  auto push_cand = [&](const std::vector<int>& tuple) {
    std::vector<Vec> vs;
    vs.reserve(static_cast<std::size_t>(m));
    for (int i : tuple) vs.push_back(cloud.point(i) - a);
    double g = gram_volume(vs);
    double rm = 1.0;
    for (int i = 0; i < m; ++i) rm *= r;
    if (g >= delta * rm && g > 0.0) cands.push_back({g, tuple});
  };

  if (n_all <= kExhaustiveCap) {
    std::vector<int> tuple(static_cast<std::size_t>(m));
    std::size_t count = static_cast<std::size_t>(n_all);
    for (std::size_t t = 0; t < count; ++t) {
      std::size_t rem = t;
      bool skip = false;
      for (int s = 0; s < m; ++s) {
        tuple[static_cast<std::size_t>(s)] = ball[rem % c];
        rem /= c;
      }
      if (exclude_points)
        for (int s = 0; s < m && !skip; ++s)
          skip = std::binary_search(exclude_points->begin(), exclude_points->end(),
                                    tuple[static_cast<std::size_t>(s)]);
      if (!skip) push_cand(tuple);
    }
  } else {
    Rng rng(seed);
    std::vector<int> tuple(static_cast<std::size_t>(m));
    for (std::size_t t = 0; t < budget; ++t) {
      bool skip = false;
      for (int s = 0; s < m; ++s) tuple[static_cast<std::size_t>(s)] = ball[rng.next_below(c)];
      if (exclude_points)
        for (int s = 0; s < m && !skip; ++s)
          skip = std::binary_search(exclude_points->begin(), exclude_points->end(),
                                    tuple[static_cast<std::size_t>(s)]);
      if (!skip) push_cand(tuple);
    }
  }

  if (cands.empty()) {
    if (issue)
      *issue = "no fat tuple: X_delta empty in sample (delta=" + std::to_string(delta) + ")";
    return std::nullopt;
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.gram != y.gram) return x.gram > y.gram;
    return x.tuple < y.tuple;
  });

  for (const Cand& cand : cands) {
    if (filter.contains(cand.tuple)) continue;
    std::vector<Vec> span;
    span.reserve(static_cast<std::size_t>(m));
    for (int i : cand.tuple) span.push_back(cloud.point(i) - a);
    PlaneAtScale out;
    try {
      out.plane = Plane::from_spanning(span);
    } catch (const DegenerateSpan&) {
      continue;  // delta = 0 admits degenerate tuples; skip them
    }
    out.tuple = cand.tuple;
    out.gram = cand.gram;
    out.rho = r;
    out.delta = delta;
    return out;
  }
  if (issue)
    *issue = "no fat tuple survived the Chebyshev filter (M=" + std::to_string(filter.big_m()) +
             ", delta=" + std::to_string(delta) + ")";
  return std::nullopt;
}

double default_chebyshev_m(int m, double A, double sigma) {
  return (std::pow(2.0, m + m * m) * std::pow(A, 2 * m) + 2.0) / sigma;
}

TangentEstimate dyadic_plane_sequence(const PointCloud& cloud, const Vec& a, double r0, int depth,
                                      const TangentParams& params,
                                      std::optional<Plane> reference) {
  if (depth < 2) throw CloudError("dyadic_plane_sequence: depth >= 2 required");
  const int m = cloud.intrinsic();
  const bool tail_route = params.l == m + 2;
  double M = params.M > 0.0 ? params.M : default_chebyshev_m(m, params.A, params.sigma);

  TangentEstimate est;
  est.a = a;
  est.r0 = r0;
  est.depth = depth;
  est.scales.resize(static_cast<std::size_t>(depth));

  std::vector<int> z_prev;  // sorted Z_{i-1} point indices (l = m+2 route)
  for (int i = 0; i < depth; ++i) {
    ScaleRecord& rec = est.scales[static_cast<std::size_t>(i)];
    rec.rho = r0 * std::pow(2.0, -i);
    try {
      BadSetY filter(cloud, params.kind, a, rec.rho, params.l, params.p, params.alpha, M,
                     params.budget, hash_mix(params.seed, static_cast<std::uint64_t>(i)));
      rec.energy = filter.l() == 1
                       ? k_energy(cloud, params.kind, a, rec.rho, params.l, params.p, params.alpha,
                                  params.budget, params.seed)
                             .value
                       : filter.energy();
      const std::vector<int>* excl = (tail_route && i > 0) ? &z_prev : nullptr;
      std::string issue;
      auto plane = plane_at_scale(cloud, a, rec.rho, params.delta, filter, excl, params.budget,
                                  hash_mix(params.seed, 0xABC + static_cast<std::uint64_t>(i)),
                                  &issue);
      if (!plane) {
        rec.issue = issue;
      } else {
        rec.plane = std::move(plane);
      }
      if (tail_route && rec.plane) {
        z_prev = bad_set_Z(cloud, a, rec.rho, rec.plane->plane, params.p, M);
        std::sort(z_prev.begin(), z_prev.end());
      }
    } catch (const EmptyBall&) {
      rec.issue = "empty ball";
    }
  }

  // limit plane: external reference when provided, else the deepest
  // successful scale
  int deepest = -1;
  for (int i = depth - 1; i >= 0; --i)
    if (est.scales[static_cast<std::size_t>(i)].plane) {
      deepest = i;
      break;
    }
  if (reference) {
    est.limit_plane = *reference;
    est.reference_is_external = true;
  } else if (deepest >= 0) {
    est.limit_plane = est.scales[static_cast<std::size_t>(deepest)].plane->plane;
  }

  if (est.limit_plane) {
    for (auto& rec : est.scales)
      if (rec.plane) rec.drift = plane_distance(rec.plane->plane, *est.limit_plane);
  }

  // Lemma 7.2 certificate for consecutive plane pairs: the smaller scale's
  // tuple vectors lie in the bigger ball, so the lemma preconditions hold
  // with delta_eff = gram/rho^m and eps_eff = max rejected height / rho.
  for (int i = 0; i + 1 < depth; ++i) {
    ScaleRecord& rec = est.scales[static_cast<std::size_t>(i)];
    const ScaleRecord& nxt = est.scales[static_cast<std::size_t>(i) + 1];
    if (!rec.plane || !nxt.plane) continue;
    double rho_s = nxt.rho;
    double delta_eff = nxt.plane->gram;
    for (int q = 0; q < m; ++q) delta_eff /= rho_s;
    double eps_eff = 0.0;
    for (int idx : nxt.plane->tuple) {
      Vec v = cloud.point(idx) - a;
      eps_eff = std::max(eps_eff, rec.plane->plane.reject(v).norm() / rho_s);
    }
    rec.lemma72_bound = m * eps_eff / delta_eff;
    rec.lemma72_actual = plane_distance(rec.plane->plane, nxt.plane->plane);
  }

  // log-log drift regression
  std::vector<double> lx, ly;
  int last_used = est.reference_is_external ? depth - 1 : depth - 3;
  for (int i = 0; i <= last_used && i < depth; ++i) {
    const ScaleRecord& rec = est.scales[static_cast<std::size_t>(i)];
    if (!rec.plane || rec.drift <= 1e-13) continue;
    lx.push_back(std::log(rec.rho));
    ly.push_back(std::log(rec.drift));
  }
  est.fit_points = static_cast<int>(lx.size());
  if (static_cast<int>(lx.size()) >= 3) {
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t t = 0; t < lx.size(); ++t) {
      sx += lx[t];
      sy += ly[t];
      sxx += lx[t] * lx[t];
      sxy += lx[t] * ly[t];
      syy += ly[t] * ly[t];
    }
    double ssxx = sxx - sx * sx / n;
    double ssxy = sxy - sx * sy / n;
    double ssyy = syy - sy * sy / n;
    if (ssxx > 1e-12) {
      est.alpha_fit = ssxy / ssxx;
      est.fit_r2 = ssyy > 1e-12 ? (ssxy * ssxy) / (ssxx * ssyy) : 1.0;
      est.fit_status = FitStatus::Ok;
    }
  } else {
    bool all_tiny = true;
    for (const auto& rec : est.scales)
      if (rec.plane && rec.drift > 1e-13) all_tiny = false;
    est.fit_status = all_tiny ? FitStatus::Flat : FitStatus::Insufficient;
  }
  return est;
}

ScaleProfile schatzle_diagnostic(const PointCloud& cloud, const Vec& a, const Plane& T,
                                 double alpha, double r0, int depth) {
  if (r0 <= 0.0 || depth < 1) throw CloudError("schatzle_diagnostic: r0 > 0, depth >= 1");
  const int m = cloud.intrinsic();
  ScaleProfile prof;
  for (int i = 0; i < depth; ++i) {
    double r = r0 * std::pow(2.0, -i);
    double s = 0.0;
    for (int bi : cloud.ball(a, r)) {
      Vec u = cloud.point(bi) - a;
      double un = u.norm();
      if (un == 0.0) continue;
      s += cloud.weight(bi) * T.reject(u).norm() / std::pow(un, 1.0 + alpha);
    }
    double v = s / std::pow(r, m);
    prof.radii.push_back(r);
    prof.values.push_back(v);
    prof.max_value = std::max(prof.max_value, v);
  }
  // informational log-log trend over positive values
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < prof.radii.size(); ++i)
    if (prof.values[i] > 0.0) {
      lx.push_back(std::log(prof.radii[i]));
      ly.push_back(std::log(prof.values[i]));
    }
  if (lx.size() >= 2) {
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t t = 0; t < lx.size(); ++t) {
      sx += lx[t];
      sy += ly[t];
      sxx += lx[t] * lx[t];
      sxy += lx[t] * ly[t];
    }
    double ssxx = sxx - sx * sx / n;
    if (ssxx > 1e-12) {
      prof.trend_slope = (sxy - sx * sy / n) / ssxx;
      prof.trend_valid = true;
    }
  }
  return prof;
}

TaylorSandwich taylor_sandwich_check(const LacunaryGraph& graph, const Vec& x, const Vec& y) {
  TaylorSandwich out;
  Vec a = graph.embed(x);
  Vec b = graph.embed(y);
  Plane tan = graph.tangent_at(x);
  out.lhs = tan.reject(b - a).norm();
  Mat d = graph.df(x);
  out.mid = (graph.f(y) - graph.f(x) - d * (y - x)).norm();
  double dn = graph.df_norm(x);
  out.factor = 1.0 - dn / std::sqrt(1.0 + dn * dn);
  return out;
}

}  // namespace mrect
