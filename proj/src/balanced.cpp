#include "mrect/balanced.hpp"

#include <algorithm>
#include <cmath>

#include "mrect/energy.hpp"
#include "mrect/parallel.hpp"
#include "mrect/rng.hpp"

namespace mrect {

namespace {

// mass of B(x, rx) within B(a, ra)
double intersection_mass(const PointCloud& cloud, const Vec& x, double rx, const Vec& a,
                         double ra) {
  double s = 0.0;
  for (int i : cloud.ball(x, rx))
    if ((cloud.point(i) - a).norm() <= ra) s += cloud.weight(i);
  return s;
}

double dist_to_flat(const std::optional<Plane>& L, const Vec& v) {
  return L ? L->reject(v).norm() : v.norm();
}

std::optional<Plane> extend_flat(const std::optional<Plane>& L, const Vec& dir) {
  std::vector<Vec> span;
  if (L)
    for (Eigen::Index c = 0; c < L->basis().cols(); ++c) span.push_back(L->basis().col(c));
  span.push_back(dir);
  return Plane::from_spanning(span);
}

}  // namespace

bool verify_balanced(const PointCloud& cloud, const BalancedBranch& br,
                     std::vector<std::string>* why) {
  bool ok = true;
  auto fail = [&](const std::string& msg) {
    ok = false;
    if (why) why->push_back(msg);
  };
  const int n = cloud.ambient();
  const int m = cloud.intrinsic();
  double mass = cloud.ball_mass(br.a, br.r);
  if (mass <= 0.0) {
    fail("balanced: empty base ball");
    return false;
  }
  if (static_cast<int>(br.directions.size()) != m - br.k) {
    fail("balanced: wrong direction count");
    return false;
  }
  double need = mass * std::pow(br.t, n) / balanced_gamma1(n);
  std::optional<Plane> L = br.start_flat;
  for (std::size_t j = 0; j < br.directions.size(); ++j) {
    const Vec& x = br.directions[j];
    if ((x - br.a).norm() > br.r * (1 + 1e-12)) fail("balanced: direction outside base ball");
    if (!(dist_to_flat(L, x - br.b) > br.gamma * br.r))
      fail("balanced: direction not gamma r away from previous flat");
    double im = intersection_mass(cloud, x, br.t * br.r, br.a, br.r);
    if (!(im >= need * (1 - 1e-12))) fail("balanced: direction ball mass below Gamma^-1 t^n");
    L = extend_flat(L, x - br.b);
    if (j < br.planes.size() && plane_distance(*L, br.planes[j]) > 1e-9)
      fail("balanced: recorded plane chain inconsistent");
  }
  return ok;
}

bool verify_concentrated(const PointCloud& cloud, const ConcentratedBranch& br,
                         std::vector<std::string>* why) {
  bool ok = true;
  auto fail = [&](const std::string& msg) {
    ok = false;
    if (why) why->push_back(msg);
  };
  const int m = cloud.intrinsic();
  double mass = cloud.ball_mass(br.a, br.r);
  if (mass <= 0.0) {
    fail("concentrated: empty base ball");
    return false;
  }
  double g2 = balanced_gamma2(m);
  if (!(br.k <= br.lambda && br.lambda < m)) fail("concentrated: lambda out of range");
  if (br.flat.dim() != br.lambda) fail("concentrated: flat dimension != lambda");
  double nmax = g2 * std::pow(br.gamma, -br.lambda);
  if (static_cast<double>(br.centers.size()) > nmax) fail("concentrated: too many centers");
  if (br.centers.empty()) fail("concentrated: no centers");
  for (std::size_t i = 0; i < br.centers.size(); ++i) {
    const Vec& y = br.centers[i];
    if ((y - br.a).norm() > br.r * (1 + 1e-12)) fail("concentrated: center outside base ball");
    if (br.flat.reject(y - br.b).norm() > 1e-9 * br.r) fail("concentrated: center off the flat");
    for (std::size_t j = i + 1; j < br.centers.size(); ++j)
      if ((y - br.centers[j]).norm() <= 80.0 * br.gamma * br.r)
        fail("concentrated: 40 gamma r balls not disjoint");
  }
  double sum = 0.0;
  double percenter_need = std::pow(br.gamma, -(m - br.lambda)) * mass / std::pow(br.r, m) / g2;
  for (const Vec& y : br.centers) {
    double my = cloud.ball_mass(y, 4.0 * br.gamma * br.r);
    sum += my;
    double dens = my / std::pow(4.0 * br.gamma * br.r, m);
    if (!(dens >= percenter_need * (1 - 1e-12)))
      fail("concentrated: per-center density below Gamma^-1 gamma^-(m-lambda)");
  }
  if (!(sum >= mass / g2 * (1 - 1e-12))) fail("concentrated: total center mass below Gamma^-1");
  return ok;
}

Dichotomy balanced_dichotomy(const PointCloud& cloud, const Vec& a, const Vec& b, double r,
                             double t, double gamma, int k, std::optional<Plane> L_k) {
  const int n = cloud.ambient();
  const int m = cloud.intrinsic();
  if (!(t > 0.0 && t < 1.0 && gamma > 0.0 && gamma < 1.0))
    throw CloudError("balanced_dichotomy: t, gamma must lie in (0,1)");
  if (k < 0 || k >= m) throw CloudError("balanced_dichotomy: requires 0 <= k < m");
  if (k > 0 && (!L_k || L_k->dim() != k))
    throw CloudError("balanced_dichotomy: k > 0 needs a k-dimensional L_k");

  std::vector<int> base = cloud.ball(a, r);
  double mass = cloud.mass_of(base);
  if (mass <= 0.0) throw EmptyBall("balanced_dichotomy: empty base ball");

  const double eps = std::pow(2.0, -(n + 1)) * std::pow(t, n);

  Dichotomy out;
  BalancedBranch bal;
  bal.start_flat = k > 0 ? L_k : std::nullopt;
  bal.a = a;
  bal.b = b;
  bal.r = r;
  bal.t = t;
  bal.gamma = gamma;
  bal.k = k;

  std::optional<Plane> L = bal.start_flat;
  int lambda = -1;
  for (int j = k + 1; j <= m; ++j) {
    // discrete argmax over atoms replaces the half-sup selection of the
    // continuum construction; ties break to the lowest point index
    int best = -1;
    double best_mass = -1.0;
    for (int i : base) {
      Vec x = cloud.point(i);
      if (!(dist_to_flat(L, x - b) > gamma * r)) continue;
      double im = intersection_mass(cloud, x, t * r, a, r);
      if (im > best_mass) {
        best_mass = im;
        best = i;
      }
    }
    if (best < 0 || best_mass <= eps * mass) {
      lambda = j - 1;
      break;
    }
    Vec x = cloud.point(best);
    bal.directions.push_back(x);
    L = extend_flat(L, x - b);
    bal.planes.push_back(*L);
  }

  if (lambda < 0) {
    std::vector<std::string> why;
    if (verify_balanced(cloud, bal, &why)) {
      out.kind = Dichotomy::Kind::Balanced;
      out.balanced = std::move(bal);
      return out;
    }
    out.issues = std::move(why);
    return out;
  }

  // concentrated branch at the stalled stage
  ConcentratedBranch con;
  con.a = a;
  con.b = b;
  con.r = r;
  con.gamma = gamma;
  con.k = k;
  con.lambda = lambda;
  con.flat = L ? L->linear_part() : Plane::from_orthonormal(Mat(n, 0));

  // strip points projected onto b + L_lambda, greedily thinned so the
  // half-gamma-r balls around kept centers stay disjoint
  std::vector<Vec> net;
  for (int i : base) {
    if (dist_to_flat(L, cloud.point(i) - b) > gamma * r) continue;
    Vec q = b + con.flat.project(cloud.point(i) - b);
    if ((q - a).norm() > r) continue;  // alternative (ii) wants centers in the base ball
    bool keep = true;
    for (const Vec& z : net)
      if ((q - z).norm() <= gamma * r) {
        keep = false;
        break;
      }
    if (keep) net.push_back(q);
  }

  const double K = std::pow(4.0 * gamma, -con.lambda);
  const double threshold = mass / (4.0 * K);
  std::vector<std::pair<double, std::size_t>> heavy;
  for (std::size_t i = 0; i < net.size(); ++i) {
    double my = cloud.ball_mass(net[i], 4.0 * gamma * r);
    if (my >= threshold) heavy.emplace_back(-my, i);
  }
  std::sort(heavy.begin(), heavy.end());

  for (const auto& [negmass, i] : heavy) {
    (void)negmass;
    const Vec& y = net[i];
    bool disj = true;
    for (const Vec& z : con.centers)
      if ((y - z).norm() <= 80.0 * gamma * r) {
        disj = false;
        break;
      }
    if (disj) con.centers.push_back(y);
  }

  std::vector<std::string> why;
  if (verify_concentrated(cloud, con, &why)) {
    out.kind = Dichotomy::Kind::Concentrated;
    out.concentrated = std::move(con);
    return out;
  }
  out.issues = std::move(why);
  return out;
}

bool x_delta_member(const Vec& a, double r, double delta, const std::vector<Vec>& pts) {
  std::vector<Vec> vs;
  vs.reserve(pts.size());
  for (const Vec& p : pts) vs.push_back(p - a);
  double rm = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) rm *= r;
  return gram_volume(vs) >= delta * rm;
}

namespace {

struct SumSq {
  double s = 0.0, s2 = 0.0;
  SumSq operator+(const SumSq& o) const { return {s + o.s, s2 + o.s2}; }
};

// wedge volume of (pts[idx] - a); closed forms for m = 1, 2
double wedge_from(const PointCloud& cloud, const Vec& a, const int* idx, int m) {
  if (m == 1) return (cloud.point(idx[0]) - a).norm();
  if (m == 2) {
    Vec u = cloud.point(idx[0]) - a;
    Vec v = cloud.point(idx[1]) - a;
    double det = u.squaredNorm() * v.squaredNorm() - u.dot(v) * u.dot(v);
    return det > 0.0 ? std::sqrt(det) : 0.0;
  }
  std::vector<Vec> vs;
  vs.reserve(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) vs.push_back(cloud.point(idx[s]) - a);
  return gram_volume(vs);
}

}  // namespace

FatSimplexStat fat_fraction(const PointCloud& cloud, const Vec& a, double r, double delta,
                            std::size_t budget, std::uint64_t seed) {
  if (!(r > 0.0)) throw CloudError("fat_fraction: r > 0 required");
  const int m = cloud.intrinsic();
  std::vector<int> ball = cloud.ball(a, r);
  if (ball.empty()) throw EmptyBall("fat_fraction: empty ball");
  double mass = cloud.mass_of(ball);

  double cut = delta;
  for (int i = 0; i < m; ++i) cut *= r;

  FatSimplexStat st;
  st.delta = delta;
  const std::size_t c = ball.size();
  double n_all = 1.0;
  for (int i = 0; i < m; ++i) n_all *= static_cast<double>(c);
  double massm = 1.0;
  for (int i = 0; i < m; ++i) massm *= mass;

  if (n_all <= kExhaustiveCap) {
    std::size_t count = static_cast<std::size_t>(n_all);
    auto fn = [&](std::size_t begin, std::size_t end) {
      std::vector<int> idx(static_cast<std::size_t>(m));
      double s = 0.0;
      for (std::size_t tix = begin; tix < end; ++tix) {
        std::size_t rem = tix;
        double wprod = 1.0;
        for (int sl = 0; sl < m; ++sl) {
          int pi = ball[rem % c];
          idx[static_cast<std::size_t>(sl)] = pi;
          wprod *= cloud.weight(pi);
          rem /= c;
        }
        if (wedge_from(cloud, a, idx.data(), m) >= cut) s += wprod;
      }
      return s;
    };
    st.fraction = deterministic_sum(count, fn, 1 << 12) / massm;
    st.exhaustive = true;
    return st;
  }

  std::vector<int> samples(budget * static_cast<std::size_t>(m));
  {
    Rng rng(seed);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = ball[rng.next_below(c)];
  }
  auto fn = [&](std::size_t begin, std::size_t end) {
    SumSq acc;
    for (std::size_t tix = begin; tix < end; ++tix) {
      const int* idx = &samples[tix * static_cast<std::size_t>(m)];
      double wprod = 1.0;
      for (int sl = 0; sl < m; ++sl) wprod *= cloud.weight(idx[sl]);
      double v = (wedge_from(cloud, a, idx, m) >= cut) ? wprod : 0.0;
      acc.s += v;
      acc.s2 += v * v;
    }
    return acc;
  };
  SumSq acc = deterministic_reduce<SumSq>(budget, fn, SumSq{}, 1 << 12);
  double scale = n_all / massm;
  double mean = acc.s / static_cast<double>(budget);
  double var = std::max(0.0, acc.s2 / static_cast<double>(budget) - mean * mean);
  st.fraction = scale * mean;
  st.std_error = scale * std::sqrt(var / static_cast<double>(budget));
  st.exhaustive = false;
  return st;
}

double fat_simplex_search(const PointCloud& cloud, const Vec& a, double r, double sigma,
                          std::size_t budget, std::uint64_t seed) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw CloudError("fat_simplex_search: sigma in (0,1]");
  auto frac = [&](double d) { return fat_fraction(cloud, a, r, d, budget, seed).fraction; };
  if (frac(1.0) >= sigma) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-3) {
    double mid = 0.5 * (lo + hi);
    if (frac(mid) >= sigma)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace mrect
