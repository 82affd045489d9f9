#include "doctest.h"
#include "mrect/curvature.hpp"
#include "oracles.hpp"

using namespace mrect;
using oracles::vec2;
using oracles::vec3;

namespace {

SimplexTuple right_isoceles() { return SimplexTuple({vec2(0, 0), vec2(1, 0), vec2(0, 1)}); }

SimplexTuple equilateral() {
  return SimplexTuple({vec2(0, 0), vec2(1, 0), vec2(0.5, std::sqrt(3.0) / 2.0)});
}

// random tuple with kappa-scale geometry in dimension (m, n)
SimplexTuple random_mn_tuple(int m, int n, Rng& rng, double scale = 1.0) {
  return SimplexTuple(oracles::random_tuple(m + 2, n, rng, scale));
}

}  // namespace

TEST_CASE("kappa on named examples") {
  CHECK(kappa(right_isoceles()) == doctest::Approx(0.25));  // (1/2)/(sqrt2)^2
  CHECK(kappa(equilateral()) == doctest::Approx(std::sqrt(3.0) / 4.0));
  SimplexTuple repeated({vec2(0, 0), vec2(0, 0), vec2(1, 0)});
  CHECK(repeated.diam() > 0);
  CHECK(kappa(repeated) == 0.0);
  SimplexTuple degenerate({vec2(3, 3), vec2(3, 3), vec2(3, 3)});
  CHECK(kappa(degenerate) == 0.0);
}

TEST_CASE("h_min on named examples") {
  // right isoceles: three point-line distances are 1, 1/sqrt2 twice... min
  CHECK(h_min(right_isoceles()) == doctest::Approx(1.0 / std::sqrt(2.0)));
  SimplexTuple collinear({vec2(0, 0), vec2(1, 0), vec2(2, 0)});
  CHECK(h_min(collinear) == 0.0);
  // continuity as the apex descends
  for (double h : {1e-2, 1e-4, 1e-6}) {
    SimplexTuple t({vec2(0, 0), vec2(1, 0), vec2(0.5, h)});
    CHECK(h_min(t) == doctest::Approx(h).epsilon(1e-6));
  }
}

TEST_CASE("kappa_h on named examples") {
  CHECK(kappa_h(right_isoceles()) == doctest::Approx(0.5));
  SimplexTuple collinear({vec2(0, 0), vec2(1, 0), vec2(2, 0)});
  CHECK(kappa_h(collinear) == 0.0);
  CHECK(kappa_h(equilateral()) == doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("pm_sin angles of the right isoceles triangle") {
  SimplexTuple t = right_isoceles();
  CHECK(pm_sin(t, 0) == doctest::Approx(1.0));                      // sine of 90 deg
  CHECK(pm_sin(t, 1) == doctest::Approx(std::sqrt(2.0) / 2.0));     // sine of 45 deg
  CHECK(pm_sin(t, 2) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(kappa_min(t) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(kappa_max(t) == doctest::Approx(1.0));
}

TEST_CASE("kappa_min/max zero convention and ordering") {
  SimplexTuple collinear({vec2(0, 0), vec2(1, 0), vec2(2, 0)});
  CHECK(kappa_min(collinear) == 0.0);
  CHECK(kappa_max(collinear) == 0.0);
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    SimplexTuple t = random_mn_tuple(1, 2, rng);
    CHECK(kappa_min(t) <= kappa_max(t) + 1e-15);
  }
}

TEST_CASE("kappa_dls on named examples") {
  // scatter eigenvalues {1/3, 1}: sqrt(1/3)/sqrt(2)
  CHECK(kappa_dls(right_isoceles()) == doctest::Approx(1.0 / std::sqrt(6.0)));
  // coplanar m+2 points in an m-plane
  SimplexTuple flat({vec3(0, 0, 0), vec3(1, 0, 0), vec3(0, 1, 0), vec3(1, 1, 0)});
  CHECK(kappa_dls(flat) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("kernels are invariant under scaling, rotation, translation") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    int m = 1 + static_cast<int>(rng.next_below(2));
    int n = m + 1 + static_cast<int>(rng.next_below(2));
    SimplexTuple t = random_mn_tuple(m, n, rng);
    KernelValues k0 = all_kernels(t);

    double s = 0.1 + 3.0 * rng.next_double();
    Mat q = oracles::random_rotation(n, rng);
    Vec c = oracles::random_vec(n, rng, 2.0);
    std::vector<Vec> moved;
    for (const Vec& p : t.points()) moved.push_back(s * (q * p) + c);
    KernelValues k1 = all_kernels(SimplexTuple(moved));

    CHECK(k1.kappa == doctest::Approx(k0.kappa).epsilon(1e-9));
    CHECK(k1.kappa_h == doctest::Approx(k0.kappa_h).epsilon(1e-9));
    CHECK(k1.kappa_min == doctest::Approx(k0.kappa_min).epsilon(1e-9));
    CHECK(k1.kappa_max == doctest::Approx(k0.kappa_max).epsilon(1e-9));
    CHECK(k1.kappa_dls == doctest::Approx(k0.kappa_dls).epsilon(1e-9));
  }
}

TEST_CASE("comparison chains between the kernels") {
  Rng rng(53);
  const std::pair<int, int> dims[] = {{1, 2}, {1, 3}, {2, 3}, {2, 4}};
  for (auto [m, n] : dims) {
    for (int trial = 0; trial < 2000; ++trial) {
      SimplexTuple t = random_mn_tuple(m, n, rng);
      KernelValues k = all_kernels(t);
      double slack = 1e-9 * (1.0 + k.kappa_h);
      double lo = std::min({k.kappa_min, k.kappa_max, k.kappa_dls, k.kappa_h});
      CHECK(k.kappa <= (m + 2) * lo + slack);
      CHECK(std::max({k.kappa_min, k.kappa_dls, k.kappa}) <= 2.0 * k.kappa_h + slack);
      CHECK(k.kappa_min + slack >= factorial(m + 1) * k.kappa);
    }
  }
}

TEST_CASE("slab bound: h_min <= (m+2) h") {
  Rng rng(61);
  for (int trial = 0; trial < 500; ++trial) {
    int m = 1 + static_cast<int>(rng.next_below(2));
    int n = m + 1 + static_cast<int>(rng.next_below(2));
    Plane s = Plane::from_spanning(oracles::random_tuple(m, n, rng));
    double h = 0.01 + rng.next_double();
    Vec a = oracles::random_vec(n, rng, 2.0);
    std::vector<Vec> pts;
    for (int i = 0; i < m + 2; ++i) {
      Vec inplane = s.project(oracles::random_vec(n, rng, 3.0));
      Vec off = s.reject(oracles::random_vec(n, rng, 3.0));
      double on = off.norm();
      if (on > 0) off *= (h * rng.next_double()) / on;  // strictly inside the slab
      pts.push_back(a + inplane + off);
    }
    CHECK(h_min(SimplexTuple(pts)) <= (m + 2) * h * (1 + 1e-9));
  }
}

TEST_CASE("kernels are continuous away from diam 0") {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    int m = 1 + static_cast<int>(rng.next_below(2));
    int n = m + 1;
    SimplexTuple t = random_mn_tuple(m, n, rng);
    if (t.diam() < 0.5 || h_min(t) < 0.1) continue;  // stay away from the degenerate strata
    KernelValues k0 = all_kernels(t);
    double step = 1e-8 * t.diam();
    std::vector<Vec> moved;
    for (const Vec& p : t.points()) moved.push_back(p + oracles::random_vec(n, rng, step));
    KernelValues k1 = all_kernels(SimplexTuple(moved));
    double tol = 1e-5;
    CHECK(std::abs(k1.kappa - k0.kappa) < tol);
    CHECK(std::abs(k1.kappa_h - k0.kappa_h) < tol);
    CHECK(std::abs(k1.kappa_min - k0.kappa_min) < tol);
    CHECK(std::abs(k1.kappa_max - k0.kappa_max) < tol);
    CHECK(std::abs(k1.kappa_dls - k0.kappa_dls) < tol);
  }
}

TEST_CASE("k_integrand exponent bookkeeping") {
  SimplexTuple t = right_isoceles();
  int m = 1;
  // l = m+2, p = 2, alpha = 0: the Menger integrand
  double d = t.diam();
  double expect = std::pow(simplex_volume(t), 2) / std::pow(d, (m + 2) * (m + 1));
  CHECK(k_integrand(CurvatureKind::Kappa, t, m + 2, 2.0, 0.0) == doctest::Approx(expect));
  // l = 1: exponent reduces to alpha p
  double a = 0.7, p = 1.5;
  CHECK(k_integrand(CurvatureKind::Kappa, t, 1, p, a) ==
        doctest::Approx(std::pow(kappa(t), p) / std::pow(d, a * p)));
  SimplexTuple degenerate({vec2(1, 2), vec2(1, 2), vec2(1, 2)});
  CHECK(k_integrand(CurvatureKind::KappaH, degenerate, 2, 2.0, 0.5) == 0.0);
}

TEST_CASE("all_kernels agrees with the individual kernels") {
  Rng rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    int m = 1 + static_cast<int>(rng.next_below(2));
    SimplexTuple t = random_mn_tuple(m, m + 2, rng);
    KernelValues k = all_kernels(t);
    CHECK(k.kappa == doctest::Approx(kappa(t)).epsilon(1e-12));
    CHECK(k.h_min == doctest::Approx(h_min(t)).epsilon(1e-12));
    CHECK(k.kappa_h == doctest::Approx(kappa_h(t)).epsilon(1e-12));
    CHECK(k.kappa_min == doctest::Approx(kappa_min(t)).epsilon(1e-12));
    CHECK(k.kappa_max == doctest::Approx(kappa_max(t)).epsilon(1e-12));
    CHECK(k.kappa_dls == doctest::Approx(kappa_dls(t)).epsilon(1e-12));
  }
}
