#include "doctest.h"
#include "mrect/geom.hpp"
#include "oracles.hpp"

using namespace mrect;
using oracles::vec2;
using oracles::vec3;

TEST_CASE("gram_volume basics") {
  CHECK(gram_volume({vec3(1, 0, 0), vec3(0, 1, 0)}) == doctest::Approx(1.0));
  Vec v = vec3(0.3, -1.2, 2.0);
  CHECK(gram_volume({v, 2.0 * v}) == doctest::Approx(0.0));
  // 2x2 determinant oracle
  CHECK(gram_volume({vec2(1, 0), vec2(1, 1)}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(gram_volume({vec2(1, 0), vec3(0, 1, 0)}), DimensionMismatch);
}

TEST_CASE("gram_volume invariances") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + static_cast<int>(rng.next_below(3));
    int k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    auto vs = oracles::random_tuple(k, n, rng);
    double base = gram_volume(vs);

    // permutation invariance
    std::vector<Vec> perm(vs.rbegin(), vs.rend());
    CHECK(gram_volume(perm) == doctest::Approx(base).epsilon(1e-9));

    // orthogonal invariance
    Mat q = oracles::random_rotation(n, rng);
    std::vector<Vec> rot;
    for (const Vec& v : vs) rot.push_back(q * v);
    CHECK(gram_volume(rot) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("simplex_volume and diam") {
  SimplexTuple tri({vec2(0, 0), vec2(1, 0), vec2(0, 1)});
  CHECK(simplex_volume(tri) == doctest::Approx(0.5));  // shoelace oracle
  CHECK(simplex_volume(tri) ==
        doctest::Approx(oracles::shoelace(vec2(0, 0), vec2(1, 0), vec2(0, 1))));

  SimplexTuple collinear({vec2(0, 0), vec2(1, 0), vec2(2, 0)});
  CHECK(simplex_volume(collinear) == doctest::Approx(0.0));

  SimplexTuple simplex3({vec3(0, 0, 0), vec3(1, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1)});
  CHECK(simplex3.m() == 2);
  CHECK(simplex_volume(simplex3) == doctest::Approx(1.0 / 6.0));

  SimplexTuple t({vec2(0, 0), vec2(3, 4), vec2(0, 1)});
  CHECK(t.diam() == doctest::Approx(5.0));
  CHECK(t.diam() == doctest::Approx(oracles::pairwise_max(t.points())));

  SimplexTuple same({vec2(1, 1), vec2(1, 1), vec2(1, 1)});
  CHECK(same.diam() == 0.0);

  double s3 = std::sqrt(3.0) / 2.0;
  SimplexTuple equi({vec2(0, 0), vec2(1, 0), vec2(0.5, s3)});
  CHECK(equi.diam() == doctest::Approx(1.0));
}

TEST_CASE("SimplexTuple distance table is permutation consistent") {
  Rng rng(5);
  auto pts = oracles::random_tuple(4, 3, rng);
  SimplexTuple t(pts);
  std::vector<Vec> rev(pts.rbegin(), pts.rend());
  SimplexTuple u(rev);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(t.dist(i, j) == doctest::Approx(u.dist(3 - i, 3 - j)));
  CHECK(t.diam() == doctest::Approx(u.diam()));
}

TEST_CASE("plane construction") {
  Plane xy = Plane::from_spanning({vec3(1, 0, 0), vec3(0, 2, 0)});
  CHECK(xy.dim() == 2);
  CHECK(xy.project(vec3(1, 2, 3)).isApprox(vec3(1, 2, 0), 1e-12));

  CHECK_THROWS_AS(Plane::from_spanning({vec2(1, 0), vec2(2, 0)}), DegenerateSpan);

  // plane through (1,1,0), (0,1,1): normal (1,-1,1)/sqrt(3)
  Plane p = Plane::from_spanning({vec3(1, 1, 0), vec3(0, 1, 1)});
  Vec normal = vec3(1, -1, 1) / std::sqrt(3.0);
  CHECK(p.reject(normal).isApprox(normal, 1e-10));
  CHECK(p.project(normal).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("orthonormal basis invariant holds to 1e-12") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng.next_below(6));
    int m = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    auto vs = oracles::random_tuple(m, n, rng);
    Plane p = Plane::from_spanning(vs);
    Mat g = p.basis().transpose() * p.basis();
    CHECK((g - Mat::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("project/reject decomposition") {
  Plane xy = Plane::from_spanning({vec3(1, 0, 0), vec3(0, 1, 0)});
  CHECK(xy.reject(vec3(1, 2, 3)).isApprox(vec3(0, 0, 3), 1e-12));

  Vec diag = vec2(1, 1) / std::sqrt(2.0);
  Plane line = Plane::from_spanning({diag});
  CHECK(line.project(vec2(1, 0)).isApprox(vec2(0.5, 0.5), 1e-12));

  Rng rng(133);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 2 + static_cast<int>(rng.next_below(7));
    int m = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    Plane p = Plane::from_spanning(oracles::random_tuple(m, n, rng));
    Vec v = oracles::random_vec(n, rng, 2.0);
    Vec pr = p.project(v), rj = p.reject(v);
    CHECK((pr + rj).isApprox(v, 1e-10));
    CHECK(std::abs(pr.dot(rj)) <= 1e-10 * v.squaredNorm() + 1e-300);
    CHECK(pr.squaredNorm() + rj.squaredNorm() ==
          doctest::Approx(v.squaredNorm()).epsilon(1e-10));
  }
}

TEST_CASE("plane_distance examples") {
  Plane x = Plane::from_spanning({vec2(1, 0)});
  Plane y = Plane::from_spanning({vec2(0, 1)});
  CHECK(plane_distance(x, x) == doctest::Approx(0.0));
  CHECK(plane_distance(x, y) == doctest::Approx(1.0));
  Plane diag = Plane::from_spanning({vec2(1, 1)});
  // explicit 2x2 eigenvalue oracle
  CHECK(plane_distance(x, diag) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
  // cross-check with tilt_norm at slope 1
  CHECK(plane_distance(x, diag) == doctest::Approx(tilt_norm(1.0)).epsilon(1e-10));
}

TEST_CASE("plane_distance equals max rejection of unit vectors (Allard)") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + static_cast<int>(rng.next_below(4));
    int m = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    Plane p = Plane::from_spanning(oracles::random_tuple(m, n, rng));
    Plane q = Plane::from_spanning(oracles::random_tuple(m, n, rng));
    double d = plane_distance(p, q);
    double o = oracles::plane_distance_by_rejection(p, q, rng, 20000);
    CHECK(d == doctest::Approx(o).epsilon(1e-3));
    CHECK(d >= o - 1e-8);  // sampled max cannot exceed the true norm
    CHECK(plane_distance(q, p) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("tilt formula matches plane distance for graph planes") {
  CHECK(tilt_norm(0.0) == 0.0);
  CHECK(tilt_norm(1.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(tilt_norm(1e9) == doctest::Approx(1.0).epsilon(1e-9));
  double prev = -1.0;
  for (double e = 0.0; e < 10.0; e += 0.25) {
    CHECK(tilt_norm(e) > prev);
    prev = tilt_norm(e);
  }

  // random graph slopes eta as m x (n-m) maps: exact equality claim
  Rng rng(23);
  for (int trial = 0; trial < 400; ++trial) {
    int n = 2 + static_cast<int>(rng.next_below(5));
    int m = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    Mat eta(n - m, m);
    for (int i = 0; i < n - m; ++i)
      for (int j = 0; j < m; ++j) eta(i, j) = 2.0 * rng.next_normal();
    std::vector<Vec> span;
    for (int k = 0; k < m; ++k) {
      Vec v = Vec::Zero(n);
      v(k) = 1.0;
      v.tail(n - m) = eta.col(k);
      span.push_back(v);
    }
    Plane graph = Plane::from_spanning(span);
    Plane base = Plane::from_orthonormal(Mat::Identity(n, n).leftCols(m));
    Eigen::JacobiSVD<Mat> svd(eta);
    double spectral = svd.singularValues()(0);
    CHECK(plane_distance(graph, base) == doctest::Approx(tilt_norm(spectral)).epsilon(1e-8));
  }
}

TEST_CASE("dist_to_affine") {
  Plane z0 = Plane::from_spanning({vec3(1, 0, 0), vec3(0, 1, 0)}, vec3(0, 0, 0));
  CHECK(dist_to_affine(vec3(0, 0, 1), z0) == doctest::Approx(1.0));
  CHECK(dist_to_affine(vec3(0.3, -2, 0), z0) == doctest::Approx(0.0));
  Plane xaxis = Plane::from_spanning({vec2(1, 0)}, vec2(0, 0));
  CHECK(dist_to_affine(vec2(1, 1), xaxis) == doctest::Approx(1.0));
}

TEST_CASE("affine_hull handles degenerate point sets") {
  // three collinear points: hull is the line, not an error
  Plane hull = Plane::affine_hull({vec2(0, 0), vec2(1, 0), vec2(2, 0)});
  CHECK(hull.dim() == 1);
  CHECK(hull.dist_to_point(vec2(5, 0)) == doctest::Approx(0.0));
  CHECK(hull.dist_to_point(vec2(0, 2)) == doctest::Approx(2.0));

  // all points equal: hull is a point
  Plane pt = Plane::affine_hull({vec2(1, 1), vec2(1, 1)});
  CHECK(pt.dim() == 0);
  CHECK(pt.dist_to_point(vec2(4, 5)) == doctest::Approx(5.0));
}
