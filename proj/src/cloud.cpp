#include "mrect/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mrect/rng.hpp"

namespace mrect {

double unit_ball_volume(int m) {
  return std::pow(3.14159265358979323846, m / 2.0) / std::tgamma(m / 2.0 + 1.0);
}

PointCloud::PointCloud(Mat points, Vec weights, int m)
    : pts_(std::move(points)), w_(std::move(weights)), m_(m) {
  if (pts_.cols() == 0) throw CloudError("PointCloud: empty cloud");
  if (w_.size() != pts_.cols()) throw CloudError("PointCloud: weight count mismatch");
  if (m_ < 1 || m_ >= pts_.rows()) throw CloudError("PointCloud: requires 1 <= m < n");
  for (Eigen::Index i = 0; i < w_.size(); ++i)
    if (!(w_(i) > 0.0)) throw CloudError("PointCloud: weights must be positive");
  total_mass_ = w_.sum();
  bbox_min_ = pts_.rowwise().minCoeff();
  bbox_max_ = pts_.rowwise().maxCoeff();
  build_index();
}

PointCloud PointCloud::from_points(const std::vector<Vec>& pts, const std::vector<double>& w,
                                   int m) {
  if (pts.empty()) throw CloudError("PointCloud: empty cloud");
  Mat P(pts[0].size(), static_cast<Eigen::Index>(pts.size()));
  Vec W(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    P.col(static_cast<Eigen::Index>(i)) = pts[i];
    W(static_cast<Eigen::Index>(i)) = w[i];
  }
  return PointCloud(std::move(P), std::move(W), m);
}

void PointCloud::build_index() {
  const Eigen::Index n = pts_.cols();

  // median nearest-neighbour distance over a deterministic subsample
  const Eigen::Index sample_cap = 1024;
  Eigen::Index stride = std::max<Eigen::Index>(1, n / sample_cap);
  std::vector<double> nn;
  for (Eigen::Index i = 0; i < n; i += stride) {
    double best = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = (pts_.col(i) - pts_.col(j)).norm();
      if (best < 0.0 || d < best) best = d;
    }
    if (best >= 0.0) nn.push_back(best);
  }
  if (!nn.empty()) {
    std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
    spacing_ = nn[nn.size() / 2];
  }

  if (n < 256 || spacing_ <= 0.0) return;  // brute force is fine below this

  cell_ = spacing_ / 2.0;
  // keep the occupied-cell count from exploding on sparse clouds
  double extent = (bbox_max_ - bbox_min_).maxCoeff();
  if (extent / cell_ > 4096.0) cell_ = extent / 4096.0;

  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::ArrayXi c = ((pts_.col(i) - bbox_min_).array() / cell_).floor().cast<int>();
    buckets_[cell_key(c)].push_back(static_cast<int>(i));
  }
  use_grid_ = true;
}

std::uint64_t PointCloud::cell_key(const Eigen::ArrayXi& c) const {
  std::uint64_t k = 0x243F6A8885A308D3ULL;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    k = hash_mix(k, static_cast<std::uint64_t>(static_cast<std::int64_t>(c(i)) + (1LL << 31)));
  return k;
}

std::vector<int> PointCloud::ball(const Vec& a, double r) const {
  std::vector<int> out;
  if (r < 0.0) return out;
  const Eigen::Index n = pts_.cols();

  bool brute = !use_grid_;
  if (use_grid_) {
    // candidate cell count vs. point count decides the strategy
    double cells = 1.0;
    for (Eigen::Index k = 0; k < pts_.rows() && cells < 2.0 * static_cast<double>(n); ++k) {
      double lo = std::floor((a(k) - r - bbox_min_(k)) / cell_);
      double hi = std::floor((a(k) + r - bbox_min_(k)) / cell_);
      cells *= (hi - lo + 1.0);
    }
    if (cells >= 2.0 * static_cast<double>(n)) brute = true;
  }

  if (brute) {
    for (Eigen::Index i = 0; i < n; ++i)
      if ((pts_.col(i) - a).norm() <= r) out.push_back(static_cast<int>(i));
    return out;
  }

  const Eigen::Index dim = pts_.rows();
  Eigen::ArrayXi lo(dim), hi(dim), cur(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    lo(k) = static_cast<int>(std::floor((a(k) - r - bbox_min_(k)) / cell_));
    hi(k) = static_cast<int>(std::floor((a(k) + r - bbox_min_(k)) / cell_));
  }
  cur = lo;
  while (true) {
    auto it = buckets_.find(cell_key(cur));
    if (it != buckets_.end())
      for (int i : it->second)
        if ((pts_.col(i) - a).norm() <= r) out.push_back(i);
    Eigen::Index k = 0;
    for (; k < dim; ++k) {
      if (++cur(k) <= hi(k)) break;
      cur(k) = lo(k);
    }
    if (k == dim) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double PointCloud::ball_mass(const Vec& a, double r) const {
  double s = 0.0;
  for (int i : ball(a, r)) s += w_(i);
  return s;
}

double PointCloud::mass_of(const std::vector<int>& idx) const {
  double s = 0.0;
  for (int i : idx) s += w_(i);
  return s;
}

DensityProfile PointCloud::density_profile(const Vec& a, double r0, int depth) const {
  if (r0 <= 0.0 || depth < 1) throw CloudError("density_profile: r0 > 0, depth >= 1 required");
  DensityProfile p;
  double wm = unit_ball_volume(m_);
  for (int k = 0; k < depth; ++k) {
    double r = r0 * std::pow(2.0, -k);
    double ratio = ball_mass(a, r) / (wm * std::pow(r, m_));
    p.radii.push_back(r);
    p.ratios.push_back(ratio);
    if (k == 0) {
      p.min_ratio = p.max_ratio = ratio;
    } else {
      p.min_ratio = std::min(p.min_ratio, ratio);
      p.max_ratio = std::max(p.max_ratio, ratio);
    }
  }
  return p;
}

std::vector<StratumLabel> PointCloud::stratify(int j_max, int k_max, double r0) const {
  if (j_max < 1 || k_max < 1) throw CloudError("stratify: j_max, k_max >= 1 required");
  // tested dyadic radii; no claim is made below the cloud's own spacing
  double floor_r = std::max(spacing_, r0 * std::pow(2.0, -24));
  std::vector<double> radii;
  for (double r = r0; r >= floor_r; r /= 2.0) radii.push_back(r);
  if (radii.empty()) radii.push_back(r0);

  double wm = unit_ball_volume(m_);
  std::vector<StratumLabel> labels(static_cast<std::size_t>(size()));
  for (Eigen::Index i = 0; i < size(); ++i) {
    Vec a = pts_.col(i);
    std::vector<double> ratio(radii.size());
    for (std::size_t t = 0; t < radii.size(); ++t)
      ratio[t] = ball_mass(a, radii[t]) / (wm * std::pow(radii[t], m_));

    StratumLabel lab;
    for (int j = 1; j <= j_max && lab.unbounded; ++j) {
      bool any = false, ok = true;
      for (std::size_t t = 0; t < radii.size(); ++t) {
        if (radii[t] >= 1.0 / j) continue;
        any = true;
        if (ratio[t] < 1.0 / j || ratio[t] > j) {
          ok = false;
          break;
        }
      }
      // a window with no tested radius certifies nothing
      if (any && ok) {
        lab.j = j;
        lab.unbounded = false;
      }
    }
    if (!lab.unbounded) {
      for (int k = 1; k <= k_max; ++k) {
        bool any = false, ok = true;
        for (std::size_t t = 0; t < radii.size(); ++t) {
          if (radii[t] >= 1.0 / k) continue;
          any = true;
          if (ratio[t] < 1.0 / (2.0 * lab.j) || ratio[t] > lab.j) {
            ok = false;
            break;
          }
        }
        if (any && ok) {
          lab.k = k;
          break;
        }
      }
    }
    labels[static_cast<std::size_t>(i)] = lab;
  }
  return labels;
}

std::vector<int> PointCloud::cone_members(const Vec& a, const Vec& v, double eps) const {
  double vn = v.norm();
  if (vn == 0.0) throw ZeroDirection("cone_members: zero direction");
  if (eps <= 0.0) throw CloudError("cone_members: eps > 0 required");
  std::vector<int> out;
  for (Eigen::Index i = 0; i < size(); ++i) {
    Vec u = pts_.col(i) - a;
    double un = u.norm();
    if (un == 0.0) continue;
    double dot = u.dot(v);
    // min over t > 0 of |t u - v|: |v| sin(angle) when the angle is acute,
    // |v| otherwise (infimum at t -> 0, never smaller than |v|)
    double dmin;
    if (dot > 0.0) {
      double s2 = vn * vn - (dot / un) * (dot / un);
      dmin = std::sqrt(std::max(0.0, s2));
    } else {
      dmin = vn;
    }
    if (dmin < eps) out.push_back(static_cast<int>(i));
  }
  return out;
}

ContainmentDefect PointCloud::tangent_containment_defect(const Vec& a, const Plane& T,
                                                         double r) const {
  if (r <= 0.0) throw CloudError("tangent_containment_defect: r > 0 required");
  ContainmentDefect d;
  double s_ratio = 0.0, s_height = 0.0;
  for (int i : ball(a, r)) {
    Vec u = pts_.col(i) - a;
    double un = u.norm();
    if (un == 0.0) continue;
    double rej = T.reject(u).norm();
    s_ratio += w_(i) * rej / un;
    s_height += w_(i) * rej;
  }
  double rm = std::pow(r, m_);
  d.ratio_form = s_ratio / rm;
  d.height_form = s_height / (rm * r);
  return d;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

PointCloud read_csv(const std::string& path, int m, double default_total_mass) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path + ": empty file");
  auto header = split_csv_line(line);
  bool has_w = !header.empty() && header.back() == "w";
  int n = static_cast<int>(header.size()) - (has_w ? 1 : 0);
  if (n < 1) throw CsvError(path + ": no coordinate columns in header");
  for (int k = 0; k < n; ++k) {
    std::string want = "x" + std::to_string(k + 1);
    if (header[static_cast<std::size_t>(k)] != want)
      throw CsvError(path + ": header column " + std::to_string(k + 1) + " is '" +
                     header[static_cast<std::size_t>(k)] + "', expected '" + want + "'");
  }

  std::vector<Vec> pts;
  std::vector<double> ws;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != n + (has_w ? 1 : 0))
      throw CsvError(path + ":" + std::to_string(lineno) + ": expected " +
                     std::to_string(n + (has_w ? 1 : 0)) + " columns, got " +
                     std::to_string(cells.size()));
    Vec p(n);
    for (int k = 0; k < n + (has_w ? 1 : 0); ++k) {
      const std::string& cell = cells[static_cast<std::size_t>(k)];
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
        throw CsvError(path + ":" + std::to_string(lineno) + ": column " + std::to_string(k + 1) +
                       ": bad number '" + cell + "'");
      if (k < n)
        p(k) = v;
      else
        ws.push_back(v);
    }
    pts.push_back(std::move(p));
  }
  if (pts.empty()) throw CsvError(path + ": no data rows");
  if (!has_w) ws.assign(pts.size(), default_total_mass / static_cast<double>(pts.size()));
  return PointCloud::from_points(pts, ws, m);
}

void write_csv(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write " + path);
  for (int k = 0; k < cloud.ambient(); ++k) out << "x" << (k + 1) << ",";
  out << "w\n";
  char buf[32];
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (Eigen::Index k = 0; k < cloud.ambient(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", cloud.points()(k, i));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", cloud.weight(i));
    out << buf << "\n";
  }
}

}  // namespace mrect
