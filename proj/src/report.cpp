#include "mrect/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>

#include "json.hpp"
#include "mrect/balanced.hpp"
#include "mrect/energy.hpp"
#include "mrect/generators.hpp"
#include "mrect/parallel.hpp"
#include "mrect/tangent.hpp"

namespace mrect {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
  double hi = xs[xs.size() / 2];
  if (xs.size() % 2) return hi;
  std::nth_element(xs.begin(), xs.begin() + xs.size() / 2 - 1, xs.end());
  return 0.5 * (hi + xs[xs.size() / 2 - 1]);
}

ordered_json plane_to_json(const Plane& p) {
  ordered_json basis = ordered_json::array();
  for (Eigen::Index c = 0; c < p.basis().cols(); ++c) {
    ordered_json col = ordered_json::array();
    for (Eigen::Index rr = 0; rr < p.basis().rows(); ++rr) col.push_back(p.basis()(rr, c));
    basis.push_back(col);
  }
  return basis;
}

ordered_json estimate_to_json(const EnergyEstimate& e) {
  ordered_json j;
  j["value"] = e.value;
  j["mode"] = e.exhaustive ? "exhaustive" : "monte_carlo";
  j["stderr"] = e.std_error;
  j["tuples"] = e.tuples_evaluated;
  return j;
}

}  // namespace

CommandResult run_analyze(const AnalyzeConfig& cfg) {
  CommandResult res;
  PointCloud cloud = read_csv(cfg.input, cfg.m);
  const Eigen::Index N = cloud.size();

  // base-point subsample: evenly spaced indices
  int npts = std::max(1, std::min<int>(cfg.points, static_cast<int>(N)));
  std::vector<Eigen::Index> base;
  for (int i = 0; i < npts; ++i)
    base.push_back(static_cast<Eigen::Index>(
        std::llround(static_cast<double>(i) * static_cast<double>(N - 1) /
                     std::max(1.0, static_cast<double>(npts - 1)))));
  base.erase(std::unique(base.begin(), base.end()), base.end());

  auto labels = cloud.stratify(16, 16, cfg.r0 * 2.0);

  bool certificates_ok = true;
  std::vector<std::string> certificate_issues;

  struct PerPoint {
    ordered_json j;
  };
  std::vector<PerPoint> rows(base.size());
  std::vector<std::string> issues(base.size());

  TangentParams tp;
  tp.kind = cfg.kind;
  tp.l = cfg.l;
  tp.p = cfg.p;
  tp.alpha = cfg.alpha;
  tp.delta = cfg.delta;
  tp.budget = cfg.budget;
  tp.seed = cfg.seed;

  std::ofstream scale_csv;
  if (!cfg.scale_csv.empty()) {
    scale_csv.open(cfg.scale_csv);
    scale_csv << "point_id,rho,drift,energy,lemma72_bound,lemma72_actual\n";
  }

  parallel_for(base.size(), [&](std::size_t t) {
    Eigen::Index id = base[t];
    Vec a = cloud.point(id);
    ordered_json row;
    row["id"] = static_cast<long long>(id);
    const StratumLabel& lab = labels[static_cast<std::size_t>(id)];
    row["stratum"] = lab.unbounded
                         ? ordered_json{{"unbounded", true}}
                         : ordered_json{{"unbounded", false}, {"j", lab.j}, {"k", lab.k}};
    DensityProfile prof = cloud.density_profile(a, cfg.r0, cfg.depth);
    row["density"] = {{"min_ratio", prof.min_ratio}, {"max_ratio", prof.max_ratio}};

    double delta_star = 0.0;
    try {
      delta_star = fat_simplex_search(cloud, a, cfg.r0, cfg.sigma, cfg.budget, cfg.seed);
    } catch (const EmptyBall&) {
    }
    row["delta_star"] = delta_star;

    TangentEstimate te = dyadic_plane_sequence(cloud, a, cfg.r0, cfg.depth, tp);
    ordered_json tj;
    tj["status"] = te.fit_status == FitStatus::Ok
                       ? "ok"
                       : (te.fit_status == FitStatus::Flat ? "flat" : "insufficient");
    if (te.fit_status == FitStatus::Ok) {
      tj["alpha_fit"] = te.alpha_fit;
      tj["r2"] = te.fit_r2;
    }
    if (te.limit_plane) tj["limit_plane"] = plane_to_json(*te.limit_plane);
    tj["scales_with_planes"] = static_cast<int>(std::count_if(
        te.scales.begin(), te.scales.end(), [](const ScaleRecord& s) { return bool(s.plane); }));
    row["tangent"] = tj;

    for (std::size_t si = 0; si < te.scales.size(); ++si) {
      const ScaleRecord& sr = te.scales[si];
      if (sr.lemma72_bound >= 0.0 && sr.lemma72_actual > sr.lemma72_bound * (1.0 + 1e-9)) {
        issues[t] = "lemma 7.2 certificate failed at point " + std::to_string(id);
      }
    }

    try {
      EnergyEstimate ke = k_energy(cloud, cfg.kind, a, cfg.r0, cfg.l, cfg.p, cfg.alpha,
                                   cfg.budget, cfg.seed);
      row["energy"] = estimate_to_json(ke);
    } catch (const EmptyBall&) {
      row["energy"] = nullptr;
    }
    try {
      BetaNumber bn = beta_number(cloud, a, cfg.r0, 2.0);
      row["beta"] = {{"value", bn.value}, {"p", bn.p}, {"exact", bn.exact}};
    } catch (const EmptyBall&) {
      row["beta"] = nullptr;
    }
    if (te.limit_plane) {
      ScaleProfile sp = schatzle_diagnostic(cloud, a, *te.limit_plane, cfg.alpha, cfg.r0,
                                            cfg.depth);
      row["schatzle"] = {{"max", sp.max_value},
                         {"trend_slope", sp.trend_slope},
                         {"trend_valid", sp.trend_valid}};
    }

    if (scale_csv.is_open()) {
      static std::mutex mu;
      std::lock_guard<std::mutex> lock(mu);
      for (const ScaleRecord& sr : te.scales)
        scale_csv << id << "," << sr.rho << "," << sr.drift << "," << sr.energy << ","
                  << sr.lemma72_bound << "," << sr.lemma72_actual << "\n";
    }
    rows[t].j = std::move(row);
  });

  for (const std::string& iss : issues)
    if (!iss.empty()) {
      certificates_ok = false;
      certificate_issues.push_back(iss);
    }

  ordered_json report;
  report["schema"] = kSchemaVersion;
  report["input"] = {{"path", cfg.input},
                     {"count", static_cast<long long>(N)},
                     {"n", cloud.ambient()},
                     {"m", cloud.intrinsic()}};
  report["config"] = {{"kind", to_string(cfg.kind)}, {"l", cfg.l},       {"p", cfg.p},
                      {"alpha", cfg.alpha},          {"r0", cfg.r0},     {"depth", cfg.depth},
                      {"budget", cfg.budget},        {"seed", cfg.seed}, {"points", cfg.points},
                      {"delta", cfg.delta},          {"sigma", cfg.sigma}};
  if (cfg.timestamp) report["generated_at"] = iso_timestamp();

  EnergyEstimate global_menger = menger_energy(cloud, std::nullopt, cfg.budget, cfg.seed);
  report["global"] = {{"menger_energy", estimate_to_json(global_menger)},
                      {"j_energy", j_energy(cloud, std::nullopt, 2.0, 2.0, cfg.j_depth)},
                      {"total_mass", cloud.total_mass()},
                      {"spacing", cloud.spacing()}};

  std::vector<double> deltas;
  ordered_json jrows = ordered_json::array();
  for (auto& r : rows) {
    if (r.j.contains("delta_star")) deltas.push_back(r.j["delta_star"].get<double>());
    jrows.push_back(std::move(r.j));
  }
  report["global"]["delta_star_median"] = median_of(deltas);
  report["points"] = std::move(jrows);
  report["certificates"] = {{"ok", certificates_ok}, {"issues", certificate_issues}};

  std::ofstream out(cfg.out);
  if (!out) {
    res.exit_code = 1;
    res.message = "cannot write " + cfg.out;
    return res;
  }
  out << report.dump(2) << "\n";
  res.exit_code = certificates_ok ? 0 : 2;
  if (!certificates_ok) res.message = "certificate soft-failures; see report";
  return res;
}

CommandResult run_generate(const GenerateConfig& cfg) {
  CommandResult res;
  std::string sidecar = cfg.out + ".meta.json";
  if (cfg.generator == "plane" || cfg.generator == "segment") {
    FlatSample s = cfg.generator == "plane" ? gen_plane(cfg.m, cfg.n, cfg.count, cfg.seed, cfg.grid)
                                            : gen_segment(cfg.n, cfg.count, cfg.seed, cfg.grid);
    write_csv(cfg.out, s.cloud);
    ordered_json meta = {{"generator", cfg.generator},
                         {"m", s.cloud.intrinsic()},
                         {"n", s.cloud.ambient()},
                         {"count", static_cast<long long>(s.cloud.size())},
                         {"seed", cfg.seed}};
    std::ofstream(sidecar) << meta.dump(2) << "\n";
    res.message = meta.dump();
  } else if (cfg.generator == "sphere") {
    SphereSample s = gen_sphere(cfg.m, cfg.count, cfg.seed, cfg.grid);
    write_csv(cfg.out, s.cloud);
    ordered_json meta = {{"generator", "sphere"},
                         {"m", s.cloud.intrinsic()},
                         {"n", s.cloud.ambient()},
                         {"count", static_cast<long long>(s.cloud.size())},
                         {"seed", cfg.seed}};
    std::ofstream(sidecar) << meta.dump(2) << "\n";
    res.message = meta.dump();
  } else if (cfg.generator == "c1beta") {
    GraphSpec spec;
    spec.m = cfg.m;
    spec.n = cfg.n;
    spec.beta = cfg.beta;
    spec.amplitude = cfg.amplitude;
    spec.series_depth = cfg.series_depth;
    spec.count = cfg.count;
    spec.seed = cfg.seed;
    spec.grid = cfg.grid;
    GraphSample gs = gen_c1beta_graph(spec);
    write_csv(cfg.out, gs.cloud);
    std::ofstream(sidecar) << sidecar_json(gs);
    res.message = sidecar_json(gs);
  } else if (cfg.generator == "cantor4") {
    PointCloud c = gen_cantor4(cfg.level);
    write_csv(cfg.out, c);
    ordered_json meta = {{"generator", "cantor4"},
                         {"level", cfg.level},
                         {"count", static_cast<long long>(c.size())}};
    std::ofstream(sidecar) << meta.dump(2) << "\n";
    res.message = meta.dump();
  } else {
    res.exit_code = 1;
    res.message = "unknown generator: " + cfg.generator;
  }
  return res;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  SweepResult out;
  if (cfg.betas.empty() || cfg.alphas.empty() || cfg.counts.empty()) {
    out.status.exit_code = 1;
    out.status.message = "sweep: empty grid";
    return out;
  }

  std::ofstream csv(cfg.out);
  if (!csv) {
    out.status.exit_code = 1;
    out.status.message = "cannot write " + cfg.out;
    return out;
  }
  csv << "beta,alpha,count,point,param,energy,mode\n";
  csv.precision(17);

  const Eigen::Index base_count = cfg.counts.front();
  for (double beta : cfg.betas) {
    // per-refinement energies at shared base parameters
    std::vector<std::vector<std::vector<double>>> energies(
        cfg.alphas.size(),
        std::vector<std::vector<double>>(cfg.counts.size(),
                                         std::vector<double>(static_cast<std::size_t>(cfg.points), 0.0)));
    for (std::size_t li = 0; li < cfg.counts.size(); ++li) {
      GraphSpec spec;
      spec.m = 1;
      spec.n = 2;
      spec.beta = beta;
      spec.amplitude = cfg.amplitude;
      spec.series_depth = cfg.series_depth;
      spec.count = cfg.counts[li];
      spec.seed = cfg.seed;
      spec.grid = true;
      GraphSample gs = gen_c1beta_graph(spec);

      for (int pt = 0; pt < cfg.points; ++pt) {
        double q = 0.25 + 0.5 * static_cast<double>(pt) /
                              std::max(1.0, static_cast<double>(cfg.points - 1));
        // base parameter chosen on the coarsest grid, mapped to this level
        auto i0 = static_cast<Eigen::Index>(std::llround(q * static_cast<double>(base_count - 1)));
        auto idx = static_cast<Eigen::Index>(
            std::llround(static_cast<double>(i0) * static_cast<double>(cfg.counts[li] - 1) /
                         static_cast<double>(base_count - 1)));
        Vec a = gs.cloud.point(idx);
        for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
          EnergyEstimate e = k_energy(gs.cloud, cfg.kind, a, cfg.r, cfg.l, cfg.p, cfg.alphas[ai],
                                      cfg.budget, cfg.seed);
          energies[ai][li][static_cast<std::size_t>(pt)] = e.value;
          csv << beta << "," << cfg.alphas[ai] << "," << cfg.counts[li] << "," << pt << ","
              << gs.params[static_cast<std::size_t>(idx)](0) << "," << e.value << ","
              << (e.exhaustive ? "exhaustive" : "monte_carlo") << "\n";
        }
      }
    }

    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
      SweepTrend tr;
      tr.beta = beta;
      tr.alpha = cfg.alphas[ai];
      std::vector<double> ratios, growths;
      int mono = 0;
      for (int pt = 0; pt < cfg.points; ++pt) {
        double lo = 0, hi = 0, first = 0, last = 0;
        bool nondecreasing = true;
        for (std::size_t li = 0; li < cfg.counts.size(); ++li) {
          double v = energies[ai][li][static_cast<std::size_t>(pt)];
          if (li == 0) {
            lo = hi = first = v;
          } else {
            if (v < energies[ai][li - 1][static_cast<std::size_t>(pt)]) nondecreasing = false;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
          last = v;
        }
        if (lo > 0.0) ratios.push_back(hi / lo);
        if (first > 0.0) growths.push_back(last / first);
        if (nondecreasing) ++mono;
      }
      tr.median_max_over_min = median_of(ratios);
      tr.median_growth = median_of(growths);
      tr.monotone_fraction = static_cast<double>(mono) / static_cast<double>(cfg.points);
      for (std::size_t li = 0; li < cfg.counts.size(); ++li)
        tr.median_by_level.push_back(median_of(energies[ai][li]));
      out.trends.push_back(std::move(tr));
    }
  }
  return out;
}

}  // namespace mrect
