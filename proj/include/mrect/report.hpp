#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrect/curvature.hpp"

namespace mrect {

struct AnalyzeConfig {
  std::string input;
  int m = 1;
  CurvatureKind kind = CurvatureKind::KappaH;
  int l = 2;
  double p = 2.0;
  double alpha = 0.5;
  double r0 = 0.3;
  int depth = 6;
  std::size_t budget = 200000;
  std::uint64_t seed = 1;
  int points = 25;  // base-point subsample size
  double delta = 0.25;
  double sigma = 0.05;
  int j_depth = 4;
  std::string out = "report.json";
  std::string scale_csv;  // optional per-scale CSV for plotting
  bool timestamp = true;
};

struct CommandResult {
  int exit_code = 0;  // 0 ok, 1 input error, 2 certificate soft-failure
  std::string message;
};

CommandResult run_analyze(const AnalyzeConfig& cfg);

struct GenerateConfig {
  std::string generator;  // plane | sphere | segment | c1beta | cantor4
  int m = 1;
  int n = 2;
  Eigen::Index count = 2000;
  double beta = 0.5;
  double amplitude = 0.6;
  int series_depth = 8;
  int level = 4;  // cantor4
  std::uint64_t seed = 0;
  bool grid = true;
  std::string out = "cloud.csv";
};

CommandResult run_generate(const GenerateConfig& cfg);

struct SweepConfig {
  std::vector<double> betas = {0.5};
  std::vector<double> alphas = {0.3, 0.8};
  CurvatureKind kind = CurvatureKind::KappaH;
  int l = 3;
  double p = 2.0;
  double r = 0.12;
  std::vector<Eigen::Index> counts = {250, 499, 997, 1993};  // nested refinements
  int points = 25;
  double amplitude = 0.6;
  int series_depth = 8;
  std::uint64_t seed = 0;
  std::size_t budget = 200000;
  std::string out = "sweep.csv";
};

struct SweepTrend {
  double beta = 0.0;
  double alpha = 0.0;
  double median_max_over_min = 0.0;  // per-point max/min across refinements
  double median_growth = 0.0;        // per-point last/first
  double monotone_fraction = 0.0;    // fraction of points with nondecreasing E
  std::vector<double> median_by_level;
};

struct SweepResult {
  CommandResult status;
  std::vector<SweepTrend> trends;
};

SweepResult run_sweep(const SweepConfig& cfg);

}  // namespace mrect
