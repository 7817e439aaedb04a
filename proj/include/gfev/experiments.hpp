#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfev/common.hpp"
#include "gfev/graph.hpp"
#include "gfev/shift.hpp"

namespace gfev {

struct ExperimentConfig {
  // graph
  std::string graph = "community";  // community|ring|star|complete|knn|file
  std::string graph_file;
  int n = 64;
  int clusters = 4;
  double p_in = 0.8;
  double p_out = 0.05;
  int knn_k = 8;
  double side = 1.0;  // square aperture (in wavelengths) for array geometry
  std::uint64_t seed = 0;
  ShiftKind shift_kind = ShiftKind::laplacian;

  // families/orders to sweep
  std::vector<std::string> families = {"classical", "nv", "cev"};
  std::vector<int> orders = {1, 2, 3, 4, 5};

  // scenario parameters
  double gamma = 3.0;
  double mu = 0.75;
  double lambda_c = 1.0;
  std::vector<double> deltas = {0.6, 0.7, 0.8};
  double mu_tik = 0.8;
  double noise_var = 0.5;
  int cev_order = 15;   // FIR competitor in the recursive-solver study
  int iterations = 120;  // per-iteration curves
  std::string samples_csv;  // optional observed data for covariance estimation

  std::string out_prefix;  // beampattern / auxiliary CSV location
};

struct ResultRow {
  std::string family;
  int k_or_iter = 0;
  std::string metric;
  double value = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::uint64_t seed = 0;
  int n = 0;
  int edges = 0;

  void add(std::string family, int k, std::string metric, double value) {
    rows.push_back({std::move(family), k, std::move(metric), value});
  }
  double get(const std::string& family, int k, const std::string& metric) const;
};

void write_result_csv(const ResultTable& table, const std::string& path);
std::string result_csv(const ResultTable& table);

// Modal targets.
VecX<double> target_exponential_kernel(const VecX<double>& lambda, double gamma,
                                       double mu);
VecX<double> target_ideal_lowpass(const VecX<double>& lambda, double lambda_c);

struct BeamPattern {
  double theta0_deg = 0.0;
  VecX<double> angles_deg;
  VecX<double> dense_db;  // exact matched filter
  VecX<double> cev_db;
  VecX<double> nv_db;
};

struct BeamformingResult {
  ResultTable table;
  std::vector<BeamPattern> patterns;  // one per requested steering angle
};

ResultTable exp_response_approx(const ExperimentConfig& cfg);
ResultTable exp_consensus(const ExperimentConfig& cfg);
ResultTable exp_wiener(const ExperimentConfig& cfg);
BeamformingResult exp_beamforming(const ExperimentConfig& cfg);
ResultTable exp_distributed_ls(const ExperimentConfig& cfg);
ResultTable exp_tikhonov(const ExperimentConfig& cfg);

void write_beampattern_csv(const BeamPattern& bp, const std::string& path);

// Shared plumbing: realize the configured graph and shift operator.
Graph make_experiment_graph(const ExperimentConfig& cfg);
ShiftOperator<double> make_experiment_shift(const ExperimentConfig& cfg,
                                            const Graph& g);

}  // namespace gfev
