#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cbp/analysis.hpp"
#include "cbp/dynamics.hpp"
#include "cbp/equilibria.hpp"

namespace cbp {

// Runs fn(0..n-1) on up to `threads` workers (0 = hardware concurrency) and
// returns results in index order.
template <typename T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn,
                            unsigned threads = 0);

// Parameter grid for the residual suite. Every (mu, lambda, b) combination is
// paired with all (a, a0) in cb x cb: config II when b = 0, configs I and III
// when b > 0. With equality_points, pairs satisfying lambda*x = (1-lambda)*y
// are added so the equality-only cases are reached at every lambda.
struct ResidualGrid {
  std::vector<double> mu{0.5, 1.0, 2.0};
  std::vector<double> lambda{0.2, 0.35, 0.5, 0.65, 0.8};
  std::vector<double> cb{-0.9, -0.707, -0.3, -0.156, 0.0, 0.156, 0.3, 0.707, 0.9};
  std::vector<double> b{0.0, 2.0, 10.0};
  bool equality_points = true;
};

ResidualGrid residual_grid_from_json(const nlohmann::json& j);

struct GridPoint {
  ConfigType config;
  ControlParams params;
};

std::vector<GridPoint> expand(const ResidualGrid& g);

struct VerifySummary {
  std::size_t parameter_sets = 0;           // grid points visited
  std::size_t parameter_sets_with_case = 0;  // with at least one existing prediction
  std::size_t predictions_checked = 0;
  std::map<std::string, std::size_t> per_case_count;
  std::map<std::string, double> per_case_max_residual;
  std::vector<std::string> failures;
  double seconds = 0.0;
  bool pass = false;
};

VerifySummary verify_grid(const ResidualGrid& g, unsigned threads = 0);
nlohmann::json to_json(const VerifySummary& v);

// Agents on a concrete prediction with agent 1 pushed radially outward by the
// relative amount `perturb` (e.g. 0.05 for 5 %).
std::vector<AgentSpec> perturbed_start(const EquilibriumPrediction& pred, const ControlParams& p,
                                       double perturb);

// Sweep document: {"base": scenario, "axes": {"lambda": [...], ...},
// optional "start_near": {"case": "P4.1", "perturb": 0.05, "family_value": x},
// optional "window", "tol", "compare_tol", "write_csv"}.
// Axis names: mu, lambda, a, a0, ab1, ab2, b, dt, t_final.
struct SweepSpec {
  Scenario base;
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  std::optional<CaseLabel> start_case;
  double perturb = 0.05;
  std::optional<double> family_value;
  double window = kDefaultWindow;
  double tol = kDefaultConvergenceTol;
  double compare_tol = kDefaultCompareTol;
  bool write_csv = false;
};

SweepSpec sweep_from_json(const nlohmann::json& j);

struct SweepResult {
  std::size_t index = 0;
  Scenario scenario;
  // ok | mismatch | not_converged | aborted | no_prediction | error
  std::string status;
  std::string message;
  nlohmann::json report;
};

// Each run writes only its own run_NNNN.csv (when spec.write_csv and csv_dir
// are set), so concurrent runs never share a file.
std::vector<SweepResult> run_sweep(const SweepSpec& spec,
                                   const std::optional<std::filesystem::path>& csv_dir = {},
                                   unsigned threads = 0);

nlohmann::json sweep_summary(const std::vector<SweepResult>& results);

}  // namespace cbp

#include "cbp/sweep_impl.hpp"
