#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cbp/dynamics.hpp"
#include "cbp/equilibria.hpp"

namespace cbp {

inline constexpr double kDefaultWindow = 20.0;
inline constexpr double kDefaultConvergenceTol = 1e-4;
inline constexpr double kDefaultCompareTol = 0.01;

struct ConvergenceReport {
  bool converged = false;
  // Earliest time after which every shape component stays within tol of its
  // trailing-window mean; NaN when not converged.
  double settle_time = 0.0;
  ShapeState steady_shape;  // trailing-window means
  double window_max_dev = 0.0;
  std::string worst_component;
  double cb_cost_final = 0.0;  // mean over agents at the last snapshot
  double window = kDefaultWindow;
  double tol = kDefaultConvergenceTol;
  // 1 / (window mean of agent path curvature sqrt(u^2 + v^2)), averaged over agents.
  double observed_radius = 0.0;
  // Window mean of agent 1's z coordinate (NaN for config II, which has no axis).
  double observed_vertical_offset = 0.0;
};

// Throws TooShort when the trajectory spans less than 2 * window.
ConvergenceReport detect_convergence(const Trajectory& traj, const Scenario& s,
                                     double window = kDefaultWindow,
                                     double tol = kDefaultConvergenceTol);

struct ComparisonReport {
  EquilibriumPrediction prediction;
  ConvergenceReport observed;
  std::vector<std::pair<std::string, double>> per_quantity_rel_error;
  std::vector<std::string> skipped;  // family or undefined quantities
  std::vector<std::string> failures;
  double tol = kDefaultCompareTol;
  bool pass = false;
};

// Relative error |obs - pred| / max(|pred|, 1) for rho, rho_1b1, rho_2b2 (or
// rho_1b2), xtilde, rhat1, radius and vertical_offset. Throws NotConverged
// unless the report converged.
ComparisonReport compare(const ConvergenceReport& observed, const EquilibriumPrediction& pred,
                         double tol = kDefaultCompareTol);

// Picks, among the existing predictions, the one that matches best (smallest
// largest relative error). Throws NotConverged; returns nullopt when no
// prediction exists.
std::optional<ComparisonReport> compare_best(const ConvergenceReport& observed,
                                             const std::vector<EquilibriumPrediction>& preds,
                                             double tol = kDefaultCompareTol);

nlohmann::json to_json(const ShapeState& s);
nlohmann::json to_json(const EquilibriumPrediction& e);
nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const ComparisonReport& r);

}  // namespace cbp
