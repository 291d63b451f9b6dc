#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbp/control_laws.hpp"
#include "cbp/dynamics.hpp"
#include "cbp/shape_space.hpp"

namespace cbp {

enum class CaseLabel {
  P3_1a,
  P3_1b,
  P4_1,
  P4_2a,
  P4_2b,
  P5_1,
  P5_2a,
  P5_2b_plus,
  P5_2b_minus,
  P5_2c,
  P5_2d,
};

// "P3.1a", "P5.2b_plus", ...
std::string to_string(CaseLabel c);
CaseLabel case_from_string(const std::string& s);
ConfigType config_of(CaseLabel c);

// Relative tolerance for the equality conditions of the closed-form cases.
inline constexpr double kEqualityRelTol = 1e-12;

// Closed-form circling equilibrium.
//
// Components fixed by initial conditions rather than by the control
// parameters are NaN in `shape` (and in vertical_offset where applicable) and
// listed in `family`. `family_parameter` then names the scalar that selects a
// member: "rho_1b1" (common beacon distance, config II) or "vertical_offset"
// (common circle height, config III).
struct EquilibriumPrediction {
  CaseLabel label = CaseLabel::P3_1a;
  bool exists = false;
  std::string reason;
  ShapeState shape;
  std::vector<std::string> family;
  std::string family_parameter;
  double family_min = 0.0;  // smallest admissible family parameter
  double rho_plus = std::numeric_limits<double>::quiet_NaN();
  double rho_minus = std::numeric_limits<double>::quiet_NaN();
  double phi = std::numeric_limits<double>::quiet_NaN();
  double radius = std::numeric_limits<double>::quiet_NaN();
  double vertical_offset = std::numeric_limits<double>::quiet_NaN();

  bool is_family() const { return !family.empty(); }
  double xtilde() const;
};

// Every case of the configuration is reported; exists says whether its
// conditions hold (reason names the first violated one). Several cases may
// exist for the same parameters.
std::vector<EquilibriumPrediction> predict_config_I(const ControlParams& p);
std::vector<EquilibriumPrediction> predict_config_II(const ControlParams& p);
std::vector<EquilibriumPrediction> predict_config_III(const ControlParams& p);
std::vector<EquilibriumPrediction> predict(ConfigType c, const ControlParams& p);

// Concrete member of a family. Throws ParameterError when the value is
// outside the admissible range or the prediction is not a family.
EquilibriumPrediction instantiate_family(const EquilibriumPrediction& pred, const ControlParams& p,
                                         double value);

// Three admissible family members (the prediction itself when not a family).
std::vector<EquilibriumPrediction> family_samples(const EquilibriumPrediction& pred,
                                                  const ControlParams& p);

struct ResidualReport {
  double max_abs_derivative = 0.0;
  std::vector<std::pair<std::string, double>> per_component;
  double tolerance = 0.0;
  bool pass = false;
};

// Default residual tolerance, 1e-9 * max(1, mu).
double residual_tolerance(const ControlParams& p);

// Shape-dynamics right-hand side at the predicted shape (max over the family
// samples for a family). Throws ParameterError when the prediction does not
// exist and ConstraintViolation when the predicted shape is geometrically
// impossible.
ResidualReport residual(const EquilibriumPrediction& pred, const ControlParams& p,
                        std::optional<double> tolerance = std::nullopt);

// Initial conditions that place the agents exactly on a concrete prediction.
std::vector<AgentSpec> realize(const EquilibriumPrediction& pred, const ControlParams& p);

}  // namespace cbp
