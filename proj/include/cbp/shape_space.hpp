#pragma once

#include <array>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "cbp/control_laws.hpp"
#include "cbp/geometry.hpp"

namespace cbp {

// One agent between beacons at (0,0,-b) and (0,0,b).
struct ShapeStateI {
  double xbar_1b1 = 0.0;
  double xbar_1b2 = 0.0;
  double rho_1b1 = 0.0;
  double rho_1b2 = 0.0;

  static constexpr std::size_t kSize = 4;
  static constexpr std::array<std::string_view, kSize> kNames = {"xbar_1b1", "xbar_1b2", "rho_1b1",
                                                                 "rho_1b2"};

  std::array<double, kSize> to_array() const { return {xbar_1b1, xbar_1b2, rho_1b1, rho_1b2}; }
  static ShapeStateI from_array(const std::array<double, kSize>& v) {
    return {v[0], v[1], v[2], v[3]};
  }

  friend bool operator==(const ShapeStateI&, const ShapeStateI&) = default;
};

// Two agents; agent i references beacon i (both beacons at the origin when b = 0).
// rhat_i = r_i . bhat and xhat_i = x_i . bhat with bhat = (0,0,2b).
struct ShapeStateII_III {
  double xbar1 = 0.0;
  double xbar2 = 0.0;
  double xbar_1b1 = 0.0;
  double xbar_2b2 = 0.0;
  double xtilde = 0.0;
  double rho = 0.0;
  double rho_1b1 = 0.0;
  double rho_2b2 = 0.0;
  double rhat1 = 0.0;
  double rhat2 = 0.0;
  double xhat1 = 0.0;
  double xhat2 = 0.0;

  static constexpr std::size_t kSize = 12;
  static constexpr std::array<std::string_view, kSize> kNames = {
      "xbar1", "xbar2",   "xbar_1b1", "xbar_2b2", "xtilde", "rho",
      "rho_1b1", "rho_2b2", "rhat1",  "rhat2",    "xhat1",  "xhat2"};

  std::array<double, kSize> to_array() const {
    return {xbar1, xbar2, xbar_1b1, xbar_2b2, xtilde, rho,
            rho_1b1, rho_2b2, rhat1, rhat2, xhat1, xhat2};
  }
  static ShapeStateII_III from_array(const std::array<double, kSize>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11]};
  }

  friend bool operator==(const ShapeStateII_III&, const ShapeStateII_III&) = default;
};

using ShapeState = std::variant<ShapeStateI, ShapeStateII_III>;

std::vector<std::string_view> shape_names(const ShapeState& s);
std::vector<double> shape_values(const ShapeState& s);

inline Vec3 beacon1_position(double b) { return {0.0, 0.0, -b}; }
inline Vec3 beacon2_position(double b) { return {0.0, 0.0, b}; }

ShapeStateI extract_shape_I(const AgentState& agent, double b);

// Strict triangle inequalities rho_1b1 + rho_1b2 > 2b and |rho_1b1 - rho_1b2| < 2b.
// False means the agent sits on the beacon axis (collinear).
bool triangle_constraints_hold(double rho_1b1, double rho_1b2, double b);

// Cosine of the angle at the agent between the two beacon directions.
// Throws ConstraintViolation when the triangle is degenerate.
double law_of_cosines_dot(double rho_1b1, double rho_1b2, double b);

ShapeStateI shape_rhs_I(const ShapeStateI& sh, const ControlParams& p);

// Requires exactly two agents.
ShapeStateII_III extract_shape_II_III(std::span<const AgentState> agents, double b);

// Dot products that close the two-agent shape dynamics, written in shape
// variables only:
//   d1 = unit(r_1b1) . unit(r),  d2 = unit(r_2b2) . unit(r),
//   e1 = x_2 . unit(r_1b1),      e2 = x_1 . unit(r_2b2).
struct ConstraintDots {
  double d1 = 0.0;
  double d2 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
};

inline constexpr double kConstraintSlack = 1e-9;

ConstraintDots constraint_dots(const ShapeStateII_III& sh);

// Throws ConstraintViolation when a constraint dot leaves [-1, 1] by more than
// kConstraintSlack or a separation is not positive.
ShapeStateII_III shape_rhs_II_III(const ShapeStateII_III& sh, const ControlParams& p);

}  // namespace cbp
