#include "cbp/shape_space.hpp"

#include <cmath>
#include <fmt/format.h>

namespace cbp {

std::vector<std::string_view> shape_names(const ShapeState& s) {
  return std::visit(
      [](const auto& v) {
        return std::vector<std::string_view>(v.kNames.begin(), v.kNames.end());
      },
      s);
}

std::vector<double> shape_values(const ShapeState& s) {
  return std::visit(
      [](const auto& v) {
        const auto a = v.to_array();
        return std::vector<double>(a.begin(), a.end());
      },
      s);
}

ShapeStateI extract_shape_I(const AgentState& agent, double b) {
  const Vec3 r1b1 = agent.position - beacon1_position(b);
  const Vec3 r1b2 = agent.position - beacon2_position(b);
  const Vec3& x = agent.frame.x_axis;
  return {dot(x, unit(r1b1)), dot(x, unit(r1b2)), norm(r1b1), norm(r1b2)};
}

bool triangle_constraints_hold(double rho_1b1, double rho_1b2, double b) {
  return rho_1b1 + rho_1b2 > 2.0 * b && std::abs(rho_1b1 - rho_1b2) < 2.0 * b;
}

double law_of_cosines_dot(double rho_1b1, double rho_1b2, double b) {
  if (!triangle_constraints_hold(rho_1b1, rho_1b2, b)) {
    throw ConstraintViolation(fmt::format(
        "beacon triangle degenerate: rho_1b1={:.17g}, rho_1b2={:.17g}, b={:.17g}", rho_1b1,
        rho_1b2, b));
  }
  return (rho_1b1 * rho_1b1 + rho_1b2 * rho_1b2 - 4.0 * b * b) / (2.0 * rho_1b1 * rho_1b2);
}

ShapeStateI shape_rhs_I(const ShapeStateI& sh, const ControlParams& p) {
  const double c = law_of_cosines_dot(sh.rho_1b1, sh.rho_1b2, p.b);
  const double k1 = p.lambda * p.mu * (sh.xbar_1b1 - p.ab1);
  const double k2 = (1.0 - p.lambda) * p.mu * (sh.xbar_1b2 - p.ab2);
  const double cross_term = c - sh.xbar_1b1 * sh.xbar_1b2;
  ShapeStateI d;
  d.xbar_1b1 = -k2 * cross_term - (k1 - 1.0 / sh.rho_1b1) * (1.0 - sh.xbar_1b1 * sh.xbar_1b1);
  d.xbar_1b2 = -k1 * cross_term - (k2 - 1.0 / sh.rho_1b2) * (1.0 - sh.xbar_1b2 * sh.xbar_1b2);
  d.rho_1b1 = sh.xbar_1b1;
  d.rho_1b2 = sh.xbar_1b2;
  return d;
}

ShapeStateII_III extract_shape_II_III(std::span<const AgentState> agents, double b) {
  if (agents.size() != 2) {
    throw ParameterError(fmt::format("two-agent shape needs 2 agents, got {}", agents.size()));
  }
  const Vec3& r1 = agents[0].position;
  const Vec3& r2 = agents[1].position;
  const Vec3& x1 = agents[0].frame.x_axis;
  const Vec3& x2 = agents[1].frame.x_axis;
  const Vec3 r = r1 - r2;
  const Vec3 r1b1 = r1 - beacon1_position(b);
  const Vec3 r2b2 = r2 - beacon2_position(b);
  const Vec3 ur = unit(r);
  const Vec3 bhat = beacon2_position(b) - beacon1_position(b);

  ShapeStateII_III s;
  s.xbar1 = dot(x1, ur);
  s.xbar2 = -dot(x2, ur);
  s.xbar_1b1 = dot(x1, unit(r1b1));
  s.xbar_2b2 = dot(x2, unit(r2b2));
  s.xtilde = dot(x1, x2);
  s.rho = norm(r);
  s.rho_1b1 = norm(r1b1);
  s.rho_2b2 = norm(r2b2);
  if (b != 0.0) {
    s.rhat1 = dot(r1, bhat);
    s.rhat2 = dot(r2, bhat);
    s.xhat1 = dot(x1, bhat);
    s.xhat2 = dot(x2, bhat);
  }
  return s;
}

ConstraintDots constraint_dots(const ShapeStateII_III& s) {
  ConstraintDots c;
  c.d1 = (s.rho_1b1 * s.rho_1b1 + s.rho * s.rho - s.rho_2b2 * s.rho_2b2 - 2.0 * s.rhat2) /
         (2.0 * s.rho * s.rho_1b1);
  c.d2 = (s.rho_1b1 * s.rho_1b1 - s.rho * s.rho - s.rho_2b2 * s.rho_2b2 - 2.0 * s.rhat1) /
         (2.0 * s.rho * s.rho_2b2);
  c.e1 = (s.xhat2 + s.rho_2b2 * s.xbar_2b2 - s.rho * s.xbar2) / s.rho_1b1;
  c.e2 = (-s.xhat1 + s.rho_1b1 * s.xbar_1b1 - s.rho * s.xbar1) / s.rho_2b2;
  return c;
}

namespace {

void check_dot(double v, const char* name) {
  if (!(std::abs(v) <= 1.0 + kConstraintSlack)) {
    throw ConstraintViolation(fmt::format("constraint dot {} = {:.17g} outside [-1, 1]", name, v));
  }
}

}  // namespace

ShapeStateII_III shape_rhs_II_III(const ShapeStateII_III& s, const ControlParams& p) {
  if (!(s.rho > 0.0 && s.rho_1b1 > 0.0 && s.rho_2b2 > 0.0)) {
    throw ConstraintViolation("separations must be positive");
  }
  const ConstraintDots c = constraint_dots(s);
  check_dot(c.d1, "d1");
  check_dot(c.d2, "d2");
  check_dot(c.e1, "e1");
  check_dot(c.e2, "e2");

  const double L = 1.0 - p.lambda;
  const double lam = p.lambda;
  const double mu = p.mu;
  const double b2 = 2.0 * p.b * p.b;
  // Neighbour and beacon gains of each agent.
  const double n1 = L * mu * (s.xbar1 - p.a);
  const double n2 = L * mu * (s.xbar2 - p.a);
  const double m1 = lam * mu * (s.xbar_1b1 - p.a0);
  const double m2 = lam * mu * (s.xbar_2b2 - p.a0);
  const double x1 = s.xbar1;
  const double x2 = s.xbar2;
  const double xt = s.xtilde;

  ShapeStateII_III d;
  d.xbar1 = -n1 * (1.0 - x1 * x1) - m1 * (c.d1 - s.xbar_1b1 * x1) +
            (1.0 - xt - x1 * x1 - x1 * x2) / s.rho;
  d.xbar2 = -n2 * (1.0 - x2 * x2) - m2 * (-c.d2 - s.xbar_2b2 * x2) +
            (1.0 - xt - x2 * x2 - x1 * x2) / s.rho;
  d.xbar_1b1 = -n1 * (c.d1 - s.xbar_1b1 * x1) -
               (m1 - 1.0 / s.rho_1b1) * (1.0 - s.xbar_1b1 * s.xbar_1b1);
  d.xbar_2b2 = -n2 * (-c.d2 - s.xbar_2b2 * x2) -
               (m2 - 1.0 / s.rho_2b2) * (1.0 - s.xbar_2b2 * s.xbar_2b2);
  d.xtilde = n1 * (x2 + xt * x1) + n2 * (x1 + xt * x2) - m1 * (c.e1 - s.xbar_1b1 * xt) -
             m2 * (c.e2 - s.xbar_2b2 * xt);
  d.rho = x1 + x2;
  d.rho_1b1 = s.xbar_1b1;
  d.rho_2b2 = s.xbar_2b2;
  d.rhat1 = s.xhat1;
  d.rhat2 = s.xhat2;
  const double g1 = n1 * x1 + m1 * s.xbar_1b1;
  const double g2 = n2 * x2 + m2 * s.xbar_2b2;
  const double dr = s.rhat1 - s.rhat2;
  d.xhat1 = -n1 / s.rho * dr - m1 / s.rho_1b1 * (s.rhat1 + b2) + g1 * s.xhat1;
  d.xhat2 = n2 / s.rho * dr - m2 / s.rho_2b2 * (s.rhat2 - b2) + g2 * s.xhat2;
  return d;
}

}  // namespace cbp
