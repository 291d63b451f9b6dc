#include "cbp/control_laws.hpp"

#include <cmath>
#include <string>

namespace cbp {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ParameterError("invalid control parameters: " + what);
  }
}

bool is_offset(double c) { return std::isfinite(c) && c >= -1.0 && c <= 1.0; }

}  // namespace

void ControlParams::validate() const {
  require(std::isfinite(mu) && mu > 0.0, "mu must be > 0");
  require(std::isfinite(lambda) && lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
  require(is_offset(a), "a must lie in [-1, 1]");
  require(is_offset(a0), "a0 must lie in [-1, 1]");
  require(is_offset(ab1), "ab1 must lie in [-1, 1]");
  require(is_offset(ab2), "ab2 must lie in [-1, 1]");
  require(std::isfinite(b) && b >= 0.0, "b must be >= 0");
}

SteeringCommand cb_control(const AgentState& agent, const Vec3& target_pos, double a, double mu) {
  const Vec3 d = unit(agent.position - target_pos);
  const double gain = -mu * (dot(agent.frame.x_axis, d) - a);
  return {gain * dot(agent.frame.y_axis, d), gain * dot(agent.frame.z_axis, d)};
}

SteeringCommand beacon_referenced_control(const AgentState& agent, const Vec3& other_pos,
                                          const Vec3& beacon_pos, const ControlParams& p) {
  return (1.0 - p.lambda) * cb_control(agent, other_pos, p.a, p.mu) +
         p.lambda * cb_control(agent, beacon_pos, p.a0, p.mu);
}

SteeringCommand two_beacon_control(const AgentState& agent, const Vec3& beacon1,
                                   const Vec3& beacon2, const ControlParams& p) {
  return (1.0 - p.lambda) * cb_control(agent, beacon2, p.ab2, p.mu) +
         p.lambda * cb_control(agent, beacon1, p.ab1, p.mu);
}

}  // namespace cbp
