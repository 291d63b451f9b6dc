#pragma once

#include "cbp/geometry.hpp"

namespace cbp {

// Gains and constant-bearing offsets of the beacon-referenced pursuit law.
//
// `a` is the offset toward the neighbouring agent and `a0` toward the agent's
// own beacon (two-agent configurations). A single agent steering between two
// beacons uses `ab1`/`ab2` instead. Beacons sit at (0,0,-b) and (0,0,b).
struct ControlParams {
  double mu = 1.0;
  double lambda = 0.5;
  double a = 0.0;
  double a0 = 0.0;
  double ab1 = 0.0;
  double ab2 = 0.0;
  double b = 0.0;

  // Throws ParameterError unless mu > 0, 0 < lambda < 1, every offset lies in
  // [-1, 1] and b >= 0 (all finite).
  void validate() const;

  friend bool operator==(const ControlParams&, const ControlParams&) = default;
};

// Natural curvatures (u, v) applied to the y and z axes of the agent frame.
struct SteeringCommand {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const SteeringCommand&, const SteeringCommand&) = default;
};

inline SteeringCommand operator+(const SteeringCommand& p, const SteeringCommand& q) {
  return {p.u + q.u, p.v + q.v};
}
inline SteeringCommand operator*(double s, const SteeringCommand& c) { return {s * c.u, s * c.v}; }

// Simplified constant-bearing law toward one target:
//   u = -mu (x.d - a)(y.d),  v = -mu (x.d - a)(z.d),  d = unit(agent - target).
// Bearing-only: the result does not depend on the target distance.
SteeringCommand cb_control(const AgentState& agent, const Vec3& target_pos, double a, double mu);

// (1 - lambda) * CB(a) toward the other agent + lambda * CB(a0) toward the beacon.
SteeringCommand beacon_referenced_control(const AgentState& agent, const Vec3& other_pos,
                                          const Vec3& beacon_pos, const ControlParams& p);

// Single agent, two beacons: (1 - lambda) * CB(ab2) toward beacon 2 +
// lambda * CB(ab1) toward beacon 1.
SteeringCommand two_beacon_control(const AgentState& agent, const Vec3& beacon1,
                                   const Vec3& beacon2, const ControlParams& p);

}  // namespace cbp
