#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbp/control_laws.hpp"
#include "cbp/geometry.hpp"
#include "cbp/shape_space.hpp"

namespace cbp {

// I: one agent steering between two beacons.
// II: two agents, one beacon at the origin (b = 0).
// III: two agents, agent i referencing beacon i (b > 0).
enum class ConfigType { I, II, III };

std::string to_string(ConfigType c);
ConfigType config_from_string(const std::string& s);
inline std::size_t agent_count(ConfigType c) { return c == ConfigType::I ? 1 : 2; }

// Initial condition of one agent. The frame is derived from the heading with
// frame_from_heading.
struct AgentSpec {
  Vec3 position;
  Vec3 heading{1.0, 0.0, 0.0};

  AgentState to_state() const { return {position, frame_from_heading(heading)}; }

  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

inline constexpr double kDefaultDt = 1e-3;
inline constexpr double kDefaultTFinal = 200.0;
inline constexpr std::size_t kMaxSnapshots = 20000;
inline constexpr double kSingularityDistance = 1e-6;

struct Scenario {
  ConfigType config = ConfigType::II;
  ControlParams params;
  std::vector<AgentSpec> agents;
  double dt = kDefaultDt;
  double t_final = kDefaultTFinal;
  // 0 selects the smallest stride that keeps at most kMaxSnapshots records.
  std::int64_t record_stride = 0;
  std::optional<std::uint64_t> seed;

  // Throws ParameterError on any violated scenario invariant.
  void validate() const;

  std::int64_t step_count() const;
  std::int64_t effective_stride() const;
  std::vector<AgentState> initial_states() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct AgentDerivative {
  Vec3 dr;
  Vec3 dx;
  Vec3 dy;
  Vec3 dz;
};

// Steering of every agent under the configuration's control law.
std::vector<SteeringCommand> controls(const std::vector<AgentState>& agents, const Scenario& s);

// Frenet kinematics under given steering: r' = x, x' = u y + v z, y' = -u x, z' = -v x.
std::vector<AgentDerivative> derivative(const std::vector<AgentState>& agents,
                                        const std::vector<SteeringCommand>& commands);
std::vector<AgentDerivative> derivative(const std::vector<AgentState>& agents, const Scenario& s);

// Smallest agent-agent or agent-beacon distance that enters the control law.
double min_separation(const std::vector<AgentState>& agents, const Scenario& s);

ShapeState extract_shape(const std::vector<AgentState>& agents, const Scenario& s);

struct StepResult {
  std::vector<AgentState> agents;
  // orthonormality_error of the raw RK4 frames, i.e. the drift that was removed.
  double frame_drift = 0.0;
};

using ControlFn = std::function<std::vector<SteeringCommand>(const std::vector<AgentState>&)>;

// One classical RK4 step followed by orthonormalize on every frame.
StepResult step(const std::vector<AgentState>& agents, const ControlFn& control, double dt);
StepResult step(const std::vector<AgentState>& agents, const Scenario& s, double dt);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<AgentState>> states;
  std::vector<ShapeState> shapes;
  std::vector<std::vector<SteeringCommand>> controls;
  bool aborted = false;
  std::string abort_reason;
  double max_frame_drift = 0.0;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
};

// Fixed-step run from t = 0 to step_count()*dt. On a singularity the
// trajectory is truncated at the last good snapshot and flagged.
Trajectory simulate(const Scenario& s);

}  // namespace cbp
