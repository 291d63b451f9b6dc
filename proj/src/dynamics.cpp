#include "cbp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace cbp {

std::string to_string(ConfigType c) {
  switch (c) {
    case ConfigType::I:
      return "I";
    case ConfigType::II:
      return "II";
    case ConfigType::III:
      return "III";
  }
  return "?";
}

ConfigType config_from_string(const std::string& s) {
  if (s == "I") return ConfigType::I;
  if (s == "II") return ConfigType::II;
  if (s == "III") return ConfigType::III;
  throw ParameterError(fmt::format("unknown config_type '{}' (expected I, II or III)", s));
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError("invalid scenario: " + what);
}

// Beacon referenced by agent i (configurations II and III).
Vec3 own_beacon(std::size_t i, double b) {
  return i == 0 ? beacon1_position(b) : beacon2_position(b);
}

std::vector<AgentState> axpy(const std::vector<AgentState>& base,
                             const std::vector<AgentDerivative>& k, double h) {
  std::vector<AgentState> out = base;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].position += h * k[i].dr;
    out[i].frame.x_axis += h * k[i].dx;
    out[i].frame.y_axis += h * k[i].dy;
    out[i].frame.z_axis += h * k[i].dz;
  }
  return out;
}

}  // namespace

void Scenario::validate() const {
  params.validate();
  require(agents.size() == agent_count(config),
          fmt::format("config {} needs {} agent(s), got {}", to_string(config),
                      agent_count(config), agents.size()));
  if (config == ConfigType::II) require(params.b == 0.0, "config II requires b = 0");
  if (config == ConfigType::III) require(params.b > 0.0, "config III requires b > 0");
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  require(std::isfinite(t_final) && t_final >= 0.0, "t_final must be >= 0");
  require(record_stride >= 0, "record_stride must be >= 1 (or 0 for automatic)");
  for (const auto& a : agents) {
    require(is_finite(a.position) && is_finite(a.heading), "agent vectors must be finite");
    require(norm(a.heading) > kDegeneracyThreshold, "agent heading must be nonzero");
  }
  const double sep = min_separation(initial_states(), *this);
  require(sep >= kSingularityDistance,
          fmt::format("initial agents collocated with a beacon or each other (separation {:.3g})",
                      sep));
}

std::int64_t Scenario::step_count() const {
  return static_cast<std::int64_t>(std::ceil(t_final / dt - 1e-9));
}

std::int64_t Scenario::effective_stride() const {
  if (record_stride > 0) return record_stride;
  const std::int64_t snapshots = step_count() + 1;
  return std::max<std::int64_t>(
      1, (snapshots + static_cast<std::int64_t>(kMaxSnapshots) - 1) /
             static_cast<std::int64_t>(kMaxSnapshots));
}

std::vector<AgentState> Scenario::initial_states() const {
  std::vector<AgentState> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.to_state());
  return out;
}

std::vector<SteeringCommand> controls(const std::vector<AgentState>& agents, const Scenario& s) {
  const ControlParams& p = s.params;
  if (s.config == ConfigType::I) {
    return {two_beacon_control(agents[0], beacon1_position(p.b), beacon2_position(p.b), p)};
  }
  return {beacon_referenced_control(agents[0], agents[1].position, own_beacon(0, p.b), p),
          beacon_referenced_control(agents[1], agents[0].position, own_beacon(1, p.b), p)};
}

std::vector<AgentDerivative> derivative(const std::vector<AgentState>& agents, const Scenario& s) {
  return derivative(agents, controls(agents, s));
}

std::vector<AgentDerivative> derivative(const std::vector<AgentState>& agents,
                                        const std::vector<SteeringCommand>& cmd) {
  std::vector<AgentDerivative> out(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const Frame& f = agents[i].frame;
    out[i].dr = f.x_axis;
    out[i].dx = cmd[i].u * f.y_axis + cmd[i].v * f.z_axis;
    out[i].dy = -cmd[i].u * f.x_axis;
    out[i].dz = -cmd[i].v * f.x_axis;
  }
  return out;
}

double min_separation(const std::vector<AgentState>& agents, const Scenario& s) {
  const double b = s.params.b;
  if (s.config == ConfigType::I) {
    return std::min(norm(agents[0].position - beacon1_position(b)),
                    norm(agents[0].position - beacon2_position(b)));
  }
  return std::min({norm(agents[0].position - agents[1].position),
                   norm(agents[0].position - own_beacon(0, b)),
                   norm(agents[1].position - own_beacon(1, b))});
}

ShapeState extract_shape(const std::vector<AgentState>& agents, const Scenario& s) {
  if (s.config == ConfigType::I) return extract_shape_I(agents[0], s.params.b);
  return extract_shape_II_III(agents, s.params.b);
}

StepResult step(const std::vector<AgentState>& agents, const Scenario& s, double dt) {
  return step(agents, [&s](const std::vector<AgentState>& a) { return controls(a, s); }, dt);
}

StepResult step(const std::vector<AgentState>& agents, const ControlFn& control, double dt) {
  auto f = [&control](const std::vector<AgentState>& a) { return derivative(a, control(a)); };
  const auto k1 = f(agents);
  const auto k2 = f(axpy(agents, k1, dt / 2));
  const auto k3 = f(axpy(agents, k2, dt / 2));
  const auto k4 = f(axpy(agents, k3, dt));
  StepResult r{agents, 0.0};
  for (std::size_t i = 0; i < agents.size(); ++i) {
    auto blend = [&](Vec3 AgentDerivative::*m) {
      return (dt / 6) * (k1[i].*m + 2.0 * k2[i].*m + 2.0 * k3[i].*m + k4[i].*m);
    };
    AgentState& a = r.agents[i];
    a.position += blend(&AgentDerivative::dr);
    a.frame.x_axis += blend(&AgentDerivative::dx);
    a.frame.y_axis += blend(&AgentDerivative::dy);
    a.frame.z_axis += blend(&AgentDerivative::dz);
    r.frame_drift = std::max(r.frame_drift, orthonormality_error(a.frame));
    a.frame = orthonormalize(a.frame);
  }
  return r;
}

Trajectory simulate(const Scenario& s) {
  s.validate();
  Trajectory traj;
  const std::int64_t n = s.step_count();
  const std::int64_t stride = s.effective_stride();
  std::vector<AgentState> agents = s.initial_states();
  bool drift_warned = false;

  auto record = [&](std::int64_t k) {
    traj.times.push_back(static_cast<double>(k) * s.dt);
    traj.states.push_back(agents);
    traj.shapes.push_back(extract_shape(agents, s));
    traj.controls.push_back(controls(agents, s));
  };

  record(0);
  for (std::int64_t k = 1; k <= n; ++k) {
    try {
      StepResult r = step(agents, s, s.dt);
      const double sep = min_separation(r.agents, s);
      if (sep < kSingularityDistance) {
        traj.aborted = true;
        traj.abort_reason =
            fmt::format("separation {:.3g} below {:g} at t = {:.17g}", sep, kSingularityDistance,
                        static_cast<double>(k) * s.dt);
        break;
      }
      traj.max_frame_drift = std::max(traj.max_frame_drift, r.frame_drift);
      if (!drift_warned && s.dt <= 1e-2 && r.frame_drift >= 1e-10) {
        drift_warned = true;
        traj.warnings.push_back(fmt::format("frame drift {:.3g} removed at t = {:.17g}",
                                            r.frame_drift, static_cast<double>(k) * s.dt));
      }
      agents = std::move(r.agents);
    } catch (const DegenerateVector& e) {
      traj.aborted = true;
      traj.abort_reason = fmt::format("degenerate geometry at t = {:.17g}: {}",
                                      static_cast<double>(k) * s.dt, e.what());
      break;
    } catch (const DegenerateFrame& e) {
      traj.aborted = true;
      traj.abort_reason = fmt::format("degenerate frame at t = {:.17g}: {}",
                                      static_cast<double>(k) * s.dt, e.what());
      break;
    }
    if (k % stride == 0) record(k);
  }
  return traj;
}

}  // namespace cbp
