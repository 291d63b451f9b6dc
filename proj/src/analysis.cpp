#include "cbp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "cbp/io.hpp"

namespace cbp {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ShapeState shape_like(const ShapeState& proto, const std::vector<double>& v) {
  if (std::holds_alternative<ShapeStateI>(proto)) {
    std::array<double, ShapeStateI::kSize> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return ShapeStateI::from_array(a);
  }
  std::array<double, ShapeStateII_III::kSize> a{};
  std::copy(v.begin(), v.end(), a.begin());
  return ShapeStateII_III::from_array(a);
}

// JSON has no NaN; undefined values are written as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ConvergenceReport detect_convergence(const Trajectory& traj, const Scenario& s, double window,
                                     double tol) {
  if (traj.size() < 2 || traj.times.back() - traj.times.front() < 2.0 * window) {
    throw TooShort(fmt::format("trajectory spans {:.6g}, convergence window needs {:.6g}",
                               traj.size() ? traj.times.back() - traj.times.front() : 0.0,
                               2.0 * window));
  }
  ConvergenceReport r;
  r.window = window;
  r.tol = tol;
  const std::size_t n = traj.size();
  const double t_end = traj.times.back();
  std::size_t first = n - 1;
  while (first > 0 && traj.times[first - 1] >= t_end - window) --first;
  const std::size_t count = n - first;

  const auto names = shape_names(traj.shapes.front());
  const std::size_t m = names.size();
  std::vector<double> mean(m, 0.0);
  for (std::size_t k = first; k < n; ++k) {
    const auto v = shape_values(traj.shapes[k]);
    for (std::size_t i = 0; i < m; ++i) mean[i] += v[i];
  }
  for (auto& x : mean) x /= static_cast<double>(count);

  auto deviation = [&](std::size_t k, std::size_t* worst) {
    const auto v = shape_values(traj.shapes[k]);
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = std::abs(v[i] - mean[i]);
      if (!(e <= d)) {
        d = e;
        if (worst) *worst = i;
      }
    }
    return d;
  };

  r.window_max_dev = 0.0;
  std::size_t worst = 0;
  for (std::size_t k = first; k < n; ++k) {
    std::size_t w = 0;
    const double d = deviation(k, &w);
    if (!(d <= r.window_max_dev)) {
      r.window_max_dev = d;
      worst = w;
    }
  }
  r.worst_component = std::string(names[worst]);
  r.converged = r.window_max_dev < tol;
  if (r.converged) {
    std::size_t k = first;
    while (k > 0 && deviation(k - 1, nullptr) < tol) --k;
    r.settle_time = traj.times[k];
  } else {
    r.settle_time = kNaN;
  }
  r.steady_shape = shape_like(traj.shapes.front(), mean);

  const auto costs = snapshot_cb_costs(traj.shapes.back(), s);
  double sum_cost = 0.0;
  for (double c : costs) sum_cost += c;
  r.cb_cost_final = sum_cost / static_cast<double>(costs.size());

  const std::size_t agents = traj.states.front().size();
  double curvature = 0.0;
  double z = 0.0;
  for (std::size_t k = first; k < n; ++k) {
    for (std::size_t i = 0; i < agents; ++i) {
      const auto& c = traj.controls[k][i];
      curvature += std::hypot(c.u, c.v);
    }
    z += traj.states[k][0].position.z;
  }
  curvature /= static_cast<double>(count * agents);
  r.observed_radius = curvature > 0 ? 1.0 / curvature : std::numeric_limits<double>::infinity();
  r.observed_vertical_offset =
      s.config == ConfigType::II ? kNaN : z / static_cast<double>(count);
  return r;
}

ComparisonReport compare(const ConvergenceReport& observed, const EquilibriumPrediction& pred,
                         double tol) {
  if (!observed.converged) {
    throw NotConverged(fmt::format("no steady state: window deviation {:.3g} in {} (tol {:.3g})",
                                   observed.window_max_dev, observed.worst_component,
                                   observed.tol));
  }
  if (!pred.exists) {
    throw ParameterError(fmt::format("{} does not exist: {}", to_string(pred.label), pred.reason));
  }
  if (pred.shape.index() != observed.steady_shape.index()) {
    throw ParameterError("prediction and trajectory belong to different configurations");
  }
  ComparisonReport r;
  r.prediction = pred;
  r.observed = observed;
  r.tol = tol;

  std::vector<std::pair<std::string, std::pair<double, double>>> q;  // name, (pred, obs)
  if (const auto* p1 = std::get_if<ShapeStateI>(&pred.shape)) {
    const auto& o = std::get<ShapeStateI>(observed.steady_shape);
    q = {{"rho_1b1", {p1->rho_1b1, o.rho_1b1}}, {"rho_1b2", {p1->rho_1b2, o.rho_1b2}}};
  } else {
    const auto& p2 = std::get<ShapeStateII_III>(pred.shape);
    const auto& o = std::get<ShapeStateII_III>(observed.steady_shape);
    q = {{"rho", {p2.rho, o.rho}},
         {"rho_1b1", {p2.rho_1b1, o.rho_1b1}},
         {"rho_2b2", {p2.rho_2b2, o.rho_2b2}},
         {"xtilde", {p2.xtilde, o.xtilde}},
         {"rhat1", {p2.rhat1, o.rhat1}}};
  }
  q.push_back({"radius", {pred.radius, observed.observed_radius}});
  q.push_back({"vertical_offset", {pred.vertical_offset, observed.observed_vertical_offset}});

  r.pass = true;
  for (const auto& [name, po] : q) {
    const auto [p, o] = po;
    if (std::isnan(p)) {
      r.skipped.push_back(name);
      continue;
    }
    const double err = std::abs(o - p) / std::max(std::abs(p), 1.0);
    r.per_quantity_rel_error.emplace_back(name, err);
    if (!(err < tol)) {
      r.pass = false;
      r.failures.push_back(name);
    }
  }
  return r;
}

std::optional<ComparisonReport> compare_best(const ConvergenceReport& observed,
                                             const std::vector<EquilibriumPrediction>& preds,
                                             double tol) {
  std::optional<ComparisonReport> best;
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto& p : preds) {
    if (!p.exists) continue;
    ComparisonReport r = compare(observed, p, tol);
    double worst = 0.0;
    for (const auto& [_, e] : r.per_quantity_rel_error) worst = std::max(worst, e);
    if (!best || worst < best_err) {
      best_err = worst;
      best = std::move(r);
    }
  }
  return best;
}

json to_json(const ShapeState& s) {
  json j = json::object();
  const auto names = shape_names(s);
  const auto values = shape_values(s);
  for (std::size_t i = 0; i < names.size(); ++i) j[std::string(names[i])] = num(values[i]);
  return j;
}

json to_json(const EquilibriumPrediction& e) {
  json j;
  j["case"] = to_string(e.label);
  j["exists"] = e.exists;
  if (!e.reason.empty()) j["reason"] = e.reason;
  if (e.exists) {
    j["shape"] = to_json(e.shape);
    j["radius"] = num(e.radius);
    j["vertical_offset"] = num(e.vertical_offset);
    if (!std::isnan(e.rho_plus)) j["rho_plus"] = e.rho_plus;
    if (!std::isnan(e.rho_minus)) j["rho_minus"] = e.rho_minus;
    if (!std::isnan(e.phi)) j["phi"] = e.phi;
    if (e.is_family()) {
      j["family"] = e.family;
      j["family_parameter"] = e.family_parameter;
      j["family_min"] = num(e.family_min);
    }
  }
  return j;
}

json to_json(const ResidualReport& r) {
  json comps = json::object();
  for (const auto& [n, v] : r.per_component) comps[n] = num(v);
  return {{"max_abs_derivative", num(r.max_abs_derivative)},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"per_component", comps}};
}

json to_json(const ConvergenceReport& r) {
  return {{"converged", r.converged},
          {"settle_time", num(r.settle_time)},
          {"window", r.window},
          {"tol", r.tol},
          {"window_max_dev", num(r.window_max_dev)},
          {"worst_component", r.worst_component},
          {"cb_cost_final", num(r.cb_cost_final)},
          {"steady_shape", to_json(r.steady_shape)},
          {"observed_radius", num(r.observed_radius)},
          {"observed_vertical_offset", num(r.observed_vertical_offset)}};
}

json to_json(const ComparisonReport& r) {
  json errs = json::object();
  for (const auto& [n, v] : r.per_quantity_rel_error) errs[n] = num(v);
  return {{"pass", r.pass},
          {"tol", r.tol},
          {"prediction", to_json(r.prediction)},
          {"observed", to_json(r.observed)},
          {"rel_error", errs},
          {"skipped", r.skipped},
          {"failures", r.failures}};
}

}  // namespace cbp
