#include "cbp/sweep.hpp"

#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <set>

#include "cbp/io.hpp"

namespace cbp {

using nlohmann::json;

namespace {

std::vector<double> number_list(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.empty()) {
    throw ParameterError(fmt::format("grid: '{}' must be a non-empty array", key));
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ParameterError(fmt::format("grid: '{}' entries must be numbers", key));
    out.push_back(x.get<double>());
  }
  return out;
}

double* axis_target(Scenario& s, const std::string& name) {
  ControlParams& p = s.params;
  if (name == "mu") return &p.mu;
  if (name == "lambda") return &p.lambda;
  if (name == "a") return &p.a;
  if (name == "a0") return &p.a0;
  if (name == "ab1") return &p.ab1;
  if (name == "ab2") return &p.ab2;
  if (name == "b") return &p.b;
  if (name == "dt") return &s.dt;
  if (name == "t_final") return &s.t_final;
  return nullptr;
}

}  // namespace

ResidualGrid residual_grid_from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("grid: document must be a JSON object");
  ResidualGrid g;
  for (const auto& [key, _] : j.items()) {
    if (key == "mu") g.mu = number_list(j, "mu");
    else if (key == "lambda") g.lambda = number_list(j, "lambda");
    else if (key == "cb") g.cb = number_list(j, "cb");
    else if (key == "b") g.b = number_list(j, "b");
    else if (key == "equality_points") g.equality_points = j.at(key).get<bool>();
    else throw ParameterError(fmt::format("grid: unknown key '{}'", key));
  }
  return g;
}

std::vector<GridPoint> expand(const ResidualGrid& g) {
  std::vector<GridPoint> out;
  for (double mu : g.mu) {
    for (double lam : g.lambda) {
      std::vector<std::pair<double, double>> pairs;
      for (double x : g.cb) {
        for (double y : g.cb) pairs.emplace_back(x, y);
      }
      // (x, y) with lambda*x = (1-lambda)*y, and the mirrored (y, x) form for
      // (1-lambda)*a = lambda*a0.
      std::vector<std::pair<double, double>> eq_I, eq_III;
      if (g.equality_points) {
        const std::set<double> on_grid(g.cb.begin(), g.cb.end());
        for (double x : g.cb) {
          const double y = lam * x / (1.0 - lam);
          if (x == 0.0 || std::abs(y) > 1.0 || on_grid.contains(y)) continue;
          eq_I.emplace_back(x, y);
          eq_III.emplace_back(y, x);
        }
      }
      for (double b : g.b) {
        ControlParams p;
        p.mu = mu;
        p.lambda = lam;
        p.b = b;
        if (b == 0.0) {
          for (auto [a, a0] : pairs) {
            p.a = a;
            p.a0 = a0;
            out.push_back({ConfigType::II, p});
          }
          continue;
        }
        auto add_I = [&](double ab1, double ab2) {
          ControlParams q = p;
          q.ab1 = ab1;
          q.ab2 = ab2;
          out.push_back({ConfigType::I, q});
        };
        auto add_III = [&](double a, double a0) {
          ControlParams q = p;
          q.a = a;
          q.a0 = a0;
          out.push_back({ConfigType::III, q});
        };
        for (auto [x, y] : pairs) add_I(x, y);
        for (auto [x, y] : eq_I) add_I(x, y);
        for (auto [x, y] : pairs) add_III(x, y);
        for (auto [x, y] : eq_III) add_III(x, y);
      }
    }
  }
  return out;
}

VerifySummary verify_grid(const ResidualGrid& g, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  const auto points = expand(g);

  struct PointResult {
    std::vector<std::pair<std::string, double>> residuals;
    std::vector<std::string> failures;
  };
  const auto results = parallel_map<PointResult>(
      points.size(),
      [&](std::size_t i) {
        PointResult r;
        const GridPoint& pt = points[i];
        const auto where = [&] {
          const ControlParams& p = pt.params;
          return fmt::format("config {} mu={} lambda={} a={} a0={} ab1={} ab2={} b={}",
                             to_string(pt.config), p.mu, p.lambda, p.a, p.a0, p.ab1, p.ab2, p.b);
        };
        try {
          for (const auto& pred : predict(pt.config, pt.params)) {
            if (!pred.exists) continue;
            const std::string label = to_string(pred.label);
            try {
              const ResidualReport rep = residual(pred, pt.params);
              r.residuals.emplace_back(label, rep.max_abs_derivative);
              if (!rep.pass) {
                r.failures.push_back(fmt::format("{} at {}: residual {:.3g} >= {:.3g}", label,
                                                 where(), rep.max_abs_derivative, rep.tolerance));
              }
            } catch (const Error& e) {
              r.residuals.emplace_back(label, std::numeric_limits<double>::infinity());
              r.failures.push_back(fmt::format("{} at {}: {}", label, where(), e.what()));
            }
          }
        } catch (const Error& e) {
          r.failures.push_back(fmt::format("{}: {}", where(), e.what()));
        }
        return r;
      },
      threads);

  VerifySummary v;
  v.parameter_sets = points.size();
  for (const auto& r : results) {
    if (!r.residuals.empty()) ++v.parameter_sets_with_case;
    for (const auto& [label, res] : r.residuals) {
      ++v.predictions_checked;
      ++v.per_case_count[label];
      double& worst = v.per_case_max_residual[label];
      worst = std::max(worst, res);
    }
    v.failures.insert(v.failures.end(), r.failures.begin(), r.failures.end());
  }
  v.pass = v.failures.empty() && v.predictions_checked > 0;
  v.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return v;
}

json to_json(const VerifySummary& v) {
  json cases = json::object();
  for (const auto& [label, n] : v.per_case_count) {
    cases[label] = {{"count", n}, {"max_residual", v.per_case_max_residual.at(label)}};
  }
  return {{"pass", v.pass},
          {"parameter_sets", v.parameter_sets},
          {"parameter_sets_with_case", v.parameter_sets_with_case},
          {"predictions_checked", v.predictions_checked},
          {"cases", cases},
          {"failures", v.failures},
          {"seconds", v.seconds}};
}

std::vector<AgentSpec> perturbed_start(const EquilibriumPrediction& pred, const ControlParams& p,
                                       double perturb) {
  auto agents = realize(pred, p);
  agents[0].position.x *= 1.0 + perturb;
  return agents;
}

SweepSpec sweep_from_json(const json& j) {
  if (!j.is_object() || !j.contains("base")) throw ParameterError("sweep: needs a 'base' scenario");
  SweepSpec s;
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> known = {"base", "axes", "start_near", "window",
                                                "tol",  "compare_tol", "write_csv"};
    if (!known.contains(key)) throw ParameterError(fmt::format("sweep: unknown key '{}'", key));
  }
  const bool generated = j.contains("start_near");
  s.base = scenario_from_json(j.at("base"), !generated);
  if (j.contains("axes")) {
    Scenario probe = s.base;
    for (const auto& [name, values] : j.at("axes").items()) {
      if (!axis_target(probe, name)) throw ParameterError(fmt::format("sweep: unknown axis '{}'", name));
      s.axes.emplace_back(name, number_list(j.at("axes"), name.c_str()));
    }
  }
  if (generated) {
    const json& sn = j.at("start_near");
    s.start_case = case_from_string(sn.at("case").get<std::string>());
    if (config_of(*s.start_case) != s.base.config) {
      throw ParameterError("sweep: start_near case belongs to a different configuration");
    }
    s.perturb = sn.value("perturb", s.perturb);
    if (sn.contains("family_value")) s.family_value = sn.at("family_value").get<double>();
  }
  s.window = j.value("window", s.window);
  s.tol = j.value("tol", s.tol);
  s.compare_tol = j.value("compare_tol", s.compare_tol);
  s.write_csv = j.value("write_csv", s.write_csv);
  return s;
}

std::vector<SweepResult> run_sweep(const SweepSpec& spec,
                                   const std::optional<std::filesystem::path>& csv_dir,
                                   unsigned threads) {
  std::size_t total = 1;
  for (const auto& [_, values] : spec.axes) total *= values.size();

  return parallel_map<SweepResult>(
      total,
      [&](std::size_t index) {
        SweepResult r;
        r.index = index;
        r.scenario = spec.base;
        std::size_t rest = index;
        for (auto it = spec.axes.rbegin(); it != spec.axes.rend(); ++it) {
          *axis_target(r.scenario, it->first) = it->second[rest % it->second.size()];
          rest /= it->second.size();
        }
        try {
          std::optional<EquilibriumPrediction> target;
          const ControlParams& p = r.scenario.params;
          p.validate();
          const auto preds = predict(r.scenario.config, p);
          if (spec.start_case) {
            for (const auto& e : preds) {
              if (e.label == *spec.start_case) target = e;
            }
            if (!target || !target->exists) {
              r.status = "no_prediction";
              r.message = target ? target->reason : "case not reported";
              r.report = {{"scenario", scenario_to_json(r.scenario)}, {"message", r.message}};
              return r;
            }
            // Family members are neutral, so the comparison keeps the family free.
            EquilibriumPrediction member = *target;
            if (target->is_family()) {
              const double v = spec.family_value.value_or(
                  target->label == CaseLabel::P4_1 ? 2.0 * target->family_min : -p.b);
              member = instantiate_family(*target, p, v);
            }
            r.scenario.agents = perturbed_start(member, p, spec.perturb);
          }
          const Trajectory traj = simulate(r.scenario);
          r.report["scenario"] = scenario_to_json(r.scenario);
          if (spec.write_csv && csv_dir) {
            write_trajectory_csv(traj, r.scenario, *csv_dir / fmt::format("run_{:04d}.csv", index));
          }
          if (traj.aborted) {
            r.status = "aborted";
            r.message = traj.abort_reason;
            r.report["message"] = r.message;
            return r;
          }
          const ConvergenceReport conv = detect_convergence(traj, r.scenario, spec.window, spec.tol);
          r.report["convergence"] = to_json(conv);
          if (!conv.converged) {
            r.status = "not_converged";
            r.message = fmt::format("window deviation {:.3g} in {}", conv.window_max_dev,
                                    conv.worst_component);
            return r;
          }
          std::optional<ComparisonReport> cmp;
          if (target) {
            cmp = compare(conv, *target, spec.compare_tol);
          } else {
            cmp = compare_best(conv, preds, spec.compare_tol);
          }
          if (!cmp) {
            r.status = "no_prediction";
            r.message = "no equilibrium predicted for these parameters";
            return r;
          }
          r.report["comparison"] = to_json(*cmp);
          r.status = cmp->pass ? "ok" : "mismatch";
          if (!cmp->pass) r.message = fmt::format("{}", fmt::join(cmp->failures, ", "));
        } catch (const Error& e) {
          r.status = "error";
          r.message = e.what();
          r.report["message"] = r.message;
        }
        return r;
      },
      threads);
}

json sweep_summary(const std::vector<SweepResult>& results) {
  json runs = json::array();
  std::map<std::string, std::size_t> counts;
  for (const auto& r : results) {
    ++counts[r.status];
    json entry = r.report;
    entry["index"] = r.index;
    entry["status"] = r.status;
    if (!r.message.empty()) entry["message"] = r.message;
    runs.push_back(std::move(entry));
  }
  return {{"runs", runs}, {"status_counts", counts}};
}

}  // namespace cbp
