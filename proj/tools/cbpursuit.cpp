// cbpursuit: simulate, predict and verify beacon-referenced CB pursuit.
//
// Exit codes: 0 success, 1 validation error, 2 runtime singularity,
// 3 verification failure.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <iostream>

#include "cbp/analysis.hpp"
#include "cbp/io.hpp"
#include "cbp/sweep.hpp"

using namespace cbp;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kSingularity = 2;
constexpr int kVerification = 3;

std::string fmt_num(double v) { return std::isfinite(v) ? fmt::format("{:.10g}", v) : "-"; }

void print_prediction(const EquilibriumPrediction& e) {
  if (!e.exists) {
    fmt::print("{:<12} no   ({})\n", to_string(e.label), e.reason);
    return;
  }
  fmt::print("{:<12} yes\n", to_string(e.label));
  const auto names = shape_names(e.shape);
  const auto values = shape_values(e.shape);
  for (std::size_t i = 0; i < names.size(); ++i) {
    fmt::print("    {:<16} {}\n", names[i], std::isnan(values[i]) ? "family" : fmt_num(values[i]));
  }
  fmt::print("    {:<16} {}\n", "radius", fmt_num(e.radius));
  fmt::print("    {:<16} {}\n", "vertical_offset",
             e.is_family() && std::isnan(e.vertical_offset) && config_of(e.label) == ConfigType::III
                 ? "family"
                 : fmt_num(e.vertical_offset));
  if (!std::isnan(e.rho_plus)) fmt::print("    {:<16} {}\n", "rho_plus", fmt_num(e.rho_plus));
  if (!std::isnan(e.rho_minus)) fmt::print("    {:<16} {}\n", "rho_minus", fmt_num(e.rho_minus));
  if (!std::isnan(e.phi)) fmt::print("    {:<16} {}\n", "phi", fmt_num(e.phi));
  if (e.is_family()) {
    fmt::print("    family parameter {} (>= {})\n", e.family_parameter, fmt_num(e.family_min));
  }
}

// Scenario whose agents may be absent: only the parameters are needed.
Scenario load_params_only(const fs::path& path) {
  Scenario s = scenario_from_json(load_json(path), false);
  s.params.validate();
  return s;
}

int cmd_simulate(const fs::path& in, const fs::path& out) {
  const Scenario s = load_scenario(in);
  const Trajectory t = simulate(s);
  write_trajectory_csv(t, s, out);
  for (const auto& w : t.warnings) fmt::print(stderr, "warning: {}\n", w);
  fmt::print("{} snapshots written to {}\n", t.size(), out.string());
  if (t.aborted) {
    fmt::print(stderr, "singularity: {}\n", t.abort_reason);
    return kSingularity;
  }
  return kOk;
}

int cmd_predict(const fs::path& in, bool as_json, const std::string& emit_case, double perturb,
                std::optional<double> family_value, const fs::path& out) {
  Scenario s = load_params_only(in);
  const auto preds = predict(s.config, s.params);
  if (emit_case.empty()) {
    if (as_json) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& e : preds) j.push_back(to_json(e));
      std::cout << j.dump(2) << '\n';
    } else {
      const ControlParams& p = s.params;
      fmt::print("config {}  mu={} lambda={}", to_string(s.config), p.mu, p.lambda);
      if (s.config == ConfigType::I) {
        fmt::print(" ab1={} ab2={}", p.ab1, p.ab2);
      } else {
        fmt::print(" a={} a0={}", p.a, p.a0);
      }
      if (s.config != ConfigType::II) fmt::print(" b={}", p.b);
      fmt::print("\n");
      for (const auto& e : preds) print_prediction(e);
    }
    return kOk;
  }
  const CaseLabel label = case_from_string(emit_case);
  for (auto e : preds) {
    if (e.label != label) continue;
    if (!e.exists) throw ParameterError(fmt::format("{} does not exist: {}", emit_case, e.reason));
    if (e.is_family()) {
      if (!family_value) {
        throw ParameterError(fmt::format("{} is a family; pass --family-value ({})", emit_case,
                                         e.family_parameter));
      }
      e = instantiate_family(e, s.params, *family_value);
    }
    s.agents = perturbed_start(e, s.params, perturb);
    s.validate();
    if (out.empty()) {
      std::cout << scenario_to_json(s).dump(2) << '\n';
    } else {
      save_scenario(s, out);
    }
    return kOk;
  }
  throw ParameterError(fmt::format("{} is not a case of config {}", emit_case, to_string(s.config)));
}

int cmd_verify(const std::string& grid_path, const std::string& json_out, unsigned threads) {
  const ResidualGrid g =
      grid_path.empty() ? ResidualGrid{} : residual_grid_from_json(load_json(grid_path));
  const VerifySummary v = verify_grid(g, threads);
  fmt::print("parameter sets: {} ({} with an equilibrium), predictions checked: {}\n",
             v.parameter_sets, v.parameter_sets_with_case, v.predictions_checked);
  for (const auto& [label, n] : v.per_case_count) {
    fmt::print("  {:<12} {:>6} checked, max residual {:.3g}\n", label, n,
               v.per_case_max_residual.at(label));
  }
  for (const auto& f : v.failures) fmt::print("FAIL {}\n", f);
  fmt::print("{} in {:.2f} s\n", v.pass ? "PASS" : "FAIL", v.seconds);
  if (!json_out.empty()) save_json(to_json(v), json_out);
  return v.pass ? kOk : kVerification;
}

int cmd_compare(const fs::path& in, const fs::path& out, const std::string& case_name,
                double window, double tol, double compare_tol) {
  const Scenario s = load_scenario(in);
  const Trajectory t = simulate(s);
  nlohmann::json report;
  report["scenario"] = scenario_to_json(s);
  auto finish = [&](int code, const std::string& status) {
    report["status"] = status;
    if (!out.empty()) save_json(report, out);
    return code;
  };
  if (t.aborted) {
    report["message"] = t.abort_reason;
    fmt::print(stderr, "singularity: {}\n", t.abort_reason);
    return finish(kSingularity, "aborted");
  }
  const ConvergenceReport c = detect_convergence(t, s, window, tol);
  report["convergence"] = to_json(c);
  if (!c.converged) {
    fmt::print("not converged: window deviation {:.3g} in {} (tol {:.3g})\n", c.window_max_dev,
               c.worst_component, tol);
    return finish(kVerification, "not_converged");
  }
  auto preds = predict(s.config, s.params);
  if (!case_name.empty()) {
    const CaseLabel label = case_from_string(case_name);
    std::erase_if(preds, [&](const EquilibriumPrediction& e) { return e.label != label; });
  }
  const auto cmp = compare_best(c, preds, compare_tol);
  if (!cmp) {
    fmt::print("converged (settle time {:.6g}) but no equilibrium is predicted\n", c.settle_time);
    return finish(kVerification, "no_prediction");
  }
  report["comparison"] = to_json(*cmp);
  fmt::print("converged at t = {:.6g}; compared with {}\n", c.settle_time,
             to_string(cmp->prediction.label));
  for (const auto& [name, err] : cmp->per_quantity_rel_error) {
    fmt::print("  {:<16} rel error {:.3g}{}\n", name, err, err < compare_tol ? "" : "  FAIL");
  }
  if (!cmp->skipped.empty()) fmt::print("  skipped: {}\n", fmt::join(cmp->skipped, ", "));
  fmt::print("{}\n", cmp->pass ? "PASS" : "FAIL");
  return finish(cmp->pass ? kOk : kVerification, cmp->pass ? "ok" : "mismatch");
}

int cmd_sweep(const fs::path& grid, const fs::path& dir, unsigned threads) {
  const SweepSpec spec = sweep_from_json(load_json(grid));
  fs::create_directories(dir);
  const auto results = run_sweep(spec, dir, threads);
  const auto summary = sweep_summary(results);
  save_json(summary, dir / "summary.json");
  bool all_ok = true;
  for (const auto& r : results) {
    fmt::print("run {:04d}  {:<14} {}\n", r.index, r.status, r.message);
    all_ok = all_ok && r.status == "ok";
  }
  fmt::print("{} runs, summary in {}\n", results.size(), (dir / "summary.json").string());
  return all_ok ? kOk : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beacon-referenced constant-bearing pursuit: simulation and equilibrium checks"};
  app.require_subcommand(1);

  std::string scenario, output, grid, json_out, case_name, emit_case;
  bool as_json = false;
  double perturb = 0.05;
  std::optional<double> family_value;
  double window = kDefaultWindow, tol = kDefaultConvergenceTol, compare_tol = kDefaultCompareTol;
  unsigned threads = 0;

  auto* sim = app.add_subcommand("simulate", "Integrate a scenario and write the trajectory CSV");
  sim->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("-o,--output", output, "Output CSV")->required();

  auto* pred = app.add_subcommand("predict", "Closed-form circling equilibria for a scenario's parameters");
  pred->add_option("scenario", scenario, "Scenario JSON (agents optional)")->required()->check(CLI::ExistingFile);
  pred->add_flag("--json", as_json, "Print predictions as JSON");
  pred->add_option("--emit-scenario", emit_case, "Write a scenario starting near this case (e.g. P5.1)");
  pred->add_option("--perturb", perturb, "Relative radial offset of agent 1 for --emit-scenario")
      ->capture_default_str();
  pred->add_option("--family-value", family_value, "Family member for --emit-scenario");
  pred->add_option("-o,--output", output, "Scenario output for --emit-scenario (default stdout)");

  auto* ver = app.add_subcommand("verify", "Residual check of every prediction over a parameter grid");
  ver->add_option("--grid", grid, "Grid JSON (default: built-in grid)")->check(CLI::ExistingFile);
  ver->add_option("--json", json_out, "Write the summary as JSON");
  ver->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* cmp = app.add_subcommand("compare", "Simulate, detect the steady state and compare with predictions");
  cmp->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  cmp->add_option("-o,--output", output, "Report JSON");
  cmp->add_option("--case", case_name, "Only compare with this case label");
  cmp->add_option("--window", window, "Convergence window (time units)")->capture_default_str();
  cmp->add_option("--tol", tol, "Convergence tolerance")->capture_default_str();
  cmp->add_option("--compare-tol", compare_tol, "Relative error tolerance")->capture_default_str();

  auto* swp = app.add_subcommand("sweep", "Run a grid of scenarios");
  swp->add_option("grid", grid, "Sweep JSON")->required()->check(CLI::ExistingFile);
  swp->add_option("-o,--output", output, "Output directory")->required();
  swp->add_option("--threads", threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*sim) return cmd_simulate(scenario, output);
    if (*pred) return cmd_predict(scenario, as_json, emit_case, perturb, family_value, output);
    if (*ver) return cmd_verify(grid, json_out, threads);
    if (*cmp) return cmd_compare(scenario, output, case_name, window, tol, compare_tol);
    if (*swp) return cmd_sweep(grid, output, threads);
  } catch (const ParameterError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kValidation;
  } catch (const TooShort& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kValidation;
  } catch (const DegenerateVector& e) {
    fmt::print(stderr, "singularity: {}\n", e.what());
    return kSingularity;
  } catch (const DegenerateFrame& e) {
    fmt::print(stderr, "singularity: {}\n", e.what());
    return kSingularity;
  } catch (const SingularityAbort& e) {
    fmt::print(stderr, "singularity: {}\n", e.what());
    return kSingularity;
  } catch (const Error& e) {
    fmt::print(stderr, "verification failure: {}\n", e.what());
    return kVerification;
  }
  return kOk;
}
