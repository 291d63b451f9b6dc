#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "cbp/dynamics.hpp"

namespace cbp {

// Scenario documents. Keys: config_type, mu, lambda, a, a0 (ab1, ab2 for
// config I), b, dt, t_final, record_stride, agents [{position, heading}],
// optional seed and note. Unknown keys are rejected. Malformed documents
// raise ParameterError. With validate = false the result may be incomplete
// (used for sweep templates whose agents are generated later).
Scenario scenario_from_json(const nlohmann::json& j, bool validate = true);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const nlohmann::json& j, const std::filesystem::path& path);

// CB cost 0.5 (xbar - a)^2. Throws ParameterError outside [-1, 1] (with 1e-12
// round-off slack on xbar).
double cb_cost(double xbar, double a);

// Per-snapshot CB costs: one (lambda-weighted over both beacons) for config
// I, the neighbour cost of each agent for configs II and III.
std::vector<double> snapshot_cb_costs(const ShapeState& shape, const Scenario& s);

std::vector<std::string> csv_header(const Scenario& s);
void write_trajectory_csv(const Trajectory& t, const Scenario& s, std::ostream& out);
void write_trajectory_csv(const Trajectory& t, const Scenario& s,
                          const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws ParameterError when absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

// Rebuilds positions and headings from a trajectory table and recomputes the
// shape variables for every row.
std::vector<ShapeState> reextract_shapes(const CsvTable& table, const Scenario& s);

}  // namespace cbp
