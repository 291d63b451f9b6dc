#include "cbp/io.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

namespace cbp {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw ParameterError("scenario: " + what); }

double number(const json& j, const char* key) {
  if (!j.contains(key)) bad(fmt::format("missing key '{}'", key));
  const json& v = j.at(key);
  if (!v.is_number()) bad(fmt::format("'{}' must be a number", key));
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

Vec3 vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) bad(fmt::format("'{}' must be a 3-element array", what));
  for (const auto& c : j) {
    if (!c.is_number()) bad(fmt::format("'{}' components must be numbers", what));
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

double unsigned_zero(double v) { return v == 0.0 ? 0.0 : v; }

json vec3_json(const Vec3& v) {
  return json::array({unsigned_zero(v.x), unsigned_zero(v.y), unsigned_zero(v.z)});
}

}  // namespace

Scenario scenario_from_json(const json& j, bool validate) {
  if (!j.is_object()) bad("document must be a JSON object");
  static const std::set<std::string> known = {
      "config_type", "mu", "lambda", "a", "a0", "ab1", "ab2", "b", "dt",
      "t_final", "record_stride", "agents", "seed", "note"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) bad(fmt::format("unknown key '{}'", key));
  }
  if (!j.contains("config_type") || !j.at("config_type").is_string()) {
    bad("'config_type' must be one of \"I\", \"II\", \"III\"");
  }
  Scenario s;
  s.config = config_from_string(j.at("config_type").get<std::string>());
  ControlParams& p = s.params;
  p.mu = number(j, "mu");
  p.lambda = number(j, "lambda");
  p.b = number(j, "b");
  if (s.config == ConfigType::I) {
    p.ab1 = number(j, "ab1");
    p.ab2 = number(j, "ab2");
    p.a = number_or(j, "a", 0.0);
    p.a0 = number_or(j, "a0", 0.0);
  } else {
    p.a = number(j, "a");
    p.a0 = number(j, "a0");
    p.ab1 = number_or(j, "ab1", 0.0);
    p.ab2 = number_or(j, "ab2", 0.0);
  }
  s.dt = number_or(j, "dt", kDefaultDt);
  s.t_final = number_or(j, "t_final", kDefaultTFinal);
  if (j.contains("record_stride")) {
    if (!j.at("record_stride").is_number_integer()) bad("'record_stride' must be an integer");
    s.record_stride = j.at("record_stride").get<std::int64_t>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) bad("'seed' must be a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  const json agents = j.value("agents", json::array());
  if (!agents.is_array()) bad("'agents' must be an array");
  for (const auto& a : agents) {
    if (!a.is_object() || !a.contains("position") || !a.contains("heading")) {
      bad("each agent needs 'position' and 'heading'");
    }
    s.agents.push_back({vec3(a.at("position"), "position"), vec3(a.at("heading"), "heading")});
  }
  if (validate) s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  const ControlParams& p = s.params;
  json j;
  j["config_type"] = to_string(s.config);
  j["mu"] = p.mu;
  j["lambda"] = p.lambda;
  if (s.config == ConfigType::I) {
    j["ab1"] = p.ab1;
    j["ab2"] = p.ab2;
    if (p.a != 0.0) j["a"] = p.a;
    if (p.a0 != 0.0) j["a0"] = p.a0;
  } else {
    j["a"] = p.a;
    j["a0"] = p.a0;
    if (p.ab1 != 0.0) j["ab1"] = p.ab1;
    if (p.ab2 != 0.0) j["ab2"] = p.ab2;
  }
  j["b"] = p.b;
  j["dt"] = s.dt;
  j["t_final"] = s.t_final;
  if (s.record_stride != 0) j["record_stride"] = s.record_stride;
  if (s.seed) j["seed"] = *s.seed;
  j["agents"] = json::array();
  for (const auto& a : s.agents) {
    j["agents"].push_back({{"position", vec3_json(a.position)}, {"heading", vec3_json(a.heading)}});
  }
  return j;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError(fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError(fmt::format("'{}': {}", path.string(), e.what()));
  }
}

void save_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(load_json(path));
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  save_json(scenario_to_json(s), path);
}

double cb_cost(double xbar, double a) {
  constexpr double slack = 1e-12;
  if (!(std::abs(xbar) <= 1.0 + slack) || !(std::abs(a) <= 1.0)) {
    throw ParameterError(fmt::format("cb_cost arguments out of range: xbar={}, a={}", xbar, a));
  }
  return 0.5 * (xbar - a) * (xbar - a);
}

std::vector<double> snapshot_cb_costs(const ShapeState& shape, const Scenario& s) {
  const ControlParams& p = s.params;
  if (const auto* s1 = std::get_if<ShapeStateI>(&shape)) {
    return {p.lambda * cb_cost(s1->xbar_1b1, p.ab1) +
            (1.0 - p.lambda) * cb_cost(s1->xbar_1b2, p.ab2)};
  }
  const auto& s2 = std::get<ShapeStateII_III>(shape);
  return {cb_cost(s2.xbar1, p.a), cb_cost(s2.xbar2, p.a)};
}

std::vector<std::string> csv_header(const Scenario& s) {
  std::vector<std::string> h{"t"};
  for (std::size_t i = 1; i <= agent_count(s.config); ++i) {
    for (const char* c : {"rx", "ry", "rz", "xx", "xy", "xz", "u", "v"}) {
      h.push_back(fmt::format("{}_{}", c, i));
    }
  }
  const ShapeState proto =
      s.config == ConfigType::I ? ShapeState{ShapeStateI{}} : ShapeState{ShapeStateII_III{}};
  for (auto n : shape_names(proto)) h.emplace_back(n);
  h.emplace_back("cb_cost_1");
  if (s.config != ConfigType::I) h.emplace_back("cb_cost_2");
  return h;
}

void write_trajectory_csv(const Trajectory& t, const Scenario& s, std::ostream& out) {
  const auto header = csv_header(s);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  std::string line;
  for (std::size_t k = 0; k < t.size(); ++k) {
    line = fmt::format("{:.17g}", t.times[k]);
    for (std::size_t i = 0; i < t.states[k].size(); ++i) {
      const AgentState& a = t.states[k][i];
      const Vec3& r = a.position;
      const Vec3& x = a.frame.x_axis;
      const SteeringCommand& c = t.controls[k][i];
      line += fmt::format(",{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", r.x,
                          r.y, r.z, x.x, x.y, x.z, c.u, c.v);
    }
    for (double v : shape_values(t.shapes[k])) line += fmt::format(",{:.17g}", v);
    for (double v : snapshot_cb_costs(t.shapes[k], s)) line += fmt::format(",{:.17g}", v);
    out << line << '\n';
  }
}

void write_trajectory_csv(const Trajectory& t, const Scenario& s,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError(fmt::format("cannot write '{}'", path.string()));
  write_trajectory_csv(t, s, out);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ParameterError(fmt::format("CSV has no column '{}'", name));
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (!std::getline(in, line)) throw ParameterError("CSV is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ParameterError(fmt::format("CSV row {} has {} cells, header has {}",
                                       t.rows.size() + 1, cells.size(), t.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size()) throw ParameterError(fmt::format("CSV cell '{}' is not a number", c));
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError(fmt::format("cannot open '{}'", path.string()));
  return read_csv(in);
}

std::vector<ShapeState> reextract_shapes(const CsvTable& table, const Scenario& s) {
  const std::size_t n = agent_count(s.config);
  std::vector<std::array<std::size_t, 6>> cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (const char* name : {"rx", "ry", "rz", "xx", "xy", "xz"}) {
      cols[i][c++] = table.column(fmt::format("{}_{}", name, i + 1));
    }
  }
  std::vector<ShapeState> out;
  out.reserve(table.rows.size());
  std::vector<AgentState> agents(n);
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = cols[i];
      agents[i].position = {row[c[0]], row[c[1]], row[c[2]]};
      agents[i].frame.x_axis = {row[c[3]], row[c[4]], row[c[5]]};
    }
    out.push_back(extract_shape(agents, s));
  }
  return out;
}

}  // namespace cbp
