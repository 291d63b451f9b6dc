#include "cbp/equilibria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace cbp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LabelName {
  CaseLabel label;
  const char* name;
  ConfigType config;
};

constexpr std::array<LabelName, 11> kLabels = {{
    {CaseLabel::P3_1a, "P3.1a", ConfigType::I},
    {CaseLabel::P3_1b, "P3.1b", ConfigType::I},
    {CaseLabel::P4_1, "P4.1", ConfigType::II},
    {CaseLabel::P4_2a, "P4.2a", ConfigType::II},
    {CaseLabel::P4_2b, "P4.2b", ConfigType::II},
    {CaseLabel::P5_1, "P5.1", ConfigType::III},
    {CaseLabel::P5_2a, "P5.2a", ConfigType::III},
    {CaseLabel::P5_2b_plus, "P5.2b_plus", ConfigType::III},
    {CaseLabel::P5_2b_minus, "P5.2b_minus", ConfigType::III},
    {CaseLabel::P5_2c, "P5.2c", ConfigType::III},
    {CaseLabel::P5_2d, "P5.2d", ConfigType::III},
}};

const LabelName& entry(CaseLabel c) {
  return *std::find_if(kLabels.begin(), kLabels.end(),
                       [c](const LabelName& l) { return l.label == c; });
}

bool nearly_equal(double x, double y) {
  return std::abs(x - y) <= kEqualityRelTol * std::max(std::abs(x), std::abs(y));
}

EquilibriumPrediction absent(CaseLabel label, std::string reason, ShapeState shape) {
  EquilibriumPrediction e;
  e.label = label;
  e.exists = false;
  e.reason = std::move(reason);
  e.shape = shape;
  return e;
}

ShapeStateII_III circling_shape(double xtilde, double rho, double rho_1b1, double rho_2b2,
                                double rhat1, double rhat2) {
  ShapeStateII_III s;
  s.xtilde = xtilde;
  s.rho = rho;
  s.rho_1b1 = rho_1b1;
  s.rho_2b2 = rho_2b2;
  s.rhat1 = rhat1;
  s.rhat2 = rhat2;
  return s;
}

// Shared feasibility checks: positive finite distances, constraint dots in
// range and a real radius. Demotes `e` to non-existent with a reason.
void check_feasible(EquilibriumPrediction& e, const ControlParams& p) {
  if (!e.exists || e.is_family()) return;
  auto fail = [&](std::string why) {
    e.exists = false;
    e.reason = std::move(why);
  };
  if (const auto* s1 = std::get_if<ShapeStateI>(&e.shape)) {
    if (!(std::isfinite(s1->rho_1b1) && std::isfinite(s1->rho_1b2) && s1->rho_1b1 > 0 &&
          s1->rho_1b2 > 0)) {
      return fail("predicted beacon distances not positive");
    }
    if (!triangle_constraints_hold(s1->rho_1b1, s1->rho_1b2, p.b)) {
      return fail("beacon triangle inequalities violated");
    }
  } else {
    const auto& s = std::get<ShapeStateII_III>(e.shape);
    if (!(std::isfinite(s.rho) && std::isfinite(s.rho_1b1) && std::isfinite(s.rho_2b2) &&
          s.rho > 0 && s.rho_1b1 > 0 && s.rho_2b2 > 0)) {
      return fail("predicted separations not positive");
    }
    const ConstraintDots c = constraint_dots(s);
    for (double v : {c.d1, c.d2, c.e1, c.e2}) {
      if (!(std::abs(v) <= 1.0 + kConstraintSlack)) {
        return fail(fmt::format("constraint dot product {:.6g} outside [-1, 1]", v));
      }
    }
  }
  if (!(std::isfinite(e.radius) && e.radius >= 0)) return fail("circling radius not real");
}

double radius_from(double rho_b, double offset) {
  const double r2 = rho_b * rho_b - offset * offset;
  // Collinear cases land on zero up to round-off.
  if (r2 < 0 && r2 > -1e-12 * rho_b * rho_b) return 0.0;
  return std::sqrt(r2);
}

}  // namespace

std::string to_string(CaseLabel c) { return entry(c).name; }

CaseLabel case_from_string(const std::string& s) {
  for (const auto& l : kLabels) {
    if (s == l.name) return l.label;
  }
  throw ParameterError(fmt::format("unknown case label '{}'", s));
}

ConfigType config_of(CaseLabel c) { return entry(c).config; }

double EquilibriumPrediction::xtilde() const {
  if (const auto* s = std::get_if<ShapeStateII_III>(&shape)) return s->xtilde;
  return kNaN;
}

std::vector<EquilibriumPrediction> predict_config_I(const ControlParams& p) {
  p.validate();
  if (!(p.b > 0)) {
    throw ParameterError("config I needs b > 0: with coincident beacons the beacon triangle and "
                         "the vertical offset are undefined");
  }
  const double lam = p.lambda;
  const double mu = p.mu;
  const double b = p.b;
  const double w1 = lam * p.ab1;
  const double w2 = (1.0 - lam) * p.ab2;
  const ShapeStateI none{};
  std::vector<EquilibriumPrediction> out;

  auto finish = [&](EquilibriumPrediction e, double r1, double r2) {
    e.exists = true;
    e.shape = ShapeStateI{0.0, 0.0, r1, r2};
    e.vertical_offset = (r1 * r1 - r2 * r2) / (4.0 * b);
    e.radius = radius_from(r2, e.vertical_offset - b);
    check_feasible(e, p);
    out.push_back(std::move(e));
  };

  if (!nearly_equal(w1, w2)) {
    out.push_back(absent(CaseLabel::P3_1a, "requires lambda*ab1 = (1-lambda)*ab2", none));
  } else if (!(w1 < 0)) {
    out.push_back(absent(CaseLabel::P3_1a, "requires lambda*ab1 < 0", none));
  } else {
    const double k = 4.0 * mu * w1;
    const double r = (1.0 + std::sqrt(1.0 + (k * b) * (k * b))) / (-k);
    EquilibriumPrediction e;
    e.label = CaseLabel::P3_1a;
    finish(e, r, r);
  }

  const double sum = w1 + w2;
  if (!(sum < 0)) {
    out.push_back(absent(CaseLabel::P3_1b, "requires lambda*ab1 + (1-lambda)*ab2 < 0", none));
  } else {
    const double diff = w1 - w2;
    const double tb = 2.0 * b;
    const double rp = (1.0 + std::sqrt(1.0 + std::pow(tb * mu * sum, 2))) / (-mu * sum);
    const double rm = -mu * diff * tb * tb / (1.0 + std::sqrt(1.0 + std::pow(tb * mu * diff, 2)));
    EquilibriumPrediction e;
    e.label = CaseLabel::P3_1b;
    e.rho_plus = rp;
    e.rho_minus = rm;
    finish(e, (rp - rm) / 2.0, (rp + rm) / 2.0);
  }
  return out;
}

std::vector<EquilibriumPrediction> predict_config_II(const ControlParams& p) {
  p.validate();
  if (p.b != 0.0) throw ParameterError("config II needs b = 0 (single beacon at the origin)");
  const double L = 1.0 - p.lambda;
  const double lam = p.lambda;
  const double mu = p.mu;
  const ShapeStateII_III none{};
  std::vector<EquilibriumPrediction> out;

  if (p.a0 != 0.0) {
    out.push_back(absent(CaseLabel::P4_1, "requires a0 = 0", none));
  } else if (!(p.a < 0)) {
    out.push_back(absent(CaseLabel::P4_1, "requires a < 0", none));
  } else {
    EquilibriumPrediction e;
    e.label = CaseLabel::P4_1;
    e.exists = true;
    const double rho = 2.0 / (L * mu * (-p.a));
    e.shape = circling_shape(-1.0, rho, kNaN, kNaN, 0.0, 0.0);
    e.family = {"rho_1b1", "rho_2b2"};
    e.family_parameter = "rho_1b1";
    e.family_min = rho / 2.0;
    e.radius = rho / 2.0;
    out.push_back(std::move(e));
  }

  const double sum = L * p.a + lam * p.a0;
  if (p.a0 == 0.0) {
    out.push_back(absent(CaseLabel::P4_2a, "requires a0 != 0", none));
    out.push_back(absent(CaseLabel::P4_2b, "requires a0 != 0", none));
    return out;
  }
  if (!(sum < 0)) {
    out.push_back(absent(CaseLabel::P4_2a, "requires (1-lambda)*a + lambda*a0 < 0", none));
  } else {
    EquilibriumPrediction e;
    e.label = CaseLabel::P4_2a;
    e.exists = true;
    const double rb = 1.0 / (-mu * sum);
    e.shape = circling_shape(-1.0, 2.0 * rb, rb, rb, 0.0, 0.0);
    e.radius = rb;
    check_feasible(e, p);
    out.push_back(std::move(e));
  }

  if (!(sum < 0)) {
    out.push_back(absent(CaseLabel::P4_2b, "requires (1-lambda)*a + lambda*a0 < 0", none));
  } else if (!(p.a0 < 0 && p.a > 0)) {
    out.push_back(absent(CaseLabel::P4_2b, "requires a0 < 0 and a > 0", none));
  } else {
    EquilibriumPrediction e;
    e.label = CaseLabel::P4_2b;
    e.exists = true;
    const double den = mu * (L * L * p.a * p.a - lam * lam * p.a0 * p.a0);
    const double rb = lam * p.a0 / den;
    const double rho = -2.0 * L * p.a / den;
    e.shape = circling_shape(1.0, rho, rb, rb, 0.0, 0.0);
    e.radius = radius_from(rb, rho / 2.0);
    check_feasible(e, p);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<EquilibriumPrediction> predict_config_III(const ControlParams& p) {
  p.validate();
  if (!(p.b > 0)) throw ParameterError("config III needs b > 0; use config II for b = 0");
  const double L = 1.0 - p.lambda;
  const double lam = p.lambda;
  const double mu = p.mu;
  const double b = p.b;
  const ShapeStateII_III none{};
  std::vector<EquilibriumPrediction> out;

  auto finish = [&](EquilibriumPrediction& e) {
    const auto& s = std::get<ShapeStateII_III>(e.shape);
    e.exists = true;
    e.vertical_offset = s.rhat1 / (2.0 * b);
    e.radius = radius_from(s.rho_1b1, (s.rhat1 + 2.0 * b * b) / (2.0 * b));
    check_feasible(e, p);
  };

  if (p.a0 != 0.0) {
    out.push_back(absent(CaseLabel::P5_1, "requires a0 = 0", none));
  } else if (!(p.a < 0)) {
    out.push_back(absent(CaseLabel::P5_1, "requires a < 0", none));
  } else {
    EquilibriumPrediction e;
    e.label = CaseLabel::P5_1;
    e.exists = true;
    const double rho = 2.0 / (L * mu * (-p.a));
    e.shape = circling_shape(-1.0, rho, kNaN, kNaN, kNaN, kNaN);
    e.family = {"rho_1b1", "rho_2b2", "rhat1", "rhat2", "vertical_offset"};
    e.family_parameter = "vertical_offset";
    e.family_min = -std::numeric_limits<double>::infinity();
    e.radius = rho / 2.0;
    out.push_back(std::move(e));
  }

  const std::array<CaseLabel, 5> p52 = {CaseLabel::P5_2a, CaseLabel::P5_2b_plus,
                                        CaseLabel::P5_2b_minus, CaseLabel::P5_2c,
                                        CaseLabel::P5_2d};
  if (p.a0 == 0.0) {
    for (CaseLabel c : p52) out.push_back(absent(c, "requires a0 != 0", none));
    return out;
  }

  const double den = L * L * p.a * p.a - lam * lam * p.a0 * p.a0;
  const double phi = den != 0.0 ? L * p.a / (mu * den) : kNaN;
  const double rb = den != 0.0 ? lam * p.a0 / (mu * den) : kNaN;

  // (a)
  if (!(p.a0 < 0 && p.a < 0)) {
    out.push_back(absent(CaseLabel::P5_2a, "requires a0 < 0 and a < 0", none));
  } else if (!(den < 0)) {
    out.push_back(absent(CaseLabel::P5_2a, "requires (1-lambda)^2 a^2 - lambda^2 a0^2 < 0", none));
  } else if (!(phi < b)) {
    out.push_back(absent(CaseLabel::P5_2a, "requires Phi < b", none));
  } else {
    EquilibriumPrediction e;
    e.label = CaseLabel::P5_2a;
    e.phi = phi;
    const double rh = 2.0 * b * (-b + phi);
    e.shape = circling_shape(1.0, 2.0 * (b - phi), rb, rb, rh, -rh);
    finish(e);
    out.push_back(std::move(e));
  }

  // (b): the two roots of the stacked x~ = 1 configuration.
  for (int sign : {+1, -1}) {
    const CaseLabel label = sign > 0 ? CaseLabel::P5_2b_plus : CaseLabel::P5_2b_minus;
    if (!(p.a0 < 0 && p.a > 0)) {
      out.push_back(absent(label, "requires a0 < 0 and a > 0", none));
    } else if (!(den < 0)) {
      out.push_back(absent(label, "requires (1-lambda)^2 a^2 - lambda^2 a0^2 < 0", none));
    } else if (sign < 0 && !(std::abs(phi) > b)) {
      out.push_back(absent(label, "requires |Phi| > b", none));
    } else {
      EquilibriumPrediction e;
      e.label = label;
      e.phi = phi;
      const double rh = 2.0 * b * (-b + sign * phi);
      e.shape = circling_shape(1.0, 2.0 * (-phi + sign * b), rb, rb, rh, -rh);
      finish(e);
      out.push_back(std::move(e));
    }
  }

  // (c)
  if (!(p.a0 < 0)) {
    out.push_back(absent(CaseLabel::P5_2c, "requires a0 < 0", none));
  } else if (!nearly_equal(L * p.a, lam * p.a0)) {
    out.push_back(absent(CaseLabel::P5_2c, "requires (1-lambda)*a = lambda*a0", none));
  } else {
    EquilibriumPrediction e;
    e.label = CaseLabel::P5_2c;
    const double k = 2.0 * lam * mu * p.a0;
    const double rho = (1.0 + std::sqrt(1.0 + (k * b) * (k * b))) / (-k);
    e.shape = circling_shape(-1.0, rho, rho / 2.0, rho / 2.0, -b * b, b * b);
    finish(e);
    out.push_back(std::move(e));
  }

  // (d)
  const double sum = L * p.a + lam * p.a0;
  const double diff = L * p.a - lam * p.a0;
  if (!(sum < 0)) {
    out.push_back(absent(CaseLabel::P5_2d, "requires (1-lambda)*a + lambda*a0 < 0", none));
  } else if (nearly_equal(L * p.a, lam * p.a0)) {
    out.push_back(absent(CaseLabel::P5_2d, "requires (1-lambda)*a != lambda*a0", none));
  } else {
    EquilibriumPrediction e;
    e.label = CaseLabel::P5_2d;
    const double rp = (1.0 + std::sqrt(1.0 + std::pow(mu * sum * b, 2))) / (-mu * sum);
    const double rm = mu * diff * b * b / (1.0 + std::sqrt(1.0 + std::pow(mu * diff * b, 2)));
    e.rho_plus = rp;
    e.rho_minus = rm;
    const double rh = -rp * rm - b * b;
    e.shape = circling_shape(-1.0, rp + rm, (rp - rm) / 2.0, (rp - rm) / 2.0, rh, -rh);
    if (!(rp * rp > b * b && b * b > rm * rm)) {
      e.reason = "requires rho_plus^2 > b^2 > rho_minus^2";
      out.push_back(std::move(e));
    } else {
      finish(e);
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<EquilibriumPrediction> predict(ConfigType c, const ControlParams& p) {
  switch (c) {
    case ConfigType::I:
      return predict_config_I(p);
    case ConfigType::II:
      return predict_config_II(p);
    case ConfigType::III:
      return predict_config_III(p);
  }
  return {};
}

EquilibriumPrediction instantiate_family(const EquilibriumPrediction& pred, const ControlParams& p,
                                         double value) {
  if (!pred.is_family()) throw ParameterError(to_string(pred.label) + " is not a family");
  if (!pred.exists) throw ParameterError(to_string(pred.label) + " does not exist");
  EquilibriumPrediction e = pred;
  e.family.clear();
  e.family_parameter.clear();
  auto& s = std::get<ShapeStateII_III>(e.shape);
  if (pred.label == CaseLabel::P4_1) {
    if (!(value >= pred.family_min)) {
      throw ParameterError(
          fmt::format("rho_1b1 = {:.6g} below the admissible minimum rho/2 = {:.6g}", value,
                      pred.family_min));
    }
    s.rho_1b1 = value;
    s.rho_2b2 = value;
  } else {
    if (!std::isfinite(value)) throw ParameterError("vertical_offset must be finite");
    const double b = p.b;
    const double half = s.rho / 2.0;
    s.rhat1 = 2.0 * b * value;
    s.rhat2 = 2.0 * b * value;
    s.rho_1b1 = std::hypot(half, value + b);
    s.rho_2b2 = std::hypot(half, value - b);
    e.vertical_offset = value;
  }
  check_feasible(e, p);
  return e;
}

std::vector<EquilibriumPrediction> family_samples(const EquilibriumPrediction& pred,
                                                  const ControlParams& p) {
  if (!pred.is_family()) return {pred};
  std::vector<double> values;
  if (pred.label == CaseLabel::P4_1) {
    for (double f : {1.25, 2.0, 4.0}) values.push_back(pred.family_min * f);
  } else {
    values = {-p.b, 0.0, p.b / 2.0};
  }
  std::vector<EquilibriumPrediction> out;
  for (double v : values) out.push_back(instantiate_family(pred, p, v));
  return out;
}

double residual_tolerance(const ControlParams& p) { return 1e-9 * std::max(1.0, p.mu); }

ResidualReport residual(const EquilibriumPrediction& pred, const ControlParams& p,
                        std::optional<double> tolerance) {
  if (!pred.exists) {
    throw ParameterError(fmt::format("no residual for {}: {}", to_string(pred.label), pred.reason));
  }
  ResidualReport r;
  r.tolerance = tolerance.value_or(residual_tolerance(p));
  const auto names = shape_names(pred.shape);
  std::vector<double> worst(names.size(), 0.0);
  for (const auto& member : family_samples(pred, p)) {
    std::vector<double> d;
    if (const auto* s1 = std::get_if<ShapeStateI>(&member.shape)) {
      d = shape_values(shape_rhs_I(*s1, p));
    } else {
      d = shape_values(shape_rhs_II_III(std::get<ShapeStateII_III>(member.shape), p));
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      // NaN must not hide behind max().
      worst[i] = std::isnan(d[i]) ? d[i] : std::max(worst[i], std::abs(d[i]));
    }
  }
  r.max_abs_derivative = 0.0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    r.per_component.emplace_back(std::string(names[i]), worst[i]);
    if (std::isnan(worst[i]) || worst[i] > r.max_abs_derivative) r.max_abs_derivative = worst[i];
  }
  r.pass = r.max_abs_derivative < r.tolerance;
  return r;
}

std::vector<AgentSpec> realize(const EquilibriumPrediction& pred, const ControlParams& p) {
  if (!pred.exists) throw ParameterError(to_string(pred.label) + " does not exist");
  if (pred.is_family()) {
    throw ParameterError(to_string(pred.label) + " is a family; instantiate it first");
  }
  const Vec3 ey{0.0, 1.0, 0.0};
  if (std::holds_alternative<ShapeStateI>(pred.shape)) {
    return {{{pred.radius, 0.0, pred.vertical_offset}, ey}};
  }
  const auto& s = std::get<ShapeStateII_III>(pred.shape);
  const double b = p.b;
  double z1 = 0.0;
  double z2 = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  if (config_of(pred.label) == ConfigType::II) {
    const double h = radius_from(s.rho_1b1, s.rho / 2.0);
    if (s.xtilde < 0) {
      R1 = R2 = s.rho / 2.0;
      z1 = z2 = h;
    } else {
      R1 = R2 = h;
      z1 = s.rho / 2.0;
      z2 = -s.rho / 2.0;
    }
  } else {
    z1 = s.rhat1 / (2.0 * b);
    z2 = s.rhat2 / (2.0 * b);
    R1 = radius_from(s.rho_1b1, z1 + b);
    R2 = radius_from(s.rho_2b2, z2 - b);
  }
  if (s.xtilde < 0) return {{{R1, 0.0, z1}, ey}, {{-R2, 0.0, z2}, {0.0, -1.0, 0.0}}};
  return {{{R1, 0.0, z1}, ey}, {{R2, 0.0, z2}, ey}};
}

}  // namespace cbp
