#include "doctest.h"
#include "generators.hpp"

#include "cbp/equilibria.hpp"

using namespace cbp;

namespace {

EquilibriumPrediction find(const std::vector<EquilibriumPrediction>& v, CaseLabel c) {
  for (const auto& e : v) {
    if (e.label == c) return e;
  }
  FAIL("case not reported");
  return {};
}

ControlParams params(double mu, double lambda, double a, double a0, double b) {
  ControlParams p;
  p.mu = mu;
  p.lambda = lambda;
  p.a = a;
  p.a0 = a0;
  p.b = b;
  return p;
}

ControlParams params_I(double mu, double lambda, double ab1, double ab2, double b) {
  ControlParams p;
  p.mu = mu;
  p.lambda = lambda;
  p.ab1 = ab1;
  p.ab2 = ab2;
  p.b = b;
  return p;
}

}  // namespace

TEST_CASE("one agent, equal weights: closed form at b = 10") {
  const ControlParams p = params_I(1, 0.5, -0.156, -0.156, 10);
  const auto preds = predict_config_I(p);
  const auto& a = find(preds, CaseLabel::P3_1a);
  REQUIRE(a.exists);
  const auto& s = std::get<ShapeStateI>(a.shape);
  const double expected = (1 / 0.312) * (1 + std::sqrt(1 + 3.12 * 3.12));
  CHECK(s.rho_1b1 == doctest::Approx(expected).epsilon(1e-14));
  CHECK(s.rho_1b2 == doctest::Approx(expected).epsilon(1e-14));
  CHECK(s.rho_1b1 == doctest::Approx(13.71).epsilon(1e-3));
  CHECK(s.xbar_1b1 == 0.0);
  CHECK(std::abs(a.vertical_offset) < 1e-12);
  CHECK(a.radius == doctest::Approx(std::sqrt(expected * expected - 100)).epsilon(1e-12));
  CHECK(residual(a, p).pass);
  // The general case applies as well and agrees.
  const auto& b = find(preds, CaseLabel::P3_1b);
  REQUIRE(b.exists);
  CHECK(std::get<ShapeStateI>(b.shape).rho_1b1 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("one agent: no equilibrium for positive weighted offsets") {
  const auto preds = predict_config_I(params_I(1, 0.5, 0.3, 0.1, 5));
  for (const auto& e : preds) {
    CHECK_FALSE(e.exists);
    CHECK_FALSE(e.reason.empty());
  }
}

TEST_CASE("one agent: zero beacon-2 offset simplification") {
  const ControlParams p = params_I(1, 0.5, -0.2, 0.0, 3);
  const auto& e = find(predict_config_I(p), CaseLabel::P3_1b);
  REQUIRE(e.exists);
  const auto& s = std::get<ShapeStateI>(e.shape);
  const double r1 = 1 / (p.lambda * p.mu * 0.2);
  CHECK(s.rho_1b1 == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(s.rho_1b1 == doctest::Approx(r1).epsilon(1e-13));
  CHECK(s.rho_1b2 == doctest::Approx(std::sqrt(136.0)).epsilon(1e-13));
  // rho_1b2^2 = rho_1b1^2 + (2b)^2 puts the agent level with beacon 1.
  CHECK(e.vertical_offset == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(e.radius == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(residual(e, p).pass);
}

TEST_CASE("one agent needs separated beacons") {
  CHECK_THROWS_AS(predict_config_I(params_I(1, 0.5, -0.2, -0.2, 0)), ParameterError);
}

TEST_CASE("one agent: general case tends to the equal case") {
  for (double lam : {0.3, 0.5, 0.7}) {
    const double ab1 = -0.4;
    const double w = lam * ab1;
    const ControlParams pa = params_I(1.3, lam, ab1, w / (1 - lam), 4);
    const ControlParams pb = params_I(1.3, lam, ab1, (w + 1e-6) / (1 - lam), 4);
    const auto& a = find(predict_config_I(pa), CaseLabel::P3_1a);
    const auto& b = find(predict_config_I(pb), CaseLabel::P3_1b);
    REQUIRE(a.exists);
    REQUIRE(b.exists);
    const auto& sa = std::get<ShapeStateI>(a.shape);
    const auto& sb = std::get<ShapeStateI>(b.shape);
    CHECK(std::abs(sb.rho_1b1 - sa.rho_1b1) / sa.rho_1b1 < 1e-4);
    CHECK(std::abs(sb.rho_1b2 - sa.rho_1b2) / sa.rho_1b2 < 1e-4);
    CHECK(std::abs(b.rho_minus) < 1e-4);
  }
}

TEST_CASE("single beacon, neighbour-only offset: Fig 3 parameters") {
  const ControlParams p = params(1, 0.5, -0.7071, 0, 0);
  const auto& e = find(predict_config_II(p), CaseLabel::P4_1);
  REQUIRE(e.exists);
  const auto& s = std::get<ShapeStateII_III>(e.shape);
  CHECK(s.rho == doctest::Approx(2 / (0.5 * 0.7071)).epsilon(1e-14));
  CHECK(s.rho == doctest::Approx(5.6569).epsilon(1e-4));
  CHECK(s.xtilde == -1.0);
  CHECK(e.is_family());
  CHECK(std::isnan(s.rho_1b1));
  CHECK(e.family_parameter == "rho_1b1");
  CHECK(residual(e, p).pass);
  CHECK_THROWS_AS(instantiate_family(e, p, s.rho / 4), ParameterError);
}

TEST_CASE("single beacon: positive neighbour offset has no equilibrium") {
  const auto& e = find(predict_config_II(params(1, 0.5, 0.4, 0, 0)), CaseLabel::P4_1);
  CHECK_FALSE(e.exists);
}

TEST_CASE("single beacon, stacked case (b)") {
  const ControlParams p = params(1, 0.4, 0.5, -0.9, 0);
  const auto& e = find(predict_config_II(p), CaseLabel::P4_2b);
  REQUIRE(e.exists);
  const auto& s = std::get<ShapeStateII_III>(e.shape);
  const double den = 0.36 * 0.25 - 0.16 * 0.81;
  CHECK(den == doctest::Approx(-0.0396));
  CHECK(s.rho_1b1 == doctest::Approx(0.4 * -0.9 / den).epsilon(1e-13));
  CHECK(s.rho_1b1 == doctest::Approx(9.0909).epsilon(1e-5));
  CHECK(s.rho == doctest::Approx(15.1515).epsilon(1e-5));
  CHECK(s.xtilde == 1.0);
  CHECK(residual(e, p).pass);
}

TEST_CASE("single beacon, collinear case (a): proposition form") {
  const ControlParams p = params(1.5, 0.35, -0.3, -0.707, 0);
  const auto& e = find(predict_config_II(p), CaseLabel::P4_2a);
  REQUIRE(e.exists);
  const auto& s = std::get<ShapeStateII_III>(e.shape);
  const double sum = 0.65 * -0.3 + 0.35 * -0.707;
  CHECK(s.rho_1b1 == doctest::Approx(1 / (-1.5 * sum)).epsilon(1e-14));
  CHECK(residual(e, p).pass);
  // The variant with an extra lambda factor is not an equilibrium.
  EquilibriumPrediction alt = e;
  auto& sa = std::get<ShapeStateII_III>(alt.shape);
  sa.rho_1b1 = sa.rho_2b2 = p.lambda / (-p.mu * sum);
  sa.rho = 2 * sa.rho_1b1;
  CHECK_FALSE(residual(alt, p).pass);
}

TEST_CASE("two beacons, neighbour-only offset: Fig 4 parameters") {
  const ControlParams p = params(1, 0.57, -0.771, 0, 10);
  const auto& e = find(predict_config_III(p), CaseLabel::P5_1);
  REQUIRE(e.exists);
  const auto& s = std::get<ShapeStateII_III>(e.shape);
  CHECK(s.rho == doctest::Approx(2 / (0.43 * 0.771)).epsilon(1e-14));
  CHECK(s.rho == doctest::Approx(6.0325).epsilon(1e-4));
  CHECK(e.radius == doctest::Approx(3.0163).epsilon(1e-4));
  CHECK(residual(e, p).pass);
  const auto m = instantiate_family(e, p, -10);
  const auto& sm = std::get<ShapeStateII_III>(m.shape);
  CHECK(sm.rhat1 == doctest::Approx(-200.0));
  CHECK(sm.rhat1 == sm.rhat2);
  // rho_1b1^2 - rho_2b2^2 - 2 rhat1 = 0 on the family.
  CHECK(std::abs(sm.rho_1b1 * sm.rho_1b1 - sm.rho_2b2 * sm.rho_2b2 - 2 * sm.rhat1) < 1e-10);
}

TEST_CASE("two beacons, equal weights case (c): Fig 6 left") {
  const ControlParams p = params(1, 0.5, -0.707, -0.707, 10);
  const auto preds = predict_config_III(p);
  const auto& e = find(preds, CaseLabel::P5_2c);
  REQUIRE(e.exists);
  const auto& s = std::get<ShapeStateII_III>(e.shape);
  const double expected = (1 / (2 * 0.5 * 0.707)) * (1 + std::sqrt(1 + std::pow(2 * 0.5 * 0.707 * 10, 2)));
  CHECK(s.rho == doctest::Approx(expected).epsilon(1e-14));
  CHECK(s.rho == doctest::Approx(11.52).epsilon(1e-3));
  CHECK(s.rho_1b1 == doctest::Approx(expected / 2));
  CHECK(s.rhat1 == doctest::Approx(-100.0));
  CHECK(residual(e, p).pass);
  CHECK_FALSE(find(preds, CaseLabel::P5_2d).exists);
}

TEST_CASE("two beacons, stacked pair case (b): Fig 5 parameters") {
  const ControlParams p = params(0.9, 0.6, 0.707, -0.707, 2);
  const auto preds = predict_config_III(p);
  const auto& plus = find(preds, CaseLabel::P5_2b_plus);
  const auto& minus = find(preds, CaseLabel::P5_2b_minus);
  REQUIRE(plus.exists);
  REQUIRE(minus.exists);
  const double L = 0.4 * 0.707, l0 = 0.6 * 0.707;
  const double phi = L / (0.9 * (L * L - l0 * l0));
  CHECK(plus.phi == doctest::Approx(phi).epsilon(1e-14));
  CHECK(plus.phi == doctest::Approx(-3.14).epsilon(1e-3));
  CHECK(std::get<ShapeStateII_III>(plus.shape).rho == doctest::Approx(2 * (-phi + 2)));
  CHECK(std::get<ShapeStateII_III>(minus.shape).rho == doctest::Approx(2 * (-phi - 2)));
  CHECK(plus.xtilde() == 1.0);
  CHECK(residual(plus, p).pass);
  CHECK(residual(minus, p).pass);
}

TEST_CASE("two beacons, general case (d): Fig 6 right passes the residual") {
  const ControlParams p = params(1, 0.35, -0.588, 0.707, 10);
  const auto& e = find(predict_config_III(p), CaseLabel::P5_2d);
  REQUIRE(e.exists);
  CHECK(e.rho_plus * e.rho_plus > 100);
  CHECK(e.rho_minus * e.rho_minus < 100);
  const ResidualReport r = residual(e, p);
  CHECK(r.pass);
  CHECK(r.max_abs_derivative < 1e-12);
}

TEST_CASE("perturbed prediction fails the residual") {
  const ControlParams p = params(1, 0.35, -0.588, 0.707, 10);
  EquilibriumPrediction e = find(predict_config_III(p), CaseLabel::P5_2d);
  std::get<ShapeStateII_III>(e.shape).rho *= 1.01;
  const ResidualReport r = residual(e, p);
  CHECK_FALSE(r.pass);
  double xbar_rate = 0;
  for (const auto& [n, v] : r.per_component) {
    if (n == "xbar1" || n == "xbar2") xbar_rate = std::max(xbar_rate, v);
  }
  CHECK(xbar_rate > 1e-6);
}

TEST_CASE("residual refuses absent predictions") {
  const auto& e = find(predict_config_II(params(1, 0.5, 0.4, 0, 0)), CaseLabel::P4_1);
  CHECK_THROWS_AS(residual(e, params(1, 0.5, 0.4, 0, 0)), ParameterError);
}

TEST_CASE("property: two-beacon predictions are parallel or antiparallel exactly") {
  gen::Rng rng(51);
  int seen = 0;
  for (int i = 0; i < 2000; ++i) {
    ControlParams p = rng.params();
    p.b = rng.uniform(0.5, 12);
    if (i % 4 == 0) p.a0 = 0;
    if (i % 7 == 0) p.a = p.lambda * p.a0 / (1 - p.lambda);
    if (std::abs(p.a) > 1) continue;
    for (const auto& e : predict_config_III(p)) {
      if (!e.exists) continue;
      ++seen;
      CHECK((e.xtilde() == 1.0 || e.xtilde() == -1.0));
    }
  }
  CHECK(seen > 500);
}

TEST_CASE("property: realized agents reproduce the predicted shape") {
  gen::Rng rng(52);
  int checked = 0;
  for (int i = 0; i < 600; ++i) {
    ControlParams p = rng.params();
    const int cfg = i % 3;
    p.b = cfg == 1 ? 0.0 : rng.uniform(0.5, 10);
    if (i % 5 == 0) p.a0 = 0;
    const ConfigType c = cfg == 0 ? ConfigType::I : cfg == 1 ? ConfigType::II : ConfigType::III;
    for (const auto& pred : predict(c, p)) {
      if (!pred.exists) continue;
      for (const auto& e : family_samples(pred, p)) {
        std::vector<AgentState> agents;
        for (const auto& spec : realize(e, p)) agents.push_back(spec.to_state());
        Scenario s;
        s.config = c;
        s.params = p;
        const auto got = shape_values(extract_shape(agents, s));
        const auto want = shape_values(e.shape);
        for (std::size_t k = 0; k < got.size(); ++k) {
          CHECK(std::abs(got[k] - want[k]) <= 1e-9 * std::max(1.0, std::abs(want[k])));
        }
        ++checked;
      }
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("case labels round-trip") {
  for (CaseLabel c : {CaseLabel::P3_1a, CaseLabel::P4_2b, CaseLabel::P5_2b_minus, CaseLabel::P5_2d}) {
    CHECK(case_from_string(to_string(c)) == c);
  }
  CHECK(to_string(CaseLabel::P5_2b_plus) == "P5.2b_plus");
  CHECK_THROWS_AS(case_from_string("P9"), ParameterError);
}
