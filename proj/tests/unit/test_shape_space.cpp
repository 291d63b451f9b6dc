#include "doctest.h"
#include "generators.hpp"

#include "cbp/shape_space.hpp"

using namespace cbp;

namespace {

double max_abs(const ShapeState& s) {
  double m = 0.0;
  for (double v : shape_values(s)) m = std::max(m, std::abs(v));
  return m;
}

// Independent recomputation of the twelve two-agent shape variables.
std::array<double, 12> direct_shape(const AgentState& a1, const AgentState& a2, double b) {
  const Vec3 r1 = a1.position, r2 = a2.position;
  const Vec3 x1 = a1.frame.x_axis, x2 = a2.frame.x_axis;
  const Vec3 rb1{0, 0, -b}, rb2{0, 0, b};
  const Vec3 r = r1 - r2;
  const double rho = norm(r);
  const double rho1 = norm(r1 - rb1);
  const double rho2 = norm(r2 - rb2);
  const Vec3 bh = rb2 - rb1;
  return {dot(x1, r) / rho,  -dot(x2, r) / rho, dot(x1, r1 - rb1) / rho1,
          dot(x2, r2 - rb2) / rho2, dot(x1, x2), rho, rho1, rho2, dot(r1, bh), dot(r2, bh),
          dot(x1, bh), dot(x2, bh)};
}

}  // namespace

TEST_CASE("extract_shape_I perpendicular geometry") {
  const AgentState a{{5, 0, 0}, frame_from_heading({0, 1, 0})};
  const ShapeStateI s = extract_shape_I(a, 0.0);
  CHECK(s.xbar_1b1 == doctest::Approx(0.0));
  CHECK(s.xbar_1b2 == doctest::Approx(0.0));
  CHECK(s.rho_1b1 == 5.0);
  CHECK(s.rho_1b2 == 5.0);
}

TEST_CASE("extract_shape_I on the beacon axis is flagged collinear") {
  const AgentState a{{0, 0, 5}, frame_from_heading({1, 0, 0})};
  const ShapeStateI s = extract_shape_I(a, 1.0);
  CHECK(s.rho_1b1 == 6.0);
  CHECK(s.rho_1b2 == 4.0);
  CHECK_FALSE(triangle_constraints_hold(s.rho_1b1, s.rho_1b2, 1.0));
  CHECK_THROWS_AS(shape_rhs_I(s, ControlParams{1, 0.5, 0, 0, 0, 0, 1.0}), ConstraintViolation);
}

TEST_CASE("extract_shape_I rejects an agent on a beacon") {
  const AgentState a{{0, 0, -2}, Frame{}};
  CHECK_THROWS_AS(extract_shape_I(a, 2.0), DegenerateVector);
}

TEST_CASE("law_of_cosines_dot examples") {
  const double b = 3.0;
  const double r = 2 * b / std::sqrt(2.0);
  CHECK(std::abs(law_of_cosines_dot(r, r, b)) < 1e-15);
  CHECK_THROWS_AS(law_of_cosines_dot(10, 10, 0), ConstraintViolation);
  CHECK(law_of_cosines_dot(6, 5, 2) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("shape_rhs_I vanishes at the equal-weight equilibrium") {
  ControlParams p;
  p.lambda = 0.5;
  p.mu = 1.0;
  p.ab1 = p.ab2 = -0.156;
  p.b = 10.0;
  const double k = 4 * p.mu * p.lambda * p.ab1;
  const double rho = (1 + std::sqrt(1 + k * k * p.b * p.b)) / (-k);
  CHECK(max_abs(shape_rhs_I({0, 0, rho, rho}, p)) < 1e-10);
}

TEST_CASE("shape_rhs_I distance rows") {
  ControlParams p;
  p.b = 1.0;
  const ShapeStateI d = shape_rhs_I({1.0, 0.2, 3.0, 2.5}, p);
  CHECK(d.rho_1b1 == 1.0);
  CHECK(d.rho_1b2 == 0.2);
}

TEST_CASE("extract_shape_II_III antipodal tangent agents") {
  const AgentState a1{{3, 0, 1}, frame_from_heading({0, 1, 0})};
  const AgentState a2{{-3, 0, 1}, frame_from_heading({0, -1, 0})};
  const std::vector<AgentState> agents{a1, a2};
  const ShapeStateII_III s = extract_shape_II_III(agents, 4.0);
  CHECK(s.xtilde == -1.0);
  CHECK(std::abs(s.xbar1) < 1e-15);
  CHECK(std::abs(s.xbar2) < 1e-15);
  CHECK(s.rho == 6.0);
}

TEST_CASE("extract_shape_II_III with b = 0 zeroes the axis projections") {
  gen::Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const std::vector<AgentState> agents{rng.agent(5.0), rng.agent(5.0)};
    const ShapeStateII_III s = extract_shape_II_III(agents, 0.0);
    CHECK(s.rhat1 == 0.0);
    CHECK(s.rhat2 == 0.0);
    CHECK(s.xhat1 == 0.0);
    CHECK(s.xhat2 == 0.0);
  }
}

TEST_CASE("extract_shape_II_III needs two agents") {
  const std::vector<AgentState> one{AgentState{{1, 2, 3}, Frame{}}};
  CHECK_THROWS_AS(extract_shape_II_III(one, 1.0), ParameterError);
}

TEST_CASE("property: extracted shapes match direct recomputation") {
  gen::Rng rng(32);
  for (int i = 0; i < 300; ++i) {
    const double b = i % 2 ? 10.0 : rng.uniform(0.5, 5.0);
    const std::vector<AgentState> agents{rng.agent(15.0), rng.agent(15.0)};
    const auto got = extract_shape_II_III(agents, b).to_array();
    const auto want = direct_shape(agents[0], agents[1], b);
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(std::abs(got[k] - want[k]) <= 1e-12 * std::max(1.0, std::abs(want[k])));
    }

    const AgentState& a = agents[0];
    const ShapeStateI s1 = extract_shape_I(a, b);
    const Vec3 d1 = a.position - Vec3{0, 0, -b};
    const Vec3 d2 = a.position - Vec3{0, 0, b};
    CHECK(std::abs(s1.xbar_1b1 - dot(a.frame.x_axis, d1) / norm(d1)) < 1e-14);
    CHECK(std::abs(s1.xbar_1b2 - dot(a.frame.x_axis, d2) / norm(d2)) < 1e-14);
    CHECK(std::abs(law_of_cosines_dot(s1.rho_1b1, s1.rho_1b2, b) -
                   dot(d1, d2) / (norm(d1) * norm(d2))) < 1e-12);
  }
}

TEST_CASE("property: constraint dot products equal their vector forms") {
  gen::Rng rng(33);
  for (int i = 0; i < 300; ++i) {
    const double b = rng.uniform(0.0, 10.0);
    const std::vector<AgentState> agents{rng.agent(15.0), rng.agent(15.0)};
    const ShapeStateII_III s = extract_shape_II_III(agents, b);
    const ConstraintDots c = constraint_dots(s);
    const Vec3 r = agents[0].position - agents[1].position;
    const Vec3 r1b1 = agents[0].position - Vec3{0, 0, -b};
    const Vec3 r2b2 = agents[1].position - Vec3{0, 0, b};
    const Vec3 u = r / norm(r), u1 = r1b1 / norm(r1b1), u2 = r2b2 / norm(r2b2);
    CHECK(std::abs(c.d1 - dot(u1, u)) < 1e-12);
    CHECK(std::abs(c.d2 - dot(u2, u)) < 1e-12);
    CHECK(std::abs(c.e1 - dot(agents[1].frame.x_axis, u1)) < 1e-12);
    CHECK(std::abs(c.e2 - dot(agents[0].frame.x_axis, u2)) < 1e-12);
  }
}

TEST_CASE("shape_rhs_II_III vanishes at the single-beacon equilibrium family") {
  ControlParams p;
  p.lambda = 0.5;
  p.mu = 1.0;
  p.a = -0.7071;
  p.a0 = 0.0;
  p.b = 0.0;
  const double rho = 2 / ((1 - p.lambda) * p.mu * (-p.a));
  for (double rb : {rho / 2, rho, 3 * rho}) {
    ShapeStateII_III s;
    s.xtilde = -1;
    s.rho = rho;
    s.rho_1b1 = s.rho_2b2 = rb;
    CHECK(max_abs(shape_rhs_II_III(s, p)) < 1e-10);
  }
}

TEST_CASE("shape_rhs_II_III vanishes at the equal-weight two-beacon equilibrium") {
  ControlParams p;
  p.lambda = 0.5;
  p.mu = 1.0;
  p.a = p.a0 = -0.707;
  p.b = 10.0;
  const double k = 2 * p.lambda * p.mu * p.a0;
  const double rho = (1 + std::sqrt(1 + k * k * p.b * p.b)) / (-k);
  ShapeStateII_III s;
  s.xtilde = -1;
  s.rho = rho;
  s.rho_1b1 = s.rho_2b2 = rho / 2;
  s.rhat1 = -p.b * p.b;
  s.rhat2 = p.b * p.b;
  CHECK(max_abs(shape_rhs_II_III(s, p)) < 1e-10);
}

TEST_CASE("shape_rhs_II_III rejects impossible shapes") {
  ControlParams p;
  p.b = 1.0;
  ShapeStateII_III s;
  s.rho = 1.0;
  s.rho_1b1 = 10.0;
  s.rho_2b2 = 1.0;
  CHECK_THROWS_AS(shape_rhs_II_III(s, p), ConstraintViolation);
  s.rho = 0.0;
  CHECK_THROWS_AS(shape_rhs_II_III(s, p), ConstraintViolation);
}
