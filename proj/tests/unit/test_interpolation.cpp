#include <doctest.h>

#include <cmath>

#include "cpm/errors.hpp"
#include "cpm/interpolation.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using cpm::Particle;
using cpm::Segment;

namespace {

const cpm::FluxModel& B() { return *fixture::burgers(); }
const cpm::FluxModel& Q() { return *fixture::quartic(); }

double cube(double u) { return u * u * u; }

}  // namespace

TEST_CASE("x_of_u examples") {
  const Segment s(Particle{0, 0}, Particle{2, 1}, B());
  CHECK(cpm::x_of_u(s, 0.0) == 0.0);
  CHECK(cpm::x_of_u(s, 1.0) == 2.0);
  CHECK(cpm::x_of_u(s, 0.5) == 1.0);
  const Segment q(Particle{0, 0}, Particle{1, 1}, Q());
  CHECK(cpm::x_of_u(q, 0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK_THROWS_AS(cpm::x_of_u(q, 1.5), cpm::DomainError);
}

TEST_CASE("u_of_x examples") {
  const Segment s(Particle{0, 0}, Particle{2, 1}, B());
  CHECK(cpm::u_of_x(s, 0.0) == 0.0);
  CHECK(cpm::u_of_x(s, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  const Segment q(Particle{0, 0}, Particle{1, 1}, Q());
  CHECK(cpm::u_of_x(q, 0.5) == doctest::Approx(std::cbrt(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(cpm::u_of_x(q, 1.5), cpm::DomainError);
  const Segment c(Particle{0, 0.3}, Particle{1, 0.3}, Q());
  CHECK(cpm::u_of_x(c, 0.4) == 0.3);
}

TEST_CASE("u_of_x inverts x_of_u") {
  const Segment q(Particle{-1, -0.7}, Particle{2, 1.3}, Q());
  for (int k = 0; k <= 20; ++k) {
    const double u = -0.7 + 2.0 * k / 20.0;
    CHECK(cpm::u_of_x(q, cpm::x_of_u(q, u)) == doctest::Approx(u).epsilon(1e-12));
  }
}

TEST_CASE("segment_area examples") {
  CHECK(cpm::segment_area({Particle{0, 0.4}, Particle{3, 0.4}, Q()}) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(cpm::segment_area({Particle{0, 0}, Particle{2, 1}, B()}) == 1.0);
  CHECK(cpm::segment_area({Particle{0, 0}, Particle{4, 1}, Q()}) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("segment_area matches quadrature of the interpolant") {
  const auto dq = [](double u) { return cube(u); };
  const double cases[][4] = {{0, 0.2, 1, 1}, {-1, -0.5, 0.3, 0.9}, {2, 1.5, 2.5, -0.4}};
  for (const auto& c : cases) {
    const Segment s(Particle{c[0], c[1]}, Particle{c[2], c[3]}, Q());
    CHECK(cpm::segment_area(s) == doctest::Approx(oracle::area_by_x(dq, c[0], c[1], c[2], c[3])).epsilon(1e-8));
  }
}

TEST_CASE("segment_area_between sums to the whole") {
  const Segment s(Particle{-1, -0.5}, Particle{0.3, 0.9}, Q());
  const double whole = cpm::segment_area(s);
  const double split = cpm::segment_area_between(s, -1, -0.2) + cpm::segment_area_between(s, -0.2, 0.3);
  CHECK(split == doctest::Approx(whole).epsilon(1e-13));
  const double part = cpm::segment_area_between(s, -0.6, 0.1);
  const double expected = oracle::integrate(
      [](double x) { return oracle::interpolant_value([](double u) { return cube(u); }, -1, -0.5, 0.3, 0.9, x); },
      -0.6, 0.1, 1e-13);
  CHECK(part == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("total_area and total_variation examples") {
  const auto one = fixture::field(fixture::quartic(), {{0, 0}, {4, 1}});
  CHECK(cpm::total_area(one) == cpm::segment_area({one[0], one[1], Q()}));
  CHECK(cpm::total_area(fixture::field(fixture::burgers(), {{0, 0}, {1, 1}, {2, 0}})) == 1.0);
  CHECK(cpm::total_area(fixture::field(fixture::quartic(), {{0, 0}, {1, 1}, {2, 0}})) ==
        doctest::Approx(1.5).epsilon(1e-15));
  CHECK(cpm::total_variation(fixture::field(fixture::burgers(), {{0, 0}, {1, 0.2}, {2, 0.7}})) ==
        doctest::Approx(0.7).epsilon(1e-15));
  CHECK(cpm::total_variation(fixture::field(fixture::burgers(), {{0, 0}, {1, 1}, {2, 0}})) == 2.0);
}

TEST_CASE("kruzkov_entropy examples") {
  const auto f = fixture::field(fixture::quartic(), {{0, 0.2}, {1, 1}, {2.5, 0.4}});
  const double area = cpm::total_area(f);
  CHECK(cpm::kruzkov_entropy(f, -0.3) == doctest::Approx(area + 0.3 * 2.5).epsilon(1e-14));
  const auto b = fixture::field(fixture::burgers(), {{0, 0}, {2, 1}});
  CHECK(cpm::kruzkov_entropy(b, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  const auto c = fixture::field(fixture::burgers(), {{0, 0.3}, {2, 0.3}});
  CHECK(cpm::kruzkov_entropy(c, 0.5) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("kruzkov_entropy matches quadrature in x") {
  const auto dq = [](double u) { return cube(u); };
  const double segs[][4] = {{0, 0.2, 1, 1}, {1, 1, 2.5, 0.4}, {-2, -0.8, -1, -0.1}};
  for (const auto& s : segs) {
    const auto f = fixture::field(fixture::quartic(), {{s[0], s[1]}, {s[2], s[3]}});
    for (double k : {-1.0, 0.0, 0.35, 0.6, 0.95, 1.2}) {
      const double ref = oracle::integrate(
          [&](double x) { return std::abs(oracle::interpolant_value(dq, s[0], s[1], s[2], s[3], x) - k); },
          s[0], s[2], 1e-12);
      CHECK(cpm::kruzkov_entropy(f, k) == doctest::Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("sample_curve") {
  CHECK_THROWS_AS(cpm::sample_curve(fixture::field(fixture::burgers(), {{0, 0}, {1, 1}}), 1),
                  cpm::PreconditionError);
  const auto flat = cpm::sample_curve(fixture::field(fixture::quartic(), {{0, 0.5}, {1, 0.5}}), 8);
  CHECK(flat.size() == 2);
  const auto line = cpm::sample_curve(fixture::field(fixture::burgers(), {{0, 0}, {2, 1}}), 5);
  REQUIRE(line.size() == 5);
  for (const auto& p : line) CHECK(p.x == doctest::Approx(2 * p.u).epsilon(1e-15));
  const auto shock = cpm::sample_curve(fixture::field(fixture::quartic(), {{0, 0}, {1, 1}, {1, 0}, {2, 0}}), 6);
  int vertical = 0;
  for (const auto& p : shock) vertical += p.x == 1.0 ? 1 : 0;
  CHECK(vertical == 6);
  for (std::size_t i = 1; i < shock.size(); ++i) CHECK(shock[i].x >= shock[i - 1].x);
}

TEST_CASE("PiecewiseSolution evaluates the interpolant") {
  const auto f = fixture::field(fixture::quartic(), {{0, 0.2}, {1, 1}, {1, 0.1}, {2, 0.1}});
  const auto s = cpm::PiecewiseSolution::from_field(f);
  CHECK(s.value(-1) == 0.2);
  CHECK(s.value(1.0) == 0.1);
  CHECK(s.value(3.0) == 0.1);
  const auto dq = [](double u) { return cube(u); };
  CHECK(s.value(0.4) == doctest::Approx(oracle::interpolant_value(dq, 0, 0.2, 1, 1, 0.4)).epsilon(1e-12));
  CHECK(s.integral(-5, 5) == doctest::Approx(cpm::total_area(f)).epsilon(1e-14));
  CHECK(s.breakpoints() == std::vector<double>{0, 1, 2});
  CHECK_THROWS_AS(cpm::PiecewiseSolution({{1, 0}, {0, 0}}, fixture::burgers()), cpm::PreconditionError);
}
