#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cpm/errors.hpp"
#include "cpm/io.hpp"
#include "cpm/state.hpp"
#include "fixtures.hpp"

using cpm::InitialCondition;
using cpm::Violation;

namespace {

bool has_kind(const std::vector<Violation>& vs, Violation::Kind k, std::size_t index) {
  for (const auto& v : vs) {
    if (v.kind == k && v.index == index) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("sample_initial places equidistant particles") {
  InitialCondition ic;
  ic.u0 = [](double x) { return x; };
  ic.domain = {0, 1};
  const auto f = cpm::sample_initial(ic, 3, fixture::burgers(), 1.0, 0.0);
  REQUIRE(f.size() == 3);
  CHECK(f[0].x == 0.0);
  CHECK(f[0].u == 0.0);
  CHECK(f[1].x == 0.5);
  CHECK(f[1].u == 0.5);
  CHECK(f[2].x == 1.0);
  CHECK(f[2].u == 1.0);
  CHECK(f.t == 0.0);
}

TEST_CASE("sample_initial of the exp-cos data") {
  const auto ic = InitialCondition::exp_cos({-3, 3});
  const auto f = cpm::sample_initial(ic, 7, fixture::quartic(), 1.9, 0.0);
  REQUIRE(f.size() == 7);
  CHECK(f[3].x == 0.0);
  CHECK(f[3].u == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f[2].u == doctest::Approx(-std::exp(-1.0)).epsilon(1e-14));
  CHECK(f[4].u == doctest::Approx(-std::exp(-1.0)).epsilon(1e-14));
  CHECK(cpm::validate(f).empty());
}

TEST_CASE("sample_initial inserts an inflection particle on the chord") {
  const auto bl = fixture::buckley_leverett();
  const double us = bl->inflection_points()[0];
  InitialCondition ic;
  ic.u0 = [](double x) { return x < 0.6 ? 0.9 : 0.1; };
  ic.domain = {0, 1};
  const auto f = cpm::sample_initial(ic, 3, bl, 1.0, 0.0);
  REQUIRE(f.size() == 4);
  CHECK(f[2].is_inflection);
  CHECK(f[2].u == us);
  const double s = (us - 0.9) / (0.1 - 0.9);
  CHECK(f[2].x == doctest::Approx(0.5 + s * 0.5).epsilon(1e-15));
  CHECK(cpm::validate(f).empty());
}

TEST_CASE("declared jumps are sampled as coincident pairs") {
  const auto ic = InitialCondition::riemann(1.0, 0.0, 0.25, {-1, 1}, true);
  const auto f = cpm::sample_initial(ic, 5, fixture::burgers(), 1.0, 0.0);
  REQUIRE(f.size() == 7);
  CHECK(f[3].x == 0.25);
  CHECK(f[4].x == 0.25);
  CHECK(f[3].u == 1.0);
  CHECK(f[4].u == 0.0);
  const auto on_grid = InitialCondition::riemann(1.0, 0.0, 0.0, {-1, 1}, true);
  const auto g = cpm::sample_initial(on_grid, 5, fixture::burgers(), 1.0, 0.0);
  CHECK(g.size() == 6);
}

TEST_CASE("sample_initial rejects bad parameters") {
  const auto ic = InitialCondition::exp_cos({-3, 3});
  CHECK_THROWS_AS(cpm::sample_initial(ic, 1, fixture::quartic(), 1.0, 0.0), cpm::ConfigError);
  CHECK_THROWS_AS(cpm::sample_initial(ic, 5, fixture::quartic(), 1.0, 2.0), cpm::ConfigError);
  CHECK_THROWS_AS(cpm::sample_initial(ic, 5, fixture::buckley_leverett(), 1.0, 0.0), cpm::ConfigError);
}

TEST_CASE("sampling is deterministic") {
  const auto ic = InitialCondition::sawtooth(0.3, 2.0, {-1, 1});
  const auto a = cpm::sample_initial(ic, 41, fixture::quartic(), 0.1, 0.0);
  const auto b = cpm::sample_initial(ic, 41, fixture::quartic(), 0.1, 0.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].u == b[i].u);
  }
}

TEST_CASE("validate reports violations") {
  SUBCASE("ordered field") {
    CHECK(cpm::validate(fixture::field(fixture::burgers(), {{0, 0}, {1, 1}, {2, 0}})).empty());
  }
  SUBCASE("swapped neighbors") {
    const auto f = fixture::field(fixture::burgers(), {{0, 0}, {2, 1}, {1, 0}});
    const auto vs = cpm::validate(f);
    CHECK(has_kind(vs, Violation::Kind::ordering, 1));
  }
  SUBCASE("missing inflection particle") {
    const auto f = fixture::field(fixture::buckley_leverett(), {{0, 0.9}, {1, 0.1}});
    CHECK(has_kind(cpm::validate(f), Violation::Kind::straddle, 0));
  }
  SUBCASE("stale inflection flag") {
    auto f = fixture::field(fixture::burgers(), {{0, 0}, {1, 1}});
    f[1].is_inflection = true;
    CHECK(has_kind(cpm::validate(f), Violation::Kind::inflection_flag, 1));
  }
  SUBCASE("out of range and non-finite") {
    auto f = fixture::field(fixture::buckley_leverett(), {{0, 0.2}, {1, 1.2}, {2, 0.3}});
    f[2].x = NAN;
    const auto vs = cpm::validate(f);
    CHECK(has_kind(vs, Violation::Kind::domain, 1));
    CHECK(has_kind(vs, Violation::Kind::non_finite, 2));
  }
  SUBCASE("bad distances") {
    auto f = fixture::field(fixture::burgers(), {{0, 0}, {1, 1}}, 1.0, 1.0);
    CHECK(has_kind(cpm::validate(f), Violation::Kind::parameters, 0));
  }
}

TEST_CASE("snapshot CSV rows round-trip exactly") {
  auto f = fixture::field(fixture::buckley_leverett(), {{0.1, 1.0 / 3.0}, {0.7, 0.0}});
  f.particles.insert(f.particles.begin() + 1, cpm::Particle{0.2, f.flux->inflection_points()[0], true, false});
  f[2].merged_origin = true;
  f.t = 0.1 + 0.2;
  std::ostringstream out;
  cpm::write_snapshot_header(out);
  cpm::write_snapshot_rows(out, f);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,u,is_inflection,merged_origin");
  for (std::size_t i = 0; i < f.size(); ++i) {
    REQUIRE(std::getline(in, line));
    std::vector<std::string> cols;
    std::stringstream row(line);
    for (std::string c; std::getline(row, c, ',');) cols.push_back(c);
    REQUIRE(cols.size() == 5);
    CHECK(cpm::io::parse_double(cols[0]) == f.t);
    CHECK(cpm::io::parse_double(cols[1]) == f[i].x);
    CHECK(cpm::io::parse_double(cols[2]) == f[i].u);
    CHECK((cols[3] == "1") == f[i].is_inflection);
    CHECK((cols[4] == "1") == f[i].merged_origin);
  }
}
