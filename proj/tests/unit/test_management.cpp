#include <doctest.h>

#include <cmath>

#include "cpm/errors.hpp"
#include "cpm/interpolation.hpp"
#include "cpm/management.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using cpm::Event;
using cpm::ManagementConfig;
using cpm::Particle;

namespace {

ManagementConfig config(double d_max = 10.0, double d_min = 0.0) {
  ManagementConfig c;
  c.d_max = d_max;
  c.d_min = d_min;
  return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

// Buckley-Leverett pair (inflection particle, 0.2) at x=0 with neighbors placed by x1 and x0.
cpm::ParticleField bl_window(double x0, double x1) {
  const auto bl = fixture::buckley_leverett();
  return fixture::field(bl, {{x0, 0.95}, {x1, 0.8}, {0, bl->inflection_points()[0]}, {0, 0.2}, {1, 0.1}});
}

}  // namespace

TEST_CASE("insert_between places a particle on the interpolant") {
  auto b = fixture::field(fixture::burgers(), {{0, 0}, {2, 1}});
  cpm::insert_between(b, 0, config());
  REQUIRE(b.size() == 3);
  CHECK(b[1].x == 1.0);
  CHECK(b[1].u == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cpm::segment_area({b[0], b[1], *b.flux}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(cpm::segment_area({b[1], b[2], *b.flux}) == doctest::Approx(0.75).epsilon(1e-15));

  auto q = fixture::field(fixture::quartic(), {{0, 0}, {1, 1}});
  cpm::insert_between(q, 0, config());
  CHECK(q[1].x == 0.5);
  CHECK(q[1].u == doctest::Approx(std::cbrt(0.5)).epsilon(1e-14));

  auto c = fixture::field(fixture::quartic(), {{0, 0.3}, {1, 0.3}});
  cpm::insert_between(c, 0, config());
  CHECK(c[1].u == 0.3);

  auto hit = fixture::field(fixture::burgers(), {{0, 1}, {1, 0}});
  CHECK_THROWS_AS(cpm::insert_between(hit, 0, config()), cpm::PreconditionError);
}

TEST_CASE("insertions keep the interpolant pointwise") {
  auto q = fixture::field(fixture::quartic(), {{-1, -0.4}, {1, 0.9}});
  const auto before = q;
  cpm::insert_between(q, 0, config());
  cpm::insert_between(q, 1, config());
  const auto s0 = cpm::PiecewiseSolution::from_field(before);
  const auto s1 = cpm::PiecewiseSolution::from_field(q);
  for (int k = 0; k <= 40; ++k) {
    const double x = -1 + 2.0 * k / 40;
    CHECK(s1.value(x) == doctest::Approx(s0.value(x)).epsilon(1e-12));
  }
  CHECK(rel(cpm::total_area(q), cpm::total_area(before)) <= 1e-14);
}

TEST_CASE("merge_value examples") {
  const auto b = fixture::field(fixture::burgers(), {{0, 0}, {1, 2}, {1, 0}, {2, 0}});
  const auto m = cpm::merge_value(b, 1, config());
  CHECK(m.x23 == 1.0);
  CHECK(m.u23 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.removed == std::vector<std::size_t>{1, 2});

  const auto flat = fixture::field(fixture::burgers(), {{0, 0}, {1, 0.4}, {1, 0.4}, {2, 0}});
  CHECK(cpm::merge_value(flat, 1, config()).u23 == 0.4);
}

TEST_CASE("quartic merge balances the area by quadrature") {
  const auto q = fixture::field(fixture::quartic(), {{0, 0}, {1, 1}, {1, 0.2}, {2, 0.2}});
  const auto m = cpm::merge_value(q, 1, config());
  const auto ddf = [](double u) { return 3 * u * u; };
  const double before = 1 * oracle::average(ddf, 0, 1) + 0 + 1 * oracle::average(ddf, 0.2, 0.2);
  const double after = (m.x23 - 0) * oracle::average(ddf, 0, m.u23) + (2 - m.x23) * oracle::average(ddf, m.u23, 0.2);
  CHECK(rel(before, after) <= 1e-12);
  CHECK(m.u23 > 0.2);
  CHECK(m.u23 < 1.0);
  // the balance changes sign across the root, so the root is isolated
  const auto balance = [&](double u) {
    return m.x23 * oracle::average(ddf, 0, u) + (2 - m.x23) * oracle::average(ddf, u, 0.2) - before;
  };
  CHECK(balance(m.u23 - 1e-6) < 0);
  CHECK(balance(m.u23 + 1e-6) > 0);
}

TEST_CASE("boundary merges keep the outer position") {
  const auto left = fixture::field(fixture::burgers(), {{0, 1}, {0, 0}, {1, 0}});
  const auto m = cpm::merge_value(left, 0, config());
  CHECK(m.x23 == 0.0);
  const auto right = fixture::field(fixture::burgers(), {{0, 1}, {1, 1}, {1, 0}});
  CHECK(cpm::merge_value(right, 1, config()).x23 == 1.0);
}

TEST_CASE("tvd_safety_check") {
  const auto& b = *fixture::burgers();
  CHECK(cpm::tvd_safety_check(Particle{-1, 1}, {0, 0.9}, {0, 0.1}, Particle{1, 0}, b));
  CHECK(cpm::tvd_safety_check(Particle{-1, 1}, {0, 0.9}, {1e-6, 0.1}, Particle{2, 0}, b));
  CHECK_FALSE(cpm::tvd_safety_check(Particle{0, 1}, {1, 1}, {2, 0}, Particle{3, 0}, b));
  // the same gap passes once it is below 1/16 of the spans
  CHECK(cpm::tvd_safety_check(Particle{0, 1}, {1, 1}, {1.0625, 0}, Particle{3, 0}, b));
  CHECK_FALSE(cpm::tvd_safety_check(Particle{0, 1}, {1, 1}, {1.07, 0}, Particle{3, 0}, b));
  // f'' vanishing inside the range makes the ratio zero
  CHECK_FALSE(cpm::tvd_safety_check(Particle{0, 1}, {1, 0.5}, {1.01, -0.5}, Particle{3, -1}, *fixture::quartic()));
}

TEST_CASE("entropy_check") {
  CHECK(cpm::entropy_check(2.0, 1.0, 0.0, 1.5, 0.5));
  CHECK_FALSE(cpm::entropy_check(0.5, 1.0, 0.0, 1.5, 0.5));
  CHECK(cpm::entropy_check(std::nullopt, 1.0, 0.0, 1.5, 0.5));
  // a shock of -u^2/2 rises from left to right, so the ordering flips
  CHECK(cpm::entropy_check(0.0, 1.0, 2.0, 0.5, 1.5));
  CHECK_FALSE(cpm::entropy_check(1.5, 1.0, 2.0, 0.5, 1.5));
}

TEST_CASE("merge_with_fix on a resolved shock") {
  auto b = fixture::field(fixture::burgers(), {{-1, 1}, {0, 1}, {0, 0}, {1, 0}});
  cpm::EventLog log;
  cpm::merge_with_fix(b, 1, config(), &log);
  REQUIRE(log.events.size() == 1);
  CHECK(log.events[0].type == Event::Type::merge);
  REQUIRE(b.size() == 3);
  CHECK(b[1].u == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(b[1].merged_origin);
}

TEST_CASE("merge_with_fix refines coarse flanks") {
  auto b = fixture::field(fixture::burgers(), {{-1, 0}, {0, 2}, {0, 0}, {1, 0}});
  const double area = cpm::total_area(b);
  cpm::EventLog log;
  cpm::merge_with_fix(b, 1, config(), &log);
  REQUIRE(log.events.size() == 2);
  CHECK(log.events[0].type == Event::Type::fix_retry);
  CHECK(log.events[1].type == Event::Type::merge);
  CHECK(log.events[1].entropy_safe);
  CHECK(b.size() == 5);
  CHECK(std::abs(cpm::total_area(b) - area) <= 1e-12 * area);
  CHECK(cpm::validate(b).empty());

  auto again = fixture::field(fixture::burgers(), {{-1, 0}, {0, 2}, {0, 0}, {1, 0}});
  auto no_rounds = config();
  no_rounds.max_fix_rounds = 0;
  CHECK_THROWS_AS(cpm::merge_with_fix(again, 1, no_rounds), cpm::UnresolvedMergeError);

  auto off = fixture::field(fixture::burgers(), {{-1, 0}, {0, 2}, {0, 0}, {1, 0}});
  auto disabled = config();
  disabled.entropy_fix_enabled = false;
  cpm::EventLog off_log;
  cpm::merge_with_fix(off, 1, disabled, &off_log);
  REQUIRE(off_log.events.size() == 1);
  CHECK_FALSE(off_log.events[0].entropy_safe);
  CHECK(off.size() == 3);
}

TEST_CASE("inflection_merge steps conserve area") {
  const double setups[][3] = {{-2, -1, 1}, {-2, -0.1, 2}, {-0.05, -0.01, 3}};
  for (const auto& s : setups) {
    auto f = bl_window(s[0], s[1]);
    const double area = cpm::total_area(f);
    cpm::EventLog log;
    cpm::inflection_merge(f, 2, config(), &log);
    REQUIRE(log.events.size() == 1);
    CHECK(log.events[0].type == Event::Type::inflection_merge);
    CHECK(log.events[0].step == static_cast<int>(s[2]));
    CHECK(f.size() == 4);
    CHECK(rel(cpm::total_area(f), area) <= 1e-12);
    CHECK(cpm::validate(f).empty());
    int inflection = 0;
    for (const auto& p : f.particles) inflection += p.is_inflection ? 1 : 0;
    CHECK(inflection == 1);
  }
}

TEST_CASE("inflection_merge commutes with the mirror symmetry") {
  const auto bl = fixture::buckley_leverett();
  const auto mirrored_flux = std::make_shared<const cpm::FluxModel>(bl->transformed(-1, -1));
  for (double x1 : {-1.0, -0.1, -0.01}) {
    auto f = bl_window(-0.05 + (x1 < -0.05 ? -2 : 0), x1);
    cpm::ParticleField g;
    g.flux = mirrored_flux;
    g.d_max = f.d_max;
    for (auto it = f.particles.rbegin(); it != f.particles.rend(); ++it) {
      g.particles.push_back({-it->x, -it->u, it->is_inflection, false});
    }
    cpm::inflection_merge(f, 2, config());
    cpm::inflection_merge(g, 1, config());
    REQUIRE(f.size() == g.size());
    const std::size_t n = f.size();
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(g[n - 1 - k].x == doctest::Approx(-f[k].x).epsilon(1e-12));
      CHECK(g[n - 1 - k].u == doctest::Approx(-f[k].u).epsilon(1e-12));
    }
  }
}

TEST_CASE("inflection_merge rejects unsupported windows") {
  const auto bl = fixture::buckley_leverett();
  const double us = bl->inflection_points()[0];
  auto near_edge = fixture::field(bl, {{-1, 0.8}, {0, us}, {0, 0.2}, {1, 0.1}});
  CHECK_THROWS_AS(cpm::inflection_merge(near_edge, 1, config()), cpm::UnsupportedCaseError);
  auto plain = fixture::field(bl, {{-1, 0.3}, {0, 0.3}, {0, 0.2}, {1, 0.1}});
  CHECK_THROWS_AS(cpm::inflection_merge(plain, 1, config()), cpm::PreconditionError);
}

TEST_CASE("management_pass orders insertions before merges") {
  SUBCASE("oversized rarefaction gap") {
    auto f = fixture::field(fixture::burgers(), {{0, 0}, {1.5, 1}}, 1.0);
    cpm::EventLog log;
    cpm::management_pass(f, config(1.0), &log);
    CHECK(log.events.size() == 1);
    CHECK(log.count(Event::Type::insert) == 1);
  }
  SUBCASE("coincident pair") {
    auto f = fixture::field(fixture::burgers(), {{-1, 1}, {0, 1}, {0, 0}, {1, 0}}, 5.0);
    cpm::EventLog log;
    cpm::management_pass(f, config(5.0), &log);
    CHECK(log.events.size() == 1);
    CHECK(log.count(Event::Type::merge) == 1);
  }
  SUBCASE("both") {
    auto f = fixture::field(fixture::burgers(), {{-1, 1}, {0, 1}, {0, 0}, {1, 0}, {4, 1}}, 2.0);
    const double area = cpm::total_area(f);
    cpm::EventLog log;
    cpm::management_pass(f, config(2.0), &log);
    REQUIRE(log.events.size() >= 2);
    CHECK(log.events.front().type == Event::Type::insert);
    CHECK(log.events.back().type == Event::Type::merge);
    CHECK(rel(cpm::total_area(f), area) <= 1e-14);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) CHECK(f[i + 1].x - f[i].x <= 2.0);
  }
}

TEST_CASE("postprocess_shocks") {
  SUBCASE("nothing merged") {
    const auto f = fixture::field(fixture::quartic(), {{0, 0}, {1, 1}, {2, 0.5}});
    const auto r = cpm::postprocess_shocks(f);
    CHECK(r.reconstructed == 0);
    REQUIRE(r.solution.nodes().size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.solution.nodes()[i].x == f[i].x);
  }
  SUBCASE("symmetric neighbors put the jump at the merged particle") {
    auto f = fixture::field(fixture::burgers(), {{-2, 1}, {-1, 1}, {0, 0.5}, {1, 0}, {2, 0}});
    f[2].merged_origin = true;
    const auto r = cpm::postprocess_shocks(f);
    CHECK(r.reconstructed == 1);
    CHECK(r.warnings.empty());
    const auto& n = r.solution.nodes();
    REQUIRE(n.size() == 6);
    CHECK(n[2].x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(n[3].x == n[2].x);
    CHECK(n[2].u == 1.0);
    CHECK(n[3].u == 0.0);
    CHECK(r.solution.integral(-2, 2) == doctest::Approx(cpm::total_area(f)).epsilon(1e-14));
  }
  SUBCASE("area is preserved for curved flanks") {
    auto f = fixture::field(fixture::quartic(), {{-2, 1.0}, {-1, 0.99}, {0, 0.97}, {0, 0.05}, {1, 0.04}, {2, 0.03}});
    cpm::merge_with_fix(f, 2, config());
    REQUIRE(f.size() == 5);
    REQUIRE(f[2].merged_origin);
    const auto r = cpm::postprocess_shocks(f);
    CHECK(r.warnings.empty());
    CHECK(r.reconstructed == 1);
    CHECK(r.solution.integral(-2, 2) == doctest::Approx(cpm::total_area(f)).epsilon(1e-12));
  }
  SUBCASE("crowded merged particles are left alone") {
    auto f = fixture::field(fixture::burgers(), {{-2, 1}, {-1, 0.8}, {0, 0.5}, {1, 0}, {2, 0}});
    f[1].merged_origin = true;
    f[2].merged_origin = true;
    const auto r = cpm::postprocess_shocks(f);
    CHECK(r.reconstructed == 0);
    CHECK(r.warnings.size() == 2);
  }
}
