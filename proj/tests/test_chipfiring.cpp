#include <set>

#include "doctest.h"
#include "sandpile/chipfiring.hpp"
#include "support.hpp"

using namespace sandpile;
using namespace sandpile::testing;

TEST_CASE("parallel_step examples") {
  CHECK(parallel_step(build_cycle(3), Config{2, 2, 2}) == Config{2, 2, 2});
  CHECK(parallel_step(build_cycle(4), Config{2, 0, 0, 0}) == Config{0, 1, 0, 1});
  const Config stable{1, 0, 1, 1};
  CHECK(parallel_step(build_cycle(4), stable) == stable);
  CHECK_THROWS_AS(parallel_step(build_cycle(4), Config{1, 1}), std::invalid_argument);
}

TEST_CASE("property: gather kernel equals scatter reference and conserves mass") {
  RngStream rng(31, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_below(30);
    const MultiGraph g = random_multigraph(rng, n);
    const Config c = random_config(rng, g, 3);
    const Config a = parallel_step(g, c);
    CHECK(a == parallel_step_serial(g, c));
    CHECK(a.total() == c.total());
  }
}

TEST_CASE("find_orbit examples") {
  const OrbitSummary s = find_orbit(build_cycle(4), Config{1, 1, 1, 1});
  CHECK(s.transient == 0);
  CHECK(s.period == 1);
  CHECK(s.activity == Rational(0));

  const OrbitSummary t = find_orbit(build_cycle(3), Config{2, 2, 2});
  CHECK(t.period == 1);
  CHECK(t.activity == Rational(1));
  CHECK(orbit_to_json(t) == R"({"transient":0,"period":1,"activity_num":1,"activity_den":1})");

  // (2,0,0,0) -> (0,1,0,1), which is stable.
  const OrbitSummary u = find_orbit(build_cycle(4), Config{2, 0, 0, 0});
  CHECK(u.transient == 1);
  CHECK(u.period == 1);

  // Two particles walking around a 4-cycle in lockstep: period 2, half active.
  const OrbitSummary w = find_orbit(build_cycle(4), Config{2, 0, 2, 0});
  CHECK(w.transient == 0);
  CHECK(w.period == 2);
  CHECK(w.activity == Rational(1, 2));
  CHECK(w.site_rate(0) == Rational(1, 2));

  CHECK_THROWS_AS(find_orbit(build_flower(50), Config(std::vector<Height>(101, 3)), 2), BudgetExceeded);
  CHECK_FALSE(try_find_orbit(build_flower(50), Config(std::vector<Height>(101, 3)), 2).has_value());
}

TEST_CASE("property: orbit is genuinely periodic with the reported transient") {
  RngStream rng(37, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(10);
    const MultiGraph g = random_multigraph(rng, n);
    const Config c = random_config(rng, g, 2);
    const OrbitSummary s = find_orbit(g, c);
    Config x = c;
    std::vector<Config> traj{x};
    for (Count i = 0; i < s.transient + s.period; ++i) traj.push_back(x = parallel_step(g, x));
    CHECK(traj[s.transient] == traj[s.transient + s.period]);
    for (Count p = 1; p < s.period; ++p) CHECK(traj[s.transient] != traj[s.transient + p]);
    if (s.transient > 0) CHECK(traj[s.transient - 1] != traj[s.transient - 1 + s.period]);
  }
}

TEST_CASE("mirror") {
  CHECK(mirror(build_bracelet(5), Config(5, 0)) == Config(5, 7));
  CHECK(mirror(build_cycle(4), Config{1, 0, 3, 2}) == Config{2, 3, 0, 1});
  const Config c{1, 0, 3, 2};
  CHECK(mirror(build_cycle(4), mirror(build_cycle(4), c)) == c);
  CHECK_THROWS_AS(mirror(build_cycle(4), Config{4, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("property: mirror commutes with the parallel step") {
  RngStream rng(41, 0);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(10);
    const MultiGraph g = random_multigraph(rng, n);
    Config c(n);
    for (Vertex v = 0; v < n; ++v) c[v] = static_cast<Height>(rng.uniform_below(2 * g.degree(v)));
    const Config next = parallel_step(g, c);
    bool bounded = true;
    for (Vertex v = 0; v < n; ++v) bounded = bounded && next[v] <= 2 * g.degree(v) - 1;
    if (!bounded) continue;
    ++checked;
    CHECK(mirror(g, next) == parallel_step(g, mirror(g, c)));
  }
  CHECK(checked > 500);
}

TEST_CASE("property: periodic orbits of period >= 2 respect the 2d-1 height bound") {
  RngStream rng(43, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(12);
    const MultiGraph g = random_multigraph(rng, n);
    const Config c = random_config(rng, g, 2);
    const OrbitSummary s = find_orbit(g, c);
    if (s.period < 2) continue;
    Config x = c;
    for (Count i = 0; i < s.transient; ++i) x = parallel_step(g, x);
    for (Count i = 0; i < s.period; ++i) {
      for (Vertex v = 0; v < n; ++v) CHECK(x[v] <= 2 * g.degree(v) - 1);
      x = parallel_step(g, x);
    }
  }
}

TEST_CASE("flower: activity from R and Z") {
  CHECK(flower_activity_from_RZ(10, 34, 4) == Rational(1, 3));
  CHECK(flower_activity_from_RZ(10, 33, 4) == Rational(0));
  CHECK(flower_activity_from_RZ(10, 40, 4) == Rational(1, 2));
  CHECK(flower_activity_from_RZ(10, 60, 4) == Rational(2, 3));
  CHECK(flower_activity_from_RZ(10, 65, 4) == Rational(2, 3));
  CHECK(flower_activity_from_RZ(10, 66, 4) == Rational(1));
  CHECK(flower_activity_from_RZ(10, 0, 4) == Rational(0));
  CHECK_THROWS_AS(flower_activity_from_RZ(10, 0, 11), std::invalid_argument);
}

TEST_CASE("flower: petal invariant") {
  const MultiGraph f = build_flower(3);
  const PetalInvariant p = petal_invariant(f, Config{0, 2, 2, 4, 1, 0, 2});
  CHECK(p.x == std::vector<std::uint8_t>{0, 0, 1});
  CHECK(p.zero_petals == 2);
  CHECK(petal_invariant(f, Config(7, 0)).zero_petals == 3);
  CHECK(petal_invariant(build_complete(3), Config{0, 1, 1}).zero_petals == 1);
  CHECK_THROWS_AS(petal_invariant(build_cycle(5), Config(5, 0)), std::invalid_argument);
  CHECK_THROWS_AS(petal_invariant(build_complete(5), Config(5, 0)), std::invalid_argument);
}

TEST_CASE("property: flower periods, activities and the petal invariant") {
  RngStream rng(47, 0);
  const std::set<Rational, decltype([](Rational a, Rational b) { return a.num * b.den < b.num * a.den; })>
      allowed{Rational(0), Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(1)};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t petals = 1 + rng.uniform_below(40);
    const MultiGraph f = build_flower(petals);
    const Config c = random_config(rng, f, 1 + static_cast<Height>(rng.uniform_below(3)));
    const OrbitSummary s = find_orbit(f, c);
    CHECK(s.period <= 3);
    CHECK(allowed.count(s.activity) == 1);
    const Count z = petal_invariant(f, c).zero_petals;
    Config x = c;
    for (int i = 0; i < 20; ++i) {
      x = parallel_step(f, x);
      CHECK(petal_invariant(f, x).zero_petals == z);
    }
  }
}

TEST_CASE("bracelet parity") {
  CHECK(bracelet_parity(Config{3, 2, 5}) == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(bracelet_parity(Config{0, 2, 4, 8}) == std::vector<std::uint8_t>{0, 0, 0, 0});
  RngStream rng(53, 0);
  const MultiGraph b = build_bracelet(12);
  for (int trial = 0; trial < 100; ++trial) {
    Config x = random_config(rng, b, 2);
    const auto parity = bracelet_parity(x);
    for (int i = 0; i < 10; ++i) {
      x = parallel_step(b, x);
      CHECK(bracelet_parity(x) == parity);
    }
  }
}
