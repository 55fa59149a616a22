#include <algorithm>

#include "doctest.h"
#include "sandpile/core.hpp"
#include "support.hpp"

using namespace sandpile;
using namespace sandpile::testing;

TEST_CASE("stabilize: single toppling on the sinked 4-cycle") {
  const SinkedGraph z4 = build_sinked_cycle(4);
  const Stabilized r = stabilize(z4, Config{0, 2, 0, 0});
  CHECK(r.config == Config{1, 0, 1, 0});
  CHECK(r.odometer == Odometer{0, 1, 0, 0});
  const Stabilized f = stabilize_fifo(z4, Config{0, 2, 0, 0});
  CHECK(f.config == r.config);
}

TEST_CASE("stabilize: stable input is a fixed point") {
  const SinkedGraph g = build_ladder(4);
  const Config c{5, 0, 2, 1, 2, 0, 0, 0};
  const Stabilized r = stabilize(g, c);
  CHECK(r.config == c);
  CHECK(r.odometer.is_zero());
}

TEST_CASE("stabilize: (2,2,2) on the sinked 4-cycle against hand toppling") {
  const SinkedGraph z4 = build_sinked_cycle(4);
  const Config c{0, 2, 2, 2};
  const Stabilized r = stabilize(z4, c);
  const Stabilized greedy = stabilize_ordered(z4, c, ToppleOrder::GreedyMax);
  CHECK(r.config == greedy.config);
  CHECK(r.odometer == greedy.odometer);
  CHECK(r.odometer == Odometer{0, 2, 3, 2});
  CHECK(r.config == Config{4, 1, 0, 1});
  CHECK_THROWS_AS(stabilize(z4, Config{0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(stabilize(z4, Config{0, -1, 0, 0}), std::invalid_argument);
}

TEST_CASE("stabilize_or_detect") {
  CHECK(std::holds_alternative<NonStabilizing>(stabilize_or_detect(build_cycle(3), Config{2, 2, 2})));

  const auto s = stabilize_or_detect(build_cycle(4), Config{1, 1, 1, 1});
  REQUIRE(std::holds_alternative<Stabilized>(s));
  CHECK(std::get<Stabilized>(s).odometer.is_zero());

  const auto t = stabilize_or_detect(build_cycle(4), Config{2, 1, 0, 0});
  REQUIRE(std::holds_alternative<Stabilized>(t));
  CHECK(std::get<Stabilized>(t).config == Config{1, 0, 1, 1});
  CHECK(std::get<Stabilized>(t).odometer == Odometer{1, 1, 0, 0});

  const auto n = stabilize_or_detect(build_cycle(4), Config{2, 2, 1, 1});
  REQUIRE(std::holds_alternative<NonStabilizing>(n));
  for (Count c : std::get<NonStabilizing>(n).odometer) CHECK(c >= 1);
}

TEST_CASE("add_and_stabilize") {
  const SinkedGraph z4 = build_sinked_cycle(4);
  const Stabilized a = add_and_stabilize(z4, Config{0, 1, 1, 1}, 2);
  CHECK(a.config == Config{2, 1, 0, 1});
  CHECK(a.odometer == Odometer{0, 1, 2, 1});
  CHECK_THROWS_AS(add_and_stabilize(z4, Config{0, 1, 1, 1}, 0), std::invalid_argument);

  const SinkedGraph l = build_ladder(4);
  const Stabilized b = add_and_stabilize(l, Config{0, 0, 1, 0, 0, 1, 0, 0}, 3);
  CHECK(b.config == Config{0, 0, 1, 1, 0, 1, 0, 0});
  CHECK(b.odometer.is_zero());
}

TEST_CASE("additions commute") {
  RngStream rng(3, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.uniform_below(8);
    const SinkedGraph g(random_multigraph(rng, n), random_sinks(rng, n));
    Config c = stabilize(g, random_config(rng, g.graph(), 2)).config;
    const Vertex v = g.non_sinks()[rng.uniform_below(g.non_sinks().size())];
    const Vertex w = g.non_sinks()[rng.uniform_below(g.non_sinks().size())];
    const Config vw = add_and_stabilize(g, add_and_stabilize(g, c, v).config, w).config;
    const Config wv = add_and_stabilize(g, add_and_stabilize(g, c, w).config, v).config;
    CHECK(vw == wv);
  }
}

TEST_CASE("is_recurrent") {
  const SinkedGraph b4 = build_sinked_bracelet(4);
  CHECK(is_recurrent(b4, Config{0, 2, 3, 2}));
  CHECK_FALSE(is_recurrent(b4, Config{0, 1, 1, 3}));

  const SinkedGraph z5 = build_sinked_cycle(5);
  CHECK(is_recurrent(z5, Config{0, 1, 1, 1, 1}));
  CHECK_FALSE(is_recurrent(z5, Config{0, 0, 1, 0, 1}));
  CHECK(is_recurrent(z5, Config{0, 1, 0, 1, 1}));

  for (const SinkedGraph& g : {build_ladder(5), build_sinked_flower(4), build_wired_tree(3, 3)})
    CHECK(is_recurrent(g, max_stable(g)));
  CHECK_THROWS_AS(is_recurrent(z5, Config{0, 2, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("enumerate_recurrent") {
  const SinkedGraph k3 = build_sinked_complete(3);
  const auto rk3 = enumerate_recurrent(k3);
  REQUIRE(rk3.size() == 3);
  CHECK(rk3[0] == Config{0, 1, 0});
  CHECK(rk3[1] == Config{1, 0, 0});
  CHECK(rk3[2] == Config{1, 1, 0});

  const SinkedGraph z4 = build_sinked_cycle(4);
  const auto rz4 = enumerate_recurrent(z4);
  CHECK(rz4.size() == 4);
  CHECK(std::find(rz4.begin(), rz4.end(), Config{0, 1, 1, 1}) != rz4.end());

  const SinkedGraph b3 = build_sinked_bracelet(3);
  CHECK(mpz_class(enumerate_recurrent(b3).size()) == spanning_tree_count(b3.graph(), b3.sinks()));

  CHECK_THROWS_AS(enumerate_recurrent(build_sinked_complete(12), 1000), BudgetExceeded);
}

TEST_CASE("spanning_tree_count") {
  CHECK(spanning_tree_count(build_complete(4)) == 16);
  CHECK(spanning_tree_count(build_complete(5)) == 125);
  for (std::size_t n : {3, 4, 7, 10}) CHECK(spanning_tree_count(build_cycle(n)) == n);
  // Doubling every edge of an n-cycle: n * 2^(n-1).
  CHECK(spanning_tree_count(build_bracelet(5)) == 5 * 16);
  // Loops never matter.
  CHECK(spanning_tree_count(build_torus(1)) == 1);
  const std::vector<Edge> split{{0, 1, 1}, {2, 3, 1}};
  CHECK_THROWS_AS(spanning_tree_count(MultiGraph::from_edges(4, split)), std::invalid_argument);
  // Gluing the ends of a 3-edge path gives a 3-cycle.
  const std::vector<Edge> path{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}};
  const std::vector<Vertex> ends{0, 3};
  CHECK(spanning_tree_count(MultiGraph::from_edges(4, path), ends) == 3);
}

TEST_CASE("unicyclic_count") {
  CHECK(unicyclic_count(build_complete(3)) == 1);
  CHECK(unicyclic_count(build_complete(4)) == 15);
  for (std::size_t n : {3, 5, 8}) CHECK(unicyclic_count(build_cycle(n)) == 1);
  // A doubled edge is itself a cycle.
  const std::vector<Edge> dbl{{0, 1, 2}};
  CHECK(unicyclic_count(MultiGraph::from_edges(2, dbl)) == 1);
  CHECK_THROWS_AS(unicyclic_count(build_complete(8)), BudgetExceeded);
}

TEST_CASE("state lines round-trip") {
  const Config c{0, 5, 12, 3};
  CHECK(config_to_line(c) == "0 5 12 3");
  CHECK(config_from_line(config_to_line(c)) == c);
  const Odometer o{1, 0, 40000000000ull};
  CHECK(odometer_from_line(odometer_to_line(o)) == o);
  CHECK_THROWS_AS(config_from_line("1 x 2"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_line("1 -2"), std::invalid_argument);
}

TEST_CASE("property: three toppling orders agree and accounting holds") {
  RngStream rng(17, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(11);
    const SinkedGraph g(random_multigraph(rng, n), random_sinks(rng, n));
    const Config c = random_config(rng, g.graph(), 3);
    const Stabilized a = stabilize_ordered(g, c, ToppleOrder::Fifo);
    const Stabilized b = stabilize_ordered(g, c, ToppleOrder::RandomSingle, &rng);
    const Stabilized d = stabilize_ordered(g, c, ToppleOrder::GreedyMax);
    CHECK(a.config == b.config);
    CHECK(a.config == d.config);
    CHECK(a.odometer == b.odometer);
    CHECK(a.odometer == d.odometer);
    CHECK(is_stable(g, a.config));
    CHECK(accounting_holds(g.graph(), c, a.config, a.odometer));
    for (Vertex s : g.sinks()) CHECK(a.odometer[s] == 0);
  }
}

TEST_CASE("property: adding a sink never increases the odometer") {
  RngStream rng(19, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.uniform_below(9);
    const MultiGraph mg = random_multigraph(rng, n);
    std::vector<Vertex> sinks = random_sinks(rng, n);
    const Config c = random_config(rng, mg, 3);
    const Stabilized base = stabilize(SinkedGraph(mg, sinks), c);
    const auto x = static_cast<Vertex>(rng.uniform_below(n));
    sinks.push_back(x);
    if (sinks.size() >= n + 1) continue;
    const Stabilized more = stabilize(SinkedGraph(mg, sinks), c);
    for (Vertex v = 0; v < n; ++v) CHECK(more.odometer[v] <= base.odometer[v]);
  }
}

TEST_CASE("property: recurrent count equals the spanning tree count") {
  RngStream rng(23, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.uniform_below(6);
    const SinkedGraph g(random_multigraph(rng, n), random_sinks(rng, n));
    const auto rec = enumerate_recurrent(g);
    CHECK(mpz_class(rec.size()) == spanning_tree_count(g.graph(), g.sinks()));
    CHECK(rec == reachable_recurrent(g));
  }
}

TEST_CASE("path-like detection") {
  CHECK(is_path_like(build_cycle(3)));
  CHECK(is_path_like(build_bracelet(7)));
  CHECK_FALSE(is_path_like(build_complete(4)));
  CHECK_FALSE(is_path_like(build_flower(2)));
  const std::vector<Edge> mixed{{0, 1, 1}, {1, 2, 2}, {2, 0, 1}};
  CHECK_FALSE(is_path_like(MultiGraph::from_edges(3, mixed)));
  CHECK_THROWS_AS(stabilize_path_like(build_ladder(3), Config(6)), std::invalid_argument);
}

TEST_CASE("property: least-action path solver matches FIFO toppling") {
  RngStream rng(29, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 3 + rng.uniform_below(40);
    const MultiGraph mg = rng.uniform_below(2) ? build_cycle(n) : build_bracelet(n);
    const SinkedGraph g(mg, random_sinks(rng, n));
    // Mix of sparse, dense and very tall piles.
    const Height scale = std::array<Height, 4>{1, 2, 4, 25}[rng.uniform_below(4)];
    const Config c = random_config(rng, mg, scale);
    const Stabilized a = stabilize_path_like(g, c);
    const Stabilized b = stabilize_fifo(g, c);
    REQUIRE(a.config == b.config);
    REQUIRE(a.odometer == b.odometer);
  }
}
