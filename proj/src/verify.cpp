#include "sandpile/verify.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "sandpile/analytic.hpp"
#include "sandpile/chipfiring.hpp"
#include "sandpile/core.hpp"
#include "sandpile/montecarlo.hpp"

namespace sandpile {

MultiGraph random_multigraph(RngStream& rng, std::size_t n, bool loops) {
  std::vector<Edge> edges;
  for (Vertex v = 1; v < n; ++v)
    edges.push_back({v, static_cast<Vertex>(rng.uniform_below(v)), 1 + rng.uniform_below(2)});
  const std::size_t extra = rng.uniform_below(n + 1);
  for (std::size_t i = 0; i < extra; ++i) {
    const auto a = static_cast<Vertex>(rng.uniform_below(n));
    const auto b = static_cast<Vertex>(rng.uniform_below(n));
    if (a == b && !loops) continue;
    edges.push_back({a, b, 1 + rng.uniform_below(2)});
  }
  return MultiGraph::from_edges(n, edges);
}

std::vector<Vertex> random_sinks(RngStream& rng, std::size_t n) {
  std::vector<Vertex> sinks{static_cast<Vertex>(rng.uniform_below(n))};
  for (Vertex v = 0; v < n; ++v)
    if (rng.uniform_below(5) == 0 && sinks.size() + 1 < n) sinks.push_back(v);
  return sinks;
}

Config random_config(RngStream& rng, const MultiGraph& g, Height scale) {
  Config c(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    c[v] = static_cast<Height>(rng.uniform_below(static_cast<std::uint64_t>(scale * g.degree(v) + 1)));
  return c;
}

bool accounting_holds(const MultiGraph& g, const Config& before, const Config& after, const Odometer& odo) {
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    Height expect = before[v] - g.degree(v) * static_cast<Height>(odo[v]);
    g.for_each_neighbor(v, [&](Vertex w, Height a) { expect += a * static_cast<Height>(odo[w]); });
    if (expect != after[v]) return false;
  }
  return true;
}

namespace {

// Every stable configuration, sinks at zero.
std::vector<Config> all_stable(const SinkedGraph& g) {
  const auto ns = g.non_sinks();
  std::vector<Config> out;
  Config c(g.num_vertices());
  for (;;) {
    out.push_back(c);
    std::size_t i = ns.size();
    while (i > 0) {
      const Vertex v = ns[i - 1];
      if (++c[v] < g.graph().degree(v)) break;
      c[v] = 0;
      --i;
    }
    if (i == 0) return out;
  }
}

mpq_class enumeration_mean(const std::vector<Config>& rec) {
  mpz_class sum = 0;
  for (const Config& c : rec)
    for (Height h : c) sum += static_cast<long>(h);
  mpq_class m(sum, static_cast<unsigned long>(rec.size()));
  m.canonicalize();
  return m;
}

}  // namespace

std::vector<CheckResult> verify_small_oracles() {
  const std::string suite = "small-oracles";
  std::vector<CheckResult> out;
  const std::vector<std::pair<std::string, SinkedGraph>> instances{
      {"Z4", build_sinked_cycle(4)},
      {"B4", build_sinked_bracelet(4)},
      {"K3", build_sinked_complete(3)},
      {"ladder2x3", build_ladder(3)},
  };
  for (const auto& [name, g] : instances) {
    const auto reach = reachable_recurrent(g);
    std::set<std::vector<Height>> reach_set;
    for (const Config& c : reach) reach_set.insert(c.raw());
    Count mismatches = 0, burning = 0;
    const auto stable = all_stable(g);
    for (const Config& c : stable) {
      const bool r = is_recurrent(g, c);
      burning += r ? 1 : 0;
      mismatches += r != reach_set.contains(c.raw()) ? 1 : 0;
    }
    out.push_back({suite, name + ": burning = reachability", mismatches == 0,
                   std::to_string(stable.size()) + " stable, " + std::to_string(burning) + " burning, " +
                       std::to_string(reach.size()) + " reachable"});
    const auto rec = enumerate_recurrent(g);
    const mpz_class trees = spanning_tree_count(g.graph(), g.sinks());
    out.push_back({suite, name + ": #recurrent = matrix-tree", trees == static_cast<unsigned long>(rec.size()),
                   std::to_string(rec.size()) + " vs " + trees.get_str()});
  }

  const std::vector<std::pair<std::string, SinkedGraph>> tutte{
      {"K3", build_sinked_complete(3)},
      {"K4", build_sinked_complete(4)},
      {"Z4", build_sinked_cycle(4)},
      {"Z5", build_sinked_cycle(5)},
  };
  for (const auto& [name, g] : tutte) {
    const TutteDensity t = tutte_zeta_s(g.graph(), g.sinks().front());
    const mpq_class mean = enumeration_mean(enumerate_recurrent(g)) / static_cast<unsigned long>(g.non_sinks().size());
    out.push_back({suite, name + ": tutte density = enumeration mean", t.per_nonsink == mean,
                   t.per_nonsink.get_str() + " vs " + mean.get_str() + " (per vertex " + t.per_vertex.get_str() + ")"});
  }
  return out;
}

std::vector<CheckResult> verify_abelian(Count instances, std::uint64_t seed, std::size_t max_vertices) {
  if (max_vertices < 2) throw std::invalid_argument("instances need at least 2 vertices");
  const std::string suite = "abelian";
  Count orders_ok = 0, accounting_ok = 0, mirror_ok = 0, mirror_applicable = 0;
  for (Count i = 0; i < instances; ++i) {
    RngStream rng(seed, i);
    const std::size_t n = 2 + rng.uniform_below(max_vertices - 1);
    const MultiGraph g = random_multigraph(rng, n);
    const SinkedGraph sg(g, random_sinks(rng, n));
    Config c = random_config(rng, g, 3);
    for (Vertex s : sg.sinks()) c[s] = 0;

    const Stabilized fifo = stabilize_ordered(sg, c, ToppleOrder::Fifo);
    const Stabilized single = stabilize_ordered(sg, c, ToppleOrder::RandomSingle, &rng);
    const Stabilized greedy = stabilize_ordered(sg, c, ToppleOrder::GreedyMax);
    const Stabilized dispatched = stabilize(sg, c);
    const bool same = fifo.config == single.config && fifo.config == greedy.config &&
                      fifo.config == dispatched.config && fifo.odometer == single.odometer &&
                      fifo.odometer == greedy.odometer && fifo.odometer == dispatched.odometer;
    orders_ok += same ? 1 : 0;
    accounting_ok += accounting_holds(g, c, fifo.config, fifo.odometer) ? 1 : 0;

    Config m(n);
    for (Vertex v = 0; v < n; ++v) m[v] = static_cast<Height>(rng.uniform_below(2 * g.degree(v)));
    const Config next = parallel_step(g, m);
    bool bounded = true;
    for (Vertex v = 0; v < n; ++v) bounded = bounded && next[v] <= 2 * g.degree(v) - 1;
    if (bounded) {
      ++mirror_applicable;
      mirror_ok += mirror(g, next) == parallel_step(g, mirror(g, m)) ? 1 : 0;
    }
  }
  const std::string of = " of " + std::to_string(instances);
  return {
      {suite, "three toppling orders agree", orders_ok == instances, std::to_string(orders_ok) + of},
      {suite, "accounting identity", accounting_ok == instances, std::to_string(accounting_ok) + of},
      {suite, "mirror commutes with the parallel step", mirror_ok == mirror_applicable,
       std::to_string(mirror_ok) + " of " + std::to_string(mirror_applicable) + " applicable"},
  };
}

std::vector<CheckResult> verify_staircase(std::size_t petals, Count trials, std::uint64_t seed) {
  const std::string suite = "staircase";
  const MultiGraph f = build_flower(petals);
  const std::vector<double> grid{1.0, 1.9, 2.5, 3.1, 4.0};
  std::vector<CheckResult> out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    Count agree = 0, bounded = 0, exhausted = 0;
    for (Count t = 0; t < trials; ++t) {
      RngStream rng(seed, j * trials + t);
      Config c(f.num_vertices());
      for (Vertex v = 0; v < f.num_vertices(); ++v) c[v] = static_cast<Height>(poisson_sample(grid[j], rng));
      const auto orbit = try_find_orbit(f, c, default_orbit_budget(f));
      if (!orbit) {
        ++exhausted;
        continue;
      }
      const Count z = petal_invariant(f, c).zero_petals;
      agree += orbit->activity == flower_activity_from_RZ(petals, static_cast<Count>(c.total()), z) ? 1 : 0;
      bounded += orbit->period <= 3 ? 1 : 0;
    }
    const std::string lam = format_real(grid[j]).substr(0, 3);
    out.push_back({suite, "lambda " + lam + ": activity = R/Z law", agree == trials,
                   std::to_string(agree) + " of " + std::to_string(trials) + ", " + std::to_string(exhausted) +
                       " over budget"});
    out.push_back({suite, "lambda " + lam + ": period <= 3", bounded == trials,
                   std::to_string(bounded) + " of " + std::to_string(trials)});
  }
  return out;
}

std::vector<std::string> verify_suite_names() { return {"small-oracles", "abelian", "staircase"}; }

std::vector<CheckResult> run_verify_suite(const std::string& name, std::uint64_t seed) {
  if (name == "small-oracles") return verify_small_oracles();
  if (name == "abelian") return verify_abelian(100, seed);
  if (name == "staircase") return verify_staircase(200, 20, seed);
  throw std::invalid_argument("unknown verify suite '" + name + "'");
}

std::string checks_to_csv(const std::vector<CheckResult>& checks) {
  std::string out = "suite,check,pass,detail\n";
  for (const auto& c : checks)
    out += c.suite + ",\"" + c.name + "\"," + (c.pass ? "1" : "0") + ",\"" + c.detail + "\"\n";
  return out;
}

std::string checks_to_json(const std::vector<CheckResult>& checks) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) arr.push_back({{"suite", c.suite}, {"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return arr.dump(2);
}

}  // namespace sandpile
