#pragma once

#include <string>
#include <vector>

#include "sandpile/graph.hpp"
#include "sandpile/rng.hpp"
#include "sandpile/types.hpp"

namespace sandpile {

/// Random connected multigraph: a random spanning tree plus extra edges,
/// with occasional parallel edges and loops.
MultiGraph random_multigraph(RngStream& rng, std::size_t n, bool loops = true);

/// Nonempty proper random sink set.
std::vector<Vertex> random_sinks(RngStream& rng, std::size_t n);

/// Heights uniform on 0..scale*d(v).
Config random_config(RngStream& rng, const MultiGraph& g, Height scale);

/// final = initial + sum_w a(v,w) u(w) - d(v) u(v) at every vertex.
bool accounting_holds(const MultiGraph& g, const Config& before, const Config& after, const Odometer& odo);

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Burning test against reachability, recurrent count against the
/// matrix-tree count, and the Tutte density against the enumeration mean.
std::vector<CheckResult> verify_small_oracles();

/// On `instances` random sinked graphs with at most `max_vertices` vertices:
/// three toppling orders agree, the accounting identity holds, and the mirror
/// commutes with the parallel step whenever the step stays below 2d.
std::vector<CheckResult> verify_abelian(Count instances, std::uint64_t seed, std::size_t max_vertices = 12);

/// Flower activity against the R/Z classification, plus the period bound.
std::vector<CheckResult> verify_staircase(std::size_t petals, Count trials, std::uint64_t seed);

/// Names accepted by run_verify_suite.
std::vector<std::string> verify_suite_names();

/// Throws std::invalid_argument for an unknown suite.
std::vector<CheckResult> run_verify_suite(const std::string& name, std::uint64_t seed);

/// suite,check,pass,detail
std::string checks_to_csv(const std::vector<CheckResult>& checks);
std::string checks_to_json(const std::vector<CheckResult>& checks);

}  // namespace sandpile
