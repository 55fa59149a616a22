#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sandpile/graph.hpp"
#include "sandpile/rng.hpp"
#include "sandpile/types.hpp"

namespace sandpile {

struct Stabilized {
  Config config;
  Odometer odometer;
};

struct NonStabilizing {
  Odometer odometer;
};

using StabilizeOutcome = std::variant<Stabilized, NonStabilizing>;

/// Stabilize on a sinked graph. Cycles with uniform edge multiplicity go
/// through the exact least-action solver, everything else through FIFO
/// batch toppling; both return the same (Config, Odometer).
Stabilized stabilize(const SinkedGraph& g, const Config& c);

/// Reference FIFO batch toppling.
Stabilized stabilize_fifo(const SinkedGraph& g, const Config& c);

/// True for a cycle (n >= 3, no loops) whose edges all carry the same
/// multiplicity: the plain cycle and the bracelet.
bool is_path_like(const MultiGraph& g);

/// Least-action stabilization on a path-like graph in O(n log n), without
/// performing topplings. Throws std::invalid_argument if !is_path_like.
///
/// Between two consecutive sinks the odometer u solves: u = 0 at the sinks,
/// u >= 0, and k(u(x-1) + u(x+1) - 2u(x)) <= 2k - 1 - eta(x), minimal. Writing
/// u = phi + psi with phi's second difference equal to
/// c(x) = floor((2k - 1 - eta(x)) / k), psi is the least integer concave
/// majorant of -phi pinned at both ends.
Stabilized stabilize_path_like(const SinkedGraph& g, const Config& c);

enum class ToppleOrder { Fifo, RandomSingle, GreedyMax };

/// One toppling at a time in the given order (FIFO uses the batch engine).
/// Meant for cross-checking the abelian property on small inputs.
Stabilized stabilize_ordered(const SinkedGraph& g, const Config& c, ToppleOrder order,
                             RngStream* rng = nullptr);

/// Sinkless stabilization that reports NonStabilizing once every vertex has
/// toppled at least once.
StabilizeOutcome stabilize_or_detect(const MultiGraph& g, const Config& c);

Stabilized add_and_stabilize(const SinkedGraph& g, const Config& c, Vertex v);

bool is_stable(const SinkedGraph& g, const Config& c);
Config max_stable(const SinkedGraph& g);

/// Burning test. Throws std::invalid_argument on unstable input.
bool is_recurrent(const SinkedGraph& g, const Config& c);

/// All recurrent configurations in lexicographic order of the non-sink
/// heights (sink entries are zero). Throws BudgetExceeded when the number of
/// stable configurations exceeds `budget`.
std::vector<Config> enumerate_recurrent(const SinkedGraph& g, Count budget = 10'000'000);

/// Recurrent set by reachability: closure of the maximal stable configuration
/// under add_and_stabilize. Independent of the burning test.
std::vector<Config> reachable_recurrent(const SinkedGraph& g, Count budget = 10'000'000);

/// Matrix-tree count of g with the vertices in `collapse` merged into one.
/// Throws std::invalid_argument if g is disconnected.
mpz_class spanning_tree_count(const MultiGraph& g, std::span<const Vertex> collapse = {});

/// Spanning connected subgraphs with exactly |V| edges, parallel edges
/// distinct. Throws BudgetExceeded above `max_edges` edges (with multiplicity).
mpz_class unicyclic_count(const MultiGraph& g, std::size_t max_edges = 24);

/// Single-line decimal vectors, as used by --dump-state.
std::string config_to_line(const Config& c);
std::string odometer_to_line(const Odometer& o);
Config config_from_line(std::string_view line);
Odometer odometer_from_line(std::string_view line);

}  // namespace sandpile
