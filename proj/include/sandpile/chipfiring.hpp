#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sandpile/graph.hpp"
#include "sandpile/types.hpp"

namespace sandpile {

/// One synchronous step: every unstable vertex topples once. OpenMP gather
/// kernel; each vertex reads its neighbors' stability and writes only itself.
Config parallel_step(const MultiGraph& g, const Config& c);

/// Serial scatter formulation of the same step, kept as the reference.
Config parallel_step_serial(const MultiGraph& g, const Config& c);

/// In-place form used by the orbit search. `unstable` is scratch of size n
/// and holds the toppling mask of this step on return. Returns how many
/// vertices toppled.
Count parallel_step_into(const MultiGraph& g, std::span<const Height> in, std::span<Height> out,
                         std::vector<std::uint8_t>& unstable);

struct OrbitSummary {
  Count transient = 0;
  Count period = 1;
  Rational activity;
  /// Topplings of each vertex during one period; the rate is this / period.
  std::vector<Count> period_topples;

  Rational site_rate(Vertex v) const {
    return {static_cast<std::int64_t>(period_topples[v]), static_cast<std::int64_t>(period)};
  }
};

/// 16 |V| + 2^16.
Count default_orbit_budget(const MultiGraph& g);

/// Exact transient and period by Brent's method on full-state equality.
/// Returns nullopt when more than `max_steps` steps would be needed.
std::optional<OrbitSummary> try_find_orbit(const MultiGraph& g, const Config& c, Count max_steps);

/// As try_find_orbit, but throws BudgetExceeded. max_steps = 0 selects the default.
OrbitSummary find_orbit(const MultiGraph& g, const Config& c, Count max_steps = 0);

/// {"transient":..,"period":..,"activity_num":..,"activity_den":..}
std::string orbit_to_json(const OrbitSummary& s);

/// 2 d(x) - 1 - c(x). Throws if some c(x) exceeds 2 d(x) - 1.
Config mirror(const MultiGraph& g, const Config& c);

/// Activity of the flower with n petals from the total particle count R and
/// the number Z of petals whose two heights agree mod 3.
Rational flower_activity_from_RZ(Count n, Count R, Count Z);

struct PetalInvariant {
  Count zero_petals = 0;          // Z
  std::vector<std::uint8_t> x;    // per petal, in {0,1,2}
};

/// Throws std::invalid_argument unless g has the build_flower layout.
PetalInvariant petal_invariant(const MultiGraph& g, const Config& c);

std::vector<std::uint8_t> bracelet_parity(const Config& c);

}  // namespace sandpile
