#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sandpile/chipfiring.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/rng.hpp"
#include "sandpile/toppling.hpp"
#include "sandpile/types.hpp"

namespace sandpile {

/// Poisson(lambda): inversion for lambda <= 30, PTRS rejection above.
/// Throws std::invalid_argument for negative or non-finite lambda.
std::uint64_t poisson_sample(double lambda, RngStream& rng);

/// Heights 0..7 and a pooled bucket for 8 and above.
inline constexpr std::size_t kHeightBuckets = 9;
using HeightHistogram = std::array<Count, kHeightBuckets>;

struct TrialResult {
  Count m = 0;
  Count n_sites = 0;
  HeightHistogram histogram{};
  Count total_topples = 0;

  Rational density_exact() const {
    return {static_cast<std::int64_t>(m), static_cast<std::int64_t>(n_sites)};
  }
  double density() const { return static_cast<double>(m) / static_cast<double>(n_sites); }
};

struct Estimate {
  double mean = 0;
  double std_error = 0;
  Count n = 0;
};

/// Mean and standard error (sample standard deviation / sqrt n), summed in order.
Estimate make_estimate(std::span<const double> xs);

enum class Exec { Serial, Parallel };

/// Add particles at uniform sites of a sinkless graph until an addition
/// fails to stabilize (every vertex toppled since that addition). m counts
/// the additions before the failing one; the histogram is taken from the
/// stable configuration they produced. Heights are held as 32-bit integers,
/// which bounds the degrees this is meant for far below 2^30.
template <Topology G>
TrialResult threshold_trial(const G& g, RngStream& rng) {
  using H = std::int32_t;
  const std::size_t n = g.num_vertices();
  Relaxer<G, H> relax(g);
  std::vector<H> eta(n, 0);
  TrialResult out;
  out.n_sites = n;
  for (;;) {
    const auto v = static_cast<Vertex>(rng.uniform_below(n));
    eta[v] += 1;
    relax.touch(eta, v);
    if (relax.relax(eta, true) == Relaxer<G, H>::Outcome::AllToppled) {
      relax.revert(eta);
      eta[v] -= 1;
      break;
    }
    out.total_topples += relax.round_total();
    relax.clear_round();
    ++out.m;
  }
  for (H h : eta) ++out.histogram[static_cast<std::size_t>(std::min<H>(h, kHeightBuckets - 1))];
  return out;
}

struct ThresholdSummary {
  Estimate density;
  std::array<double, kHeightBuckets> marginals{};
  double mean_topples = 0;
  std::vector<TrialResult> trials;  // in stream order
};

ThresholdSummary summarize_trials(std::vector<TrialResult> trials);

/// Runs trial i on RngStream(seed, i) for i < n_trials. The reduction walks
/// the trials in index order, so Serial and Parallel agree bit for bit.
template <class TrialFn>
ThresholdSummary run_trials(Count n_trials, std::uint64_t seed, Exec exec, TrialFn trial) {
  if (n_trials < 2) throw std::invalid_argument("threshold estimate needs at least 2 trials");
  std::vector<TrialResult> results(n_trials);
  const auto count = static_cast<std::int64_t>(n_trials);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      results[i] = trial(rng);
    }
  } else {
    for (std::int64_t i = 0; i < count; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      results[i] = trial(rng);
    }
  }
  return summarize_trials(std::move(results));
}

template <Topology G>
ThresholdSummary threshold_estimate(const G& g, Count n_trials, std::uint64_t seed,
                                    Exec exec = Exec::Parallel) {
  return run_trials(n_trials, seed, exec, [&](RngStream& rng) { return threshold_trial(g, rng); });
}

/// A fresh random (q+1)-regular multigraph per trial, drawn from the trial's
/// own stream before the particles.
ThresholdSummary threshold_estimate_random_regular(std::size_t q, std::size_t n, Count n_trials,
                                                   std::uint64_t seed, Exec exec = Exec::Parallel);

struct BurnInPolicy {
  enum class Start { Empty, MaxStable };
  Start start = Start::Empty;
  /// Additions after the chain first becomes recurrent, in units of |V'|.
  double factor = 8.0;
};

/// Driven chain on a sinked graph: uniform additions on V', each followed by
/// stabilization. From the empty start the burning test runs after every
/// |V'| additions until it succeeds. Then factor * |V'| more additions.
Config stationary_sample(const SinkedGraph& g, RngStream& rng, const BurnInPolicy& policy = {});

struct StationaryEstimate {
  Estimate per_nonsink;  // mean height over V'
  Estimate per_vertex;   // total height on V' divided by |V|
  std::array<double, kHeightBuckets> marginals{};  // height law over V'
  std::vector<Estimate> probes;                    // height at each probe vertex
  std::vector<std::array<double, kHeightBuckets>> probe_marginals;
};

/// Sample i is an independent chain on RngStream(seed, i). The samples are
/// copied to `samples_out` when it is given.
StationaryEstimate stationary_density_estimate(const SinkedGraph& g, Count n_samples, std::uint64_t seed,
                                               const BurnInPolicy& policy = {},
                                               std::span<const Vertex> probes = {},
                                               Exec exec = Exec::Parallel,
                                               std::vector<Config>* samples_out = nullptr);

struct ResponsePoint {
  double lambda = 0;
  Estimate density;
};

/// Poisson(lambda) on every non-sink vertex, stabilized; final mean height
/// over V'. Trial t at grid index j uses stream j * trials + t, and its final
/// configuration lands at that index of `final_states` when one is given.
std::vector<ResponsePoint> density_response(const SinkedGraph& g, std::span<const double> lambdas,
                                            Count trials, std::uint64_t seed, Exec exec = Exec::Parallel,
                                            std::vector<Config>* final_states = nullptr);

struct ActivityRecord {
  double lambda = 0;
  Count trial = 0;
  Count total = 0;  // R
  std::optional<OrbitSummary> orbit;  // nullopt when the step budget ran out
};

struct ActivityPoint {
  double lambda = 0;
  std::vector<ActivityRecord> records;

  /// Fraction of trials whose activity equals a.
  double fraction(Rational a) const;
  Count exhausted() const;
  Count max_period() const;
};

/// Poisson(lambda) on every vertex of a sinkless graph, then find_orbit.
/// Trial t at grid index j uses stream j * trials + t.
std::vector<ActivityPoint> activity_response(const MultiGraph& g, std::span<const double> lambdas,
                                             Count trials, std::uint64_t seed, Count max_steps = 0,
                                             Exec exec = Exec::Parallel);

/// Fixed-width decimal formatting shared by every writer, so output bytes
/// do not depend on locale or stream state.
std::string format_real(double x);

/// graph_family,size,seed,stream_id,m,density,h0,...,h7,h8plus,topples
std::string trial_csv_header();
std::string trial_csv_row(const std::string& family, std::size_t size, std::uint64_t seed,
                          std::uint64_t stream_id, const TrialResult& r);

/// {family, size, n_trials, zeta_c_hat, stderr, marginals[], mean_topples}
std::string threshold_summary_json(const std::string& family, std::size_t size, const ThresholdSummary& s);

}  // namespace sandpile
