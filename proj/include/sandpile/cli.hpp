#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sandpile/types.hpp"

namespace sandpile::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitCheckFailed = 3;

/// Everything a run depends on. Field names double as JSON keys.
struct ExperimentSpec {
  std::string command;  // threshold, stationary, density-response, activity-response, analytic, verify
  std::string family = "torus";
  std::size_t n = 64;      // side for torus, petals for flower, rungs for ladder, vertices otherwise
  std::size_t q = 3;       // branching for random graphs and wired trees
  std::size_t depth = 6;   // wired tree radius
  Count trials = 1000;
  std::uint64_t seed = 1;
  std::vector<double> lambdas;
  std::vector<Vertex> probes;
  std::string start = "empty";  // stationary start: empty or max-stable
  double burn_in = 8.0;         // stationary additions after recurrence, per |V'|
  Count max_steps = 0;          // activity orbit budget, 0 for the default
  std::string suite = "small-oracles";
  std::string target;  // analytic: "table" or empty
  std::string out;     // empty writes the artifact to stdout
  std::string format = "csv";
  int threads = 0;         // 0 defers to SANDPILE_THREADS, then to OpenMP
  std::string dump_state;  // optional path for final configurations

  bool operator==(const ExperimentSpec&) const = default;
};

std::string version();

std::string spec_to_json(const ExperimentSpec& spec);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentSpec spec_from_json(const std::string& text);

/// Throws std::invalid_argument describing the first problem found.
void validate(const ExperimentSpec& spec);

/// Runs one experiment. The artifact goes to spec.out (or `out` when that is
/// empty); the summary goes to `out` when the artifact has its own file and
/// to `err` otherwise. Returns an exit status.
int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11, optional --config JSON underneath the flags) and runs.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sandpile::cli
