// Acceptance runner. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "sandpile/analytic.hpp"
#include "sandpile/montecarlo.hpp"
#include "sandpile/verify.hpp"

using namespace sandpile;

namespace {

// Analytic exactness.
constexpr double kBraceletZetaC = 2.496608;
constexpr double kFlowerZetaC = 1.6688976;
constexpr double kFlowerZetaCPrime = 3.3333182;
constexpr double kRootTol = 1e-6;
constexpr double kPerronTol = 1e-10;
constexpr double kLadderZetaS = 1.60566243;
constexpr double kLadderZetaSTol = 1e-8;
constexpr std::array<double, 3> kLadderHeights{0.0773503, 0.2396370, 0.6830127};
constexpr double kLadderHeightTol = 1e-7;
constexpr double kAnalyticSeconds = 1.0;

// Torus.
constexpr std::size_t kTorusSide = 64;
constexpr Count kTorusTrials = 100'000;
constexpr double kTorusZetaC = 2.124956;
constexpr double kTorusStderrs = 3.0;
constexpr std::array<double, 4> kTorusHeights{0.0736, 0.1740, 0.3064, 0.4460};
constexpr double kTorusHeightTol = 0.001;
constexpr std::size_t kTorusLargeSide = 256;
constexpr Count kTorusLargeTrials = 1000;

// Bracelet.
constexpr std::size_t kBraceletResponseSize = 100'000;
constexpr Count kBraceletResponseTrials = 20;
constexpr std::array<double, 4> kBraceletLambdas{1.0, 2.0, 2.8, 3.5};
constexpr std::size_t kBraceletThresholdSize = 2000;
constexpr Count kBraceletThresholdTrials = 200;
constexpr double kDensityTol = 0.01;

// Flower.
constexpr std::size_t kFlowerPetals = 10'000;
constexpr Count kFlowerTrials = 200;
constexpr double kFlowerFraction = 0.99;
constexpr Count kFlowerMaxPeriod = 3;
constexpr Count kFlowerResponseTrials = 20;

// Abelian properties.
constexpr Count kAbelianInstances = 1000;
constexpr std::size_t kAbelianMaxVertices = 12;

// Cycle and line.
constexpr std::size_t kCycleSize = 100'000;
constexpr Count kCycleTrials = 20;
constexpr std::uint64_t kZ4Seeds = 100;

// Random regular graphs and wired trees.
constexpr std::size_t kRegularSize = std::size_t{1} << 20;
constexpr Count kRegularTrials = 1000;
constexpr std::array<double, 2> kRegular4Band{2.0005, 2.0020};
constexpr std::array<double, 2> kRegular5Band{2.508, 2.516};
constexpr Count kTreeSamples = 2000;
constexpr double kTreeStderrs = 3.0;

// Complete graph.
constexpr std::array<std::size_t, 2> kCompleteSizes{256, 1024};
constexpr Count kCompleteTrialsPerVertex = 10;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (detail.tellp() > 0) detail << "; ";
    detail << (ok ? "" : "FAILED ") << what;
  }
};

std::string fmt(double x, int digits = 7) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string fmt_sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

std::uint64_t seed_for(std::uint64_t base, int criterion) { return base * 1000 + static_cast<std::uint64_t>(criterion); }

Verdict analytic_exactness(std::uint64_t) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const double b = bracelet_zeta_c();
  const double f = flower_zeta_c();
  const double fp = flower_zeta_c_prime();
  const LadderLaw law = ladder_stationary();
  std::vector<std::vector<mpq_class>> cayley;
  for (unsigned q = 2; q <= 4; ++q) cayley.push_back(cayley_height_dist(q));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  v.check(within(b, kBraceletZetaC, kRootTol), "bracelet zeta_c " + fmt(b, 9));
  v.check(within(f, kFlowerZetaC, kRootTol), "flower zeta_c " + fmt(f, 9));
  v.check(within(fp, kFlowerZetaCPrime, kRootTol), "flower zeta_c' " + fmt(fp, 9));
  v.check(within(law.perron_value, 2 + std::numbers::sqrt3, kPerronTol),
          "ladder Perron off by " + fmt_sci(law.perron_value - 2 - std::numbers::sqrt3));
  v.check(within(law.zeta_s, kLadderZetaS, kLadderZetaSTol), "ladder zeta_s " + fmt(law.zeta_s, 10));
  bool heights = true;
  for (std::size_t i = 0; i < 3; ++i) heights = heights && within(law.height_probs[i], kLadderHeights[i], kLadderHeightTol);
  v.check(heights, "ladder heights " + fmt(law.height_probs[0]) + " " + fmt(law.height_probs[1]) + " " +
                       fmt(law.height_probs[2]));
  auto q = [](long a, long b) {
    mpq_class r(a, b);
    r.canonicalize();
    return r;
  };
  const std::vector<std::vector<mpq_class>> table{
      {q(1, 12), q(4, 12), q(7, 12)},
      {q(2, 27), q(2, 9), q(1, 3), q(10, 27)},
      {q(81, 1280), q(27, 160), q(153, 640), q(21, 80), q(341, 1280)},
  };
  v.check(cayley == table, "Cayley q=2,3,4 exact");
  v.check(secs < kAnalyticSeconds, "total " + fmt(secs, 4) + " s");
  return v;
}

Verdict torus_threshold(std::uint64_t seed) {
  Verdict v;
  const ThresholdSummary small = threshold_estimate(TorusTopology(kTorusSide), kTorusTrials, seed);
  const double dev = small.density.mean - kTorusZetaC;
  v.check(std::abs(dev) <= kTorusStderrs * small.density.std_error,
          "n=64 " + fmt(small.density.mean) + " +- " + fmt_sci(small.density.std_error) + " (" +
              fmt(dev / small.density.std_error, 2) + " stderr)");
  bool heights = true;
  std::string h;
  for (std::size_t i = 0; i < kTorusHeights.size(); ++i) {
    heights = heights && within(small.marginals[i], kTorusHeights[i], kTorusHeightTol);
    h += (i ? " " : "") + fmt(small.marginals[i], 4);
  }
  v.check(heights, "marginals " + h);

  const ThresholdSummary large = threshold_estimate(TorusTopology(kTorusLargeSide), kTorusLargeTrials, seed + 1);
  const double diff = large.density.mean - small.density.mean;
  const double se = std::hypot(large.density.std_error, small.density.std_error);
  v.check(diff > 0, "n=256 " + fmt(large.density.mean) + " +- " + fmt_sci(large.density.std_error) +
                        ", growth " + fmt_sci(diff) + " (" + fmt(diff / se, 2) + " stderr)");
  return v;
}

Verdict bracelet_transition(std::uint64_t seed) {
  Verdict v;
  const SinkedGraph g = build_sinked_bracelet(kBraceletResponseSize);
  const auto points = density_response(g, kBraceletLambdas, kBraceletResponseTrials, seed);
  for (const auto& p : points) {
    const double law = std::min(p.lambda, (5 - std::exp(-2 * p.lambda)) / 2);
    v.check(within(p.density.mean, law, kDensityTol),
            "rho(" + fmt(p.lambda, 1) + ") " + fmt(p.density.mean, 5) + " vs " + fmt(law, 5));
  }
  const ThresholdSummary t = threshold_estimate(build_bracelet(kBraceletThresholdSize), kBraceletThresholdTrials, seed + 1);
  v.check(within(t.density.mean, kBraceletZetaC, kDensityTol),
          "threshold n=2000 " + fmt(t.density.mean, 5) + " +- " + fmt_sci(t.density.std_error));
  return v;
}

Verdict flower_staircase(std::uint64_t seed) {
  Verdict v;
  const std::array<double, 5> lambdas{1.0, 1.9, 2.5, 3.1, 4.0};
  const std::array<Rational, 5> expected{Rational(0), Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(1)};
  const auto points = activity_response(build_flower(kFlowerPetals), lambdas, kFlowerTrials, seed);
  Count max_period = 0, exhausted = 0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double frac = points[j].fraction(expected[j]);
    v.check(frac >= kFlowerFraction, "activity " + expected[j].str() + " at " + fmt(lambdas[j], 1) + " in " +
                                         fmt(100 * frac, 1) + "%");
    max_period = std::max(max_period, points[j].max_period());
    exhausted += points[j].exhausted();
  }
  v.check(max_period <= kFlowerMaxPeriod && exhausted == 0,
          "max period " + std::to_string(max_period) + ", " + std::to_string(exhausted) + " over budget");

  const double lambda = 2.0;
  const auto rho = density_response(build_sinked_flower(kFlowerPetals), std::span(&lambda, 1), kFlowerResponseTrials, seed + 1);
  const double law = 5.0 / 3 + std::exp(-6.0) / 3;
  v.check(within(rho[0].density.mean, law, kDensityTol),
          "rho(2.0) " + fmt(rho[0].density.mean, 5) + " vs " + fmt(law, 5));
  return v;
}

Verdict report(const std::vector<CheckResult>& checks) {
  Verdict v;
  for (const auto& c : checks) v.check(c.pass, c.name + " (" + c.detail + ")");
  return v;
}

Verdict oracle_equivalences(std::uint64_t) { return report(verify_small_oracles()); }

Verdict abelian_properties(std::uint64_t seed) {
  return report(verify_abelian(kAbelianInstances, seed, kAbelianMaxVertices));
}

Verdict cycle_and_line(std::uint64_t seed) {
  Verdict v;
  const std::array<double, 2> lambdas{0.5, 1.5};
  const auto points = density_response(build_sinked_cycle(kCycleSize), lambdas, kCycleTrials, seed);
  for (const auto& p : points)
    v.check(within(p.density.mean, std::min(p.lambda, 1.0), kDensityTol),
            "rho(" + fmt(p.lambda, 1) + ") " + fmt(p.density.mean, 5));
  const MultiGraph z4 = build_cycle(4);
  Count good = 0;
  for (std::uint64_t s = 0; s < kZ4Seeds; ++s) {
    RngStream rng(seed + s, 0);
    const TrialResult r = threshold_trial(z4, rng);
    good += (r.m == 3 || r.m == 4) ? 1 : 0;
  }
  v.check(good == kZ4Seeds, "Z4 m in {3,4} for " + std::to_string(good) + " of " + std::to_string(kZ4Seeds) + " seeds");
  return v;
}

Verdict random_regular(std::uint64_t seed) {
  Verdict v;
  const std::array<std::pair<std::size_t, std::array<double, 2>>, 2> cases{{{3, kRegular4Band}, {4, kRegular5Band}}};
  for (const auto& [q, band] : cases) {
    const ThresholdSummary s = threshold_estimate_random_regular(q, kRegularSize, kRegularTrials, seed + q);
    v.check(s.density.mean >= band[0] && s.density.mean <= band[1],
            std::to_string(q + 1) + "-regular " + fmt(s.density.mean, 6) + " +- " + fmt_sci(s.density.std_error));
  }
  const std::array<std::pair<std::size_t, std::size_t>, 3> trees{{{2, 10}, {3, 7}, {4, 6}}};
  const std::array<Vertex, 1> root{0};
  for (const auto& [q, depth] : trees) {
    const StationaryEstimate e =
        stationary_density_estimate(build_wired_tree(q, depth), kTreeSamples, seed + 10 + q, {}, root);
    const double target = (q + 1) / 2.0;
    const Estimate& p = e.probes[0];
    v.check(std::abs(p.mean - target) <= kTreeStderrs * p.std_error,
            "tree q=" + std::to_string(q) + " root " + fmt(p.mean, 4) + " +- " + fmt(p.std_error, 4));
  }
  return v;
}

Verdict complete_graph(std::uint64_t seed) {
  Verdict v;
  for (std::size_t n : kCompleteSizes) {
    const Count trials = kCompleteTrialsPerVertex * n;
    const ThresholdSummary s = threshold_estimate(CompleteTopology(n), trials, seed + n);
    const double nn = static_cast<double>(n);
    const double bound = nn - 2 * std::sqrt(nn * std::log(nn));
    Count above = 0;
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& t : s.trials) {
      above += t.density() >= bound ? 1 : 0;
      lowest = std::min(lowest, t.density());
    }
    const double freq = static_cast<double>(above) / static_cast<double>(trials);
    v.check(freq >= 1 - 1 / nn, "K" + std::to_string(n) + " " + std::to_string(above) + "/" + std::to_string(trials) +
                                    " above " + fmt(bound, 2) + " (lowest " + fmt(lowest, 2) + ")");
  }
  return v;
}

struct Criterion {
  int id;
  std::string name;
  std::function<Verdict(std::uint64_t)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "analytic exactness", analytic_exactness},
      {2, "torus threshold", torus_threshold},
      {3, "bracelet phase transition", bracelet_transition},
      {4, "flower staircase", flower_staircase},
      {5, "oracle equivalences", oracle_equivalences},
      {6, "abelian and conservation properties", abelian_properties},
      {7, "cycle and line", cycle_and_line},
      {8, "random regular graphs and wired trees", random_regular},
      {9, "complete graph", complete_graph},
  };

  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  std::uint64_t seed = 2024;
  app.add_option("-c,--criterion", selected, "Criteria to run (default all)")->check(CLI::Range(1, 9));
  app.add_option("--seed", seed, "Base seed");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run(seed_for(seed, c.id));
    } catch (const std::exception& e) {
      v.check(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", " << fmt(secs, 1)
              << " s): " << v.detail.str() << std::endl;
  }
  return all ? 0 : 1;
}
