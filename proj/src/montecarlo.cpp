#include "sandpile/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "sandpile/core.hpp"

namespace sandpile {

std::uint64_t poisson_sample(double lambda, RngStream& rng) {
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("Poisson mean must be finite and >= 0");
  if (lambda == 0) return 0;
  if (lambda <= 30) {
    const double u = rng.uniform01();
    double p = std::exp(-lambda);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf) {
      ++k;
      p *= lambda / static_cast<double>(k);
      const double next = cdf + p;
      if (next == cdf) break;  // tail below double resolution
      cdf = next;
    }
    return k;
  }
  // Hormann's transformed rejection with squeeze.
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  for (;;) {
    const double u = rng.uniform01() - 0.5;
    const double v = rng.uniform01();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1))
      return static_cast<std::uint64_t>(k);
  }
}

Estimate make_estimate(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("estimate needs at least one sample");
  Estimate e;
  e.n = xs.size();
  double sum = 0;
  for (double x : xs) sum += x;
  e.mean = sum / static_cast<double>(e.n);
  if (e.n >= 2) {
    double ss = 0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  }
  return e;
}

ThresholdSummary summarize_trials(std::vector<TrialResult> trials) {
  ThresholdSummary s;
  std::vector<double> dens;
  dens.reserve(trials.size());
  double topples = 0;
  for (const TrialResult& t : trials) {
    dens.push_back(t.density());
    topples += static_cast<double>(t.total_topples);
    for (std::size_t h = 0; h < kHeightBuckets; ++h)
      s.marginals[h] += static_cast<double>(t.histogram[h]) / static_cast<double>(t.n_sites);
  }
  s.density = make_estimate(dens);
  const auto n = static_cast<double>(trials.size());
  for (double& m : s.marginals) m /= n;
  s.mean_topples = topples / n;
  s.trials = std::move(trials);
  return s;
}

ThresholdSummary threshold_estimate_random_regular(std::size_t q, std::size_t n, Count n_trials,
                                                   std::uint64_t seed, Exec exec) {
  return run_trials(n_trials, seed, exec, [&](RngStream& rng) {
    const MatchingUnion g = sample_regular_matchings(q, n, rng);
    return threshold_trial(g, rng);
  });
}

Config stationary_sample(const SinkedGraph& g, RngStream& rng, const BurnInPolicy& policy) {
  const auto ns = g.non_sinks();
  if (ns.empty()) throw std::invalid_argument("stationary sampling needs a non-sink vertex");
  Config eta = policy.start == BurnInPolicy::Start::MaxStable ? max_stable(g) : Config(g.num_vertices());
  Relaxer<SinkedGraph> relax(g, g.sink_mask());
  auto add = [&] {
    const Vertex v = ns[rng.uniform_below(ns.size())];
    eta[v] += 1;
    relax.touch(eta.values(), v);
    relax.relax(eta.values(), false);
    relax.clear_round();
  };
  if (policy.start == BurnInPolicy::Start::Empty) {
    while (!is_recurrent(g, eta))
      for (std::size_t i = 0; i < ns.size(); ++i) add();
  }
  const auto extra = static_cast<Count>(std::ceil(policy.factor * static_cast<double>(ns.size())));
  for (Count i = 0; i < extra; ++i) add();
  for (Vertex s : g.sinks()) eta[s] = 0;
  return eta;
}

StationaryEstimate stationary_density_estimate(const SinkedGraph& g, Count n_samples, std::uint64_t seed,
                                               const BurnInPolicy& policy, std::span<const Vertex> probes,
                                               Exec exec, std::vector<Config>* samples_out) {
  if (n_samples < 2) throw std::invalid_argument("stationary estimate needs at least 2 samples");
  for (Vertex p : probes)
    if (p >= g.num_vertices() || g.is_sink(p)) throw std::invalid_argument("probe must be a non-sink vertex");
  std::vector<Config> samples(n_samples);
  const auto count = static_cast<std::int64_t>(n_samples);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      samples[i] = stationary_sample(g, rng, policy);
    }
  } else {
    for (std::int64_t i = 0; i < count; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      samples[i] = stationary_sample(g, rng, policy);
    }
  }

  if (samples_out) *samples_out = samples;
  StationaryEstimate out;
  const auto ns = g.non_sinks();
  std::vector<double> per_ns, per_v;
  std::vector<std::vector<double>> probe_vals(probes.size());
  out.probe_marginals.assign(probes.size(), {});
  std::array<Count, kHeightBuckets> hist{};
  for (const Config& c : samples) {
    Height total = 0;
    for (Vertex v : ns) {
      total += c[v];
      ++hist[static_cast<std::size_t>(std::min<Height>(c[v], kHeightBuckets - 1))];
    }
    per_ns.push_back(static_cast<double>(total) / static_cast<double>(ns.size()));
    per_v.push_back(static_cast<double>(total) / static_cast<double>(g.num_vertices()));
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const Height h = c[probes[j]];
      probe_vals[j].push_back(static_cast<double>(h));
      out.probe_marginals[j][static_cast<std::size_t>(std::min<Height>(h, kHeightBuckets - 1))] += 1;
    }
  }
  out.per_nonsink = make_estimate(per_ns);
  out.per_vertex = make_estimate(per_v);
  const double cells = static_cast<double>(n_samples) * static_cast<double>(ns.size());
  for (std::size_t h = 0; h < kHeightBuckets; ++h) out.marginals[h] = static_cast<double>(hist[h]) / cells;
  for (std::size_t j = 0; j < probes.size(); ++j) {
    out.probes.push_back(make_estimate(probe_vals[j]));
    for (double& x : out.probe_marginals[j]) x /= static_cast<double>(n_samples);
  }
  return out;
}

std::vector<ResponsePoint> density_response(const SinkedGraph& g, std::span<const double> lambdas,
                                            Count trials, std::uint64_t seed, Exec exec,
                                            std::vector<Config>* final_states) {
  if (trials < 1) throw std::invalid_argument("density response needs at least one trial");
  for (double l : lambdas)
    if (!(l >= 0) || !std::isfinite(l)) throw std::invalid_argument("lambda must be finite and >= 0");
  const auto ns = g.non_sinks();
  const std::size_t jobs = lambdas.size() * trials;
  std::vector<double> values(jobs);
  if (final_states) final_states->assign(jobs, Config{});
  auto one = [&](std::size_t job) {
    const double lambda = lambdas[job / trials];
    RngStream rng(seed, job);
    Config c(g.num_vertices());
    for (Vertex v : ns) c[v] = static_cast<Height>(poisson_sample(lambda, rng));
    const Stabilized s = stabilize(g, c);
    Height total = 0;
    for (Vertex v : ns) total += s.config[v];
    values[job] = static_cast<double>(total) / static_cast<double>(ns.size());
    if (final_states) (*final_states)[job] = s.config;
  };
  const auto count = static_cast<std::int64_t>(jobs);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < count; ++j) one(static_cast<std::size_t>(j));
  } else {
    for (std::int64_t j = 0; j < count; ++j) one(static_cast<std::size_t>(j));
  }
  std::vector<ResponsePoint> out;
  for (std::size_t j = 0; j < lambdas.size(); ++j)
    out.push_back({lambdas[j], make_estimate(std::span<const double>(values).subspan(j * trials, trials))});
  return out;
}

double ActivityPoint::fraction(Rational a) const {
  Count hits = 0;
  for (const ActivityRecord& r : records)
    if (r.orbit && r.orbit->activity == a) ++hits;
  return records.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(records.size());
}

Count ActivityPoint::exhausted() const {
  Count c = 0;
  for (const ActivityRecord& r : records) c += r.orbit ? 0 : 1;
  return c;
}

Count ActivityPoint::max_period() const {
  Count p = 0;
  for (const ActivityRecord& r : records)
    if (r.orbit) p = std::max(p, r.orbit->period);
  return p;
}

std::vector<ActivityPoint> activity_response(const MultiGraph& g, std::span<const double> lambdas,
                                             Count trials, std::uint64_t seed, Count max_steps, Exec exec) {
  if (trials < 1) throw std::invalid_argument("activity response needs at least one trial");
  if (max_steps == 0) max_steps = default_orbit_budget(g);
  const std::size_t jobs = lambdas.size() * trials;
  std::vector<ActivityRecord> records(jobs);
  auto one = [&](std::size_t job) {
    ActivityRecord& r = records[job];
    r.lambda = lambdas[job / trials];
    r.trial = job % trials;
    RngStream rng(seed, job);
    Config c(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) c[v] = static_cast<Height>(poisson_sample(r.lambda, rng));
    r.total = static_cast<Count>(c.total());
    r.orbit = try_find_orbit(g, c, max_steps);
  };
  const auto count = static_cast<std::int64_t>(jobs);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < count; ++j) one(static_cast<std::size_t>(j));
  } else {
    for (std::int64_t j = 0; j < count; ++j) one(static_cast<std::size_t>(j));
  }
  std::vector<ActivityPoint> out(lambdas.size());
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    out[j].lambda = lambdas[j];
    out[j].records.assign(records.begin() + static_cast<std::ptrdiff_t>(j * trials),
                          records.begin() + static_cast<std::ptrdiff_t>((j + 1) * trials));
  }
  return out;
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", x);
  return buf;
}

std::string trial_csv_header() {
  std::string h = "graph_family,size,seed,stream_id,m,density";
  for (std::size_t i = 0; i + 1 < kHeightBuckets; ++i) h += ",h" + std::to_string(i);
  h += ",h" + std::to_string(kHeightBuckets - 1) + "plus,topples";
  return h;
}

std::string trial_csv_row(const std::string& family, std::size_t size, std::uint64_t seed,
                          std::uint64_t stream_id, const TrialResult& r) {
  std::string row = family + "," + std::to_string(size) + "," + std::to_string(seed) + "," +
                    std::to_string(stream_id) + "," + std::to_string(r.m) + "," + format_real(r.density());
  for (Count h : r.histogram) row += "," + std::to_string(h);
  row += "," + std::to_string(r.total_topples);
  return row;
}

std::string threshold_summary_json(const std::string& family, std::size_t size, const ThresholdSummary& s) {
  nlohmann::ordered_json j;
  j["family"] = family;
  j["size"] = size;
  j["n_trials"] = s.density.n;
  j["zeta_c_hat"] = s.density.mean;
  j["stderr"] = s.density.std_error;
  j["marginals"] = s.marginals;
  j["mean_topples"] = s.mean_topples;
  return j.dump(2);
}

}  // namespace sandpile
