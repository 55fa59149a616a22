#include "sandpile/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sandpile/analytic.hpp"
#include "sandpile/core.hpp"
#include "sandpile/montecarlo.hpp"
#include "sandpile/verify.hpp"

#ifndef SANDPILE_VERSION
#define SANDPILE_VERSION "0.0.0"
#endif

namespace sandpile::cli {

using json = nlohmann::ordered_json;

std::string version() { return SANDPILE_VERSION; }

std::string spec_to_json(const ExperimentSpec& s) {
  json j;
  j["command"] = s.command;
  j["family"] = s.family;
  j["n"] = s.n;
  j["q"] = s.q;
  j["depth"] = s.depth;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["lambdas"] = s.lambdas;
  j["probes"] = s.probes;
  j["start"] = s.start;
  j["burn_in"] = s.burn_in;
  j["max_steps"] = s.max_steps;
  j["suite"] = s.suite;
  j["target"] = s.target;
  j["out"] = s.out;
  j["format"] = s.format;
  j["threads"] = s.threads;
  j["dump_state"] = s.dump_state;
  return j.dump();
}

ExperimentSpec spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("spec must be a JSON object");
  ExperimentSpec s;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "command") s.command = value.get<std::string>();
      else if (key == "family") s.family = value.get<std::string>();
      else if (key == "n") s.n = value.get<std::size_t>();
      else if (key == "q") s.q = value.get<std::size_t>();
      else if (key == "depth") s.depth = value.get<std::size_t>();
      else if (key == "trials") s.trials = value.get<Count>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else if (key == "lambdas") s.lambdas = value.get<std::vector<double>>();
      else if (key == "probes") s.probes = value.get<std::vector<Vertex>>();
      else if (key == "start") s.start = value.get<std::string>();
      else if (key == "burn_in") s.burn_in = value.get<double>();
      else if (key == "max_steps") s.max_steps = value.get<Count>();
      else if (key == "suite") s.suite = value.get<std::string>();
      else if (key == "target") s.target = value.get<std::string>();
      else if (key == "out") s.out = value.get<std::string>();
      else if (key == "format") s.format = value.get<std::string>();
      else if (key == "threads") s.threads = value.get<int>();
      else if (key == "dump_state") s.dump_state = value.get<std::string>();
      else throw std::invalid_argument("unknown spec key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad spec value: ") + e.what());
  }
  return s;
}

namespace {

const std::vector<std::string> kCommands{"threshold", "stationary", "density-response", "activity-response",
                                         "analytic", "verify"};
const std::vector<std::string> kSinkless{"torus", "cycle", "bracelet", "flower", "complete", "random"};
const std::vector<std::string> kSinked{"cycle", "bracelet", "flower", "ladder", "complete", "lollipop", "tree"};
const std::vector<std::string> kActivity{"torus", "cycle", "bracelet", "flower", "complete"};
const std::vector<std::string> kAnalytic{"line", "cycle", "torus", "bracelet", "flower", "ladder", "complete", "tree"};

bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void validate(const ExperimentSpec& s) {
  require(contains(kCommands, s.command), "unknown command '" + s.command + "' (expected " + join(kCommands) + ")");
  require(s.format == "csv" || s.format == "json", "format must be csv or json");
  require(s.threads >= 0, "threads must be >= 0");
  for (double l : s.lambdas) require(l >= 0 && std::isfinite(l), "lambda values must be finite and >= 0");

  const std::vector<std::string>* families = nullptr;
  if (s.command == "threshold") families = &kSinkless;
  if (s.command == "stationary" || s.command == "density-response") families = &kSinked;
  if (s.command == "activity-response") families = &kActivity;
  if (s.command == "analytic" && s.target.empty()) families = &kAnalytic;
  if (families)
    require(contains(*families, s.family),
            "family '" + s.family + "' is not available for " + s.command + " (expected " + join(*families) + ")");
  if (s.command == "analytic") require(s.target.empty() || s.target == "table", "analytic target must be 'table'");
  if (s.command == "verify")
    require(contains(verify_suite_names(), s.suite), "unknown suite '" + s.suite + "' (expected " +
                                                         join(verify_suite_names()) + ")");

  const bool sized = s.command != "analytic" && s.command != "verify";
  if (sized && s.family != "tree") {
    if (s.family == "torus") require(s.n >= 2, "torus side must be >= 2");
    else if (s.family == "flower" || s.family == "lollipop") require(s.n >= 2, "n must be >= 2");
    else if (s.family == "ladder") require(s.n >= 3, "ladder needs >= 3 rungs");
    else if (s.family == "random") require(s.n >= 4 && s.n % 2 == 0, "random graphs need even n >= 4");
    else require(s.n >= 3, "n must be >= 3");
  }
  if (s.family == "random" || s.family == "tree") require(s.q >= 2, "q must be >= 2");
  if (s.family == "tree" && sized) require(s.depth >= 1, "tree depth must be >= 1");
  if (s.command == "threshold" || s.command == "stationary") require(s.trials >= 2, "trials must be >= 2");
  if (s.command == "density-response" || s.command == "activity-response") {
    require(s.trials >= 1, "trials must be >= 1");
    require(!s.lambdas.empty(), s.command + " needs --lambda");
  }
  if (s.command == "stationary") {
    require(s.start == "empty" || s.start == "max-stable", "start must be empty or max-stable");
    require(s.burn_in >= 0 && std::isfinite(s.burn_in), "burn_in must be >= 0");
  }
}

namespace {

struct Output {
  std::ostream& artifact;
  std::ostream& summary;
};

MultiGraph sinkless_graph(const ExperimentSpec& s) {
  if (s.family == "torus") return build_torus(s.n);
  if (s.family == "cycle") return build_cycle(s.n);
  if (s.family == "bracelet") return build_bracelet(s.n);
  if (s.family == "flower") return build_flower(s.n);
  if (s.family == "complete") return build_complete(s.n);
  throw std::invalid_argument("no sinkless graph for family '" + s.family + "'");
}

SinkedGraph sinked_graph(const ExperimentSpec& s) {
  if (s.family == "cycle") return build_sinked_cycle(s.n);
  if (s.family == "bracelet") return build_sinked_bracelet(s.n);
  if (s.family == "flower") return build_sinked_flower(s.n);
  if (s.family == "ladder") return build_ladder(s.n);
  if (s.family == "complete") return build_sinked_complete(s.n);
  if (s.family == "lollipop") return build_lollipop(s.n);
  if (s.family == "tree") return build_wired_tree(s.q, s.depth);
  throw std::invalid_argument("no sinked graph for family '" + s.family + "'");
}

std::size_t size_of(const ExperimentSpec& s) { return s.family == "tree" ? s.depth : s.n; }

std::string header_comment(const ExperimentSpec& s) {
  return "# sandpile " + version() + "\n# spec " + spec_to_json(s) + "\n";
}

std::optional<double> threshold_reference(const ExperimentSpec& s) {
  static const std::map<std::size_t, double> torus{{64, 2.1249561},   {128, 2.1251851},  {256, 2.1252572},
                                                   {512, 2.1252786},  {1024, 2.1252853}, {2048, 2.1252876},
                                                   {4096, 2.1252877}, {8192, 2.1252880}, {16384, 2.1252877}};
  if (s.family == "torus") {
    const auto it = torus.find(s.n);
    return it == torus.end() ? 2.125288 : it->second;
  }
  if (s.family == "cycle") return 1.0;
  if (s.family == "bracelet") return bracelet_zeta_c();
  if (s.family == "flower") return flower_zeta_c();
  if (s.family == "random" && s.q >= 2 && s.q <= 4) return density_law("tree" + std::to_string(s.q + 1)).zeta_c;
  return std::nullopt;
}

std::string with_reference(double est, double se, std::optional<double> ref) {
  std::string line = format_real(est) + " +- " + format_real(se);
  if (ref) {
    line += " (analytic " + format_real(*ref);
    if (se > 0) line += ", deviation " + format_real((est - *ref) / se).substr(0, 6) + " stderr";
    line += ")";
  }
  return line;
}

int run_threshold(const ExperimentSpec& s, Output o) {
  ThresholdSummary sum;
  if (s.family == "torus") {
    sum = threshold_estimate(TorusTopology(s.n), s.trials, s.seed);
  } else if (s.family == "complete") {
    sum = threshold_estimate(CompleteTopology(s.n), s.trials, s.seed);
  } else if (s.family == "random") {
    sum = threshold_estimate_random_regular(s.q, s.n, s.trials, s.seed);
  } else {
    sum = threshold_estimate(sinkless_graph(s), s.trials, s.seed);
  }
  if (s.format == "csv") {
    o.artifact << header_comment(s) << trial_csv_header() << "\n";
    for (std::size_t i = 0; i < sum.trials.size(); ++i)
      o.artifact << trial_csv_row(s.family, s.n, s.seed, i, sum.trials[i]) << "\n";
  } else {
    o.artifact << threshold_summary_json(s.family, s.n, sum) << "\n";
  }
  o.summary << "threshold " << s.family << " n=" << s.n << " trials=" << s.trials << ": zeta_c = "
            << with_reference(sum.density.mean, sum.density.std_error, threshold_reference(s)) << "\n";
  return kExitOk;
}

std::optional<double> stationary_reference(const ExperimentSpec& s) {
  if (s.family == "tree") return static_cast<double>(s.q + 1) / 2;
  if (s.family == "cycle") return 1.0;
  if (s.family == "complete") return std::nullopt;
  if (s.family == "lollipop") return std::nullopt;
  return density_law(s.family).zeta_s;
}

void dump_states(const ExperimentSpec& s, const std::vector<Config>& states) {
  if (s.dump_state.empty()) return;
  std::ofstream f(s.dump_state, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write '" + s.dump_state + "'");
  f << header_comment(s);
  for (const Config& c : states) f << config_to_line(c) << "\n";
}

int run_stationary(const ExperimentSpec& s, Output o) {
  const SinkedGraph g = sinked_graph(s);
  BurnInPolicy policy;
  policy.start = s.start == "max-stable" ? BurnInPolicy::Start::MaxStable : BurnInPolicy::Start::Empty;
  policy.factor = s.burn_in;
  std::vector<Vertex> probes = s.probes;
  if (probes.empty() && s.family == "tree") probes.push_back(0);
  std::vector<Config> samples;
  const StationaryEstimate e = stationary_density_estimate(g, s.trials, s.seed, policy, probes, Exec::Parallel,
                                                           &samples);
  dump_states(s, samples);
  const auto ns = g.non_sinks();
  if (s.format == "csv") {
    o.artifact << header_comment(s) << "graph_family,size,seed,stream_id,mean_nonsink,mean_vertex";
    for (Vertex p : probes) o.artifact << ",probe" << p;
    o.artifact << "\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
      Height total = 0;
      for (Vertex v : ns) total += samples[i][v];
      o.artifact << s.family << "," << size_of(s) << "," << s.seed << "," << i << ","
                 << format_real(static_cast<double>(total) / static_cast<double>(ns.size())) << ","
                 << format_real(static_cast<double>(total) / static_cast<double>(g.num_vertices()));
      for (Vertex p : probes) o.artifact << "," << samples[i][p];
      o.artifact << "\n";
    }
  } else {
    json j;
    j["family"] = s.family;
    j["size"] = size_of(s);
    j["n_samples"] = s.trials;
    j["zeta_s_nonsink"] = e.per_nonsink.mean;
    j["stderr_nonsink"] = e.per_nonsink.std_error;
    j["zeta_s_vertex"] = e.per_vertex.mean;
    j["stderr_vertex"] = e.per_vertex.std_error;
    j["marginals"] = e.marginals;
    j["probes"] = json::array();
    for (std::size_t k = 0; k < probes.size(); ++k)
      j["probes"].push_back({{"vertex", probes[k]},
                             {"mean", e.probes[k].mean},
                             {"stderr", e.probes[k].std_error},
                             {"marginals", e.probe_marginals[k]}});
    o.artifact << j.dump(2) << "\n";
  }
  const auto ref = stationary_reference(s);
  o.summary << "stationary " << s.family << " size=" << size_of(s) << " samples=" << s.trials << ": zeta_s = "
            << with_reference(e.per_nonsink.mean, e.per_nonsink.std_error, s.family == "tree" ? std::nullopt : ref);
  for (std::size_t k = 0; k < probes.size(); ++k)
    o.summary << "; probe " << probes[k] << " = "
              << with_reference(e.probes[k].mean, e.probes[k].std_error, s.family == "tree" ? ref : std::nullopt);
  o.summary << "\n";
  return kExitOk;
}

std::function<double(double)> response_law(const std::string& family) {
  if (family == "cycle") return density_law("line").rho_of_lambda;
  if (family == "bracelet" || family == "flower") return density_law(family).rho_of_lambda;
  return {};
}

int run_density_response(const ExperimentSpec& s, Output o) {
  const SinkedGraph g = sinked_graph(s);
  std::vector<Config> states;
  const auto pts = density_response(g, s.lambdas, s.trials, s.seed, Exec::Parallel,
                                    s.dump_state.empty() ? nullptr : &states);
  dump_states(s, states);
  const auto law = response_law(s.family);
  if (s.format == "csv") {
    o.artifact << header_comment(s) << "lambda,density,stderr,trials,rho\n";
    for (const auto& p : pts)
      o.artifact << format_real(p.lambda) << "," << format_real(p.density.mean) << ","
                 << format_real(p.density.std_error) << "," << p.density.n << ","
                 << (law ? format_real(law(p.lambda)) : "") << "\n";
  } else {
    json arr = json::array();
    for (const auto& p : pts) {
      json r{{"lambda", p.lambda}, {"density", p.density.mean}, {"stderr", p.density.std_error},
             {"trials", p.density.n}};
      r["rho"] = law ? json(law(p.lambda)) : json(nullptr);
      arr.push_back(r);
    }
    o.artifact << arr.dump(2) << "\n";
  }
  for (const auto& p : pts)
    o.summary << "density-response " << s.family << " n=" << s.n << " lambda=" << format_real(p.lambda).substr(0, 6)
              << ": rho = "
              << with_reference(p.density.mean, p.density.std_error,
                                law ? std::optional<double>(law(p.lambda)) : std::nullopt)
              << "\n";
  return kExitOk;
}

int run_activity_response(const ExperimentSpec& s, Output o) {
  const MultiGraph g = sinkless_graph(s);
  const auto pts = activity_response(g, s.lambdas, s.trials, s.seed, s.max_steps);
  Count exhausted = 0;
  if (s.format == "csv") {
    o.artifact << header_comment(s) << "lambda,trial,stream_id,total,transient,period,activity_num,activity_den\n";
    for (std::size_t j = 0; j < pts.size(); ++j)
      for (const auto& r : pts[j].records) {
        o.artifact << format_real(r.lambda) << "," << r.trial << "," << j * s.trials + r.trial << "," << r.total;
        if (r.orbit)
          o.artifact << "," << r.orbit->transient << "," << r.orbit->period << "," << r.orbit->activity.num << ","
                     << r.orbit->activity.den;
        else
          o.artifact << ",,,,";
        o.artifact << "\n";
      }
  } else {
    json arr = json::array();
    for (const auto& p : pts) {
      std::map<std::string, Count> counts;
      for (const auto& r : p.records)
        if (r.orbit) ++counts[r.orbit->activity.str()];
      json acts = json::object();
      for (const auto& [a, c] : counts) acts[a] = c;
      arr.push_back({{"lambda", p.lambda},
                     {"trials", p.records.size()},
                     {"exhausted", p.exhausted()},
                     {"max_period", p.max_period()},
                     {"activities", acts}});
    }
    o.artifact << arr.dump(2) << "\n";
  }
  for (const auto& p : pts) {
    exhausted += p.exhausted();
    std::map<std::string, Count> counts;
    for (const auto& r : p.records)
      if (r.orbit) ++counts[r.orbit->activity.str()];
    std::string mode = "-";
    Count best = 0;
    for (const auto& [a, c] : counts)
      if (c > best) {
        best = c;
        mode = a;
      }
    o.summary << "activity-response " << s.family << " n=" << s.n << " lambda=" << format_real(p.lambda).substr(0, 6)
              << ": activity " << mode << " in " << best << "/" << p.records.size() << ", max period "
              << p.max_period();
    if (s.family == "flower") o.summary << " (analytic " << flower_activity(p.lambda).str() << ")";
    if (p.exhausted() > 0) o.summary << ", " << p.exhausted() << " over budget";
    o.summary << "\n";
  }
  return exhausted > 0 ? kExitBudget : kExitOk;
}

struct Quantity {
  std::string name;
  std::string value;
  std::string provenance;
};

std::vector<Quantity> analytic_quantities(const ExperimentSpec& s) {
  std::vector<Quantity> q;
  auto real = [&](const std::string& name, double v, Provenance p) { q.push_back({name, format_real(v), to_string(p)}); };
  const std::string& f = s.family;
  if (f == "line" || f == "cycle") {
    real("zeta_s", 1.0, Provenance::Exact);
    real("zeta_c", 1.0, Provenance::Exact);
  } else if (f == "bracelet") {
    real("zeta_s", 2.5, Provenance::Exact);
    const Root r = bracelet_threshold_root();
    real("zeta_c", r.x, Provenance::Exact);
    real("zeta_c_residual", r.residual, Provenance::Exact);
  } else if (f == "flower") {
    real("zeta_s", 5.0 / 3, Provenance::Exact);
    real("zeta_c", flower_zeta_c(), Provenance::Exact);
    real("zeta_c_prime", flower_zeta_c_prime(), Provenance::Exact);
    for (double l : s.lambdas) {
      real("rho(" + format_real(l).substr(0, 6) + ")", flower_rho(l), Provenance::Exact);
      real("prob_X0(" + format_real(l).substr(0, 6) + ")", flower_prob_X0(l), Provenance::Exact);
      q.push_back({"activity(" + format_real(l).substr(0, 6) + ")", flower_activity(l).str(), "exact"});
    }
  } else if (f == "ladder") {
    const LadderLaw law = ladder_stationary();
    real("perron_value", law.perron_value, Provenance::Exact);
    for (std::size_t h = 0; h < 3; ++h) real("Pr[h=" + std::to_string(h) + "]", law.height_probs[h], Provenance::Exact);
    real("zeta_s", law.zeta_s, Provenance::Exact);
    real("zeta_c", 1.6082, Provenance::Empirical);
  } else if (f == "tree") {
    const auto dist = cayley_height_dist(static_cast<unsigned>(s.q));
    for (std::size_t h = 0; h < dist.size(); ++h) q.push_back({"Pr[h=" + std::to_string(h) + "]", dist[h].get_str(), "exact"});
    q.push_back({"zeta_s", cayley_zeta_s(static_cast<unsigned>(s.q)).get_str(), "exact"});
  } else if (f == "torus") {
    for (const auto& c : reference_constants())
      if (c.name.find("Z2") != std::string::npos || c.name.find("Z_") != std::string::npos)
        real(c.name, c.value, c.provenance);
  } else if (f == "complete") {
    real("zeta_s_asymptotic", complete_zeta_s_asymptotic(static_cast<double>(s.n)), Provenance::Asymptotic);
    const double n = static_cast<double>(s.n);
    real("zeta_c_lower", n - 2 * std::sqrt(n * std::log(n)), Provenance::Asymptotic);
    real("wright_constant", std::sqrt(std::numbers::pi / 8), Provenance::Exact);
  }
  return q;
}

int run_analytic(const ExperimentSpec& s, Output o) {
  if (s.target == "table") {
    o.artifact << (s.format == "csv" ? header_comment(s) + density_table_csv() : density_table_json() + "\n");
    o.summary << "analytic table: " << density_laws().size() << " families\n";
    return kExitOk;
  }
  const auto qs = analytic_quantities(s);
  if (s.format == "csv") {
    o.artifact << header_comment(s) << "quantity,value,provenance\n";
    for (const auto& x : qs) o.artifact << x.name << "," << x.value << "," << x.provenance << "\n";
  } else {
    json arr = json::array();
    for (const auto& x : qs) arr.push_back({{"quantity", x.name}, {"value", x.value}, {"provenance", x.provenance}});
    o.artifact << arr.dump(2) << "\n";
  }
  o.summary << "analytic " << s.family << ":";
  std::string sep = " ";
  for (const auto& x : qs)
    if (x.name == "zeta_s" || x.name == "zeta_c") {
      std::string v = x.value;
      if (v.find('.') != std::string::npos && v.find('/') == std::string::npos) {
        v.erase(v.find_last_not_of('0') + 1);
        if (v.back() == '.') v.pop_back();
      }
      o.summary << sep << x.name << " = " << v;
      sep = ", ";
    }
  o.summary << "\n";
  return kExitOk;
}

int run_verify(const ExperimentSpec& s, Output o) {
  const auto checks = run_verify_suite(s.suite, s.seed);
  if (s.format == "csv")
    o.artifact << header_comment(s) << checks_to_csv(checks);
  else
    o.artifact << checks_to_json(checks) << "\n";
  std::size_t passed = 0;
  for (const auto& c : checks) passed += c.pass ? 1 : 0;
  o.summary << "verify " << s.suite << ": " << passed << "/" << checks.size() << " passed\n";
  return passed == checks.size() ? kExitOk : kExitCheckFailed;
}

void set_threads(int threads) {
  if (threads == 0)
    if (const char* env = std::getenv("SANDPILE_THREADS")) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception&) {
        throw std::invalid_argument("SANDPILE_THREADS must be an integer");
      }
      if (threads < 0) throw std::invalid_argument("SANDPILE_THREADS must be >= 0");
    }
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace

int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    validate(spec);
    set_threads(spec.threads);
    std::ostringstream buffer;
    Output o{spec.out.empty() ? out : buffer, spec.out.empty() ? err : out};
    int status = kExitOk;
    if (spec.command == "threshold") status = run_threshold(spec, o);
    else if (spec.command == "stationary") status = run_stationary(spec, o);
    else if (spec.command == "density-response") status = run_density_response(spec, o);
    else if (spec.command == "activity-response") status = run_activity_response(spec, o);
    else if (spec.command == "analytic") status = run_analytic(spec, o);
    else status = run_verify(spec, o);
    if (!spec.out.empty()) {
      std::ofstream f(spec.out, std::ios::binary);
      if (!f || !(f << buffer.str())) throw std::invalid_argument("cannot write '" + spec.out + "'");
    }
    return status;
  } catch (const BudgetExceeded& e) {
    err << "error: budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  // The config file supplies defaults that explicit flags then override.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      std::ifstream f(argv[i + 1]);
      if (!f) {
        err << "error: cannot read config '" << argv[i + 1] << "'\n";
        return kExitInvalid;
      }
      std::stringstream text;
      text << f.rdbuf();
      try {
        spec = spec_from_json(text.str());
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
      }
    }

  CLI::App app{"Sandpile threshold and stationary density experiments", "sandpile"};
  app.set_version_flag("--version", version());
  std::string config_path;
  bool print_spec = false;
  app.add_option("--config", config_path, "JSON experiment spec; flags override its fields");
  app.add_flag("--print-spec", print_spec, "Print the resolved spec as JSON and exit");
  app.require_subcommand(0, 1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment spec; flags override its fields");
    sub->add_flag("--print-spec", print_spec, "Print the resolved spec as JSON and exit");
    sub->add_option("--family", spec.family, "Graph family");
    sub->add_option("--n", spec.n, "Size: torus side, petals, rungs or vertices");
    sub->add_option("--q", spec.q, "Branching number for random graphs and trees");
    sub->add_option("--depth", spec.depth, "Wired tree radius");
    sub->add_option("--trials", spec.trials, "Trials or samples");
    sub->add_option("--seed", spec.seed, "Master seed");
    sub->add_option("--lambda", spec.lambdas, "Initial densities (repeat or comma separated)")->delimiter(',');
    sub->add_option("--out", spec.out, "Artifact path (default stdout)");
    sub->add_option("--format", spec.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", spec.threads, "Worker threads (default SANDPILE_THREADS or all)");
    sub->add_option("--dump-state", spec.dump_state, "Write final configurations, one per line");
  };
  auto* threshold = app.add_subcommand("threshold", "Fixed-energy threshold density by sequential addition");
  auto* stationary = app.add_subcommand("stationary", "Stationary density of the driven sandpile");
  auto* density = app.add_subcommand("density-response", "Final density after stabilizing Poisson initial states");
  auto* activity = app.add_subcommand("activity-response", "Parallel chip-firing activity of Poisson initial states");
  auto* analytic = app.add_subcommand("analytic", "Closed-form densities and reference constants");
  auto* verify = app.add_subcommand("verify", "Run a self-check suite");
  for (auto* sub : {threshold, stationary, density, activity, analytic, verify}) common(sub);
  stationary->add_option("--start", spec.start, "empty or max-stable")->check(CLI::IsMember({"empty", "max-stable"}));
  stationary->add_option("--burn-in", spec.burn_in, "Additions after recurrence, in units of |V'|");
  stationary->add_option("--probe", spec.probes, "Vertices whose height is reported")->delimiter(',');
  activity->add_option("--max-steps", spec.max_steps, "Orbit search budget (0 = 16|V| + 2^16)");
  analytic->add_option("target", spec.target, "'table' for the density table");
  verify->add_option("--suite", spec.suite, "small-oracles, abelian or staircase");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
  }
  for (auto* sub : app.get_subcommands()) spec.command = sub->get_name();
  if (print_spec) {
    out << spec_to_json(spec) << "\n";
    return kExitOk;
  }
  if (spec.command.empty()) {
    err << app.help();
    return kExitInvalid;
  }
  return run(spec, out, err);
}

}  // namespace sandpile::cli
