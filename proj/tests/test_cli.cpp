#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sandpile/cli.hpp"

using namespace sandpile;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "sandpile");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sandpile_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("spec round-trips through JSON") {
  cli::ExperimentSpec s;
  s.command = "density-response";
  s.family = "bracelet";
  s.n = 1000;
  s.q = 4;
  s.depth = 3;
  s.trials = 17;
  s.seed = 0xdeadbeefcafeULL;
  s.lambdas = {0.5, 2.8, 3.5};
  s.probes = {0, 5};
  s.start = "max-stable";
  s.burn_in = 2.5;
  s.max_steps = 99;
  s.suite = "abelian";
  s.target = "table";
  s.out = "x.csv";
  s.format = "json";
  s.threads = 3;
  s.dump_state = "states.txt";
  CHECK(cli::spec_from_json(cli::spec_to_json(s)) == s);
  CHECK(cli::spec_from_json(cli::spec_to_json(cli::ExperimentSpec{})) == cli::ExperimentSpec{});
  CHECK(cli::spec_from_json("{}") == cli::ExperimentSpec{});
  CHECK_THROWS_AS(cli::spec_from_json("{\"colour\": 1}"), std::invalid_argument);
  CHECK_THROWS_AS(cli::spec_from_json("{\"n\": \"big\"}"), std::invalid_argument);
  CHECK_THROWS_AS(cli::spec_from_json("[1]"), std::invalid_argument);
}

TEST_CASE("flags resolve to a spec, and a config file sits underneath them") {
  const Result r = call({"threshold", "--family", "bracelet", "--n", "500", "--trials", "12", "--seed", "7",
                         "--lambda", "1,2", "--print-spec"});
  REQUIRE(r.status == 0);
  const cli::ExperimentSpec s = cli::spec_from_json(r.out);
  CHECK(s.command == "threshold");
  CHECK(s.family == "bracelet");
  CHECK(s.n == 500);
  CHECK(s.trials == 12);
  CHECK(s.seed == 7);
  CHECK(s.lambdas == std::vector<double>{1, 2});

  const fs::path cfg = scratch("spec.json");
  std::ofstream(cfg) << cli::spec_to_json(s);
  const Result c = call({"--config", cfg.string(), "--print-spec"});
  CHECK(cli::spec_from_json(c.out) == s);
  const Result o = call({"threshold", "--config", cfg.string(), "--seed", "9", "--print-spec"});
  cli::ExperimentSpec expect = s;
  expect.seed = 9;
  CHECK(cli::spec_from_json(o.out) == expect);
}

TEST_CASE("exit codes") {
  CHECK(call({"threshold", "--family", "moebius"}).status == cli::kExitInvalid);
  CHECK(call({"threshold", "--n", "1"}).status == cli::kExitInvalid);
  CHECK(call({"threshold", "--bogus"}).status == cli::kExitInvalid);
  CHECK(call({"density-response", "--family", "cycle"}).status == cli::kExitInvalid);
  CHECK(call({"verify", "--suite", "nope"}).status == cli::kExitInvalid);
  CHECK(call({"--config", "/nonexistent/spec.json"}).status == cli::kExitInvalid);
  CHECK(call({"threshold", "--n", "8", "--trials", "4", "--out", "/nonexistent/dir/x.csv"}).status ==
        cli::kExitInvalid);
  CHECK(call({"activity-response", "--family", "torus", "--n", "6", "--lambda", "3.9", "--trials", "3",
              "--max-steps", "1"})
            .status == cli::kExitBudget);
  CHECK(call({"--help"}).status == 0);
  CHECK(call({"verify", "--suite", "small-oracles"}).status == 0);
}

TEST_CASE("csv artifacts carry the spec and version, and do not depend on the thread count") {
  const fs::path a = scratch("a.csv"), b = scratch("b.csv");
  const std::vector<std::string> base{"threshold", "--family", "torus", "--n", "12", "--trials", "16", "--seed", "3"};
  auto with = [&](const fs::path& p, const std::string& threads) {
    auto args = base;
    for (const auto& x : {std::string("--out"), p.string(), std::string("--threads"), threads}) args.push_back(x);
    return call(args);
  };
  const Result ra = with(a, "1");
  const Result rb = with(b, "2");
  REQUIRE(ra.status == 0);
  REQUIRE(rb.status == 0);
  std::string ta = slurp(a), tb = slurp(b);
  CHECK(ta.starts_with("# sandpile " + cli::version() + "\n# spec {"));
  // The header echoes --out and --threads; the data rows must match exactly.
  ta = ta.substr(ta.find("graph_family"));
  tb = tb.substr(tb.find("graph_family"));
  CHECK(ta == tb);
  CHECK(std::count(ta.begin(), ta.end(), '\n') == 17);
  CHECK(ra.out.find("threshold torus n=12 trials=16: zeta_c = ") == 0);

  // Same spec twice gives the same bytes.
  const std::string first = slurp(a);
  with(a, "1");
  CHECK(slurp(a) == first);
}

TEST_CASE("each command produces its artifact") {
  SUBCASE("analytic") {
    const Result r = call({"analytic", "--family", "bracelet"});
    CHECK(r.status == 0);
    CHECK(r.err.find("zeta_s = 2.5, zeta_c = 2.496608") != std::string::npos);
    CHECK(r.out.find("zeta_c,2.4966080943,exact") != std::string::npos);
    const Result t = call({"analytic", "table", "--format", "json"});
    CHECK(t.out.find("\"family\": \"flower\"") != std::string::npos);
    CHECK(call({"analytic", "--family", "tree", "--q", "3"}).out.find("Pr[h=3],10/27,exact") != std::string::npos);
  }
  SUBCASE("stationary with state dump") {
    const fs::path dump = scratch("states.txt");
    const Result r = call({"stationary", "--family", "tree", "--q", "2", "--depth", "3", "--trials", "5",
                           "--dump-state", dump.string(), "--format", "json"});
    CHECK(r.status == 0);
    CHECK(r.out.find("\"zeta_s_nonsink\"") != std::string::npos);
    CHECK(r.err.find("probe 0 = ") != std::string::npos);
    const std::string states = slurp(dump);
    CHECK(std::count(states.begin(), states.end(), '\n') == 2 + 5);
  }
  SUBCASE("density response") {
    const Result r = call({"density-response", "--family", "cycle", "--n", "200", "--lambda", "0.5", "--trials", "3"});
    CHECK(r.status == 0);
    CHECK(r.out.find("lambda,density,stderr,trials,rho\n0.5000000000,") != std::string::npos);
  }
  SUBCASE("activity response") {
    const Result r = call({"activity-response", "--family", "flower", "--n", "50", "--lambda", "1.9,4",
                           "--trials", "4"});
    CHECK(r.status == 0);
    CHECK(r.err.find("(analytic 1/3)") != std::string::npos);
    CHECK(r.err.find("(analytic 1)") != std::string::npos);
  }
  SUBCASE("verify json") {
    const Result r = call({"verify", "--suite", "abelian", "--format", "json"});
    CHECK(r.status == 0);
    CHECK(r.out.find("\"pass\": true") != std::string::npos);
    CHECK(r.out.find("\"pass\": false") == std::string::npos);
  }
}
