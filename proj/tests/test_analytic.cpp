#include <cmath>

#include "doctest.h"
#include "sandpile/analytic.hpp"
#include "sandpile/core.hpp"

using namespace sandpile;

namespace {

// Sign changes of f on a uniform grid of [lo, hi].
int sign_changes(double (*f)(double), double lo, double hi, int steps = 100000) {
  int changes = 0;
  double prev = f(lo);
  for (int i = 1; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / steps;
    const double fx = f(x);
    if ((fx < 0) != (prev < 0)) ++changes;
    prev = fx;
  }
  return changes;
}

double bracelet_f(double z) { return 2.5 - 0.5 * std::exp(-2 * z) - z; }
double flower_f(double z) { return 5.0 / 3 + std::exp(-3 * z) / 3 - z; }
double flower_upper_f(double z) { return 10.0 / 3 - std::exp(-3 * z) / 3 - z; }

mpq_class q(long num, long den) {
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

// Mean total height over the recurrent set, by enumeration.
mpq_class enumeration_mean(const SinkedGraph& g) {
  const auto rec = enumerate_recurrent(g);
  mpz_class sum = 0;
  for (const Config& c : rec)
    for (Height h : c) sum += static_cast<long>(h);
  mpq_class mean(sum, static_cast<unsigned long>(rec.size()));
  mean.canonicalize();
  return mean;
}

}  // namespace

TEST_CASE("p_odd and pair density") {
  CHECK(p_odd(0) == 0);
  CHECK(p_odd(1) == doctest::Approx(0.4323324).epsilon(1e-7));
  CHECK(pair_density(bracelet_zeta_c()) == doctest::Approx(1.0).epsilon(1e-12));
  double prev = -1;
  for (double l = 0; l < 8; l += 0.25) {
    CHECK(pair_density(l) >= 0);
    CHECK(pair_density(l) > prev);
    prev = pair_density(l);
  }
  CHECK_THROWS_AS(p_odd(-0.1), std::invalid_argument);
}

TEST_CASE("threshold roots are unique, bracketed and tight") {
  CHECK(sign_changes(bracelet_f, 0, 10) == 1);
  CHECK(sign_changes(flower_f, 0, 10) == 1);
  CHECK(sign_changes(flower_upper_f, 0, 10) == 1);

  const Root b = bracelet_threshold_root();
  CHECK(std::abs(bracelet_f(b.x)) < 1e-12);
  CHECK(b.residual < 1e-12);
  CHECK(std::abs(b.x - 2.496608) < 1e-6);

  const Root f = flower_threshold_root();
  CHECK(std::abs(flower_f(f.x)) < 1e-12);
  CHECK(std::abs(f.x - 1.6688976) < 1e-6);

  const Root u = flower_upper_root();
  CHECK(std::abs(flower_upper_f(u.x)) < 1e-12);
  CHECK(std::abs(u.x - 3.3333182) < 1e-6);

  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1; }, [](double x) { return 2 * x; }, 0, 10),
                  std::invalid_argument);
}

TEST_CASE("density response laws") {
  const double zc = bracelet_zeta_c();
  for (double l : {0.0, 0.5, 1.0, 2.0, 2.4}) CHECK(bracelet_rho(l) == l);
  CHECK(bracelet_rho(zc) == doctest::Approx(zc).epsilon(1e-12));
  CHECK(bracelet_rho(40) == doctest::Approx(2.5));
  CHECK(bracelet_rho(3.5) == doctest::Approx((5 - std::exp(-7.0)) / 2));

  const double fc = flower_zeta_c();
  CHECK(flower_rho(1.0) == 1.0);
  CHECK(flower_rho(fc - 1e-9) == doctest::Approx(fc).epsilon(1e-8));
  CHECK(flower_rho(fc + 1e-9) == doctest::Approx(fc).epsilon(1e-8));
  CHECK(flower_rho(2.0) == doctest::Approx(5.0 / 3 + std::exp(-6.0) / 3));
}

TEST_CASE("two routes to Pr(X = 0) on a petal") {
  CHECK(flower_prob_X0(0) == 1);
  CHECK(markov_prob_X0(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(markov_prob_X0(1) == doctest::Approx((1 + 2 * std::exp(-3.0)) / 3).epsilon(1e-12));
  CHECK(std::abs(markov_prob_X0(1) - 0.3665247) < 1e-7);
  CHECK(flower_prob_X0(30) == doctest::Approx(1.0 / 3));
  for (double l = 0; l <= 10; l += 0.05) CHECK(std::abs(markov_prob_X0(l) - flower_prob_X0(l)) < 1e-10);
  for (double l : {0.1, 1.0, 5.0}) CHECK(std::abs(markov_prob_X0(l) - flower_prob_X0(l)) < 1e-10);
}

TEST_CASE("flower activity staircase") {
  CHECK(flower_activity(1.0) == Rational{0, 1});
  CHECK(flower_activity(1.9) == Rational{1, 3});
  CHECK(flower_activity(2.5) == Rational{1, 2});
  CHECK(flower_activity(3.1) == Rational{2, 3});
  CHECK(flower_activity(4.0) == Rational{1, 1});
}

TEST_CASE("Cayley tree height law") {
  CHECK(cayley_height_dist(2) == std::vector<mpq_class>{q(1, 12), q(4, 12), q(7, 12)});
  CHECK(cayley_height_dist(3) == std::vector<mpq_class>{q(2, 27), q(2, 9), q(1, 3), q(10, 27)});
  CHECK(cayley_height_dist(4) ==
        std::vector<mpq_class>{q(81, 1280), q(27, 160), q(153, 640), q(21, 80), q(341, 1280)});
  for (unsigned qq = 2; qq <= 9; ++qq) {
    mpq_class sum = 0;
    for (const auto& p : cayley_height_dist(qq)) sum += p;
    CHECK(sum == 1);
    CHECK(cayley_zeta_s(qq) == q(qq + 1, 2));
  }
  CHECK_THROWS_AS(cayley_height_dist(1), std::invalid_argument);
}

TEST_CASE("ladder stationary law") {
  const LadderLaw law = ladder_stationary();
  const double s3 = std::sqrt(3.0);
  CHECK(std::abs(law.perron_value - (2 + s3)) < 1e-10);

  // A r = lambda r, l A = lambda l.
  for (std::size_t i = 0; i < 7; ++i) {
    double ar = 0, la = 0;
    for (std::size_t j = 0; j < 7; ++j) {
      ar += law.transfer_matrix[i][j] * law.right_vec[j];
      la += law.left_vec[j] * law.transfer_matrix[j][i];
    }
    CHECK(std::abs(ar - law.perron_value * law.right_vec[i]) < 1e-12);
    CHECK(std::abs(la - law.perron_value * law.left_vec[i]) < 1e-12);
  }

  // Closed-form eigenvectors, up to scale.
  const LadderLaw::Vec r{1 + s3, 1 + s3, 1 + s3, 1, 1, 1, 1};
  const LadderLaw::Vec l{3 + s3, 1 + s3, 1 + s3, 1 + s3, 1 + s3, 1, 1};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(law.right_vec[i] / law.right_vec[6] == doctest::Approx(r[i]).epsilon(1e-10));
    CHECK(law.left_vec[i] / law.left_vec[6] == doctest::Approx(l[i]).epsilon(1e-10));
  }

  double total = 0;
  for (double p : law.state_probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  const double z = 18 + 10 * s3;
  CHECK(law.state_probs[0] == doctest::Approx((1 + s3) * (3 + s3) / z).epsilon(1e-12));
  CHECK(law.state_probs[5] == doctest::Approx(1 / z).epsilon(1e-12));

  const auto p = law.parry_chain();
  for (std::size_t j = 0; j < 7; ++j) {
    double row = 0, flow = 0;
    for (std::size_t i = 0; i < 7; ++i) {
      row += p[j][i];
      flow += law.state_probs[i] * p[i][j];
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(flow - law.state_probs[j]) < 1e-10);
  }

  CHECK(std::abs(law.height_probs[0] - (-0.5 + s3 / 3)) < 1e-12);
  CHECK(std::abs(law.height_probs[1] - (1.25 - 7 * s3 / 12)) < 1e-12);
  CHECK(std::abs(law.height_probs[2] - (0.25 + s3 / 4)) < 1e-12);
  CHECK(std::abs(law.height_probs[0] - 0.0773503) < 1e-7);
  CHECK(std::abs(law.height_probs[1] - 0.2396370) < 1e-7);
  CHECK(std::abs(law.height_probs[2] - 0.6830127) < 1e-7);
  CHECK(std::abs(law.zeta_s - 1.60566243) < 1e-8);
  CHECK(std::abs(law.zeta_s - (1.75 - s3 / 12)) < 1e-12);
}

TEST_CASE("tutte density equals the enumeration mean") {
  SUBCASE("K3") {
    const TutteDensity t = tutte_zeta_s(build_complete(3), 2);
    CHECK(t.per_vertex == q(4, 9));
    CHECK(t.per_nonsink == q(2, 3));
    CHECK(t.mean_total == enumeration_mean(build_sinked_complete(3)));
  }
  SUBCASE("K4") {
    const TutteDensity t = tutte_zeta_s(build_complete(4), 3);
    CHECK(t.trees == 16);
    CHECK(t.unicyclic == 15);
    CHECK(t.per_vertex == q(63, 64));
    CHECK(t.mean_total == enumeration_mean(build_sinked_complete(4)));
  }
  SUBCASE("cycles") {
    for (long n : {4L, 5L, 6L}) {
      const TutteDensity t = tutte_zeta_s(build_cycle(n), 0);
      CHECK(t.trees == n);
      CHECK(t.unicyclic == 1);
      CHECK(t.per_vertex == (mpq_class(n - 2) + q(1, n)) / n);
      CHECK(t.per_nonsink * (n - 1) == enumeration_mean(build_sinked_cycle(n)));
    }
  }
  SUBCASE("multigraph with a loop") {
    const MultiGraph g = MultiGraph::from_edges(3, std::vector<Edge>{{0, 1, 2}, {1, 2, 1}, {2, 2, 1}, {0, 2, 1}});
    const TutteDensity t = tutte_zeta_s(g, 0);
    CHECK(t.mean_total == enumeration_mean(SinkedGraph(g, {0})));
  }
}

TEST_CASE("reference constants and density table") {
  const auto refs = reference_constants();
  auto find = [&](const std::string& name) {
    for (const auto& r : refs)
      if (r.name == name) return r;
    FAIL("missing constant " << name);
    return refs.front();
  };
  CHECK(find("Pr_Z2[h=0]").value == doctest::Approx(0.0736363).epsilon(1e-6));
  CHECK(find("Pr_Z2[h=1]").value == doctest::Approx(0.1739).epsilon(1e-3));
  CHECK(find("Pr_Z2[h=2]").value == doctest::Approx(0.3063).epsilon(1e-3));
  CHECK(find("Pr_Z2[h=3]").value == doctest::Approx(0.4462).epsilon(1e-3));
  CHECK(find("zeta_c(Z2)").value == 2.125288);
  CHECK(find("zeta_s(Z2)").value == 2.125);
  CHECK(find("zeta_s(Z2)").provenance == Provenance::Conjectural);
  double z2 = 0;
  for (int h = 0; h < 4; ++h) z2 += find("Pr_Z2[h=" + std::to_string(h) + "]").value;
  CHECK(z2 == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(density_law("bracelet").zeta_c == doctest::Approx(2.496608).epsilon(1e-6));
  CHECK(density_law("flower").rho_of_lambda(1.0) == 1.0);
  CHECK(!density_law("torus").rho_of_lambda);
  CHECK_THROWS_AS(density_law("moebius"), std::invalid_argument);
  for (const auto& l : density_laws())
    if (l.rho_of_lambda && l.zeta_c) {
      CHECK(l.rho_of_lambda(*l.zeta_c * 0.9) == doctest::Approx(*l.zeta_c * 0.9));
      CHECK(l.rho_of_lambda(*l.zeta_c + 1e-9) == doctest::Approx(*l.zeta_c).epsilon(1e-6));
    }
  CHECK(density_table_csv().starts_with("family,zeta_s"));
  CHECK(density_table_json().find("\"bracelet\"") != std::string::npos);
  CHECK(complete_zeta_s_asymptotic(100) == doctest::Approx(50 + 10 * std::sqrt(M_PI / 8)));
}
