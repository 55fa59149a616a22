#pragma once

#include <gmpxx.h>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sandpile/graph.hpp"
#include "sandpile/types.hpp"

namespace sandpile {

/// Probability that Poisson(lambda) is odd: (1 - e^{-2 lambda}) / 2.
double p_odd(double lambda);
/// Density of particle pairs, (lambda - p_odd(lambda)) / 2.
double pair_density(double lambda);

struct Root {
  double x = 0;
  double residual = 0;  // |f(x)|
};

/// Bisection on [lo, hi] followed by Newton polishing. Throws
/// std::invalid_argument unless f changes sign on the interval.
Root find_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
               double lo, double hi);

/// Root of z = 5/2 - e^{-2z}/2.
Root bracelet_threshold_root();
double bracelet_zeta_c();
/// min(lambda, (5 - e^{-2 lambda}) / 2).
double bracelet_rho(double lambda);

/// Root of z = 5/3 + e^{-3z}/3.
Root flower_threshold_root();
/// Root of z = 10/3 - e^{-3z}/3.
Root flower_upper_root();
double flower_zeta_c();
double flower_zeta_c_prime();
/// lambda below the threshold, 5/3 + e^{-3 lambda}/3 above it.
double flower_rho(double lambda);
/// Pr(X = 0) for one petal: (1 + 2 e^{-3 lambda}) / 3.
double flower_prob_X0(double lambda);
/// Same quantity from exp{2 lambda (P - I)} (1, 0)^T, P = [[0, 1/2], [1, 1/2]].
double markov_prob_X0(double lambda);
/// Limiting parallel chip-firing activity on the flower at initial density lambda.
Rational flower_activity(double lambda);

using Matrix2 = std::array<std::array<double, 2>, 2>;
/// Scaling and squaring with a Taylor kernel.
Matrix2 expm(const Matrix2& a);

/// Limiting height law at a deep site of the wired (q+1)-regular tree.
/// Throws std::invalid_argument for q < 2.
std::vector<mpq_class> cayley_height_dist(unsigned q);
mpq_class cayley_zeta_s(unsigned q);

struct LadderLaw {
  static constexpr std::size_t kStates = 7;
  using Vec = std::array<double, kStates>;
  /// States (3,3), (3,2), (2,3), (3,1), (1,3), (3,2)', (2,3)'.
  std::array<std::array<int, kStates>, kStates> transfer_matrix{};
  double perron_value = 0;
  Vec left_vec{};   // l A = lambda l
  Vec right_vec{};  // A r = lambda r
  Vec state_probs{};
  std::array<double, 3> height_probs{};
  double zeta_s = 0;

  /// Parry chain A_ij r_j / (lambda r_i).
  std::array<Vec, kStates> parry_chain() const;
};

/// Perron data by power iteration, Parry probabilities l_i r_i / Z, and the
/// per-site height law averaged over the two ends of a rung.
LadderLaw ladder_stationary();

struct TutteDensity {
  Count edges = 0;        // m, loops counted once
  Count sink_degree = 0;  // d, sink loops counted once
  mpz_class trees;        // kappa
  mpz_class unicyclic;    // u
  mpq_class mean_total;   // m - d + u / kappa
  mpq_class per_vertex;   // divided by |V|
  mpq_class per_nonsink;  // divided by |V| - 1
};

/// Stationary density of g with `sink` as the only sink, from spanning tree
/// and unicyclic counts. Throws BudgetExceeded past the unicyclic budget.
TutteDensity tutte_zeta_s(const MultiGraph& g, Vertex sink, std::size_t max_edges = 24);

enum class Provenance { Exact, Conjectural, Empirical, Asymptotic };
std::string to_string(Provenance p);

struct ReferenceConstant {
  std::string name;
  double value = 0;
  Provenance provenance = Provenance::Exact;
  std::string expression;
};

std::vector<ReferenceConstant> reference_constants();

/// n/2 + sqrt(pi/8) sqrt(n), the leading terms of zeta_s on the complete graph.
double complete_zeta_s_asymptotic(double n);

struct DensityLaw {
  std::string family;
  std::optional<double> zeta_s;
  bool zeta_s_exact = false;
  std::optional<double> zeta_c;
  bool zeta_c_exact = false;
  std::function<double(double)> rho_of_lambda;  // empty when no law is known
  std::string note;
};

/// Stationary and threshold densities by family. Families: line, torus,
/// bracelet, flower, ladder, complete, tree3, tree4, tree5.
std::vector<DensityLaw> density_laws();
const DensityLaw& density_law(const std::string& family);

std::string density_table_csv();
std::string density_table_json();

}  // namespace sandpile
