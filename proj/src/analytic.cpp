#include "sandpile/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "sandpile/core.hpp"
#include "sandpile/montecarlo.hpp"

namespace sandpile {

namespace {

void require_lambda(double lambda) {
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
}

constexpr double kRootLo = 0.0;
constexpr double kRootHi = 10.0;

}  // namespace

double p_odd(double lambda) {
  require_lambda(lambda);
  return 0.5 * -std::expm1(-2 * lambda);
}

double pair_density(double lambda) { return (lambda - p_odd(lambda)) / 2; }

Root find_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
               double lo, double hi) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0) return {lo, 0};
  if (fhi == 0) return {hi, 0};
  if ((flo < 0) == (fhi < 0)) throw std::invalid_argument("no sign change on the root interval");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = lo + (hi - lo) / 2;
    const double fm = f(mid);
    if (fm == 0) return {mid, 0};
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  Root r{lo + (hi - lo) / 2, 0};
  r.residual = std::abs(f(r.x));
  for (int i = 0; i < 8 && r.residual > 0; ++i) {
    const double d = df(r.x);
    if (d == 0) break;
    const double x = r.x - f(r.x) / d;
    const double res = std::abs(f(x));
    if (!(res < r.residual)) break;
    r = {x, res};
  }
  return r;
}

Root bracelet_threshold_root() {
  return find_root([](double z) { return 2.5 - 0.5 * std::exp(-2 * z) - z; },
                   [](double z) { return std::exp(-2 * z) - 1; }, kRootLo, kRootHi);
}

double bracelet_zeta_c() { return bracelet_threshold_root().x; }

double bracelet_rho(double lambda) {
  require_lambda(lambda);
  return std::min(lambda, (5 - std::exp(-2 * lambda)) / 2);
}

Root flower_threshold_root() {
  return find_root([](double z) { return 5.0 / 3 + std::exp(-3 * z) / 3 - z; },
                   [](double z) { return -std::exp(-3 * z) - 1; }, kRootLo, kRootHi);
}

Root flower_upper_root() {
  return find_root([](double z) { return 10.0 / 3 - std::exp(-3 * z) / 3 - z; },
                   [](double z) { return std::exp(-3 * z) - 1; }, kRootLo, kRootHi);
}

double flower_zeta_c() { return flower_threshold_root().x; }
double flower_zeta_c_prime() { return flower_upper_root().x; }

double flower_rho(double lambda) {
  require_lambda(lambda);
  return lambda <= flower_zeta_c() ? lambda : 5.0 / 3 + std::exp(-3 * lambda) / 3;
}

double flower_prob_X0(double lambda) {
  require_lambda(lambda);
  return (1 + 2 * std::exp(-3 * lambda)) / 3;
}

Matrix2 expm(const Matrix2& a) {
  auto mul = [](const Matrix2& x, const Matrix2& y) {
    Matrix2 z{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
    return z;
  };
  double norm = 0;
  for (const auto& row : a) norm = std::max(norm, std::abs(row[0]) + std::abs(row[1]));
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  Matrix2 s{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s[i][j] = a[i][j] * scale;
  Matrix2 result{{{1, 0}, {0, 1}}};
  Matrix2 term = result;
  for (int k = 1; k <= 20; ++k) {
    term = mul(term, s);
    for (auto& row : term)
      for (double& x : row) x /= k;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) result[i][j] += term[i][j];
  }
  for (int i = 0; i < squarings; ++i) result = mul(result, result);
  return result;
}

double markov_prob_X0(double lambda) {
  require_lambda(lambda);
  const Matrix2 p{{{0, 0.5}, {1, 0.5}}};
  Matrix2 gen{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) gen[i][j] = 2 * lambda * (p[i][j] - (i == j ? 1 : 0));
  return expm(gen)[0][0];
}

Rational flower_activity(double lambda) {
  require_lambda(lambda);
  if (lambda < flower_zeta_c()) return {0, 1};
  if (lambda < 2) return {1, 3};
  if (lambda < 3) return {1, 2};
  if (lambda < flower_zeta_c_prime()) return {2, 3};
  return {1, 1};
}

std::vector<mpq_class> cayley_height_dist(unsigned q) {
  if (q < 2) throw std::invalid_argument("Cayley tree needs q >= 2");
  mpz_class qq;
  mpz_ui_pow_ui(qq.get_mpz_t(), q, q);
  const mpz_class norm = mpz_class(q * q - 1) * qq;
  std::vector<mpq_class> out;
  mpz_class partial = 0;
  for (unsigned i = 0; i <= q; ++i) {
    mpz_class binom, power;
    mpz_bin_uiui(binom.get_mpz_t(), q + 1, i);
    mpz_ui_pow_ui(power.get_mpz_t(), q - 1, q + 1 - i);
    partial += binom * power;
    mpq_class p(partial, norm);
    p.canonicalize();
    out.push_back(p);
  }
  return out;
}

mpq_class cayley_zeta_s(unsigned q) {
  const auto dist = cayley_height_dist(q);
  mpq_class mean = 0;
  for (unsigned i = 0; i < dist.size(); ++i) mean += dist[i] * i;
  return mean;
}

std::array<LadderLaw::Vec, LadderLaw::kStates> LadderLaw::parry_chain() const {
  std::array<Vec, kStates> p{};
  for (std::size_t i = 0; i < kStates; ++i)
    for (std::size_t j = 0; j < kStates; ++j)
      p[i][j] = transfer_matrix[i][j] * right_vec[j] / (perron_value * right_vec[i]);
  return p;
}

namespace {

using Vec7 = LadderLaw::Vec;

// Normalized Perron vector of A (or its transpose) by power iteration.
std::pair<double, Vec7> perron(const std::array<std::array<int, 7>, 7>& a, bool transpose) {
  Vec7 x;
  x.fill(1.0);
  double lambda = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    Vec7 y{};
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) y[i] += (transpose ? a[j][i] : a[i][j]) * x[j];
    double norm = 0;
    for (double v : y) norm = std::max(norm, v);
    for (double& v : y) v /= norm;
    double change = 0;
    for (std::size_t i = 0; i < 7; ++i) change = std::max(change, std::abs(y[i] - x[i]));
    x = y;
    lambda = norm;
    if (change < 1e-15) break;
  }
  return {lambda, x};
}

}  // namespace

LadderLaw ladder_stationary() {
  LadderLaw law;
  law.transfer_matrix = {{{1, 1, 1, 1, 1, 0, 0},
                          {1, 1, 1, 1, 1, 0, 0},
                          {1, 1, 1, 1, 1, 0, 0},
                          {1, 0, 0, 0, 0, 1, 0},
                          {1, 0, 0, 0, 0, 0, 1},
                          {1, 0, 0, 0, 0, 1, 0},
                          {1, 0, 0, 0, 0, 0, 1}}};
  auto [lr, right] = perron(law.transfer_matrix, false);
  auto [ll, left] = perron(law.transfer_matrix, true);
  law.perron_value = (lr + ll) / 2;
  law.right_vec = right;
  law.left_vec = left;

  double z = 0;
  for (std::size_t i = 0; i < LadderLaw::kStates; ++i) z += left[i] * right[i];
  for (std::size_t i = 0; i < LadderLaw::kStates; ++i) law.state_probs[i] = left[i] * right[i] / z;

  // (left height, right height) of each state, i.e. (i - 1, j - 1).
  constexpr std::array<std::array<int, 2>, 7> heights{{{2, 2}, {2, 1}, {1, 2}, {2, 0}, {0, 2}, {2, 1}, {1, 2}}};
  for (std::size_t i = 0; i < LadderLaw::kStates; ++i)
    for (int h : heights[i]) law.height_probs[h] += law.state_probs[i] / 2;
  law.zeta_s = law.height_probs[1] + 2 * law.height_probs[2];
  return law;
}

TutteDensity tutte_zeta_s(const MultiGraph& g, Vertex sink, std::size_t max_edges) {
  const std::size_t n = g.num_vertices();
  if (sink >= n) throw std::invalid_argument("sink out of range");
  if (n < 2) throw std::invalid_argument("tutte density needs at least 2 vertices");
  TutteDensity t;
  t.edges = g.edge_count();
  t.sink_degree = static_cast<Count>(g.degree(sink)) - g.loop_count(sink);
  t.trees = spanning_tree_count(g);
  t.unicyclic = unicyclic_count(g, max_edges);
  t.mean_total = mpq_class(t.unicyclic, t.trees);
  t.mean_total.canonicalize();
  t.mean_total += mpz_class(static_cast<unsigned long>(t.edges)) - static_cast<unsigned long>(t.sink_degree);
  t.per_vertex = t.mean_total / static_cast<unsigned long>(n);
  t.per_nonsink = t.mean_total / static_cast<unsigned long>(n - 1);
  return t;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::Conjectural: return "conjectural";
    case Provenance::Empirical: return "empirical";
    case Provenance::Asymptotic: return "asymptotic";
  }
  return "unknown";
}

std::vector<ReferenceConstant> reference_constants() {
  using std::numbers::pi;
  const double p2 = pi * pi, p3 = p2 * pi;
  return {
      {"zeta_s(Z2)", 17.0 / 8, Provenance::Conjectural, "17/8"},
      {"Pr_Z2[h=0]", 2 / p2 - 4 / p3, Provenance::Exact, "2/pi^2 - 4/pi^3"},
      {"Pr_Z2[h=1]", 0.25 - 1 / (2 * pi) - 3 / p2 + 12 / p3, Provenance::Conjectural,
       "1/4 - 1/(2 pi) - 3/pi^2 + 12/pi^3"},
      {"Pr_Z2[h=2]", 0.375 + 1 / pi - 12 / p3, Provenance::Conjectural, "3/8 + 1/pi - 12/pi^3"},
      {"Pr_Z2[h=3]", 0.375 - 1 / (2 * pi) + 1 / p2 + 4 / p3, Provenance::Conjectural,
       "3/8 - 1/(2 pi) + 1/pi^2 + 4/pi^3"},
      {"zeta_c(Z2)", 2.125288, Provenance::Empirical, "2.125288"},
      {"zeta_c(Z2) fit", 2.1252881, Provenance::Empirical, "2.1252881 +- 3e-7 - 0.390 n^-1.7"},
      {"zeta_c(Z_64^2)", 2.1249561, Provenance::Empirical, "2.1249561 +- 4e-7"},
      {"zeta_c(Z_256^2)", 2.1252572, Provenance::Empirical, "2.1252572 +- 4e-7"},
      {"wright constant", std::sqrt(pi / 8), Provenance::Exact, "sqrt(pi/8)"},
      {"zeta_s(K_n) / n", 0.5, Provenance::Asymptotic, "n/2 + sqrt(pi/8) sqrt(n) + o(sqrt n)"},
      {"zeta_s(lollipop_n) / n", 0.25, Provenance::Asymptotic, "n/4 + O(sqrt n)"},
      {"zeta_c(ladder)", 1.6082, Provenance::Empirical, "1.6082"},
      {"zeta_c(tree3)", 1.5, Provenance::Empirical, "1.50000"},
      {"zeta_c(tree4)", 2.00041, Provenance::Empirical, "2.00041"},
      {"zeta_c(tree5)", 2.51167, Provenance::Empirical, "2.51167"},
  };
}

double complete_zeta_s_asymptotic(double n) { return n / 2 + std::sqrt(std::numbers::pi / 8) * std::sqrt(n); }

std::vector<DensityLaw> density_laws() {
  const double ladder_s = 7.0 / 4 - std::sqrt(3.0) / 12;
  return {
      {"line", 1.0, true, 1.0, true, [](double l) { return std::min(l, 1.0); }, ""},
      {"torus", 17.0 / 8, true, 2.125288, false, {}, "zeta_s exact to 1e-12"},
      {"bracelet", 2.5, true, bracelet_zeta_c(), true, bracelet_rho, ""},
      {"flower", 5.0 / 3, true, flower_zeta_c(), true, flower_rho, ""},
      {"ladder", ladder_s, true, 1.6082, false, {}, ""},
      {"complete", std::nullopt, false, std::nullopt, false, {},
       "zeta_s = n/2 + O(sqrt n); zeta_c >= n - O(sqrt(n log n))"},
      {"tree3", 1.5, true, 1.5, false, {}, ""},
      {"tree4", 2.0, true, 2.00041, false, {}, ""},
      {"tree5", 2.5, true, 2.51167, false, {}, ""},
  };
}

const DensityLaw& density_law(const std::string& family) {
  static const std::vector<DensityLaw> laws = density_laws();
  for (const auto& l : laws)
    if (l.family == family) return l;
  throw std::invalid_argument("no density law for family '" + family + "'");
}

std::string density_table_csv() {
  std::string out = "family,zeta_s,zeta_s_exact,zeta_c,zeta_c_exact,has_rho,note\n";
  auto cell = [](const std::optional<double>& x) { return x ? format_real(*x) : std::string(); };
  for (const auto& l : density_laws()) {
    out += l.family + "," + cell(l.zeta_s) + "," + (l.zeta_s_exact ? "1" : "0") + "," + cell(l.zeta_c) + "," +
           (l.zeta_c_exact ? "1" : "0") + "," + (l.rho_of_lambda ? "1" : "0") + ",\"" + l.note + "\"\n";
  }
  return out;
}

std::string density_table_json() {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& l : density_laws()) {
    nlohmann::ordered_json r;
    r["family"] = l.family;
    r["zeta_s"] = l.zeta_s ? nlohmann::ordered_json(*l.zeta_s) : nlohmann::ordered_json(nullptr);
    r["zeta_s_exact"] = l.zeta_s_exact;
    r["zeta_c"] = l.zeta_c ? nlohmann::ordered_json(*l.zeta_c) : nlohmann::ordered_json(nullptr);
    r["zeta_c_exact"] = l.zeta_c_exact;
    r["has_rho"] = static_cast<bool>(l.rho_of_lambda);
    r["note"] = l.note;
    rows.push_back(r);
  }
  return rows.dump(2);
}

}  // namespace sandpile
