#include "sandpile/chipfiring.hpp"

#include <stdexcept>

#include "json.hpp"

namespace sandpile {

namespace {

void check_size(const MultiGraph& g, std::size_t n) {
  if (g.num_vertices() != n) throw std::invalid_argument("configuration size does not match graph");
}

}  // namespace

Count parallel_step_into(const MultiGraph& g, std::span<const Height> in, std::span<Height> out,
                         std::vector<std::uint8_t>& unstable) {
  const auto n = static_cast<std::int64_t>(g.num_vertices());
  unstable.resize(static_cast<std::size_t>(n));
  Count fired = 0;
#pragma omp parallel
  {
#pragma omp for schedule(static) reduction(+ : fired)
    for (std::int64_t v = 0; v < n; ++v) {
      const bool u = in[v] >= g.degree(static_cast<Vertex>(v));
      unstable[v] = u;
      fired += u;
    }
#pragma omp for schedule(dynamic, 1024)
    for (std::int64_t v = 0; v < n; ++v) {
      const auto x = static_cast<Vertex>(v);
      Height h = in[v] - (unstable[v] ? g.degree(x) : 0);
      const auto nb = g.neighbors(x);
      const auto mu = g.multiplicities(x);
      for (std::size_t i = 0; i < nb.size(); ++i)
        if (unstable[nb[i]]) h += mu[i];
      out[v] = h;
    }
  }
  return fired;
}

Config parallel_step(const MultiGraph& g, const Config& c) {
  check_size(g, c.size());
  Config out(c.size());
  std::vector<std::uint8_t> scratch;
  parallel_step_into(g, c.values(), out.values(), scratch);
  return out;
}

Config parallel_step_serial(const MultiGraph& g, const Config& c) {
  check_size(g, c.size());
  Config out = c;
  for (Vertex v = 0; v < c.size(); ++v) {
    if (c[v] < g.degree(v)) continue;
    out[v] -= g.degree(v);
    g.for_each_neighbor(v, [&](Vertex w, Height a) { out[w] += a; });
  }
  return out;
}

Count default_orbit_budget(const MultiGraph& g) { return 16 * g.num_vertices() + (Count{1} << 16); }

std::optional<OrbitSummary> try_find_orbit(const MultiGraph& g, const Config& c, Count max_steps) {
  check_size(g, c.size());
  if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
  const std::size_t n = c.size();
  std::vector<std::uint8_t> mask;
  std::vector<Height> tortoise = c.raw(), hare(n), next(n);
  Count steps = 0;
  auto advance = [&](std::vector<Height>& x) {
    parallel_step_into(g, x, next, mask);
    x.swap(next);
    ++steps;
  };

  // Brent: find the period.
  hare = tortoise;
  advance(hare);
  Count power = 1, period = 1;
  while (tortoise != hare) {
    if (steps >= max_steps) return std::nullopt;
    if (power == period) {
      tortoise = hare;
      power *= 2;
      period = 0;
    }
    advance(hare);
    ++period;
  }

  // Transient: walk two copies `period` apart until they meet.
  tortoise = c.raw();
  hare = c.raw();
  for (Count i = 0; i < period; ++i) advance(hare);
  Count transient = 0;
  while (tortoise != hare) {
    if (steps >= max_steps) return std::nullopt;
    advance(tortoise);
    advance(hare);
    ++transient;
  }

  OrbitSummary out;
  out.transient = transient;
  out.period = period;
  out.period_topples.assign(n, 0);
  Count fired = 0;
  for (Count i = 0; i < period; ++i) {
    fired += parallel_step_into(g, tortoise, next, mask);
    for (std::size_t v = 0; v < n; ++v) out.period_topples[v] += mask[v];
    tortoise.swap(next);
  }
  out.activity = Rational(static_cast<std::int64_t>(fired), static_cast<std::int64_t>(period * n));
  return out;
}

OrbitSummary find_orbit(const MultiGraph& g, const Config& c, Count max_steps) {
  if (max_steps == 0) max_steps = default_orbit_budget(g);
  auto s = try_find_orbit(g, c, max_steps);
  if (!s) throw BudgetExceeded("no periodic orbit found within " + std::to_string(max_steps) + " steps");
  return *s;
}

std::string orbit_to_json(const OrbitSummary& s) {
  nlohmann::ordered_json j;
  j["transient"] = s.transient;
  j["period"] = s.period;
  j["activity_num"] = s.activity.num;
  j["activity_den"] = s.activity.den;
  return j.dump();
}

Config mirror(const MultiGraph& g, const Config& c) {
  check_size(g, c.size());
  Config out(c.size());
  for (Vertex v = 0; v < c.size(); ++v) {
    const Height top = 2 * g.degree(v) - 1;
    if (c[v] < 0 || c[v] > top) throw std::invalid_argument("mirror needs 0 <= c(x) <= 2 d(x) - 1");
    out[v] = top - c[v];
  }
  return out;
}

Rational flower_activity_from_RZ(Count n, Count R, Count Z) {
  if (Z > n) throw std::invalid_argument("Z cannot exceed the number of petals");
  if (R < 3 * n + Z) return {0};
  if (R < 4 * n) return {1, 3};
  if (R < 6 * n) return {1, 2};
  if (R < 7 * n - Z) return {2, 3};
  return {1};
}

PetalInvariant petal_invariant(const MultiGraph& g, const Config& c) {
  check_size(g, c.size());
  const std::size_t nv = g.num_vertices();
  if (nv < 3 || nv % 2 == 0) throw std::invalid_argument("not a flower graph");
  const std::size_t petals = (nv - 1) / 2;
  if (g.degree(0) != static_cast<Height>(2 * petals)) throw std::invalid_argument("not a flower graph");
  PetalInvariant out;
  out.x.resize(petals);
  for (std::size_t k = 0; k < petals; ++k) {
    const auto a = static_cast<Vertex>(2 * k + 1), b = static_cast<Vertex>(2 * k + 2);
    if (g.degree(a) != 2 || g.degree(b) != 2 || g.multiplicity(a, b) != 1 || g.multiplicity(0, a) != 1 ||
        g.multiplicity(0, b) != 1)
      throw std::invalid_argument("not a flower graph");
    const Height diff = ((c[a] - c[b]) % 3 + 3) % 3;
    out.x[k] = static_cast<std::uint8_t>(diff);
    if (diff == 0) ++out.zero_petals;
  }
  return out;
}

std::vector<std::uint8_t> bracelet_parity(const Config& c) {
  std::vector<std::uint8_t> out(c.size());
  for (std::size_t v = 0; v < c.size(); ++v) out[v] = static_cast<std::uint8_t>(c[v] & 1);
  return out;
}

}  // namespace sandpile
