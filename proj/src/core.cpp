#include "sandpile/core.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sandpile/toppling.hpp"

namespace sandpile {

namespace {

using i128 = __int128;

void check_config(std::size_t n, const Config& c) {
  if (c.size() != n) throw std::invalid_argument("configuration size does not match graph");
  for (Height h : c)
    if (h < 0) throw std::invalid_argument("configuration has a negative height");
}

i128 floor_div(i128 a, i128 b) {
  // b > 0
  i128 q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

// Odometer on the interior positions 1..L-1 of one segment between sinks.
// eta holds the interior heights at positions 1..L-1 (index 0 and L unused).
void solve_segment(std::span<const Height> eta, Height k, std::span<Count> u) {
  const std::size_t len = eta.size() - 1;  // L
  std::vector<Height> phi(len + 1, 0);
  for (std::size_t x = 1; x < len; ++x) {
    const Height c = static_cast<Height>(floor_div(2 * k - 1 - eta[x], k));
    phi[x + 1] = 2 * phi[x] - phi[x - 1] + c;
  }

  // Upper hull of (y, -phi(y)).
  auto g = [&](std::size_t y) { return static_cast<i128>(-phi[y]); };
  std::vector<std::size_t> hull;
  for (std::size_t y = 0; y <= len; ++y) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      // Drop b if it lies on or below the chord a -> y.
      const i128 lhs = (g(b) - g(a)) * static_cast<i128>(y - a);
      const i128 rhs = (g(y) - g(a)) * static_cast<i128>(b - a);
      if (lhs <= rhs)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(y);
  }

  const std::size_t edges = hull.size() - 1;
  // alpha(s) = max_y g(y) - s*y, attained at the first hull vertex whose
  // outgoing edge has slope < s.
  auto alpha = [&](i128 s) {
    std::size_t lo = 0, hi = edges;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const std::size_t a = hull[mid], b = hull[mid + 1];
      if (g(b) - g(a) < s * static_cast<i128>(b - a))
        hi = mid;
      else
        lo = mid + 1;
    }
    const std::size_t y = hull[lo];
    return g(y) - s * static_cast<i128>(y);
  };

  std::size_t e = 0;
  for (std::size_t x = 1; x < len; ++x) {
    while (hull[e + 1] <= x && e + 1 < edges) ++e;
    // Edge e spans x; if x is its left vertex, the previous edge also touches x.
    i128 best = 0;
    bool have = false;
    auto consider_edge = [&](std::size_t idx) {
      const std::size_t a = hull[idx], b = hull[idx + 1];
      const i128 num = g(b) - g(a);
      const auto den = static_cast<i128>(b - a);
      for (i128 s : {floor_div(num, den), ceil_div(num, den)}) {
        const i128 v = alpha(s) + s * static_cast<i128>(x);
        if (!have || v < best) {
          best = v;
          have = true;
        }
      }
    };
    consider_edge(e);
    if (hull[e] == x && e > 0) consider_edge(e - 1);
    const i128 total = static_cast<i128>(phi[x]) + best;
    if (total < 0) throw std::logic_error("path solver produced a negative odometer");
    u[x] = static_cast<Count>(total);
  }
}

std::vector<Vertex> cycle_order(const MultiGraph& g, Vertex start) {
  const std::size_t n = g.num_vertices();
  std::vector<Vertex> order;
  order.reserve(n);
  order.push_back(start);
  Vertex prev = start;
  Vertex cur = g.neighbors(start)[0];
  while (cur != start) {
    order.push_back(cur);
    const auto nb = g.neighbors(cur);
    const Vertex next = nb[0] == prev ? nb[1] : nb[0];
    prev = cur;
    cur = next;
  }
  return order;
}

bool stable_on(const SinkedGraph& g, const Config& c) {
  for (Vertex v : g.non_sinks())
    if (c[v] >= g.degree(v)) return false;
  return true;
}

}  // namespace

bool is_path_like(const MultiGraph& g) {
  const std::size_t n = g.num_vertices();
  if (n < 3) return false;
  const Height k = g.multiplicities(0).empty() ? 0 : g.multiplicities(0)[0];
  if (k <= 0) return false;
  for (Vertex v = 0; v < n; ++v) {
    const auto nb = g.neighbors(v);
    const auto mu = g.multiplicities(v);
    if (nb.size() != 2 || nb[0] == v || nb[1] == v) return false;
    if (mu[0] != k || mu[1] != k) return false;
  }
  return g.is_connected();
}

Stabilized stabilize_fifo(const SinkedGraph& g, const Config& c) {
  check_config(g.num_vertices(), c);
  Config eta = c;
  Relaxer<SinkedGraph> relax(g, g.sink_mask());
  relax.touch_all(eta.values());
  relax.relax(eta.values(), false);
  return {std::move(eta), relax.odometer()};
}

Stabilized stabilize_path_like(const SinkedGraph& g, const Config& c) {
  const MultiGraph& mg = g.graph();
  if (!is_path_like(mg)) throw std::invalid_argument("graph is not a uniform cycle");
  check_config(g.num_vertices(), c);
  const std::size_t n = mg.num_vertices();
  const Height k = mg.multiplicities(0)[0];

  const std::vector<Vertex> order = cycle_order(mg, g.sinks()[0]);
  std::vector<std::size_t> sink_pos;
  for (std::size_t i = 0; i < n; ++i)
    if (g.is_sink(order[i])) sink_pos.push_back(i);
  sink_pos.push_back(n);

  Odometer odo(n);
  std::vector<Height> seg_eta;
  std::vector<Count> seg_u;
  for (std::size_t j = 0; j + 1 < sink_pos.size(); ++j) {
    const std::size_t begin = sink_pos[j];
    const std::size_t len = sink_pos[j + 1] - begin;
    if (len < 2) continue;
    seg_eta.assign(len + 1, 0);
    seg_u.assign(len + 1, 0);
    for (std::size_t x = 1; x < len; ++x) seg_eta[x] = c[order[begin + x]];
    solve_segment(seg_eta, k, seg_u);
    for (std::size_t x = 1; x < len; ++x) odo[order[begin + x]] = seg_u[x];
  }

  Config eta = c;
  for (Vertex v = 0; v < n; ++v) {
    if (odo[v] == 0) continue;
    const auto t = static_cast<Height>(odo[v]);
    eta[v] -= 2 * k * t;
    for (Vertex w : mg.neighbors(v)) eta[w] += k * t;
  }
  for (Vertex v : g.non_sinks())
    if (eta[v] < 0 || eta[v] >= 2 * k) throw std::logic_error("path solver produced an unstable result");
  return {std::move(eta), std::move(odo)};
}

Stabilized stabilize(const SinkedGraph& g, const Config& c) {
  if (is_path_like(g.graph())) return stabilize_path_like(g, c);
  return stabilize_fifo(g, c);
}

Stabilized stabilize_ordered(const SinkedGraph& g, const Config& c, ToppleOrder order,
                             RngStream* rng) {
  if (order == ToppleOrder::Fifo) return stabilize_fifo(g, c);
  check_config(g.num_vertices(), c);
  const std::size_t n = g.num_vertices();
  const MultiGraph& mg = g.graph();
  Config eta = c;
  Odometer odo(n);

  auto topple = [&](Vertex v) {
    eta[v] -= mg.degree(v);
    mg.for_each_neighbor(v, [&](Vertex w, Height a) { eta[w] += a; });
    ++odo[v];
  };

  if (order == ToppleOrder::GreedyMax) {
    for (;;) {
      Vertex best = 0;
      bool found = false;
      for (Vertex v : g.non_sinks()) {
        if (eta[v] < mg.degree(v)) continue;
        if (!found || eta[v] > eta[best]) {
          best = v;
          found = true;
        }
      }
      if (!found) break;
      topple(best);
    }
    return {std::move(eta), std::move(odo)};
  }

  if (rng == nullptr) throw std::invalid_argument("random toppling order needs an RngStream");
  std::vector<Vertex> unstable;
  std::vector<std::ptrdiff_t> pos(n, -1);
  auto refresh = [&](Vertex v) {
    const bool want = !g.is_sink(v) && eta[v] >= mg.degree(v);
    if (want && pos[v] < 0) {
      pos[v] = static_cast<std::ptrdiff_t>(unstable.size());
      unstable.push_back(v);
    } else if (!want && pos[v] >= 0) {
      const Vertex last = unstable.back();
      unstable[static_cast<std::size_t>(pos[v])] = last;
      pos[last] = pos[v];
      unstable.pop_back();
      pos[v] = -1;
    }
  };
  for (Vertex v = 0; v < n; ++v) refresh(v);
  while (!unstable.empty()) {
    const Vertex v = unstable[rng->uniform_below(unstable.size())];
    topple(v);
    refresh(v);
    for (Vertex w : mg.neighbors(v)) refresh(w);
  }
  return {std::move(eta), std::move(odo)};
}

StabilizeOutcome stabilize_or_detect(const MultiGraph& g, const Config& c) {
  check_config(g.num_vertices(), c);
  Config eta = c;
  Relaxer<MultiGraph> relax(g);
  relax.touch_all(eta.values());
  if (relax.relax(eta.values(), true) == Relaxer<MultiGraph>::Outcome::AllToppled)
    return NonStabilizing{relax.odometer()};
  return Stabilized{std::move(eta), relax.odometer()};
}

Stabilized add_and_stabilize(const SinkedGraph& g, const Config& c, Vertex v) {
  if (v >= g.num_vertices()) throw std::invalid_argument("vertex out of range");
  if (g.is_sink(v)) throw std::invalid_argument("cannot add a particle at a sink");
  check_config(g.num_vertices(), c);
  Config eta = c;
  eta[v] += 1;
  if (is_path_like(g.graph())) return stabilize_path_like(g, eta);
  Relaxer<SinkedGraph> relax(g, g.sink_mask());
  relax.touch_all(eta.values());
  relax.relax(eta.values(), false);
  return {std::move(eta), relax.odometer()};
}

bool is_stable(const SinkedGraph& g, const Config& c) {
  check_config(g.num_vertices(), c);
  return stable_on(g, c);
}

Config max_stable(const SinkedGraph& g) {
  Config c(g.num_vertices());
  for (Vertex v : g.non_sinks()) c[v] = g.degree(v) - 1;
  return c;
}

bool is_recurrent(const SinkedGraph& g, const Config& c) {
  if (!is_stable(g, c)) throw std::invalid_argument("burning test needs a stable configuration");
  Config eta = c;
  for (Vertex s : g.sinks())
    g.graph().for_each_neighbor(s, [&](Vertex w, Height a) {
      if (!g.is_sink(w)) eta[w] += a;
    });
  const Stabilized out = stabilize_fifo(g, eta);
  for (Vertex v : g.non_sinks())
    if (out.odometer[v] != 1) return false;
  return true;
}

std::vector<Config> enumerate_recurrent(const SinkedGraph& g, Count budget) {
  const auto ns = g.non_sinks();
  Count total = 1;
  for (Vertex v : ns) {
    const auto d = static_cast<Count>(g.degree(v));
    if (d == 0 || total > budget / d) throw BudgetExceeded("recurrent enumeration exceeds budget");
    total *= d;
  }
  std::vector<Config> out;
  Config c(g.num_vertices());
  for (Count i = 0; i < total; ++i) {
    if (is_recurrent(g, c)) out.push_back(c);
    // Increment with the last non-sink vertex as the fastest digit.
    for (std::size_t j = ns.size(); j-- > 0;) {
      const Vertex v = ns[j];
      if (++c[v] < g.degree(v)) break;
      c[v] = 0;
    }
  }
  return out;
}

std::vector<Config> reachable_recurrent(const SinkedGraph& g, Count budget) {
  std::set<std::vector<Height>> seen;
  std::vector<Config> frontier{max_stable(g)};
  seen.insert(frontier.front().raw());
  while (!frontier.empty()) {
    const Config c = std::move(frontier.back());
    frontier.pop_back();
    for (Vertex v : g.non_sinks()) {
      Config next = add_and_stabilize(g, c, v).config;
      for (Vertex s : g.sinks()) next[s] = 0;
      if (seen.insert(next.raw()).second) {
        if (seen.size() > budget) throw BudgetExceeded("reachability search exceeds budget");
        frontier.push_back(std::move(next));
      }
    }
  }
  std::vector<Config> out;
  out.reserve(seen.size());
  for (const auto& h : seen) out.emplace_back(h);
  return out;
}

mpz_class spanning_tree_count(const MultiGraph& g, std::span<const Vertex> collapse) {
  const std::size_t n = g.num_vertices();
  if (!g.is_connected()) throw std::invalid_argument("spanning tree count needs a connected graph");
  std::vector<std::uint8_t> merged(n, 0);
  for (Vertex v : collapse) {
    if (v >= n) throw std::invalid_argument("collapse vertex out of range");
    merged[v] = 1;
  }
  // Quotient numbering: merged set becomes the last index, which is deleted.
  std::vector<std::size_t> id(n);
  std::size_t m = 0;
  for (Vertex v = 0; v < n; ++v)
    if (!merged[v]) id[v] = m++;
  const bool has_merged = m < n;
  const std::size_t size = has_merged ? m : m - 1;  // reduced Laplacian order
  if (!has_merged) id[n - 1] = size;                // plain delete of vertex n-1
  if (size == 0) return 1;

  std::vector<mpz_class> a(size * size, 0);
  for (Vertex v = 0; v < n; ++v) {
    const std::size_t iv = merged[v] ? size : id[v];
    if (iv >= size) continue;
    const auto nb = g.neighbors(v);
    const auto mu = g.multiplicities(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const Vertex w = nb[i];
      const std::size_t iw = merged[w] ? size : id[w];
      if (iw == iv) continue;  // loops do not enter the Laplacian
      a[iv * size + iv] += mu[i];
      if (iw < size) a[iv * size + iw] -= mu[i];
    }
  }

  // Fraction-free Bareiss elimination.
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < size; ++k) {
    if (a[k * size + k] == 0) {
      std::size_t r = k + 1;
      while (r < size && a[r * size + k] == 0) ++r;
      if (r == size) return 0;
      for (std::size_t j = 0; j < size; ++j) std::swap(a[k * size + j], a[r * size + j]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < size; ++i) {
      for (std::size_t j = k + 1; j < size; ++j) {
        mpz_class t = a[i * size + j] * a[k * size + k] - a[i * size + k] * a[k * size + j];
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        a[i * size + j] = t;
      }
      a[i * size + k] = 0;
    }
    prev = a[k * size + k];
  }
  mpz_class det = a[size * size - 1];
  if (sign < 0) det = -det;
  return det;
}

mpz_class unicyclic_count(const MultiGraph& g, std::size_t max_edges) {
  const std::size_t n = g.num_vertices();
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (const Edge& e : g.edges())
    for (Count i = 0; i < e.multiplicity; ++i) edges.emplace_back(e.u, e.v);
  const std::size_t m = edges.size();
  if (m > max_edges || m >= 64) throw BudgetExceeded("unicyclic enumeration exceeds edge budget");
  if (m < n || n == 0) return 0;

  std::vector<Vertex> parent(n);
  auto find = [&](Vertex x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  mpz_class count = 0;
  // Gosper's hack over all n-subsets of the m edges.
  std::uint64_t subset = (std::uint64_t{1} << n) - 1;
  const std::uint64_t limit = std::uint64_t{1} << m;
  while (subset < limit) {
    std::iota(parent.begin(), parent.end(), Vertex{0});
    std::size_t components = n;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(subset >> i & 1)) continue;
      const Vertex a = find(edges[i].first), b = find(edges[i].second);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    if (components == 1) ++count;
    const std::uint64_t c = subset & (0 - subset);
    const std::uint64_t r = subset + c;
    subset = (((r ^ subset) >> 2) / c) | r;
  }
  return count;
}

namespace {

template <class T>
std::string join_line(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(values[i]);
  }
  return out;
}

template <class T>
std::vector<T> split_line(std::string_view line) {
  std::vector<T> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size() || line[i] == '\n' || line[i] == '\r') break;
    T value{};
    const auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + line.size(), value);
    if (ec != std::errc{}) throw std::invalid_argument("malformed state line");
    i = static_cast<std::size_t>(ptr - line.data());
    out.push_back(value);
  }
  return out;
}

}  // namespace

std::string config_to_line(const Config& c) { return join_line(c.raw()); }
std::string odometer_to_line(const Odometer& o) { return join_line(o.raw()); }

Config config_from_line(std::string_view line) {
  Config c(split_line<Height>(line));
  for (Height h : c)
    if (h < 0) throw std::invalid_argument("configuration has a negative height");
  return c;
}

Odometer odometer_from_line(std::string_view line) { return Odometer(split_line<Count>(line)); }

}  // namespace sandpile
