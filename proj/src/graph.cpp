#include "sandpile/graph.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sandpile {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

MultiGraph MultiGraph::from_edges(std::size_t num_vertices, std::span<const Edge> edges) {
  // Row entries as (neighbor, edge ends) before merging.
  std::vector<std::vector<std::pair<Vertex, Height>>> rows(num_vertices);
  for (const Edge& e : edges) {
    if (e.u >= num_vertices || e.v >= num_vertices)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.multiplicity == 0) throw std::invalid_argument("edge multiplicity must be positive");
    const auto m = static_cast<Height>(e.multiplicity);
    if (e.u == e.v) {
      rows[e.u].emplace_back(e.u, 2 * m);
    } else {
      rows[e.u].emplace_back(e.v, m);
      rows[e.v].emplace_back(e.u, m);
    }
  }

  MultiGraph g;
  g.offset_.assign(1, 0);
  g.degree_.assign(num_vertices, 0);
  for (std::size_t v = 0; v < num_vertices; ++v) {
    auto& row = rows[v];
    std::sort(row.begin(), row.end());
    for (std::size_t i = 0; i < row.size();) {
      const Vertex w = row[i].first;
      Height m = 0;
      for (; i < row.size() && row[i].first == w; ++i) m += row[i].second;
      g.neighbor_.push_back(w);
      g.mult_.push_back(m);
      g.degree_[v] += m;
    }
    g.offset_.push_back(g.neighbor_.size());
  }
  return g;
}

Height MultiGraph::max_degree() const {
  return degree_.empty() ? 0 : *std::max_element(degree_.begin(), degree_.end());
}

Height MultiGraph::multiplicity(Vertex v, Vertex w) const {
  const auto nb = neighbors(v);
  const auto it = std::lower_bound(nb.begin(), nb.end(), w);
  if (it == nb.end() || *it != w) return 0;
  return multiplicities(v)[static_cast<std::size_t>(it - nb.begin())];
}

Count MultiGraph::edge_count() const {
  Count total = 0;
  for (const Edge& e : edges()) total += e.multiplicity;
  return total;
}

std::size_t MultiGraph::distinct_edge_count() const {
  std::size_t count = 0;
  for (Vertex v = 0; v < num_vertices(); ++v)
    for (Vertex w : neighbors(v))
      if (w >= v) ++count;
  return count;
}

std::vector<Edge> MultiGraph::edges() const {
  std::vector<Edge> out;
  for (Vertex v = 0; v < num_vertices(); ++v) {
    const auto nb = neighbors(v);
    const auto mu = multiplicities(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] < v) continue;
      const Height m = nb[i] == v ? mu[i] / 2 : mu[i];
      out.push_back({v, nb[i], static_cast<Count>(m)});
    }
  }
  return out;
}

bool MultiGraph::is_connected() const {
  const std::size_t n = num_vertices();
  if (n == 0) return true;
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

bool MultiGraph::is_symmetric() const {
  for (Vertex v = 0; v < num_vertices(); ++v) {
    const auto nb = neighbors(v);
    const auto mu = multiplicities(v);
    Height sum = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (multiplicity(nb[i], v) != mu[i]) return false;
      sum += mu[i];
    }
    if (sum != degree_[v]) return false;
  }
  return true;
}

SinkedGraph::SinkedGraph(MultiGraph graph, std::vector<Vertex> sinks)
    : graph_(std::move(graph)), sinks_(std::move(sinks)) {
  require(!sinks_.empty(), "sink set must be nonempty");
  std::sort(sinks_.begin(), sinks_.end());
  sinks_.erase(std::unique(sinks_.begin(), sinks_.end()), sinks_.end());
  sink_mask_.assign(graph_.num_vertices(), 0);
  for (Vertex s : sinks_) {
    require(s < graph_.num_vertices(), "sink vertex out of range");
    sink_mask_[s] = 1;
  }
  for (Vertex v = 0; v < graph_.num_vertices(); ++v)
    if (!sink_mask_[v]) non_sinks_.push_back(v);
}

MultiGraph build_torus(std::size_t n) {
  require(n >= 1, "torus side must be at least 1");
  // Each vertex contributes its right and down edges; wrap-around at n = 1
  // produces loops and at n = 2 produces doubled edges.
  std::vector<Edge> edges;
  edges.reserve(2 * n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto v = static_cast<Vertex>(r * n + c);
      edges.push_back({v, static_cast<Vertex>(r * n + (c + 1) % n), 1});
      edges.push_back({v, static_cast<Vertex>(((r + 1) % n) * n + c), 1});
    }
  }
  return MultiGraph::from_edges(n * n, edges);
}

MultiGraph build_cycle(std::size_t n) {
  require(n >= 3, "cycle needs at least 3 vertices");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n), 1});
  return MultiGraph::from_edges(n, edges);
}

SinkedGraph build_sinked_cycle(std::size_t n) { return SinkedGraph(build_cycle(n), {0}); }

MultiGraph build_bracelet(std::size_t n) {
  require(n >= 3, "bracelet needs at least 3 vertices");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n), 2});
  return MultiGraph::from_edges(n, edges);
}

SinkedGraph build_sinked_bracelet(std::size_t n) { return SinkedGraph(build_bracelet(n), {0}); }

MultiGraph build_flower(std::size_t petals) {
  require(petals >= 1, "flower needs at least one petal");
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < petals; ++k) {
    const auto a = static_cast<Vertex>(2 * k + 1);
    const auto b = static_cast<Vertex>(2 * k + 2);
    edges.push_back({a, b, 1});
    edges.push_back({0, a, 1});
    edges.push_back({0, b, 1});
  }
  return MultiGraph::from_edges(2 * petals + 1, edges);
}

SinkedGraph build_sinked_flower(std::size_t petals) {
  require(petals >= 2, "sinked flower needs at least two petals");
  return SinkedGraph(build_flower(petals), {1, 2});
}

SinkedGraph build_ladder(std::size_t rungs) {
  require(rungs >= 3, "ladder needs at least 3 rungs");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < rungs; ++i) {
    const auto left = static_cast<Vertex>(2 * i);
    edges.push_back({left, left + 1, 1});
    if (i + 1 < rungs) {
      edges.push_back({left, left + 2, 1});
      edges.push_back({left + 1, left + 3, 1});
    }
  }
  const auto last = static_cast<Vertex>(2 * (rungs - 1));
  return SinkedGraph(MultiGraph::from_edges(2 * rungs, edges), {0, 1, last, last + 1});
}

MultiGraph build_complete(std::size_t n) {
  require(n >= 2, "complete graph needs at least 2 vertices");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j), 1});
  return MultiGraph::from_edges(n, edges);
}

SinkedGraph build_sinked_complete(std::size_t n) {
  return SinkedGraph(build_complete(n), {static_cast<Vertex>(n - 1)});
}

SinkedGraph build_lollipop(std::size_t n) {
  require(n >= 2, "lollipop needs n >= 2");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j), 1});
  // Path of n edges from the attachment vertex n-1 out to 2n-1.
  for (std::size_t i = n - 1; i + 1 < 2 * n; ++i)
    edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(i + 1), 1});
  return SinkedGraph(MultiGraph::from_edges(2 * n, edges), {static_cast<Vertex>(2 * n - 1)});
}

SinkedGraph build_wired_tree(std::size_t q, std::size_t depth) {
  require(q >= 2, "wired tree needs q >= 2");
  require(depth >= 1, "wired tree needs depth >= 1");
  // Breadth-first levels 0..depth-1 are ordinary vertices; level `depth`
  // collapses into the single sink appended at the end.
  std::vector<std::pair<std::size_t, std::size_t>> levels;  // [begin, end) per level
  levels.emplace_back(0, 1);
  std::size_t next = 1;
  for (std::size_t d = 1; d < depth; ++d) {
    const std::size_t width = (levels.back().second - levels.back().first) * (d == 1 ? q + 1 : q);
    levels.emplace_back(next, next + width);
    next += width;
  }
  const auto sink = static_cast<Vertex>(next);
  std::vector<Edge> edges;
  for (std::size_t d = 0; d < depth; ++d) {
    const std::size_t children = d == 0 ? q + 1 : q;
    for (std::size_t v = levels[d].first; v < levels[d].second; ++v) {
      if (d + 1 == depth) {
        edges.push_back({static_cast<Vertex>(v), sink, children});
      } else {
        const std::size_t first_child =
            levels[d + 1].first + (v - levels[d].first) * children;
        for (std::size_t c = 0; c < children; ++c)
          edges.push_back({static_cast<Vertex>(v), static_cast<Vertex>(first_child + c), 1});
      }
    }
  }
  return SinkedGraph(MultiGraph::from_edges(next + 1, edges), {sink});
}

TorusTopology::TorusTopology(std::size_t side) : side_(side) {
  require(side >= 1, "torus side must be at least 1");
}

CompleteTopology::CompleteTopology(std::size_t n) : n_(n) {
  require(n >= 2, "complete graph needs at least 2 vertices");
}

MatchingUnion::MatchingUnion(std::size_t num_vertices, std::vector<std::vector<Vertex>> partners)
    : n_(num_vertices), k_(partners.size()), rows_(num_vertices * partners.size()) {
  for (std::size_t j = 0; j < k_; ++j) {
    const auto& p = partners[j];
    require(p.size() == n_, "matching size mismatch");
    for (Vertex v = 0; v < n_; ++v) {
      require(p[v] < n_ && p[p[v]] == v && p[v] != v, "partner array is not a perfect matching");
      rows_[v * k_ + j] = p[v];
    }
  }
}

std::vector<Vertex> MatchingUnion::matching(std::size_t j) const {
  std::vector<Vertex> out(n_);
  for (Vertex v = 0; v < n_; ++v) out[v] = partner(j, v);
  return out;
}

MultiGraph MatchingUnion::to_multigraph() const {
  std::vector<Edge> edges;
  for (std::size_t j = 0; j < k_; ++j)
    for (Vertex v = 0; v < n_; ++v)
      if (v < partner(j, v)) edges.push_back({v, partner(j, v), 1});
  return MultiGraph::from_edges(n_, edges);
}

MatchingUnion sample_regular_matchings(std::size_t q, std::size_t n, RngStream& rng) {
  require(q >= 1, "random regular graph needs q >= 1");
  require(n >= 4, "random regular graph needs n >= 4");
  require(n % 2 == 0, "random regular graph needs even n");
  const std::size_t pairs = n / 2;
  std::vector<std::vector<Vertex>> partners;
  partners.reserve(q + 1);

  std::vector<Vertex> m0(n);
  for (Vertex v = 0; v < n; ++v) m0[v] = v ^ 1u;
  partners.push_back(std::move(m0));

  // Sattolo's algorithm gives a uniform cyclic permutation pi of the pairs;
  // joining the even end of pair i to the odd end of pair pi(i) closes M0 into
  // one Hamiltonian cycle, and every such matching arises exactly once.
  std::vector<Vertex> pi(pairs);
  for (std::size_t j = 0; j < q; ++j) {
    std::iota(pi.begin(), pi.end(), Vertex{0});
    for (std::size_t i = pairs - 1; i > 0; --i) {
      const auto k = static_cast<std::size_t>(rng.uniform_below(i));
      std::swap(pi[i], pi[k]);
    }
    std::vector<Vertex> m(n);
    for (std::size_t i = 0; i < pairs; ++i) {
      const auto even_end = static_cast<Vertex>(2 * i + 1);   // 1-based vertex 2i+2
      const auto odd_end = static_cast<Vertex>(2 * pi[i]);    // 1-based vertex 2pi(i)+1
      m[even_end] = odd_end;
      m[odd_end] = even_end;
    }
    partners.push_back(std::move(m));
  }
  return MatchingUnion(n, std::move(partners));
}

MultiGraph build_random_regular(std::size_t q, std::size_t n, RngStream& rng) {
  return sample_regular_matchings(q, n, rng).to_multigraph();
}

std::string to_text(const MultiGraph& g, std::span<const Vertex> sinks) {
  std::ostringstream out;
  out << "n " << g.num_vertices() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << ' ' << e.multiplicity << '\n';
  out << "sinks";
  for (Vertex s : sinks) out << ' ' << s;
  out << '\n';
  return out.str();
}

std::string to_text(const SinkedGraph& g) { return to_text(g.graph(), g.sinks()); }

GraphText parse_graph_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  std::size_t n = 0;
  if (!(in >> word) || word != "n" || !(in >> n))
    throw std::invalid_argument("graph text must start with 'n <count>'");
  std::vector<Edge> edges;
  std::vector<Vertex> sinks;
  bool saw_sinks = false;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "sinks") {
      saw_sinks = true;
      Vertex s;
      while (ls >> s) sinks.push_back(s);
      continue;
    }
    Edge e;
    std::uint64_t u = 0;
    const auto* first = head.data();
    if (std::from_chars(first, first + head.size(), u).ec != std::errc{})
      throw std::invalid_argument("malformed edge line: " + line);
    e.u = static_cast<Vertex>(u);
    if (!(ls >> e.v >> e.multiplicity)) throw std::invalid_argument("malformed edge line: " + line);
    edges.push_back(e);
  }
  if (!saw_sinks) throw std::invalid_argument("graph text is missing the 'sinks' line");
  for (Vertex s : sinks)
    if (s >= n) throw std::invalid_argument("sink out of range");
  return {MultiGraph::from_edges(n, edges), sinks};
}

}  // namespace sandpile
