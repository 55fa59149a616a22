#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sandpile/rng.hpp"
#include "sandpile/types.hpp"

namespace sandpile {

/// Anything the toppling kernels can walk: a vertex count, a degree per
/// vertex and a neighbor enumeration that reports each distinct neighbor
/// (or repeated neighbor) together with the number of edge ends joining them.
template <class G>
concept Topology = requires(const G& g, Vertex v) {
  { g.num_vertices() } -> std::convertible_to<std::size_t>;
  { g.degree(v) } -> std::convertible_to<Height>;
  g.for_each_neighbor(v, [](Vertex, Height) {});
};

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  Count multiplicity = 1;
};

/// Undirected multigraph with loops, stored as compressed neighbor lists.
///
/// Each vertex keeps its distinct neighbors in increasing order with the
/// multiplicity a(v,w). A loop at v is stored as the self-entry a(v,v) equal
/// to twice the number of loops, so that d(v) is the sum over the row and a
/// toppling of v hands two particles back to v per loop.
class MultiGraph {
 public:
  MultiGraph() = default;

  /// Parallel edges given separately are merged. Throws on out-of-range
  /// endpoints or zero multiplicities.
  static MultiGraph from_edges(std::size_t num_vertices, std::span<const Edge> edges);

  std::size_t num_vertices() const { return degree_.size(); }
  Height degree(Vertex v) const { return degree_[v]; }
  Height max_degree() const;

  std::span<const Vertex> neighbors(Vertex v) const {
    return {neighbor_.data() + offset_[v], neighbor_.data() + offset_[v + 1]};
  }
  std::span<const Height> multiplicities(Vertex v) const {
    return {mult_.data() + offset_[v], mult_.data() + offset_[v + 1]};
  }

  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    for (std::size_t i = offset_[v]; i < offset_[v + 1]; ++i) f(neighbor_[i], mult_[i]);
  }

  /// a(v,w); for v == w this is the Laplacian convention 2 * loop_count(v).
  Height multiplicity(Vertex v, Vertex w) const;
  Count loop_count(Vertex v) const { return static_cast<Count>(multiplicity(v, v) / 2); }

  /// Edges counted with multiplicity; each loop counts once.
  Count edge_count() const;
  /// Number of distinct vertex pairs (and loop sites) carrying at least one edge.
  std::size_t distinct_edge_count() const;
  /// One Edge per distinct pair (u <= v), loops reported with their loop count.
  std::vector<Edge> edges() const;

  bool is_connected() const;
  bool is_symmetric() const;

  bool operator==(const MultiGraph&) const = default;

 private:
  std::vector<std::size_t> offset_{0};
  std::vector<Vertex> neighbor_;
  std::vector<Height> mult_;
  std::vector<Height> degree_;
};

/// A multigraph with a nonempty set of sink vertices.
class SinkedGraph {
 public:
  SinkedGraph(MultiGraph graph, std::vector<Vertex> sinks);

  const MultiGraph& graph() const { return graph_; }
  std::size_t num_vertices() const { return graph_.num_vertices(); }
  Height degree(Vertex v) const { return graph_.degree(v); }
  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    graph_.for_each_neighbor(v, std::forward<F>(f));
  }

  std::span<const Vertex> sinks() const { return sinks_; }
  std::span<const Vertex> non_sinks() const { return non_sinks_; }
  std::span<const std::uint8_t> sink_mask() const { return sink_mask_; }
  bool is_sink(Vertex v) const { return sink_mask_[v] != 0; }

 private:
  MultiGraph graph_;
  std::vector<Vertex> sinks_;
  std::vector<Vertex> non_sinks_;
  std::vector<std::uint8_t> sink_mask_;
};

// Canonical numberings (stable across runs so seeds reproduce graphs):
//   torus      row-major, vertex r*n + c
//   bracelet   cycle order 0..n-1, sink 0
//   cycle      cycle order 0..n-1, sink 0
//   flower     center 0, petal k = {2k+1, 2k+2}; sink petal is petal 0
//   ladder     rung i = {2i (left), 2i+1 (right)}; sinks are rungs 0 and n-1
//   complete   0..n-1, sink n-1
//   lollipop   K_n on 0..n-1, path n-1, n, ..., 2n-1, sink 2n-1
//   wired tree breadth-first from the root 0, sink is the last vertex
//   random     1-based M0 pair (2i-1, 2i) is 0-based (2i-2, 2i-1)

MultiGraph build_torus(std::size_t n);
MultiGraph build_bracelet(std::size_t n);
SinkedGraph build_sinked_bracelet(std::size_t n);
MultiGraph build_flower(std::size_t petals);
SinkedGraph build_sinked_flower(std::size_t petals);
SinkedGraph build_ladder(std::size_t rungs);
MultiGraph build_complete(std::size_t n);
SinkedGraph build_sinked_complete(std::size_t n);
SinkedGraph build_lollipop(std::size_t n);
MultiGraph build_cycle(std::size_t n);
SinkedGraph build_sinked_cycle(std::size_t n);
SinkedGraph build_wired_tree(std::size_t q, std::size_t depth);

/// n x n torus with neighbors computed on the fly. Matches build_torus(n)
/// vertex for vertex, including the loops at n = 1 and doubled edges at n = 2.
class TorusTopology {
 public:
  explicit TorusTopology(std::size_t side);

  std::size_t side() const { return side_; }
  std::size_t num_vertices() const { return side_ * side_; }
  Height degree(Vertex) const { return 4; }

  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    const auto n = static_cast<Vertex>(side_);
    const Vertex r = v / n;
    const Vertex c = v - r * n;
    const Vertex row = r * n;
    f(row + (c + 1 == n ? 0 : c + 1), Height{1});
    f(row + (c == 0 ? n - 1 : c - 1), Height{1});
    f((r + 1 == n ? 0 : r + 1) * n + c, Height{1});
    f((r == 0 ? n - 1 : r - 1) * n + c, Height{1});
  }

 private:
  std::size_t side_;
};

/// K_n without adjacency storage.
class CompleteTopology {
 public:
  explicit CompleteTopology(std::size_t n);

  std::size_t num_vertices() const { return n_; }
  Height degree(Vertex) const { return static_cast<Height>(n_ - 1); }

  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    const auto n = static_cast<Vertex>(n_);
    for (Vertex w = 0; w < v; ++w) f(w, Height{1});
    for (Vertex w = v + 1; w < n; ++w) f(w, Height{1});
  }

 private:
  std::size_t n_;
};

/// Union of the fixed matching M0 with q sampled matchings. Partners are
/// kept interleaved, row v holding the partner of v in each matching, so a
/// toppling reads one contiguous row and million-vertex graphs never build
/// adjacency lists.
class MatchingUnion {
 public:
  MatchingUnion(std::size_t num_vertices, std::vector<std::vector<Vertex>> partners);

  std::size_t num_vertices() const { return n_; }
  Height degree(Vertex) const { return static_cast<Height>(k_); }
  std::size_t num_matchings() const { return k_; }
  Vertex partner(std::size_t j, Vertex v) const { return rows_[v * k_ + j]; }
  std::vector<Vertex> matching(std::size_t j) const;

  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    const Vertex* row = rows_.data() + static_cast<std::size_t>(v) * k_;
    for (std::size_t j = 0; j < k_; ++j) f(row[j], Height{1});
  }

  MultiGraph to_multigraph() const;

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<Vertex> rows_;
};

/// Random (q+1)-regular bipartite multigraph: M0 = {(2i, 2i+1)} (0-based) plus
/// q independent matchings, each uniform among odd-even perfect matchings whose
/// union with M0 is a single Hamiltonian cycle.
MatchingUnion sample_regular_matchings(std::size_t q, std::size_t n, RngStream& rng);
MultiGraph build_random_regular(std::size_t q, std::size_t n, RngStream& rng);

/// Plain-text edge-multiplicity format:
///   n <count>
///   v w mult        (one line per distinct pair, v <= w; loops as v v loops)
///   sinks v1 v2 ...
struct GraphText {
  MultiGraph graph;
  std::vector<Vertex> sinks;
};

std::string to_text(const MultiGraph& g, std::span<const Vertex> sinks = {});
std::string to_text(const SinkedGraph& g);
GraphText parse_graph_text(std::string_view text);

}  // namespace sandpile
