#pragma once

#include <span>
#include <vector>

#include "sandpile/graph.hpp"
#include "sandpile/types.hpp"

namespace sandpile {

/// FIFO batch relaxation over any Topology.
///
/// A vertex taken from the queue topples floor(eta / d) times at once. The
/// engine keeps a per-round odometer together with the list of vertices that
/// toppled, so a round can be inspected, cleared in time proportional to its
/// size, or undone. Vertices flagged in `sink_mask` absorb particles and never
/// topple; an empty mask means the graph is sinkless. H is the height type
/// of the configurations it is handed.
template <Topology G, class H = Height>
class Relaxer {
 public:
  enum class Outcome { Stable, AllToppled };

  Relaxer(const G& g, std::span<const std::uint8_t> sink_mask = {})
      : g_(g),
        sink_(sink_mask),
        n_(g.num_vertices()),
        queue_(n_),
        queued_(n_, 0),
        odo_(n_, 0) {
    active_ = n_;
    for (std::uint8_t s : sink_) active_ -= s ? 1 : 0;
  }

  bool is_sink(Vertex v) const { return !sink_.empty() && sink_[v]; }

  /// Queue v for inspection if it is unstable.
  void touch(std::span<const H> eta, Vertex v) {
    if (eta[v] >= g_.degree(v) && !queued_[v] && !is_sink(v)) push(v);
  }

  void touch_all(std::span<const H> eta) {
    for (Vertex v = 0; v < n_; ++v) touch(eta, v);
  }

  /// Topple until stable. With `detect` set, stop as soon as every non-sink
  /// vertex has toppled in this round.
  Outcome relax(std::span<H> eta, bool detect) {
    if (detect && active_ > 0 && toppled_.size() == active_) return Outcome::AllToppled;
    while (count_ > 0) {
      const Vertex v = queue_[head_];
      head_ = head_ + 1 == n_ ? 0 : head_ + 1;
      --count_;
      queued_[v] = 0;
      const auto d = static_cast<H>(g_.degree(v));
      if (eta[v] < d) continue;
      const H t = eta[v] / d;
      if (odo_[v] == 0) toppled_.push_back(v);
      odo_[v] += static_cast<Count>(t);
      total_ += static_cast<Count>(t);
      eta[v] -= t * d;
      g_.for_each_neighbor(v, [&](Vertex w, Height a) {
        eta[w] += static_cast<H>(t * a);
        if (w != v && !queued_[w] && !is_sink(w) && eta[w] >= g_.degree(w)) push(w);
      });
      if (eta[v] >= d) push(v);
      if (detect && toppled_.size() == active_) return Outcome::AllToppled;
    }
    return Outcome::Stable;
  }

  Count topples(Vertex v) const { return odo_[v]; }
  std::span<const Vertex> toppled() const { return toppled_; }
  Count round_total() const { return total_; }

  /// Undo every toppling of the current round.
  void revert(std::span<H> eta) const {
    for (Vertex v : toppled_) {
      const auto t = static_cast<Height>(odo_[v]);
      eta[v] += static_cast<H>(t * g_.degree(v));
      g_.for_each_neighbor(v, [&](Vertex w, Height a) { eta[w] -= static_cast<H>(t * a); });
    }
  }

  /// Forget the round: zero its odometer entries and drain the queue.
  void clear_round() {
    for (Vertex v : toppled_) odo_[v] = 0;
    toppled_.clear();
    total_ = 0;
    while (count_ > 0) {
      queued_[queue_[head_]] = 0;
      head_ = head_ + 1 == n_ ? 0 : head_ + 1;
      --count_;
    }
  }

  Odometer odometer() const {
    Odometer out(n_);
    for (Vertex v : toppled_) out[v] = odo_[v];
    return out;
  }

 private:
  void push(Vertex v) {
    std::size_t tail = head_ + count_;
    if (tail >= n_) tail -= n_;
    queue_[tail] = v;
    ++count_;
    queued_[v] = 1;
  }

  const G& g_;
  std::span<const std::uint8_t> sink_;
  std::size_t n_;
  std::size_t active_;
  std::vector<Vertex> queue_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> queued_;
  std::vector<Count> odo_;
  std::vector<Vertex> toppled_;
  Count total_ = 0;
};

}  // namespace sandpile
