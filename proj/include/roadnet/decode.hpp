#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "roadnet/adjacency.hpp"
#include "roadnet/graph.hpp"

namespace roadnet {

struct DecodeParams {
  double w = 10.0;       ///< weight converting angle discrepancy to pixels
  double r = 15.0;       ///< match radius, pixels
  double t_valid = 0.5;  ///< validity threshold on p_road

  void validate() const;
};

/// A mutually constituted pair: a valid prediction of `from` lands within r
/// of `to`, and a valid prediction of `to` lands within r of `from`.
struct LinkCandidate {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t forward_slot = 0;  ///< prediction slot at `from`
  std::size_t reverse_slot = 0;  ///< prediction slot at `to`
  double d = 0.0;
  friend bool operator==(const LinkCandidate&, const LinkCandidate&) = default;
};

/// Discrepancy between candidate v_n (with prediction u_n) and candidate v_c
/// (with prediction u_c):
///   l = |u_n - v_c| + |u_c - v_n|
///   d = l + w (1 - cos a1) + w (1 - cos a2)
/// where a1 is the angle between v_n->u_n and v_n->v_c, and a2 the angle
/// between v_c->u_c and v_c->v_n. Exactly symmetric under swapping the two
/// (candidate, prediction) pairs.
double discrepancy(Vec2 v_n, Vec2 u_n, Vec2 v_c, Vec2 u_c, double w);

/// All mutually constituted links, one per unordered candidate pair (the
/// orientation and slots with the smallest d). Each link is stored with
/// `from` at the lexicographically smaller position. Sorted by acceptance
/// order: d, then endpoint positions, then slots.
std::vector<LinkCandidate> enumerate_links(std::span<const Vec2> candidates,
                                           std::span<const AdjacencyPrediction> preds,
                                           const DecodeParams& params, std::size_t threads = 1);

/// Greedy acceptance in enumerate_links order. A link is accepted when
/// neither of its slots has been consumed; acceptance consumes both. Every
/// candidate becomes a vertex (in input order), linked or not.
PlanarGraph decode_initial_graph(std::span<const Vec2> candidates,
                                 std::span<const AdjacencyPrediction> preds,
                                 const DecodeParams& params, std::size_t threads = 1);

}  // namespace roadnet
