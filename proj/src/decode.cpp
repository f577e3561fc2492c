#include "roadnet/decode.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

#include "roadnet/error.hpp"
#include "roadnet/parallel.hpp"
#include "roadnet/spatial_index.hpp"

namespace roadnet {

void DecodeParams::validate() const {
  if (!(w > 0.0)) throw ValidationError("decode weight w must be positive");
  if (!(r > 0.0)) throw ValidationError("decode radius r must be positive");
  if (!(t_valid > 0.0 && t_valid <= 1.0)) throw ValidationError("decode t_valid must be in (0, 1]");
}

double discrepancy(Vec2 v_n, Vec2 u_n, Vec2 v_c, Vec2 u_c, double w) {
  const double l = distance(u_n, v_c) + distance(u_c, v_n);
  // An exact hit is perfectly aligned; skip the rounding in cos_angle.
  const double a1 = u_n == v_c ? 0.0 : w * (1.0 - cos_angle(u_n - v_n, v_c - v_n));
  const double a2 = u_c == v_n ? 0.0 : w * (1.0 - cos_angle(u_c - v_c, v_n - v_c));
  // Grouped so that swapping the pairs yields bit-identical results.
  return l + (a1 + a2);
}

namespace {

auto order_key(const LinkCandidate& k, std::span<const Vec2> pos) {
  return std::make_tuple(k.d, pos[k.from], pos[k.to], k.forward_slot, k.reverse_slot, k.from, k.to);
}

}  // namespace

std::vector<LinkCandidate> enumerate_links(std::span<const Vec2> candidates,
                                           std::span<const AdjacencyPrediction> preds,
                                           const DecodeParams& params, std::size_t threads) {
  params.validate();
  if (preds.size() != candidates.size()) {
    throw ValidationError("decode needs one prediction per candidate: " + std::to_string(candidates.size()) +
                          " candidates, " + std::to_string(preds.size()) + " predictions");
  }
  const std::size_t n = candidates.size();
  const SpatialIndex index(candidates, std::max(params.r, 1.0));

  // Absolute valid predictions per candidate, keyed by slot.
  std::vector<std::vector<std::pair<std::size_t, Vec2>>> valid(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s : valid_slots(preds[i], params.t_valid))
      valid[i].emplace_back(s, candidates[i] + preds[i].entries[s].offset);
  }

  std::vector<std::vector<LinkCandidate>> per_source(n);
  parallel_for(n, threads, [&](std::size_t vn) {
    for (const auto& [slot, u_n] : valid[vn]) {
      for (std::size_t vc : index.within(u_n, params.r)) {
        if (vc == vn) continue;
        // Reverse prediction of vc closest to vn, within r.
        std::optional<std::pair<std::size_t, Vec2>> best;
        double best_dist = 0.0;
        for (const auto& [rslot, u_c] : valid[vc]) {
          const double dd = distance(u_c, candidates[vn]);
          if (dd <= params.r && (!best || dd < best_dist)) {
            best = std::make_pair(rslot, u_c);
            best_dist = dd;
          }
        }
        if (!best) continue;
        LinkCandidate link{vn, vc, slot, best->first,
                           discrepancy(candidates[vn], u_n, candidates[vc], best->second, params.w)};
        if (std::tie(candidates[vc], vc) < std::tie(candidates[vn], vn)) {
          std::swap(link.from, link.to);
          std::swap(link.forward_slot, link.reverse_slot);
        }
        per_source[vn].push_back(link);
      }
    }
  });

  std::map<std::pair<std::size_t, std::size_t>, LinkCandidate> best_per_pair;
  for (const auto& links : per_source) {
    for (const auto& link : links) {
      auto [it, inserted] = best_per_pair.try_emplace({link.from, link.to}, link);
      if (!inserted && order_key(link, candidates) < order_key(it->second, candidates)) it->second = link;
    }
  }

  std::vector<LinkCandidate> out;
  out.reserve(best_per_pair.size());
  for (auto& [key, link] : best_per_pair) out.push_back(link);
  std::sort(out.begin(), out.end(), [&](const LinkCandidate& a, const LinkCandidate& b) {
    return order_key(a, candidates) < order_key(b, candidates);
  });
  return out;
}

PlanarGraph decode_initial_graph(std::span<const Vec2> candidates, std::span<const AdjacencyPrediction> preds,
                                 const DecodeParams& params, std::size_t threads) {
  const auto links = enumerate_links(candidates, preds, params, threads);
  GraphBuilder b;
  for (const Vec2& p : candidates) b.add_vertex(p);

  std::vector<std::vector<bool>> consumed(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) consumed[i].assign(preds[i].entries.size(), false);

  for (const auto& link : links) {
    if (consumed[link.from][link.forward_slot] || consumed[link.to][link.reverse_slot]) continue;
    if (b.has_edge(link.from, link.to)) continue;
    b.add_edge(link.from, link.to);
    consumed[link.from][link.forward_slot] = true;
    consumed[link.to][link.reverse_slot] = true;
  }
  return b.build();
}

}  // namespace roadnet
