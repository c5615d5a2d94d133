#pragma once

// k-core decomposition by unweighted peeling (Batagelj & Zaversnik bucket
// order, O(n + m)).

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "genrecomm/graph.hpp"

namespace genrecomm {

struct CoreDecomposition {
  std::vector<std::size_t> core_number;  // indexed by NodeId
  std::size_t max_k = 0;
  std::vector<NodeId> main_core_nodes;  // ascending
};

inline CoreDecomposition core_decompose(const GenreGraph& g) {
  if (g.empty()) throw std::invalid_argument("core_decompose: empty graph");
  const std::size_t n = g.num_nodes();
  auto adj = g.adjacency();
  std::vector<std::size_t> deg(n);
  std::size_t max_deg = 0;
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = adj[v].size();
    max_deg = std::max(max_deg, deg[v]);
  }

  // Nodes sorted by current degree; bin[d] is the first slot of degree d.
  std::vector<std::size_t> bin(max_deg + 1, 0), pos(n);
  std::vector<NodeId> order(n);
  for (auto d : deg) ++bin[d];
  std::size_t start = 0;
  for (auto& b : bin) {
    auto count = b;
    b = start;
    start += count;
  }
  for (NodeId v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]]++;
    order[pos[v]] = v;
  }
  for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  bin[0] = 0;

  for (std::size_t i = 0; i < n; ++i) {
    NodeId v = order[i];
    for (const auto& [u, w] : adj[v]) {
      if (deg[u] <= deg[v]) continue;
      // swap u with the first node of its bin, then shrink its degree
      std::size_t du = deg[u];
      std::size_t pu = pos[u], pw = bin[du];
      NodeId first = order[pw];
      if (u != first) {
        std::swap(order[pu], order[pw]);
        pos[u] = pw;
        pos[first] = pu;
      }
      ++bin[du];
      --deg[u];
    }
  }

  CoreDecomposition out;
  out.core_number = std::move(deg);
  out.max_k = *std::max_element(out.core_number.begin(), out.core_number.end());
  for (NodeId v = 0; v < n; ++v)
    if (out.core_number[v] == out.max_k) out.main_core_nodes.push_back(v);
  return out;
}

struct MainCore {
  GenreGraph graph;
  std::size_t k = 0;
  std::vector<std::pair<std::string, std::size_t>> removed;  // (genre, core number)
};

/// Subgraph induced by the highest non-empty core, with original weights.
/// A disconnected main core is kept whole.
inline MainCore main_core(const GenreGraph& g) {
  auto dec = core_decompose(g);
  MainCore out;
  out.k = dec.max_k;
  out.graph = g.induced(dec.main_core_nodes);
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (dec.core_number[v] != dec.max_k) out.removed.emplace_back(g.name(v), dec.core_number[v]);
  return out;
}

}  // namespace genrecomm
