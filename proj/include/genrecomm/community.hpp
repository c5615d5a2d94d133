#pragma once

// Weighted Newman-Girvan modularity and a seeded Louvain maximizer.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "genrecomm/graph.hpp"

namespace genrecomm {

/// Flat community assignment. Community ids are dense, numbered in order of
/// first appearance when scanning nodes by ascending NodeId.
struct Partition {
  std::vector<std::size_t> assignment;  // NodeId -> community
  std::size_t num_communities = 0;

  /// Builds a partition from arbitrary labels, renumbering them densely.
  static Partition from_labels(const std::vector<std::size_t>& labels) {
    Partition p;
    p.assignment.resize(labels.size());
    std::map<std::size_t, std::size_t> dense;
    for (std::size_t v = 0; v < labels.size(); ++v) {
      auto [it, inserted] = dense.try_emplace(labels[v], dense.size());
      p.assignment[v] = it->second;
    }
    p.num_communities = dense.size();
    return p;
  }

  static Partition singletons(std::size_t n) {
    std::vector<std::size_t> labels(n);
    std::iota(labels.begin(), labels.end(), std::size_t{0});
    return from_labels(labels);
  }

  static Partition single_community(std::size_t n) {
    return from_labels(std::vector<std::size_t>(n, 0));
  }

  std::vector<std::vector<NodeId>> members() const {
    std::vector<std::vector<NodeId>> out(num_communities);
    for (NodeId v = 0; v < assignment.size(); ++v) out[assignment[v]].push_back(v);
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Q = sum_c [ in(c)/2m - (tot(c)/2m)^2 ], m the total edge weight.
inline double modularity(const GenreGraph& g, const Partition& p) {
  if (p.assignment.size() != g.num_nodes())
    throw std::invalid_argument("modularity: partition does not cover the graph");
  const double two_m = 2.0 * g.total_weight();
  if (g.num_edges() == 0 || two_m <= 0) throw std::domain_error("modularity: graph has no edges");
  std::vector<double> in(p.num_communities, 0.0), tot(p.num_communities, 0.0);
  for (const auto& [key, w] : g.edge_map()) {
    auto ca = p.assignment[key.first], cb = p.assignment[key.second];
    tot[ca] += w;
    tot[cb] += w;
    if (ca == cb) in[ca] += 2 * w;
  }
  double q = 0;
  for (std::size_t c = 0; c < p.num_communities; ++c) {
    double t = tot[c] / two_m;
    q += in[c] / two_m - t * t;
  }
  return q;
}

namespace detail {

/// Uniform integer in [0, bound) from a 64-bit engine. Written out so that
/// the sequence does not depend on the standard library's distributions.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(rng, i)]);
}

// Graph of one Louvain level. `self` holds the full diagonal entry A_ii,
// i.e. twice the internal weight of the community a super-node stands for.
struct LevelGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
  std::vector<double> self;
  std::vector<double> strength;
  double two_m = 0;

  std::size_t size() const { return adj.size(); }

  static LevelGraph from(const GenreGraph& g) {
    LevelGraph lg;
    auto adj = g.adjacency();
    lg.adj.resize(adj.size());
    lg.self.assign(adj.size(), 0.0);
    lg.strength.assign(adj.size(), 0.0);
    for (std::size_t v = 0; v < adj.size(); ++v) {
      for (const auto& [u, w] : adj[v]) {
        lg.adj[v].emplace_back(u, w);
        lg.strength[v] += w;
      }
      lg.two_m += lg.strength[v];
    }
    return lg;
  }

  double modularity(const std::vector<std::size_t>& comm) const {
    std::vector<double> in(size(), 0.0), tot(size(), 0.0);
    for (std::size_t v = 0; v < size(); ++v) {
      tot[comm[v]] += strength[v];
      in[comm[v]] += self[v];
      for (const auto& [u, w] : adj[v])
        if (comm[u] == comm[v]) in[comm[v]] += w;
    }
    double q = 0;
    for (std::size_t c = 0; c < size(); ++c) {
      double t = tot[c] / two_m;
      q += in[c] / two_m - t * t;
    }
    return q;
  }

  /// Collapses communities (dense labels) into super-nodes.
  LevelGraph aggregate(const std::vector<std::size_t>& comm, std::size_t k) const {
    LevelGraph out;
    out.adj.resize(k);
    out.self.assign(k, 0.0);
    out.strength.assign(k, 0.0);
    out.two_m = two_m;
    std::vector<std::map<std::size_t, double>> acc(k);
    for (std::size_t v = 0; v < size(); ++v) {
      auto c = comm[v];
      out.self[c] += self[v];
      out.strength[c] += strength[v];
      for (const auto& [u, w] : adj[v]) {
        if (comm[u] == c)
          out.self[c] += w;
        else
          acc[c][comm[u]] += w;
      }
    }
    for (std::size_t c = 0; c < k; ++c)
      for (const auto& [d, w] : acc[c]) out.adj[c].emplace_back(d, w);
    return out;
  }
};

}  // namespace detail

struct LouvainResult {
  Partition partition;
  double modularity = 0;
  /// Q of the singleton start, then Q after every local-moving sweep at
  /// every level. Non-decreasing.
  std::vector<double> modularity_trace;
  std::size_t levels = 0;
};

/// Louvain modularity maximization (resolution 1).
///
/// Each sweep visits nodes in an order shuffled by an engine seeded with
/// `seed`. A node moves to the neighboring community with the largest gain,
/// and only if that gain beats staying put; equal gains go to the smallest
/// community id. Sweeps repeat until nothing moves, then communities are
/// collapsed into super-nodes and the process recurses. Communities never
/// span connected components because only neighboring communities are
/// candidates.
inline LouvainResult louvain_traced(const GenreGraph& g, std::uint64_t seed) {
  LouvainResult res;
  const std::size_t n = g.num_nodes();
  if (g.num_edges() == 0) {
    res.partition = Partition::singletons(n);
    return res;
  }

  std::mt19937_64 rng(seed);
  auto level = detail::LevelGraph::from(g);
  std::vector<std::size_t> node_to_super(n);
  std::iota(node_to_super.begin(), node_to_super.end(), std::size_t{0});
  const double eps = 1e-12 * level.two_m;

  {
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), std::size_t{0});
    res.modularity_trace.push_back(level.modularity(id));
  }

  for (;;) {
    const std::size_t ln = level.size();
    std::vector<std::size_t> comm(ln);
    std::iota(comm.begin(), comm.end(), std::size_t{0});
    std::vector<double> tot = level.strength;
    std::vector<double> link(ln, 0.0);
    std::vector<std::size_t> touched;
    std::vector<std::size_t> order(ln);
    std::iota(order.begin(), order.end(), std::size_t{0});

    bool level_moved = false;
    for (;;) {
      detail::seeded_shuffle(order, rng);
      bool moved = false;
      for (auto v : order) {
        const auto home = comm[v];
        const double k = level.strength[v];
        touched.clear();
        for (const auto& [u, w] : level.adj[v]) {
          if (link[comm[u]] == 0.0) touched.push_back(comm[u]);
          link[comm[u]] += w;
        }
        tot[home] -= k;
        auto best = home;
        double best_gain = link[home] - tot[home] * k / level.two_m;
        std::sort(touched.begin(), touched.end());
        for (auto c : touched) {
          if (c == home) continue;
          double gain = link[c] - tot[c] * k / level.two_m;
          if (gain > best_gain + eps) {
            best = c;
            best_gain = gain;
          }
        }
        tot[best] += k;
        comm[v] = best;
        if (best != home) moved = true;
        for (auto c : touched) link[c] = 0.0;
      }
      if (!moved) break;
      level_moved = true;
      res.modularity_trace.push_back(level.modularity(comm));
    }
    if (!level_moved) break;

    auto dense = Partition::from_labels(comm);
    for (auto& s : node_to_super) s = dense.assignment[s];
    level = level.aggregate(dense.assignment, dense.num_communities);
    ++res.levels;
  }

  res.partition = Partition::from_labels(node_to_super);
  res.modularity = modularity(g, res.partition);
  return res;
}

inline Partition louvain(const GenreGraph& g, std::uint64_t seed) {
  return louvain_traced(g, seed).partition;
}

}  // namespace genrecomm
