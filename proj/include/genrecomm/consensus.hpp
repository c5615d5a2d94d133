#pragma once

// Consensus ("averaged") partitioning and hierarchical cluster splitting.
//
// Each round runs Louvain R times on the current graph and replaces it by
// the co-assignment graph: same nodes, w(A,B) = number of runs that put A
// and B in the same community, pairs never co-assigned dropped. Rounds
// repeat until every connected component is a clique whose edges all carry
// weight R, at which point the components are the communities.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "genrecomm/community.hpp"
#include "genrecomm/graph.hpp"
#include "genrecomm/text_util.hpp"

namespace genrecomm {

/// Sum over components of N(N-1)/2: the edge count of a graph whose
/// components are all cliques.
inline std::uint64_t epsilon_max(std::span<const std::size_t> component_sizes) {
  std::uint64_t total = 0;
  for (auto n : component_sizes) {
    if (n < 1) throw std::invalid_argument("epsilon_max: component size must be >= 1");
    total += static_cast<std::uint64_t>(n) * (n - 1) / 2;
  }
  return total;
}

inline std::uint64_t epsilon_max(std::initializer_list<std::size_t> sizes) {
  return epsilon_max(std::span<const std::size_t>(sizes.begin(), sizes.size()));
}

inline std::uint64_t epsilon_max(const GenreGraph& g) {
  std::vector<std::size_t> sizes;
  for (const auto& c : g.components()) sizes.push_back(c.size());
  return epsilon_max(sizes);
}

/// One row of the per-round statistics table.
struct RoundStats {
  std::size_t round = 0;
  std::size_t num_components = 0;
  std::size_t num_edges = 0;
  std::uint64_t epsilon_max = 0;

  friend bool operator==(const RoundStats&, const RoundStats&) = default;
};

struct ConsensusState {
  std::size_t round = 0;
  GenreGraph graph;
  std::size_t num_runs = 0;
  std::uint64_t epsilon_max = 0;
  std::size_t num_edges = 0;
  std::size_t num_components = 0;
  /// Every component is a clique (after round 0).
  bool converged = false;

  RoundStats stats() const { return {round, num_components, num_edges, epsilon_max}; }

  static ConsensusState make(GenreGraph graph, std::size_t runs, std::size_t round) {
    ConsensusState s;
    s.round = round;
    s.num_runs = runs;
    std::vector<std::size_t> sizes;
    for (const auto& c : graph.components()) sizes.push_back(c.size());
    s.num_components = sizes.size();
    s.epsilon_max = genrecomm::epsilon_max(sizes);
    s.num_edges = graph.num_edges();
    s.graph = std::move(graph);
    s.converged = round > 0 && s.num_edges == s.epsilon_max;
    return s;
  }
};

struct ConsensusParams {
  std::size_t runs = 100;  // R
  std::uint64_t seed = 0;
  std::size_t max_rounds = 50;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

/// Runs louvain with seeds base_seed .. base_seed+runs-1. Results are
/// stored by seed index, so the outcome does not depend on scheduling.
inline std::vector<Partition> louvain_ensemble(const GenreGraph& g, std::size_t runs,
                                               std::uint64_t base_seed, unsigned threads) {
  std::vector<Partition> out(runs);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, runs));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < runs;) out[i] = louvain(g, base_seed + i);
  };
  if (threads <= 1) {
    work();
    return out;
  }
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  return out;
}

}  // namespace detail

inline ConsensusState consensus_round(const ConsensusState& state, std::uint64_t base_seed,
                                      unsigned threads = 0) {
  if (state.graph.empty()) throw std::invalid_argument("consensus_round: empty graph");
  if (state.num_runs < 1) throw std::invalid_argument("consensus_round: R must be >= 1");
  auto parts = detail::louvain_ensemble(state.graph, state.num_runs, base_seed, threads);

  GenreGraph next(state.graph.names(), WeightKind::coassignment_count);
  for (const auto& p : parts)
    for (const auto& members : p.members())
      for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
          next.add_weight(members[i], members[j], 1.0);
  return ConsensusState::make(std::move(next), state.num_runs, state.round + 1);
}

struct ConsensusResult {
  Partition partition;  // one community per final connected component
  std::vector<RoundStats> trace;  // round 0 is the input graph
  ConsensusState final_state;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string what, std::vector<RoundStats> trace)
      : std::runtime_error(std::move(what)), trace_(std::move(trace)) {}
  const std::vector<RoundStats>& trace() const { return trace_; }

 private:
  std::vector<RoundStats> trace_;
};

/// Iterates consensus rounds until convergence. Round r uses seeds
/// seed + (r-1)*R onwards, so every round draws fresh seeds.
inline ConsensusResult run_to_convergence(const GenreGraph& g, const ConsensusParams& params) {
  if (params.runs < 1) throw std::invalid_argument("run_to_convergence: R must be >= 1");
  if (params.max_rounds < 1) throw std::invalid_argument("run_to_convergence: max_rounds must be >= 1");
  ConsensusResult res;
  auto state = ConsensusState::make(g, params.runs, 0);
  res.trace.push_back(state.stats());
  for (std::size_t r = 1; r <= params.max_rounds; ++r) {
    state = consensus_round(state, params.seed + (r - 1) * params.runs, params.threads);
    res.trace.push_back(state.stats());
    if (state.converged) {
      std::vector<std::size_t> labels(g.num_nodes());
      auto comps = state.graph.components();
      for (std::size_t c = 0; c < comps.size(); ++c)
        for (auto v : comps[c]) labels[v] = c;
      res.partition = Partition::from_labels(labels);
      res.final_state = std::move(state);
      return res;
    }
  }
  throw ConvergenceError("consensus did not converge within " + std::to_string(params.max_rounds) +
                             " rounds",
                         std::move(res.trace));
}

// ---------------------------------------------------------------------------
// Hierarchical splitting

struct SplitPolicy {
  std::size_t max_size = 16;  // clusters larger than this are split candidates
  std::size_t max_depth = 3;  // layer-1 clusters sit at depth 1
};

struct ClusterNode {
  std::string label;
  std::vector<std::string> genres;  // sorted
  double avg_intra_weight = 0;  // mean edge weight inside, on the user-count graph
  std::vector<ClusterNode> children;

  bool is_leaf() const { return children.empty(); }
  friend bool operator==(const ClusterNode&, const ClusterNode&) = default;
};

inline double avg_intra_weight(const GenreGraph& original, const std::vector<std::string>& members) {
  return mean_edge_weight(original.induced(std::set<std::string>(members.begin(), members.end())));
}

/// Pooled mean over the intra-cluster edges of all children.
inline double pooled_intra_weight(const GenreGraph& original, const std::vector<ClusterNode>& children) {
  double sum = 0;
  std::size_t count = 0;
  for (const auto& c : children) {
    auto sub = original.induced(std::set<std::string>(c.genres.begin(), c.genres.end()));
    sum += sub.total_weight();
    count += sub.num_edges();
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

struct SplitResult {
  std::vector<ClusterNode> children;  // empty: not split
  std::vector<RoundStats> trace;
};

/// Re-runs consensus on the subgraph of `original` induced by `members`,
/// with the original user-count weights. Children are labelled
/// "<parent>.1", "<parent>.2", ... in order of their first genre.
inline SplitResult split_cluster(const GenreGraph& original, const std::vector<std::string>& members,
                                 const std::string& parent_label, const ConsensusParams& params) {
  SplitResult out;
  auto sub = original.induced(std::set<std::string>(members.begin(), members.end()));
  if (sub.num_nodes() < 2 || sub.num_edges() == 0) return out;
  auto res = run_to_convergence(sub, params);
  out.trace = std::move(res.trace);
  if (res.partition.num_communities < 2) return out;
  std::size_t i = 0;
  for (const auto& group : res.partition.members()) {
    ClusterNode child;
    child.label = parent_label.empty() ? std::to_string(++i) : parent_label + "." + std::to_string(++i);
    for (auto v : group) child.genres.push_back(sub.name(v));
    child.avg_intra_weight = avg_intra_weight(original, child.genres);
    out.children.push_back(std::move(child));
  }
  return out;
}

struct LabelledTrace {
  std::string label;  // cluster whose split produced this trace; "root" for the top level
  std::vector<RoundStats> trace;
};

struct Hierarchy {
  ClusterNode root;
  std::vector<LabelledTrace> traces;
  std::vector<std::string> warnings;
};

/// Seed used when splitting the cluster with the given label. Depends only
/// on the label, so traversal order does not matter.
inline std::uint64_t split_seed(std::uint64_t base, const std::string& label) {
  return base + fnv1a64(label);
}

namespace detail {

inline void split_recursive(const GenreGraph& original, ClusterNode& node, std::size_t depth,
                            const ConsensusParams& params, const SplitPolicy& policy,
                            Hierarchy& h) {
  if (depth >= policy.max_depth || node.genres.size() <= policy.max_size) return;
  auto p = params;
  p.seed = split_seed(params.seed, node.label);
  auto split = split_cluster(original, node.genres, node.label, p);
  if (!split.trace.empty()) h.traces.push_back({node.label, split.trace});
  if (split.children.empty()) return;
  if (!(pooled_intra_weight(original, split.children) > node.avg_intra_weight)) {
    h.warnings.push_back("split of cluster " + node.label +
                         " rolled back: mean intra-cluster weight did not improve");
    return;
  }
  node.children = std::move(split.children);
  for (auto& c : node.children) split_recursive(original, c, depth + 1, params, policy, h);
}

}  // namespace detail

/// Consensus partition of `g` (layer 1), then recursive splitting of every
/// cluster larger than policy.max_size, kept only when the pooled mean
/// intra-cluster weight of the children exceeds the parent's.
inline Hierarchy hierarchical_pipeline(const GenreGraph& g, const ConsensusParams& params,
                                       const SplitPolicy& policy) {
  Hierarchy h;
  h.root.label = "root";
  h.root.genres = g.names();
  h.root.avg_intra_weight = mean_edge_weight(g);

  auto top = run_to_convergence(g, params);
  h.traces.push_back({"root", top.trace});
  if (top.partition.num_communities == 1 && g.num_nodes() > 1)
    h.warnings.push_back("root consensus produced a single community of " +
                         std::to_string(g.num_nodes()) + " genres");
  std::size_t i = 0;
  for (const auto& group : top.partition.members()) {
    ClusterNode c;
    c.label = std::to_string(++i);
    for (auto v : group) c.genres.push_back(g.name(v));
    c.avg_intra_weight = avg_intra_weight(g, c.genres);
    h.root.children.push_back(std::move(c));
  }
  for (auto& c : h.root.children) detail::split_recursive(g, c, 1, params, policy, h);
  return h;
}

inline void collect_leaves(const ClusterNode& node, std::vector<const ClusterNode*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (const auto& c : node.children) collect_leaves(c, out);
}

/// Leaf clusters in depth-first order.
inline std::vector<const ClusterNode*> leaves(const ClusterNode& root) {
  std::vector<const ClusterNode*> out;
  if (root.is_leaf()) return {&root};
  for (const auto& c : root.children) collect_leaves(c, out);
  return out;
}

// JSON: nested {label, genres, avg_intra_weight, children}

inline nlohmann::ordered_json to_json(const ClusterNode& node) {
  nlohmann::ordered_json j;
  j["label"] = node.label;
  j["genres"] = node.genres;
  j["avg_intra_weight"] = node.avg_intra_weight;
  j["children"] = nlohmann::ordered_json::array();
  for (const auto& c : node.children) j["children"].push_back(to_json(c));
  return j;
}

inline ClusterNode cluster_from_json(const nlohmann::json& j) {
  ClusterNode node;
  node.label = j.at("label").get<std::string>();
  node.genres = j.at("genres").get<std::vector<std::string>>();
  node.avg_intra_weight = j.at("avg_intra_weight").get<double>();
  for (const auto& c : j.at("children")) node.children.push_back(cluster_from_json(c));
  return node;
}

}  // namespace genrecomm
