#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace genrecomm {

enum class WeightKind { user_count, coassignment_count };

inline const char* to_string(WeightKind k) {
  return k == WeightKind::user_count ? "user_count" : "coassignment_count";
}

using NodeId = std::size_t;

struct WeightedEdge {
  NodeId a;  // a < b
  NodeId b;
  double weight;
};

/// Weighted undirected simple graph on named genres.
///
/// Nodes are kept sorted by name, so a NodeId is the node's rank in that
/// order and two graphs over the same names agree on ids. Edges are stored
/// once, keyed by (min id, max id). No self-loops; every weight is > 0.
class GenreGraph {
 public:
  GenreGraph() = default;

  explicit GenreGraph(std::vector<std::string> names, WeightKind kind = WeightKind::user_count)
      : kind_(kind), names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  }

  WeightKind kind() const { return kind_; }
  void set_kind(WeightKind k) { kind_ = k; }

  std::size_t num_nodes() const { return names_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  bool empty() const { return names_.empty(); }

  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(NodeId id) const { return names_.at(id); }

  std::optional<NodeId> find(const std::string& name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return static_cast<NodeId>(it - names_.begin());
  }

  NodeId id(const std::string& name) const {
    auto f = find(name);
    if (!f) throw std::out_of_range("unknown genre '" + name + "'");
    return *f;
  }

  /// Sets the weight of {a,b}. A weight <= 0 removes the edge.
  void set_weight(NodeId a, NodeId b, double w) {
    auto key = canonical(a, b);
    if (w > 0)
      edges_[key] = w;
    else
      edges_.erase(key);
  }

  void add_weight(NodeId a, NodeId b, double w) {
    auto key = canonical(a, b);
    double nw = edges_[key] + w;
    if (nw > 0)
      edges_[key] = nw;
    else
      edges_.erase(key);
  }

  void set_weight(const std::string& a, const std::string& b, double w) { set_weight(id(a), id(b), w); }

  double weight(NodeId a, NodeId b) const {
    if (a == b) return 0;
    auto it = edges_.find(std::minmax(a, b));
    return it == edges_.end() ? 0.0 : it->second;
  }
  double weight(const std::string& a, const std::string& b) const { return weight(id(a), id(b)); }

  bool has_edge(NodeId a, NodeId b) const { return weight(a, b) > 0; }

  const std::map<std::pair<NodeId, NodeId>, double>& edge_map() const { return edges_; }

  std::vector<WeightedEdge> edges() const {
    std::vector<WeightedEdge> out;
    out.reserve(edges_.size());
    for (const auto& [k, w] : edges_) out.push_back({k.first, k.second, w});
    return out;
  }

  double total_weight() const {
    double m = 0;
    for (const auto& [k, w] : edges_) m += w;
    return m;
  }

  /// Neighbor lists, each sorted by neighbor id.
  std::vector<std::vector<std::pair<NodeId, double>>> adjacency() const {
    std::vector<std::vector<std::pair<NodeId, double>>> adj(names_.size());
    for (const auto& [k, w] : edges_) {
      adj[k.first].push_back({k.second, w});
      adj[k.second].push_back({k.first, w});
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> deg(names_.size(), 0);
    for (const auto& [k, w] : edges_) {
      ++deg[k.first];
      ++deg[k.second];
    }
    return deg;
  }

  /// Connected components as sorted node lists, ordered by smallest member.
  std::vector<std::vector<NodeId>> components() const {
    std::vector<NodeId> parent(names_.size());
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto root = [&](NodeId x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& [k, w] : edges_) {
      auto ra = root(k.first), rb = root(k.second);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::map<NodeId, std::vector<NodeId>> groups;
    for (NodeId v = 0; v < names_.size(); ++v) groups[root(v)].push_back(v);
    std::vector<std::vector<NodeId>> out;
    out.reserve(groups.size());
    for (auto& [r, members] : groups) out.push_back(std::move(members));
    return out;
  }

  /// Subgraph induced by the named nodes, keeping original weights.
  GenreGraph induced(const std::set<std::string>& members) const {
    GenreGraph sub(std::vector<std::string>(members.begin(), members.end()), kind_);
    for (const auto& n : members) id(n);  // throws on unknown names
    for (const auto& [k, w] : edges_) {
      auto a = sub.find(names_[k.first]);
      auto b = sub.find(names_[k.second]);
      if (a && b) sub.edges_[sub.canonical(*a, *b)] = w;
    }
    return sub;
  }

  GenreGraph induced(const std::vector<NodeId>& members) const {
    std::set<std::string> s;
    for (auto v : members) s.insert(names_.at(v));
    return induced(s);
  }

  friend bool operator==(const GenreGraph&, const GenreGraph&) = default;

 private:
  std::pair<NodeId, NodeId> canonical(NodeId a, NodeId b) const {
    if (a == b) throw std::invalid_argument("self-loop on '" + names_.at(a) + "'");
    if (a >= names_.size() || b >= names_.size()) throw std::out_of_range("node id out of range");
    return std::minmax(a, b);
  }

  WeightKind kind_ = WeightKind::user_count;
  std::vector<std::string> names_;
  std::map<std::pair<NodeId, NodeId>, double> edges_;
};

/// Mean weight over the edges of g; 0 when g has no edges.
inline double mean_edge_weight(const GenreGraph& g) {
  if (g.num_edges() == 0) return 0.0;
  return g.total_weight() / static_cast<double>(g.num_edges());
}

}  // namespace genrecomm
