#pragma once

// Exports (GraphML, CSV) and summary tables.

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "genrecomm/bipartite.hpp"
#include "genrecomm/community.hpp"
#include "genrecomm/consensus.hpp"
#include "genrecomm/graph.hpp"
#include "genrecomm/ingest.hpp"
#include "genrecomm/text_util.hpp"

namespace genrecomm {

enum class ExportMode { full, top3_out_edges };

/// Leaf label for every genre of the tree.
inline std::map<std::string, std::string> cluster_of(const std::vector<const ClusterNode*>& clusters) {
  std::map<std::string, std::string> out;
  for (const auto* c : clusters)
    for (const auto& g : c->genres) out[g] = c->label;
  return out;
}

/// Edges kept by an export. In top3 mode: every intra-cluster edge, plus for
/// each cluster its three heaviest edges leaving the cluster (ties broken by
/// the endpoint names).
inline std::vector<WeightedEdge> select_edges(const GenreGraph& g,
                                              const std::map<std::string, std::string>& cluster,
                                              ExportMode mode) {
  auto all = g.edges();
  if (mode == ExportMode::full) return all;
  auto label = [&](NodeId v) {
    auto it = cluster.find(g.name(v));
    return it == cluster.end() ? std::string() : it->second;
  };
  std::set<std::pair<NodeId, NodeId>> keep;
  std::map<std::string, std::vector<WeightedEdge>> out_edges;
  for (const auto& e : all) {
    auto la = label(e.a), lb = label(e.b);
    if (la == lb) {
      keep.emplace(e.a, e.b);
    } else {
      out_edges[la].push_back(e);
      out_edges[lb].push_back(e);
    }
  }
  for (auto& [l, edges] : out_edges) {
    // ids follow name order, so comparing ids compares names
    std::sort(edges.begin(), edges.end(), [](const WeightedEdge& x, const WeightedEdge& y) {
      if (x.weight != y.weight) return x.weight > y.weight;
      return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    for (std::size_t i = 0; i < std::min<std::size_t>(3, edges.size()); ++i)
      keep.emplace(edges[i].a, edges[i].b);
  }
  std::vector<WeightedEdge> out;
  for (const auto& e : all)
    if (keep.count({e.a, e.b})) out.push_back(e);
  return out;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline void write_graphml(std::ostream& os, const GenreGraph& g,
                          const std::map<std::string, std::string>& cluster, ExportMode mode) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        "  <key id=\"cluster\" for=\"node\" attr.name=\"cluster\" attr.type=\"string\"/>\n"
        "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        "  <graph id=\"genres\" edgedefault=\"undirected\">\n";
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    os << "    <node id=\"n" << v << "\">\n"
       << "      <data key=\"label\">" << xml_escape(g.name(v)) << "</data>\n";
    if (auto it = cluster.find(g.name(v)); it != cluster.end())
      os << "      <data key=\"cluster\">" << xml_escape(it->second) << "</data>\n";
    os << "    </node>\n";
  }
  std::size_t i = 0;
  for (const auto& e : select_edges(g, cluster, mode))
    os << "    <edge id=\"e" << i++ << "\" source=\"n" << e.a << "\" target=\"n" << e.b << "\">"
       << "<data key=\"weight\">" << format_number(e.weight) << "</data></edge>\n";
  os << "  </graph>\n</graphml>\n";
}

inline void write_edge_list_csv(std::ostream& os, const GenreGraph& g) {
  os << "genre_a,genre_b,weight\n";
  for (const auto& e : g.edges()) os << csv_row({g.name(e.a), g.name(e.b), format_number(e.weight)});
}

inline void write_partition_csv(std::ostream& os, const GenreGraph& g, const Partition& p) {
  os << "genre,community_id\n";
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    os << csv_row({g.name(v), std::to_string(p.assignment.at(v))});
}

inline void write_trace_csv(std::ostream& os, const std::vector<RoundStats>& trace) {
  os << "round,num_components,num_edges,epsilon_max\n";
  for (const auto& r : trace)
    os << r.round << ',' << r.num_components << ',' << r.num_edges << ',' << r.epsilon_max << '\n';
}

inline void write_core_removed_csv(std::ostream& os,
                                   const std::vector<std::pair<std::string, std::size_t>>& removed) {
  os << "genre,core_number\n";
  for (const auto& [g, k] : removed) os << csv_row({g, std::to_string(k)});
}

// ---------------------------------------------------------------------------

struct CountryRow {
  std::string country;
  std::size_t reviews = 0;
  double percentage = 0;
};

/// Reviews of albums tagged with any of `genres`, grouped by country
/// ("unknown" when absent), most reviews first. Pass a positive-filtered
/// corpus to count positive reviews.
inline std::vector<CountryRow> country_table(const Corpus& corpus,
                                             const std::vector<std::string>& genres) {
  std::set<std::string> in_cluster(genres.begin(), genres.end());
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& r : corpus.reviews) {
    const auto* a = corpus.album(r.album_id);
    if (!a || std::none_of(a->genres.begin(), a->genres.end(),
                           [&](const std::string& g) { return in_cluster.count(g) > 0; }))
      continue;
    ++counts[a->country.value_or("unknown")];
    ++total;
  }
  std::vector<CountryRow> rows;
  for (const auto& [c, n] : counts)
    rows.push_back({c, n, 100.0 * static_cast<double>(n) / static_cast<double>(total)});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const CountryRow& x, const CountryRow& y) { return x.reviews > y.reviews; });
  return rows;
}

inline void write_country_csv(std::ostream& os, const std::vector<CountryRow>& rows) {
  os << "country,reviews,percentage\n";
  for (const auto& r : rows)
    os << csv_row({r.country, std::to_string(r.reviews), format_fixed(r.percentage, 1)});
}

struct GenreStatRow {
  std::string genre;
  std::size_t reviews = 0;
  std::size_t positive_reviews = 0;
  std::size_t users = 0;           // distinct reviewers
  std::size_t positive_users = 0;  // distinct reviewers with a positive review
};

/// Per-genre review and user counts, sorted by reviews descending then name.
inline std::vector<GenreStatRow> genre_stats(const Corpus& corpus,
                                             int threshold = kDefaultScoreThreshold) {
  struct Acc {
    std::size_t reviews = 0, positive = 0;
    std::set<std::string> users, positive_users;
  };
  std::map<std::string, Acc> acc;
  for (const auto& r : corpus.reviews) {
    const auto* a = corpus.album(r.album_id);
    if (!a) continue;
    bool pos = r.score >= threshold;
    for (const auto& g : a->genres) {
      auto& x = acc[g];
      ++x.reviews;
      x.users.insert(r.user_id);
      if (pos) {
        ++x.positive;
        x.positive_users.insert(r.user_id);
      }
    }
  }
  std::vector<GenreStatRow> rows;
  for (const auto& [g, x] : acc)
    rows.push_back({g, x.reviews, x.positive, x.users.size(), x.positive_users.size()});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const GenreStatRow& x, const GenreStatRow& y) { return x.reviews > y.reviews; });
  return rows;
}

inline void write_genre_stats_csv(std::ostream& os, const std::vector<GenreStatRow>& rows) {
  os << "genre,reviews,positive_reviews,users,positive_users\n";
  for (const auto& r : rows)
    os << csv_row({r.genre, std::to_string(r.reviews), std::to_string(r.positive_reviews),
                   std::to_string(r.users), std::to_string(r.positive_users)});
}

}  // namespace genrecomm
