#pragma once

// User-genre bipartite network and its projection onto genres.

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "genrecomm/graph.hpp"
#include "genrecomm/ingest.hpp"

namespace genrecomm {

inline constexpr int kDefaultScoreThreshold = 75;
inline constexpr std::size_t kDefaultOutlierUsers = 2;

struct BipartiteGraph {
  std::set<std::string> users;
  std::set<std::string> genres;
  std::set<std::pair<std::string, std::string>> edges;  // (user, genre)

  /// Number of distinct genres per user.
  std::map<std::string, std::size_t> user_degrees() const {
    std::map<std::string, std::size_t> deg;
    for (const auto& u : users) deg[u] = 0;
    for (const auto& [u, g] : edges) ++deg[u];
    return deg;
  }

  std::map<std::string, std::size_t> genre_degrees() const {
    std::map<std::string, std::size_t> deg;
    for (const auto& g : genres) deg[g] = 0;
    for (const auto& [u, g] : edges) ++deg[g];
    return deg;
  }

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;
};

/// Keeps reviews with score >= threshold; everything below is dropped.
inline Corpus filter_positive(const Corpus& corpus, int threshold = kDefaultScoreThreshold) {
  if (threshold < 0 || threshold > 100)
    throw std::invalid_argument("score threshold must lie in [0,100]");
  Corpus out;
  out.albums = corpus.albums;
  out.orphan_reviews = corpus.orphan_reviews;
  std::copy_if(corpus.reviews.begin(), corpus.reviews.end(), std::back_inserter(out.reviews),
               [&](const ReviewRecord& r) { return r.score >= threshold; });
  return out;
}

/// One edge (u, g) per user and genre the user reviewed; multi-genre albums
/// contribute an edge to each of their genres.
inline BipartiteGraph build_bipartite(const Corpus& corpus) {
  BipartiteGraph g;
  for (const auto& r : corpus.reviews) {
    const auto* album = corpus.album(r.album_id);
    if (!album) continue;
    g.users.insert(r.user_id);
    for (const auto& genre : album->genres) {
      g.genres.insert(genre);
      g.edges.emplace(r.user_id, genre);
    }
  }
  return g;
}

struct OutlierRemoval {
  BipartiteGraph graph;
  std::vector<std::pair<std::string, std::size_t>> removed;  // (user, genre degree)
  /// Every user's genre degree before removal, highest first.
  std::vector<std::pair<std::string, std::size_t>> degree_ranking;
};

/// Removes the `count` users with the most distinct genres, ties broken by
/// ascending user_id.
inline OutlierRemoval remove_outlier_users(const BipartiteGraph& g,
                                           std::size_t count = kDefaultOutlierUsers) {
  if (count > 0 && count >= g.users.size())
    throw std::invalid_argument("cannot remove " + std::to_string(count) + " outlier users out of " +
                                std::to_string(g.users.size()));
  OutlierRemoval out;
  auto deg = g.user_degrees();
  out.degree_ranking.assign(deg.begin(), deg.end());
  std::stable_sort(out.degree_ranking.begin(), out.degree_ranking.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  out.removed.assign(out.degree_ranking.begin(),
                     out.degree_ranking.begin() + static_cast<std::ptrdiff_t>(count));

  std::set<std::string> drop;
  for (const auto& [u, d] : out.removed) drop.insert(u);
  out.graph.genres = g.genres;
  for (const auto& u : g.users)
    if (!drop.count(u)) out.graph.users.insert(u);
  for (const auto& e : g.edges)
    if (!drop.count(e.first)) out.graph.edges.insert(e);
  return out;
}

/// One-mode projection onto genres. w(A,B) is the number of distinct
/// surviving users linked to both A and B, where a user is linked to every
/// genre of every album they positively reviewed.
inline GenreGraph project(const BipartiteGraph& g, const Corpus& corpus) {
  std::map<std::string, std::set<std::string>> genres_of;
  for (const auto& [u, genre] : g.edges) genres_of[u].insert(genre);
  for (const auto& r : corpus.reviews) {
    if (!g.users.count(r.user_id)) continue;
    const auto* album = corpus.album(r.album_id);
    if (!album) continue;
    auto& set = genres_of[r.user_id];
    set.insert(album->genres.begin(), album->genres.end());
  }

  std::set<std::string> names = g.genres;
  for (const auto& [u, set] : genres_of) names.insert(set.begin(), set.end());
  GenreGraph out(std::vector<std::string>(names.begin(), names.end()), WeightKind::user_count);

  for (const auto& [u, set] : genres_of) {
    std::vector<NodeId> ids;
    ids.reserve(set.size());
    for (const auto& name : set) ids.push_back(out.id(name));
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) out.add_weight(ids[i], ids[j], 1.0);
  }
  return out;
}

}  // namespace genrecomm
