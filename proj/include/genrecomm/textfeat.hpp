#pragma once

// Adjective-noun features from dependency parses, ranked per cluster with a
// TF-IDF whose document frequency is taken over the adjective alone.

#include <algorithm>
#include <cmath>
#include <compare>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "genrecomm/conllu.hpp"
#include "genrecomm/consensus.hpp"
#include "genrecomm/ingest.hpp"
#include "genrecomm/text_util.hpp"

namespace genrecomm {

inline constexpr std::size_t kDefaultTopFeatures = 50;

struct Feature {
  std::string adjective;  // lemma, lower-cased
  std::string noun;       // lemma, lower-cased

  auto operator<=>(const Feature&) const = default;
};

struct FeatureScore {
  Feature feature;
  double tf = 0;
  double idf = 0;
  double tfidf = 0;

  friend bool operator==(const FeatureScore&, const FeatureScore&) = default;
};

using FeatureCounts = std::map<Feature, std::size_t>;

namespace detail {

inline bool is_noun(const Token& t) { return t.upos == "NOUN" || t.upos == "PROPN"; }
inline bool is_adj(const Token& t) { return t.upos == "ADJ"; }
inline bool is_verb(const Token& t) { return t.upos == "VERB" || t.upos == "AUX"; }

inline std::string lemma_of(const Token& t) {
  const auto& l = (t.lemma.empty() || t.lemma == "_") ? t.form : t.lemma;
  return ascii_lower(l);
}

}  // namespace detail

/// Features in one sentence, from two dependency patterns:
///   NOUN/PROPN --amod--> ADJ
///   VERB --nsubj--> NOUN/PROPN together with VERB --acomp--> ADJ
/// Output is ordered by (adjective token, noun token) position.
inline std::vector<Feature> match_patterns(const Sentence& s) {
  std::map<int, const Token*> by_id;
  for (const auto& t : s.tokens) by_id[t.id] = &t;
  auto head_of = [&](const Token& t) -> const Token* {
    auto it = by_id.find(t.head);
    return it == by_id.end() ? nullptr : it->second;
  };

  std::vector<std::pair<std::pair<int, int>, Feature>> found;
  auto emit = [&](const Token& adj, const Token& noun) {
    auto a = detail::lemma_of(adj), n = detail::lemma_of(noun);
    if (a.empty() || n.empty()) return;
    found.push_back({{adj.id, noun.id}, {std::move(a), std::move(n)}});
  };

  std::map<int, std::vector<const Token*>> subjects, complements;
  for (const auto& t : s.tokens) {
    auto rel = t.base_deprel();
    const Token* head = head_of(t);
    if (!head) continue;
    if (rel == "amod" && detail::is_adj(t) && detail::is_noun(*head)) emit(t, *head);
    if (detail::is_verb(*head)) {
      if (rel == "nsubj" && detail::is_noun(t)) subjects[head->id].push_back(&t);
      if (rel == "acomp" && detail::is_adj(t)) complements[head->id].push_back(&t);
    }
  }
  for (const auto& [verb, adjs] : complements) {
    auto it = subjects.find(verb);
    if (it == subjects.end()) continue;
    for (const auto* adj : adjs)
      for (const auto* noun : it->second) emit(*adj, *noun);
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Feature> out;
  out.reserve(found.size());
  for (auto& [pos, f] : found) out.push_back(std::move(f));
  return out;
}

struct ClusterFeatures {
  std::map<std::string, FeatureCounts> per_cluster;  // by cluster label
  std::size_t documents_used = 0;
  std::size_t out_of_scope = 0;    // album has no genre in any cluster
  std::size_t unknown_review = 0;  // review key not present in the corpus
};

/// Attributes each review's features to every cluster that holds at least
/// one genre of the reviewed album, once per cluster. Every occurrence of a
/// feature counts.
inline ClusterFeatures collect_cluster_features(const std::vector<ParsedDocument>& docs,
                                                const Corpus& corpus,
                                                const std::vector<const ClusterNode*>& clusters) {
  ClusterFeatures out;
  std::map<std::string, std::vector<std::string>> clusters_of_genre;
  for (const auto* c : clusters) {
    out.per_cluster[c->label];
    for (const auto& g : c->genres) clusters_of_genre[g].push_back(c->label);
  }
  std::set<std::pair<std::string, std::string>> known;
  for (const auto& r : corpus.reviews) known.emplace(r.user_id, r.album_id);

  for (const auto& doc : docs) {
    const AlbumRecord* album = corpus.album(doc.album_id);
    if (!album || !known.count({doc.user_id, doc.album_id})) {
      ++out.unknown_review;
      continue;
    }
    std::set<std::string> targets;
    for (const auto& g : album->genres) {
      auto it = clusters_of_genre.find(g);
      if (it != clusters_of_genre.end()) targets.insert(it->second.begin(), it->second.end());
    }
    if (targets.empty()) {
      ++out.out_of_scope;
      continue;
    }
    ++out.documents_used;
    for (const auto& s : doc.sentences)
      for (const auto& f : match_patterns(s))
        for (const auto& label : targets) ++out.per_cluster[label][f];
  }
  return out;
}

/// tf = count of the feature in the cluster; idf = ln(N / df(adjective)),
/// df counting clusters that contain any feature with that adjective.
/// Each list is sorted by tfidf descending, then by feature.
inline std::map<std::string, std::vector<FeatureScore>> modified_tfidf(
    const std::map<std::string, FeatureCounts>& per_cluster) {
  if (per_cluster.size() < 2)
    throw std::invalid_argument("modified_tfidf: need at least 2 clusters, got " +
                                std::to_string(per_cluster.size()));
  std::map<std::string, std::size_t> df;
  for (const auto& [label, counts] : per_cluster) {
    std::set<std::string> adjs;
    for (const auto& [f, n] : counts)
      if (n > 0) adjs.insert(f.adjective);
    for (const auto& a : adjs) ++df[a];
  }
  const double n_clusters = static_cast<double>(per_cluster.size());

  std::map<std::string, std::vector<FeatureScore>> out;
  for (const auto& [label, counts] : per_cluster) {
    auto& scores = out[label];
    for (const auto& [f, n] : counts) {
      if (n == 0) continue;
      FeatureScore s;
      s.feature = f;
      s.tf = static_cast<double>(n);
      s.idf = std::log(n_clusters / static_cast<double>(df.at(f.adjective)));
      s.tfidf = s.tf * s.idf;
      scores.push_back(std::move(s));
    }
    std::sort(scores.begin(), scores.end(), [](const FeatureScore& x, const FeatureScore& y) {
      if (x.tfidf != y.tfidf) return x.tfidf > y.tfidf;
      return x.feature < y.feature;
    });
  }
  return out;
}

inline std::vector<FeatureScore> top_features(const std::vector<FeatureScore>& ranked,
                                              std::size_t n = kDefaultTopFeatures) {
  if (n < 1) throw std::invalid_argument("top_features: n must be >= 1");
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(std::min(n, ranked.size()))};
}

inline void write_feature_csv(std::ostream& os, const std::vector<FeatureScore>& scores) {
  os << "adjective,noun,tf,idf,tfidf\n";
  for (const auto& s : scores)
    os << csv_row({s.feature.adjective, s.feature.noun, format_number(s.tf), format_number(s.idf),
                   format_number(s.tfidf)});
}

// ---------------------------------------------------------------------------
// Accuracy of the extracted features against manual judgments.

struct AccuracyReport {
  std::size_t n_correct = 0;
  std::size_t n_total = 0;

  /// Percentage of correctly identified features.
  double accuracy() const {
    return n_total ? static_cast<double>(n_correct) * 100.0 / static_cast<double>(n_total) : 0.0;
  }
};

struct Judgment {
  std::string cluster;
  Feature feature;
  bool correct = false;
};

struct AccuracyEvaluation {
  std::map<std::string, AccuracyReport> per_cluster;
  AccuracyReport overall;
};

/// Reads "cluster,adjective,noun,correct" rows; correct is 0 or 1.
inline std::vector<Judgment> load_judgments(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> f;
  std::vector<Judgment> out;
  if (!reader.next(f)) return out;
  if (f != std::vector<std::string>{"cluster", "adjective", "noun", "correct"})
    throw std::runtime_error("judgment file header must be cluster,adjective,noun,correct");
  while (reader.next(f)) {
    if (f.size() == 1 && trim(f[0]).empty()) continue;
    if (f.size() != 4 || (f[3] != "0" && f[3] != "1"))
      throw std::runtime_error("judgment file line " + std::to_string(reader.line()) +
                               ": expected cluster,adjective,noun,0|1");
    out.push_back({f[0], {ascii_lower(f[1]), ascii_lower(f[2])}, f[3] == "1"});
  }
  return out;
}

/// Per-cluster and overall accuracy. When `extracted` is given, every judged
/// feature must appear in that cluster's list; offenders are reported
/// together in one error.
inline AccuracyEvaluation evaluate_accuracy(
    const std::vector<Judgment>& judgments,
    const std::map<std::string, std::vector<FeatureScore>>* extracted = nullptr) {
  if (extracted) {
    std::string offenders;
    for (const auto& j : judgments) {
      auto it = extracted->find(j.cluster);
      bool found = it != extracted->end() &&
                   std::any_of(it->second.begin(), it->second.end(),
                               [&](const FeatureScore& s) { return s.feature == j.feature; });
      if (!found)
        offenders += (offenders.empty() ? "" : ", ") + j.cluster + ":" + j.feature.adjective + " " +
                     j.feature.noun;
    }
    if (!offenders.empty())
      throw std::invalid_argument("judgments for features that were not extracted: " + offenders);
  }
  AccuracyEvaluation out;
  for (const auto& j : judgments) {
    auto& r = out.per_cluster[j.cluster];
    ++r.n_total;
    ++out.overall.n_total;
    if (j.correct) {
      ++r.n_correct;
      ++out.overall.n_correct;
    }
  }
  return out;
}

}  // namespace genrecomm
