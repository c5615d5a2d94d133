#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "genrecomm/textfeat.hpp"

using namespace genrecomm;

namespace {

ConlluFile fixture() {
  std::ifstream in(GENRECOMM_FIXTURES "/example_sentences.conllu");
  return read_conllu(in);
}

Token tok(int id, std::string form, std::string lemma, std::string upos, int head, std::string rel) {
  return {id, form, lemma, upos, "_", "_", head, rel, "_", "_"};
}

Corpus corpus_with(const std::map<std::string, std::vector<std::string>>& album_genres,
                   const std::vector<std::pair<std::string, std::string>>& reviews) {
  Corpus c;
  for (const auto& [id, genres] : album_genres) c.albums[id] = AlbumRecord{id, "b", "", genres, {}, {}};
  for (const auto& [u, a] : reviews) c.reviews.push_back({u, a, 90, {}, {}});
  return c;
}

ParsedDocument doc_with(std::string user, std::string album, std::vector<Feature> features) {
  ParsedDocument d{std::move(user), std::move(album), {}};
  for (const auto& f : features) {
    Sentence s;
    s.tokens.push_back(tok(1, f.adjective, f.adjective, "ADJ", 2, "amod"));
    s.tokens.push_back(tok(2, f.noun, f.noun, "NOUN", 0, "root"));
    d.sentences.push_back(s);
  }
  return d;
}

FeatureCounts counts(std::initializer_list<std::pair<Feature, std::size_t>> xs) {
  return FeatureCounts(xs.begin(), xs.end());
}

}  // namespace

TEST(ReadConllu, FixtureParses) {
  auto f = fixture();
  EXPECT_EQ(f.metadata.at("parser_model"), "hand-annotated");
  ASSERT_EQ(f.documents.size(), 4u);
  EXPECT_EQ(f.documents[0].user_id, "u1");
  EXPECT_EQ(f.documents[0].album_id, "a1");
  for (const auto& d : f.documents) {
    ASSERT_EQ(d.sentences.size(), 1u);
    EXPECT_TRUE(validate(d.sentences[0]).empty());
  }
}

TEST(ReadConllu, RejectsWrongColumnCount) {
  std::istringstream in("# review_id = u|a\n1\tx\tx\tNOUN\t_\t_\t0\troot\n\n");
  EXPECT_THROW(read_conllu(in), ConlluError);
}

TEST(ReadConllu, RejectsTwoRoots) {
  std::istringstream in(
      "# review_id = u|a\n"
      "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "2\tb\tb\tNOUN\t_\t_\t0\troot\t_\t_\n\n");
  EXPECT_THROW(read_conllu(in), ConlluError);
}

TEST(ReadConllu, RejectsGapInIdsAndDanglingHead) {
  std::istringstream gap("# review_id = u|a\n1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n3\tb\tb\tADJ\t_\t_\t1\tamod\t_\t_\n");
  EXPECT_THROW(read_conllu(gap), ConlluError);
  std::istringstream dangling("# review_id = u|a\n1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n2\tb\tb\tADJ\t_\t_\t7\tamod\t_\t_\n");
  EXPECT_THROW(read_conllu(dangling), ConlluError);
}

TEST(ReadConllu, SentenceOutsideReviewIsError) {
  std::istringstream in("1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n\n");
  EXPECT_THROW(read_conllu(in), ConlluError);
}

TEST(ReadConllu, SkipsMultiwordRanges) {
  std::istringstream in(
      "# review_id = u|a\n"
      "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\tdo\tAUX\t_\t_\t0\troot\t_\t_\n"
      "2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_\n\n");
  auto f = read_conllu(in);
  EXPECT_EQ(f.documents[0].sentences[0].tokens.size(), 2u);
}

TEST(MatchPatterns, SubjectAndComplement) {
  EXPECT_EQ(match_patterns(fixture().documents[0].sentences[0]),
            (std::vector<Feature>{{"awesome", "album"}}));
}

TEST(MatchPatterns, AdjectivalModifier) {
  EXPECT_EQ(match_patterns(fixture().documents[1].sentences[0]),
            (std::vector<Feature>{{"lyrical", "theme"}}));
}

TEST(MatchPatterns, UsesLowerCasedLemma) {
  EXPECT_EQ(match_patterns(fixture().documents[2].sentences[0]),
            (std::vector<Feature>{{"catchy", "chorus"}}));
}

TEST(MatchPatterns, NoAdjectivesGivesNothing) {
  EXPECT_TRUE(match_patterns(fixture().documents[3].sentences[0]).empty());
}

TEST(MatchPatterns, RequiresPartOfSpeech) {
  Sentence s;
  s.tokens = {tok(1, "very", "very", "ADV", 2, "amod"), tok(2, "album", "album", "NOUN", 0, "root")};
  EXPECT_TRUE(match_patterns(s).empty());
  s.tokens = {tok(1, "heavy", "heavy", "ADJ", 2, "amod"), tok(2, "play", "play", "VERB", 0, "root")};
  EXPECT_TRUE(match_patterns(s).empty());
}

TEST(MatchPatterns, ComplementWithoutSubjectIgnored) {
  Sentence s;
  s.tokens = {tok(1, "sounds", "sound", "VERB", 0, "root"), tok(2, "great", "great", "ADJ", 1, "acomp")};
  EXPECT_TRUE(match_patterns(s).empty());
}

TEST(MatchPatterns, SubtypedRelationsAndMissingLemma) {
  Sentence s;
  s.tokens = {tok(1, "Riffs", "_", "NOUN", 2, "nsubj:pass"), tok(2, "are", "be", "AUX", 0, "root"),
              tok(3, "Heavy", "_", "ADJ", 2, "acomp")};
  EXPECT_EQ(match_patterns(s), (std::vector<Feature>{{"heavy", "riffs"}}));
}

TEST(MatchPatterns, IndependentOfTokenStorageOrder) {
  Sentence s;
  s.tokens = {tok(1, "The", "the", "DET", 3, "det"),     tok(2, "raw", "raw", "ADJ", 3, "amod"),
              tok(3, "vocals", "vocal", "NOUN", 4, "nsubj"), tok(4, "sound", "sound", "VERB", 0, "root"),
              tok(5, "cold", "cold", "ADJ", 4, "acomp"),     tok(6, "and", "and", "CCONJ", 7, "cc"),
              tok(7, "harsh", "harsh", "ADJ", 8, "amod"),    tok(8, "guitars", "guitar", "NOUN", 5, "conj")};
  auto expected = match_patterns(s);
  EXPECT_EQ(expected, (std::vector<Feature>{{"raw", "vocal"}, {"cold", "vocal"}, {"harsh", "guitar"}}));
  std::mt19937 rng(1);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(s.tokens.begin(), s.tokens.end(), rng);
    EXPECT_EQ(match_patterns(s), expected);
  }
}

TEST(CollectClusterFeatures, AlbumSpanningClustersCountsInEach) {
  ClusterNode c1{"1", {"A"}, 0, {}}, c2{"2", {"B"}, 0, {}};
  auto corpus = corpus_with({{"x", {"A", "B"}}}, {{"u", "x"}});
  auto res = collect_cluster_features({doc_with("u", "x", {{"dark", "riff"}, {"raw", "vocal"}})}, corpus,
                                      {&c1, &c2});
  for (const auto* label : {"1", "2"}) {
    EXPECT_EQ(res.per_cluster.at(label).at({"dark", "riff"}), 1u);
    EXPECT_EQ(res.per_cluster.at(label).at({"raw", "vocal"}), 1u);
  }
  EXPECT_EQ(res.documents_used, 1u);
}

TEST(CollectClusterFeatures, TwoGenresInSameClusterCountOnce) {
  ClusterNode c1{"1", {"A", "B"}, 0, {}}, c2{"2", {"C"}, 0, {}};
  auto corpus = corpus_with({{"x", {"A", "B"}}}, {{"u", "x"}});
  auto res = collect_cluster_features({doc_with("u", "x", {{"dark", "riff"}})}, corpus, {&c1, &c2});
  EXPECT_EQ(res.per_cluster.at("1").at({"dark", "riff"}), 1u);
  EXPECT_TRUE(res.per_cluster.at("2").empty());
}

TEST(CollectClusterFeatures, NoReviewsGivesEmptyMultisets) {
  ClusterNode c1{"1", {"A"}, 0, {}}, c2{"2", {"B"}, 0, {}};
  auto res = collect_cluster_features({}, Corpus{}, {&c1, &c2});
  ASSERT_EQ(res.per_cluster.size(), 2u);
  for (const auto& [l, m] : res.per_cluster) EXPECT_TRUE(m.empty());
}

TEST(CollectClusterFeatures, OutOfScopeAndUnknownCounted) {
  ClusterNode c1{"1", {"A"}, 0, {}};
  auto corpus = corpus_with({{"x", {"A"}}, {"y", {"Z"}}}, {{"u", "x"}, {"u", "y"}});
  auto res = collect_cluster_features(
      {doc_with("u", "y", {{"odd", "thing"}}), doc_with("v", "x", {{"odd", "thing"}}),
       doc_with("u", "x", {{"cold", "riff"}, {"cold", "riff"}})},
      corpus, {&c1});
  EXPECT_EQ(res.out_of_scope, 1u);
  EXPECT_EQ(res.unknown_review, 1u);
  EXPECT_EQ(res.per_cluster.at("1").at({"cold", "riff"}), 2u);
}

TEST(ModifiedTfidf, AdjectiveInEveryClusterScoresZero) {
  auto scores = modified_tfidf({{"1", counts({{{"great", "album"}, 9}, {{"icy", "riff"}, 1}})},
                                {"2", counts({{{"great", "song"}, 4}})}});
  const auto& one = scores.at("1");
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0].feature, (Feature{"icy", "riff"}));
  EXPECT_EQ(one[1].idf, 0.0);
  EXPECT_EQ(one[1].tfidf, 0.0);
}

TEST(ModifiedTfidf, UniqueAdjectiveInFourClusters) {
  auto scores = modified_tfidf({{"1", counts({{{"lyrical", "theme"}, 5}})},
                                {"2", counts({{{"fast", "drum"}, 1}})},
                                {"3", counts({{{"fast", "riff"}, 1}})},
                                {"4", counts({})}});
  const auto& s = scores.at("1").at(0);
  EXPECT_EQ(s.tf, 5.0);
  EXPECT_DOUBLE_EQ(s.idf, std::log(4.0));
  EXPECT_NEAR(s.tfidf, 6.931, 1e-3);
  EXPECT_EQ(s.tfidf, s.tf * s.idf);
  EXPECT_DOUBLE_EQ(scores.at("2").at(0).idf, std::log(2.0));
}

TEST(ModifiedTfidf, SingleClusterIsError) {
  EXPECT_THROW(modified_tfidf({{"1", counts({{{"a", "b"}, 1}})}}), std::invalid_argument);
}

// Three clusters against a direct recomputation.
TEST(ModifiedTfidf, MatchesIndependentRecomputation) {
  std::map<std::string, FeatureCounts> per{
      {"1", counts({{{"dark", "riff"}, 4}, {{"great", "album"}, 7}, {{"melodic", "solo"}, 2}})},
      {"2", counts({{{"dark", "atmosphere"}, 3}, {{"great", "album"}, 2}, {{"catchy", "chorus"}, 6}})},
      {"3", counts({{{"great", "song"}, 1}, {{"raw", "production"}, 2}, {{"catchy", "hook"}, 1}})}};
  const std::map<std::string, double> idf{{"dark", std::log(1.5)},   {"great", 0.0},
                                          {"melodic", std::log(3.0)}, {"catchy", std::log(1.5)},
                                          {"raw", std::log(3.0)}};
  auto scores = modified_tfidf(per);
  for (const auto& [label, fc] : per) {
    std::vector<std::pair<double, Feature>> expected;
    for (const auto& [f, n] : fc) expected.emplace_back(-(static_cast<double>(n) * idf.at(f.adjective)), f);
    std::sort(expected.begin(), expected.end());
    const auto& got = scores.at(label);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].feature, expected[i].second) << label << " rank " << i;
      EXPECT_DOUBLE_EQ(got[i].tfidf, -expected[i].first);
    }
  }
}

TEST(TopFeatures, TruncatesAndKeepsOrder) {
  std::vector<FeatureScore> ranked;
  for (int i = 0; i < 60; ++i) ranked.push_back({{"a" + std::to_string(100 + i), "n"}, 1, 1, 1});
  EXPECT_EQ(top_features(ranked).size(), 50u);
  EXPECT_EQ(top_features(ranked, 50).front(), ranked.front());
  ranked.resize(3);
  EXPECT_EQ(top_features(ranked, 50).size(), 3u);
  EXPECT_THROW(top_features(ranked, 0), std::invalid_argument);
}

TEST(TopFeatures, TiesOrderedByFeature) {
  auto scores = modified_tfidf({{"1", counts({{{"zesty", "riff"}, 2}, {{"acid", "riff"}, 2}, {{"acid", "bass"}, 2}})},
                                {"2", counts({{{"other", "x"}, 1}})}});
  auto top = top_features(scores.at("1"), 2);
  EXPECT_EQ(top[0].feature, (Feature{"acid", "bass"}));
  EXPECT_EQ(top[1].feature, (Feature{"acid", "riff"}));
}

TEST(FeatureCsv, HeaderAndRows) {
  std::ostringstream os;
  write_feature_csv(os, {{{"lyrical", "theme"}, 5, 0.5, 2.5}});
  EXPECT_EQ(os.str(), "adjective,noun,tf,idf,tfidf\nlyrical,theme,5,0.5,2.5\n");
}

TEST(Accuracy, Ratio) {
  std::vector<Judgment> j;
  for (int i = 0; i < 50; ++i) j.push_back({"1", {"a" + std::to_string(i), "n"}, i < 35});
  EXPECT_DOUBLE_EQ(evaluate_accuracy(j).overall.accuracy(), 70.0);
  for (auto& x : j) x.correct = true;
  EXPECT_DOUBLE_EQ(evaluate_accuracy(j).per_cluster.at("1").accuracy(), 100.0);
}

TEST(Accuracy, UnknownFeatureListsOffenders) {
  std::map<std::string, std::vector<FeatureScore>> extracted{{"1", {{{"dark", "riff"}, 1, 1, 1}}}};
  std::vector<Judgment> j{{"1", {"dark", "riff"}, true}, {"1", {"pale", "moon"}, false},
                          {"9", {"dark", "riff"}, true}};
  try {
    evaluate_accuracy(j, &extracted);
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("1:pale moon"), std::string::npos) << msg;
    EXPECT_NE(msg.find("9:dark riff"), std::string::npos) << msg;
  }
}

TEST(Accuracy, LoadJudgments) {
  std::istringstream in("cluster,adjective,noun,correct\n1,Dark,riff,1\n2,raw,vocal,0\n");
  auto j = load_judgments(in);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0].feature, (Feature{"dark", "riff"}));
  EXPECT_TRUE(j[0].correct);
  std::istringstream bad("cluster,adjective,noun,correct\n1,a,b,yes\n");
  EXPECT_THROW(load_judgments(bad), std::runtime_error);
}
