#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "genrecomm/pipeline.hpp"

using namespace genrecomm;

namespace {

const fs::path kToy = GENRECOMM_TOY_DATA;
const fs::path kGolden = fs::path(GENRECOMM_FIXTURES).parent_path() / "golden" / "toy";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("genrecomm_test_" + name);
  fs::remove_all(dir);
  return dir;
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

std::vector<std::string> feature_files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto name = e.path().filename().string();
    if (name.rfind("features_", 0) == 0) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Config, RoundTripsThroughText) {
  PipelineConfig c;
  c.reviews = "/data/r.csv";
  c.reviews_format = ReviewFormat::csv;
  c.albums = "/data/a.csv";
  c.score_threshold = 60;
  c.runs = 7;
  c.seed = 123456789012345ull;
  c.split_max_depth = 2;
  c.text_stage = false;
  c.export_edge_list = false;
  std::istringstream in(serialize_config(c));
  EXPECT_EQ(parse_config(in), c);
}

TEST(Config, RelativePathsResolveAgainstConfigDir) {
  auto c = load_config(kToy / "toy.conf");
  EXPECT_EQ(c.reviews, kToy / "reviews.jsonl");
  EXPECT_EQ(c.seed, 42u);
}

TEST(Config, RejectsBadInput) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_config(in);
  };
  EXPECT_THROW(parse("runs = 5\n"), ConfigError);
  EXPECT_THROW(parse("version = 2\n"), ConfigError);
  EXPECT_THROW(parse("version = 1\nruns = 0\n"), ConfigError);
  EXPECT_THROW(parse("version = 1\nscore_threshold = 101\n"), ConfigError);
  EXPECT_THROW(parse("version = 1\ncolour = red\n"), ConfigError);
  EXPECT_THROW(parse("version = 1\ntext_stage = yes\n"), ConfigError);
}

TEST(Pipeline, MissingInputFailsAtIngestWithManifest) {
  auto out = scratch("missing");
  PipelineConfig c;
  c.reviews = "/nonexistent/reviews.jsonl";
  c.albums = kToy / "albums.csv";
  EXPECT_NE(run_pipeline(c, out), 0);
  auto m = manifest(out);
  EXPECT_EQ(m.at("status"), "failed");
  EXPECT_EQ(m.at("failed_stage"), "ingest");
}

TEST(Pipeline, TextStageDisabledWritesGraphArtifactsOnly) {
  auto out = scratch("notext");
  auto c = load_config(kToy / "toy.conf");
  c.text_stage = false;
  c.runs = 20;
  ASSERT_EQ(run_pipeline(c, out), 0);
  for (const auto* f : {"clusters.json", "trace.csv", "network_full.graphml", "network_top3.graphml",
                        "genre_stats.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_TRUE(feature_files(out).empty());
  EXPECT_FALSE(manifest(out).contains("parse_adapter"));
}

TEST(Pipeline, ToyRunMatchesGoldenFiles) {
  auto out = scratch("golden");
  ASSERT_EQ(run_pipeline(load_config(kToy / "toy.conf"), out), 0);
  std::vector<std::string> compared;
  for (const auto& e : fs::directory_iterator(kGolden)) {
    auto name = e.path().filename().string();
    EXPECT_EQ(slurp(out / name), slurp(e.path())) << name;
    compared.push_back(name);
  }
  EXPECT_GE(compared.size(), 3u);
  auto names = feature_files(out);
  for (const auto& f : names)
    EXPECT_TRUE(fs::exists(kGolden / f)) << "no golden copy of " << f;
}

TEST(Pipeline, SameSeedSameBytesAcrossThreadCounts) {
  auto c = load_config(kToy / "toy.conf");
  auto a = scratch("det_a"), b = scratch("det_b");
  c.threads = 1;
  ASSERT_EQ(run_pipeline(c, a), 0);
  c.threads = 3;
  ASSERT_EQ(run_pipeline(c, b), 0);
  for (const auto& e : fs::directory_iterator(a)) {
    auto name = e.path().filename().string();
    if (name == "manifest.json") continue;
    EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
  }
}

TEST(Pipeline, StagedCommandsReuseClusters) {
  auto out = scratch("staged");
  auto c = load_config(kToy / "toy.conf");
  c.runs = 20;
  ASSERT_EQ(Pipeline(c, out).execute(Command::cluster), 0);
  auto clusters = slurp(out / "clusters.json");
  ASSERT_EQ(Pipeline(c, out).execute(Command::features), 0);
  ASSERT_EQ(Pipeline(c, out).execute(Command::export_), 0);
  EXPECT_EQ(slurp(out / "clusters.json"), clusters);
  EXPECT_FALSE(feature_files(out).empty());
  EXPECT_TRUE(fs::exists(out / "network_top3.graphml"));
}

TEST(Pipeline, FeaturesWithoutClustersFails) {
  auto out = scratch("noclusters");
  auto c = load_config(kToy / "toy.conf");
  EXPECT_NE(Pipeline(c, out).execute(Command::features), 0);
  EXPECT_EQ(manifest(out).at("status"), "failed");
}

TEST(Pipeline, ManifestRecordsRun) {
  auto out = scratch("manifest");
  auto c = load_config(kToy / "toy.conf");
  c.runs = 20;
  ASSERT_EQ(run_pipeline(c, out), 0);
  auto m = manifest(out);
  EXPECT_EQ(m.at("status"), "ok");
  EXPECT_EQ(m.at("seed"), 42);
  EXPECT_EQ(m.at("parse_adapter").at("model"), "toy-templates");
  EXPECT_EQ(m.at("removed_users").size(), 2u);
  EXPECT_TRUE(m.at("timings_ms").contains("cluster"));
  EXPECT_EQ(m.at("config_hash").get<std::string>().size(), 16u);
}

TEST(Pipeline, JudgmentsProduceAccuracyTable) {
  auto out = scratch("judged");
  auto c = load_config(kToy / "toy.conf");
  c.runs = 20;
  ASSERT_EQ(Pipeline(c, out).execute(Command::cluster), 0);
  ASSERT_EQ(Pipeline(c, out).execute(Command::features), 0);

  std::istringstream features(slurp(out / "features_1.csv"));
  std::string line;
  std::getline(features, line);
  std::ofstream judged(out / "judged.csv");
  judged << "cluster,adjective,noun,correct\n";
  for (int i = 0; i < 4 && std::getline(features, line); ++i) {
    auto f = split(line, ',');
    judged << "1," << f[0] << ',' << f[1] << ',' << (i < 3 ? 1 : 0) << '\n';
  }
  judged.close();

  c.judgments = out / "judged.csv";
  ASSERT_EQ(Pipeline(c, out).execute(Command::features), 0);
  EXPECT_EQ(slurp(out / "accuracy.csv"), "cluster,n_correct,n_total,accuracy\n1,3,4,75\noverall,3,4,75\n");

  std::ofstream(out / "judged.csv", std::ios::app) << "1,purple,elephant,1\n";
  EXPECT_NE(Pipeline(c, out).execute(Command::features), 0);
  EXPECT_EQ(manifest(out).at("failed_stage"), "features");
}
