// Command-line front end for the genre community pipeline.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "genrecomm/pipeline.hpp"

namespace {

using genrecomm::Command;
using genrecomm::PipelineConfig;
namespace fs = std::filesystem;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::optional<int> threshold;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> max_depth;
  std::optional<std::size_t> top_n;
  std::optional<std::size_t> max_size;
  std::optional<std::size_t> outliers;
  std::optional<unsigned> threads;
  std::string reviews, albums, conllu, judgments, clusters;
  bool no_text = false;
};

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig c = o.config.empty() ? PipelineConfig{} : genrecomm::load_config(o.config);
  if (!o.reviews.empty()) c.reviews = o.reviews;
  if (!o.albums.empty()) c.albums = o.albums;
  if (!o.conllu.empty()) c.conllu = o.conllu;
  if (!o.judgments.empty()) c.judgments = o.judgments;
  if (o.seed) c.seed = *o.seed;
  if (o.threshold) c.score_threshold = *o.threshold;
  if (o.runs) c.runs = *o.runs;
  if (o.max_depth) c.split_max_depth = *o.max_depth;
  if (o.max_size) c.split_max_size = *o.max_size;
  if (o.top_n) c.top_n_features = *o.top_n;
  if (o.outliers) c.outlier_user_count = *o.outliers;
  if (o.threads) c.threads = *o.threads;
  if (o.no_text || c.conllu.empty()) c.text_stage = false;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genre community detection from user reviews"};
  app.require_subcommand(1);
  Overrides o;

  app.add_option("--config", o.config, "Pipeline config file (key = value, version = 1)");
  app.add_option("--seed", o.seed, "Base seed for the Louvain ensembles (default 0)");
  app.add_option("--out-dir", o.out_dir, "Artifact directory")->capture_default_str();
  app.add_option("--threshold", o.threshold,
                 "Minimum score of a positive review (default 75)")
      ->check(CLI::Range(0, 100));
  app.add_option("--runs", o.runs, "Louvain runs per consensus round, R (default 100)")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-depth", o.max_depth,
                 "Layers of community detection, root layer included (default 3)")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-size", o.max_size,
                 "Clusters above this size are split candidates (default 16)")
      ->check(CLI::PositiveNumber);
  app.add_option("--top-n", o.top_n, "Features kept per cluster (default 50)")
      ->check(CLI::PositiveNumber);
  app.add_option("--outliers", o.outliers,
                 "Users with the most genres to drop before projection (default 2)");
  app.add_option("--threads", o.threads, "Worker threads for the ensembles (0 = all cores)");
  app.add_option("--reviews", o.reviews, "reviews.jsonl (overrides config)");
  app.add_option("--albums", o.albums, "albums.csv (overrides config)");
  app.add_option("--conllu", o.conllu, "Parsed reviews in CoNLL-U (overrides config)");
  app.add_option("--judgments", o.judgments, "Feature judgments CSV (overrides config)");

  auto* run = app.add_subcommand("run", "Full pipeline: stats, projection, clusters, exports, features");
  run->add_flag("--no-text", o.no_text, "Skip the review text stage");
  app.add_subcommand("project", "Bipartite projection and main-core extraction");
  app.add_subcommand("cluster", "Hierarchical consensus clustering of the main core");
  auto* features = app.add_subcommand("features", "Per-cluster feature ranking from CoNLL-U parses");
  auto* exp = app.add_subcommand("export", "GraphML exports (full and top-3 out-edges)");
  auto* stats = app.add_subcommand("stats", "Genre statistics and per-cluster country tables");
  for (auto* sub : {features, exp, stats})
    sub->add_option("--clusters", o.clusters, "clusters.json to use (default <out-dir>/clusters.json)");

  CLI11_PARSE(app, argc, argv);

  PipelineConfig config;
  try {
    config = resolve(o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Command cmd = name == "run"        ? Command::run
                : name == "project"  ? Command::project
                : name == "cluster"  ? Command::cluster
                : name == "features" ? Command::features
                : name == "export"   ? Command::export_
                                     : Command::stats;
  if (cmd == Command::features && config.conllu.empty()) {
    std::cerr << "features: no CoNLL-U input (set conllu in the config or pass --conllu)\n";
    return 2;
  }

  std::optional<fs::path> clusters;
  if (!o.clusters.empty()) clusters = o.clusters;
  genrecomm::Pipeline pipeline(config, o.out_dir);
  int status = pipeline.execute(cmd, clusters);
  for (const auto& w : pipeline.warnings()) std::cerr << "warning: " << w << '\n';
  if (status != 0)
    std::cerr << "stage '" << pipeline.failed_stage() << "' failed: " << pipeline.error() << '\n';
  else
    std::cout << "artifacts written to " << fs::path(o.out_dir).string() << '\n';
  return status;
}
