#pragma once

// End-to-end orchestration: config file, stage sequencing, artifacts and
// the run manifest.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "genrecomm/bipartite.hpp"
#include "genrecomm/conllu.hpp"
#include "genrecomm/consensus.hpp"
#include "genrecomm/ingest.hpp"
#include "genrecomm/kcore.hpp"
#include "genrecomm/reports.hpp"
#include "genrecomm/textfeat.hpp"

namespace genrecomm {

namespace fs = std::filesystem;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigVersion = 1;

struct PipelineConfig {
  fs::path reviews;
  ReviewFormat reviews_format = ReviewFormat::jsonl;
  fs::path albums;
  fs::path conllu;     // empty: no parses available
  fs::path judgments;  // empty: no accuracy evaluation
  int score_threshold = kDefaultScoreThreshold;
  std::size_t outlier_user_count = kDefaultOutlierUsers;
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  std::size_t max_rounds = 50;
  std::size_t split_max_size = 16;
  std::size_t split_max_depth = 3;
  std::size_t top_n_features = kDefaultTopFeatures;
  unsigned threads = 0;
  bool text_stage = true;
  bool export_graphml = true;
  bool export_edge_list = true;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;

  ConsensusParams consensus() const { return {runs, seed, max_rounds, threads}; }
  SplitPolicy split_policy() const { return {split_max_size, split_max_depth}; }

  /// Throws ConfigError on the first out-of-range field.
  void validate() const {
    auto need = [](bool ok, const std::string& msg) {
      if (!ok) throw ConfigError(msg);
    };
    need(score_threshold >= 0 && score_threshold <= 100, "score_threshold must lie in [0,100]");
    need(runs >= 1, "runs must be >= 1");
    need(max_rounds >= 1, "max_rounds must be >= 1");
    need(split_max_size >= 1, "split_max_size must be >= 1");
    need(split_max_depth >= 1, "split_max_depth must be >= 1");
    need(top_n_features >= 1, "top_n_features must be >= 1");
  }
};

/// Flat "key = value" text, one per line, '#' comments. Fixed key order.
inline std::string serialize_config(const PipelineConfig& c) {
  std::ostringstream os;
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "version = " << kConfigVersion << '\n'
     << "reviews = " << c.reviews.generic_string() << '\n'
     << "reviews_format = " << (c.reviews_format == ReviewFormat::jsonl ? "jsonl" : "csv") << '\n'
     << "albums = " << c.albums.generic_string() << '\n'
     << "conllu = " << c.conllu.generic_string() << '\n'
     << "judgments = " << c.judgments.generic_string() << '\n'
     << "score_threshold = " << c.score_threshold << '\n'
     << "outlier_user_count = " << c.outlier_user_count << '\n'
     << "runs = " << c.runs << '\n'
     << "seed = " << c.seed << '\n'
     << "max_rounds = " << c.max_rounds << '\n'
     << "split_max_size = " << c.split_max_size << '\n'
     << "split_max_depth = " << c.split_max_depth << '\n'
     << "top_n_features = " << c.top_n_features << '\n'
     << "threads = " << c.threads << '\n'
     << "text_stage = " << b(c.text_stage) << '\n'
     << "export_graphml = " << b(c.export_graphml) << '\n'
     << "export_edge_list = " << b(c.export_edge_list) << '\n';
  return os.str();
}

/// Parses config text. Relative paths are resolved against `base_dir`.
inline PipelineConfig parse_config(std::istream& in, const fs::path& base_dir = {}) {
  PipelineConfig c;
  std::string line;
  std::size_t lineno = 0;
  bool have_version = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    auto where = "config line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    auto key = trim(std::string_view(t).substr(0, eq));
    auto value = trim(std::string_view(t).substr(eq + 1));
    auto num = [&](auto& dst) {
      using T = std::remove_reference_t<decltype(dst)>;
      auto v = parse_int<T>(value);
      if (!v) throw ConfigError(where + key + " must be an integer");
      dst = *v;
    };
    auto flag = [&](bool& dst) {
      if (value == "true") dst = true;
      else if (value == "false") dst = false;
      else throw ConfigError(where + key + " must be true or false");
    };
    auto path = [&](fs::path& dst) {
      dst = value.empty() ? fs::path() : fs::path(value);
      if (!dst.empty() && dst.is_relative() && !base_dir.empty()) dst = base_dir / dst;
    };
    if (key == "version") {
      int v = 0;
      num(v);
      if (v != kConfigVersion) throw ConfigError(where + "unsupported config version " + value);
      have_version = true;
    } else if (key == "reviews") path(c.reviews);
    else if (key == "reviews_format") {
      if (value == "jsonl") c.reviews_format = ReviewFormat::jsonl;
      else if (value == "csv") c.reviews_format = ReviewFormat::csv;
      else throw ConfigError(where + "reviews_format must be jsonl or csv");
    } else if (key == "albums") path(c.albums);
    else if (key == "conllu") path(c.conllu);
    else if (key == "judgments") path(c.judgments);
    else if (key == "score_threshold") num(c.score_threshold);
    else if (key == "outlier_user_count") num(c.outlier_user_count);
    else if (key == "runs") num(c.runs);
    else if (key == "seed") num(c.seed);
    else if (key == "max_rounds") num(c.max_rounds);
    else if (key == "split_max_size") num(c.split_max_size);
    else if (key == "split_max_depth") num(c.split_max_depth);
    else if (key == "top_n_features") num(c.top_n_features);
    else if (key == "threads") num(c.threads);
    else if (key == "text_stage") flag(c.text_stage);
    else if (key == "export_graphml") flag(c.export_graphml);
    else if (key == "export_edge_list") flag(c.export_edge_list);
    else throw ConfigError(where + "unknown key '" + key + "'");
  }
  if (!have_version) throw ConfigError("config has no version field");
  c.validate();
  return c;
}

inline PipelineConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  return parse_config(in, file.parent_path());
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Which parts of the pipeline a command runs.
enum class Command { run, project, cluster, features, export_, stats };

/// Pipeline state shared between stages. Each accessor runs the stages it
/// depends on the first time it is needed.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, fs::path out_dir)
      : cfg_(std::move(config)), out_(std::move(out_dir)) {}

  const PipelineConfig& config() const { return cfg_; }
  const fs::path& out_dir() const { return out_; }

  /// Runs `cmd`, writes the manifest, and returns the process exit status.
  int execute(Command cmd, const std::optional<fs::path>& clusters_json = std::nullopt) {
    clusters_json_ = clusters_json;
    reuse_clusters_ = cmd == Command::features || cmd == Command::export_ || cmd == Command::stats;
    int status = 0;
    try {
      fs::create_directories(out_);
      switch (cmd) {
        case Command::run:
          write_stats();
          write_projection();
          write_clusters();
          write_exports();
          write_countries();
          if (cfg_.text_stage) write_features();
          break;
        case Command::project: write_projection(); break;
        case Command::cluster: write_clusters(); break;
        case Command::features: write_features(); break;
        case Command::export_: write_exports(); break;
        case Command::stats:
          write_stats();
          if (clusters_json_ || fs::exists(out_ / "clusters.json")) write_countries();
          break;
      }
    } catch (const StageError& e) {
      failed_stage_ = e.stage();
      error_ = e.what();
      status = 1;
    } catch (const std::exception& e) {
      failed_stage_ = "setup";
      error_ = e.what();
      status = 1;
    }
    write_manifest();
    return status;
  }

  const std::string& failed_stage() const { return failed_stage_; }
  const std::string& error() const { return error_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  template <typename F>
  auto stage(const std::string& name, F&& f) -> decltype(f()) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        timings_[name] += elapsed_ms(t0);
      } else {
        auto r = f();
        timings_[name] += elapsed_ms(t0);
        return r;
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  }

  static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }

  std::ofstream open(const std::string& name) {
    std::ofstream os(out_ / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (out_ / name).string());
    artifacts_.push_back(name);
    return os;
  }

  const Corpus& corpus() {
    if (!corpus_) {
      corpus_ = stage("ingest", [&] {
        if (cfg_.reviews.empty() || cfg_.albums.empty())
          throw IngestError("config must name both reviews and albums files");
        auto reviews = load_reviews(cfg_.reviews, cfg_.reviews_format);
        auto albums = load_albums(cfg_.albums);
        if (!reviews.errors.empty() || !albums.errors.empty()) {
          auto os = open("ingest_errors.csv");
          os << "file,line,message\n";
          for (const auto& e : reviews.errors)
            os << csv_row({cfg_.reviews.filename().string(), std::to_string(e.line), e.message});
          for (const auto& e : albums.errors)
            os << csv_row({cfg_.albums.filename().string(), std::to_string(e.line), e.message});
        }
        row_errors_ = reviews.errors.size() + albums.errors.size();
        return join_corpus(std::move(reviews.records), std::move(albums.records));
      });
    }
    return *corpus_;
  }

  const Corpus& positive() {
    if (!positive_) {
      const auto& c = corpus();
      positive_ = stage("filter", [&] { return filter_positive(c, cfg_.score_threshold); });
    }
    return *positive_;
  }

  const GenreGraph& projected() {
    if (!projected_) {
      const auto& pos = positive();
      auto removal = stage("bipartite", [&] {
        return remove_outlier_users(build_bipartite(pos), cfg_.outlier_user_count);
      });
      outliers_ = removal.removed;
      degree_ranking_ = removal.degree_ranking;
      projected_ = stage("project", [&] { return project(removal.graph, pos); });
    }
    return *projected_;
  }

  const MainCore& core() {
    if (!core_) {
      const auto& g = projected();
      core_ = stage("kcore", [&] { return main_core(g); });
    }
    return *core_;
  }

  const ClusterNode& clusters() {
    if (!tree_) {
      if (reuse_clusters_) {
        auto path = clusters_json_ ? *clusters_json_ : out_ / "clusters.json";
        tree_ = stage("cluster", [&] {
          std::ifstream in(path);
          if (!in) throw std::runtime_error("cannot open " + path.string());
          return cluster_from_json(nlohmann::json::parse(in));
        });
      } else {
        const auto& g = core().graph;
        hierarchy_ = stage("cluster", [&] {
          return hierarchical_pipeline(g, cfg_.consensus(), cfg_.split_policy());
        });
        for (const auto& w : hierarchy_->warnings) warnings_.push_back(w);
        tree_ = hierarchy_->root;
      }
    }
    return *tree_;
  }

  void write_stats() {
    const auto& c = corpus();
    stage("stats", [&] {
      auto os = open("genre_stats.csv");
      write_genre_stats_csv(os, genre_stats(c, cfg_.score_threshold));
    });
  }

  void write_projection() {
    const auto& g = projected();
    const auto& mc = core();
    stage("project", [&] {
      {
        auto os = open("outliers.csv");
        os << "user_id,genre_degree\n";
        for (const auto& [u, d] : outliers_) os << csv_row({u, std::to_string(d)});
      }
      {
        auto os = open("user_degrees.csv");
        os << "user_id,genre_degree\n";
        for (const auto& [u, d] : degree_ranking_) os << csv_row({u, std::to_string(d)});
      }
      {
        auto os = open("kcore_removed.csv");
        write_core_removed_csv(os, mc.removed);
      }
      if (cfg_.export_edge_list) {
        auto os = open("network_projected.csv");
        write_edge_list_csv(os, g);
        auto os2 = open("network_main_core.csv");
        write_edge_list_csv(os2, mc.graph);
      }
      if (cfg_.export_graphml) {
        auto os = open("network_main_core.graphml");
        write_graphml(os, mc.graph, {}, ExportMode::full);
      }
    });
  }

  void write_clusters() {
    const auto& tree = clusters();
    stage("cluster", [&] {
      {
        auto os = open("clusters.json");
        os << to_json(tree).dump(2) << '\n';
      }
      if (!hierarchy_) return;
      for (const auto& t : hierarchy_->traces) {
        auto os = open(t.label == "root" ? "trace.csv" : "trace_" + t.label + ".csv");
        write_trace_csv(os, t.trace);
      }
      auto os = open("partition.csv");
      os << "genre,cluster\n";
      for (const auto& [g, label] : cluster_of(leaves(tree))) os << csv_row({g, label});
    });
  }

  void write_exports() {
    const auto& g = core().graph;
    const auto& tree = clusters();
    if (!cfg_.export_graphml) return;
    stage("export", [&] {
      auto labels = cluster_of(leaves(tree));
      auto full = open("network_full.graphml");
      write_graphml(full, g, labels, ExportMode::full);
      auto top3 = open("network_top3.graphml");
      write_graphml(top3, g, labels, ExportMode::top3_out_edges);
    });
  }

  void write_countries() {
    const auto& pos = positive();
    const auto& tree = clusters();
    stage("stats", [&] {
      for (const auto* leaf : leaves(tree)) {
        auto os = open("country_" + leaf->label + ".csv");
        write_country_csv(os, country_table(pos, leaf->genres));
      }
    });
  }

  void write_features() {
    const auto& pos = positive();
    const auto& tree = clusters();
    stage("features", [&] {
      if (cfg_.conllu.empty()) throw std::runtime_error("text stage needs a conllu path in the config");
      std::ifstream in(cfg_.conllu);
      if (!in) throw std::runtime_error("cannot open " + cfg_.conllu.string());
      auto parsed = read_conllu(in);
      parser_metadata_ = parsed.metadata;
      auto collected = collect_cluster_features(parsed.documents, pos, leaves(tree));
      feature_docs_ = collected.documents_used;
      feature_skipped_ = collected.out_of_scope + collected.unknown_review;
      auto ranked = modified_tfidf(collected.per_cluster);
      std::map<std::string, std::vector<FeatureScore>> top;
      for (const auto& [label, scores] : ranked) {
        top[label] = top_features(scores, cfg_.top_n_features);
        auto os = open("features_" + label + ".csv");
        write_feature_csv(os, top[label]);
      }
      if (!cfg_.judgments.empty()) {
        std::ifstream jin(cfg_.judgments);
        if (!jin) throw std::runtime_error("cannot open " + cfg_.judgments.string());
        auto eval = evaluate_accuracy(load_judgments(jin), &top);
        auto os = open("accuracy.csv");
        os << "cluster,n_correct,n_total,accuracy\n";
        for (const auto& [label, r] : eval.per_cluster)
          os << csv_row({label, std::to_string(r.n_correct), std::to_string(r.n_total),
                         format_number(r.accuracy())});
        os << csv_row({"overall", std::to_string(eval.overall.n_correct),
                       std::to_string(eval.overall.n_total), format_number(eval.overall.accuracy())});
      }
    });
  }

  void write_manifest() {
    nlohmann::ordered_json m;
    m["status"] = failed_stage_.empty() ? "ok" : "failed";
    if (!failed_stage_.empty()) {
      m["failed_stage"] = failed_stage_;
      m["error"] = error_;
    }
    m["seed"] = cfg_.seed;
    auto text = serialize_config(cfg_);
    m["config_hash"] = hex64(fnv1a64(text));
    m["config"] = text;
    if (corpus_) {
      auto s = corpus_->summary();
      m["corpus"] = {{"users", s.users},     {"albums", s.albums},
                     {"genres", s.genres},   {"reviews", s.reviews},
                     {"orphan_reviews", s.orphan_reviews}, {"row_errors", row_errors_}};
    }
    if (positive_) m["positive_reviews"] = positive_->reviews.size();
    if (!outliers_.empty()) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& [u, d] : outliers_) arr.push_back({{"user_id", u}, {"genre_degree", d}});
      m["removed_users"] = arr;
    }
    if (projected_) m["projected"] = {{"genres", projected_->num_nodes()}, {"edges", projected_->num_edges()}};
    if (core_) m["main_core"] = {{"k", core_->k}, {"genres", core_->graph.num_nodes()},
                                 {"edges", core_->graph.num_edges()}};
    if (tree_) m["leaf_clusters"] = leaves(*tree_).size();
    if (cfg_.text_stage && (feature_docs_ || !parser_metadata_.empty())) {
      m["parse_adapter"] = {
          {"model", parser_metadata_.count("parser_model") ? parser_metadata_["parser_model"] : "unknown"},
          {"version", parser_metadata_.count("parser_version") ? parser_metadata_["parser_version"] : "unknown"}};
      m["feature_documents"] = feature_docs_;
      m["feature_documents_skipped"] = feature_skipped_;
    }
    m["warnings"] = warnings_;
    m["artifacts"] = artifacts_;
    nlohmann::ordered_json t;
    for (const auto& [k, v] : timings_) t[k] = v;
    m["timings_ms"] = t;
    try {
      fs::create_directories(out_);
      std::ofstream os(out_ / "manifest.json", std::ios::binary);
      os << m.dump(2) << '\n';
    } catch (const std::exception&) {
      // out_dir itself unusable; the exit status already reports the failure
    }
  }

  PipelineConfig cfg_;
  fs::path out_;
  std::optional<fs::path> clusters_json_;
  bool reuse_clusters_ = false;  // read clusters.json instead of clustering

  std::optional<Corpus> corpus_;
  std::optional<Corpus> positive_;
  std::optional<GenreGraph> projected_;
  std::optional<MainCore> core_;
  std::optional<Hierarchy> hierarchy_;
  std::optional<ClusterNode> tree_;
  std::vector<std::pair<std::string, std::size_t>> outliers_;
  std::vector<std::pair<std::string, std::size_t>> degree_ranking_;
  std::size_t row_errors_ = 0;
  std::map<std::string, std::string> parser_metadata_;
  std::size_t feature_docs_ = 0;
  std::size_t feature_skipped_ = 0;

  std::string failed_stage_;
  std::string error_;
  std::vector<std::string> warnings_;
  std::vector<std::string> artifacts_;
  std::map<std::string, double> timings_;
};

/// Full pipeline; returns 0 on success, 1 when a stage failed.
inline int run_pipeline(const PipelineConfig& config, const fs::path& out_dir) {
  Pipeline p(config, out_dir);
  return p.execute(Command::run);
}

}  // namespace genrecomm
