// viewfuse CLI: fuse multi-view datasets into a unified kNN graph, evaluate
// community consistency, generate synthetic datasets and convert graph files.
//
// Exit codes: 0 success, 1 validation, 2 I/O, 3 numeric. Failures emit one
// machine-readable JSON object on stderr for pipeline embedding.

#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "viewfuse/viewfuse.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct AggregateOptions {
  std::string manifest;
  int k = 5;
  bool mutual = false;
  std::vector<std::string> formats{"edgelist"};
  std::string out;
  unsigned threads = 0;
};

struct EvaluateOptions {
  std::string manifest;
  std::string ground_truth;
  int k = 0;  // 0 = use the range
  int k_min = 2;
  int k_max = 15;
  std::string out;
  unsigned threads = 0;
};

struct SynthOptions {
  viewfuse::SynthConfig config;
  std::string out;
};

struct ExportOptions {
  std::string edges;
  std::string format = "graphml";
  std::string ground_truth;
  std::string out;
  bool undirected = false;
};

std::vector<std::string> dedupe(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  for (const auto& value : values) {
    bool seen = false;
    for (const auto& have : out) seen = seen || have == value;
    if (!seen) out.push_back(value);
  }
  return out;
}

void write_summary(const std::string& dir, const ordered_json& summary) {
  viewfuse::csv::write_file((fs::path(dir) / "run_summary.json").string(),
                            summary.dump(2) + "\n");
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    viewfuse::throw_io("cannot create directory '" + dir + "': " + ec.message());
  }
}

void run_aggregate(const AggregateOptions& options) {
  auto formats = dedupe(options.formats);
  std::vector<viewfuse::GraphFormat> parsed;
  for (const auto& name : formats) parsed.push_back(viewfuse::parse_graph_format(name));

  auto dataset = viewfuse::load_dataset(options.manifest);
  auto sets = viewfuse::all_neighbour_sets(dataset.views, dataset.universe,
                                           options.k, options.threads);
  auto directed = viewfuse::build_unified_graph(sets, dataset.universe);

  ensure_directory(options.out);
  const fs::path out(options.out);
  viewfuse::csv::write_file((out / "neighbour_sets.csv").string(), sets.to_csv());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const std::string name =
        std::string("unified_knn.") + viewfuse::graph_format_extension(parsed[i]);
    viewfuse::export_graph(directed, parsed[i], nullptr, (out / name).string());
  }

  // The summary pins what a rerun needs: manifest, semantic flags, seed.
  // Execution details (--out, --threads) cannot change the results and stay
  // out so runs compare byte-for-byte.
  ordered_json summary;
  summary["command"] = "aggregate";
  summary["manifest"] = options.manifest;
  summary["seed"] = nullptr;
  summary["flags"] = {{"k", options.k},
                      {"mutual", options.mutual},
                      {"formats", formats}};
  summary["results"] = {{"n", dataset.universe.size()},
                        {"l", dataset.views.size()},
                        {"k", options.k},
                        {"edges_directed", directed.edges.size()},
                        {"non_converged_users", sets.non_converged()}};

  if (options.mutual) {
    auto mutual = viewfuse::mutualize(directed);
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      const std::string name =
          std::string("mutual_knn.") + viewfuse::graph_format_extension(parsed[i]);
      viewfuse::export_graph(mutual, parsed[i], nullptr, (out / name).string());
    }
    summary["results"]["edges_mutual"] = mutual.edges.size();
  }
  write_summary(options.out, summary);
}

void run_evaluate(const EvaluateOptions& options) {
  int k_min = options.k_min;
  int k_max = options.k_max;
  if (options.k > 0) k_min = k_max = options.k;

  auto dataset = viewfuse::load_dataset(options.manifest);
  auto communities =
      viewfuse::load_communities(options.ground_truth, dataset.universe);
  auto report = viewfuse::consistency_sweep(dataset.views, dataset.universe,
                                            communities, k_min, k_max,
                                            options.threads);
  const fs::path out(options.out);
  if (out.has_parent_path()) ensure_directory(out.parent_path().string());
  viewfuse::csv::write_file(options.out, report.to_csv());
}

void run_synth(const SynthOptions& options) {
  auto dataset = viewfuse::generate(options.config);
  viewfuse::write_dataset(dataset, options.out);

  const auto& config = options.config;
  ordered_json summary;
  summary["command"] = "synth";
  summary["manifest"] = "manifest.json";  // alongside this summary
  summary["seed"] = config.seed;
  summary["flags"] = {{"n", config.n},
                      {"communities", config.communities},
                      {"sizes", config.sizes},
                      {"views", config.views},
                      {"signals", config.signals},
                      {"features_per_user", config.features_per_user},
                      {"coverage", config.coverage},
                      {"overlap_fraction", config.overlap_fraction},
                      {"relation_views", config.relation_views},
                      {"community_pool", config.community_pool},
                      {"global_pool", config.global_pool}};
  summary["results"] = {{"n", dataset.universe.size()},
                        {"l", dataset.views.size()},
                        {"files", dataset.files.size() + 2}};
  write_summary(options.out, summary);
}

void run_export(const ExportOptions& options) {
  auto pairs = viewfuse::import_edgelist(options.edges);
  std::set<std::string> node_set;
  for (const auto& [source, target] : pairs) {
    node_set.insert(source);
    node_set.insert(target);
  }
  viewfuse::UserUniverse universe(
      std::vector<std::string>(node_set.begin(), node_set.end()));

  std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set;
  for (const auto& [source, target] : pairs) {
    auto i = static_cast<std::uint32_t>(universe.index_of(source));
    auto j = static_cast<std::uint32_t>(universe.index_of(target));
    if (i == j) {
      viewfuse::throw_validation(options.edges + ": self edge on '" + source + "'");
    }
    if (options.undirected && i > j) std::swap(i, j);
    edge_set.emplace(i, j);
  }

  viewfuse::UnifiedGraph graph;
  graph.nodes = universe.users();
  graph.edges.assign(edge_set.begin(), edge_set.end());
  graph.directed = !options.undirected;

  viewfuse::CommunityAssignment communities;
  bool have_communities = !options.ground_truth.empty();
  if (have_communities) {
    // Keep only members present in this edge list; exports must not fail on
    // ground truths covering a larger user set.
    auto parsed = viewfuse::parse_communities(
        viewfuse::csv::read_file(options.ground_truth), options.ground_truth);
    std::vector<std::pair<std::string, std::string>> kept;
    for (const auto& [user, groups] : parsed.membership) {
      if (!universe.contains(user)) continue;
      for (const auto& community : groups) kept.emplace_back(user, community);
    }
    communities = viewfuse::CommunityAssignment::from_pairs(kept);
  }

  const fs::path out(options.out);
  if (out.has_parent_path()) ensure_directory(out.parent_path().string());
  viewfuse::export_graph(graph, viewfuse::parse_graph_format(options.format),
                         have_communities ? &communities : nullptr, options.out);
}

int fail(viewfuse::ErrorKind kind, const std::string& message) {
  ordered_json error;
  error["error"] = {{"category", viewfuse::to_string(kind)}, {"message", message}};
  std::cerr << error.dump() << "\n";
  return static_cast<int>(kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viewfuse: unified kNN graphs from multiple social network views"};
  app.require_subcommand(1);

  AggregateOptions aggregate;
  auto* cmd_aggregate = app.add_subcommand(
      "aggregate", "Fuse all views of a manifest into the unified kNN graph");
  cmd_aggregate->add_option("--manifest", aggregate.manifest, "Dataset manifest JSON")
      ->required();
  cmd_aggregate->add_option("--k", aggregate.k, "Neighbourhood size")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_aggregate->add_flag("--mutual", aggregate.mutual,
                          "Also write the mutual (reciprocated) undirected graph");
  cmd_aggregate
      ->add_option("--format", aggregate.formats,
                   "Output formats: edgelist, graphml, gexf (repeat or comma-separate)")
      ->delimiter(',');
  cmd_aggregate->add_option("--out", aggregate.out, "Output directory")->required();
  cmd_aggregate->add_option("--threads", aggregate.threads,
                            "Worker threads (0 = all cores)");

  EvaluateOptions evaluate;
  auto* cmd_evaluate = app.add_subcommand(
      "evaluate", "kNN consistency report for every view plus the unified graph");
  cmd_evaluate->add_option("--manifest", evaluate.manifest, "Dataset manifest JSON")
      ->required();
  cmd_evaluate
      ->add_option("--ground-truth", evaluate.ground_truth,
                   "Community CSV (user_id,community_id)")
      ->required();
  cmd_evaluate->add_option("--k", evaluate.k, "Single k (overrides the range)")
      ->check(CLI::PositiveNumber);
  cmd_evaluate->add_option("--k-min", evaluate.k_min, "Sweep start (default 2)")
      ->check(CLI::PositiveNumber);
  cmd_evaluate->add_option("--k-max", evaluate.k_max, "Sweep end (default 15)")
      ->check(CLI::PositiveNumber);
  cmd_evaluate->add_option("--out", evaluate.out, "Report CSV path")->required();
  cmd_evaluate->add_option("--threads", evaluate.threads,
                           "Worker threads (0 = all cores)");

  SynthOptions synth;
  synth.config.signals = {0.8};
  auto* cmd_synth = app.add_subcommand(
      "synth", "Generate a seeded synthetic multi-view dataset with ground truth");
  cmd_synth->add_option("--out", synth.out, "Dataset directory")->required();
  cmd_synth->add_option("--n", synth.config.n, "User count");
  cmd_synth->add_option("--communities", synth.config.communities, "Community count");
  cmd_synth->add_option("--sizes", synth.config.sizes,
                        "Explicit community sizes (default balanced)")
      ->delimiter(',');
  cmd_synth->add_option("--views", synth.config.views, "View count");
  cmd_synth
      ->add_option("--signal", synth.config.signals,
                   "Per-view community-signal probability in [0,1]; one value "
                   "broadcasts (default 0.8)")
      ->delimiter(',');
  cmd_synth->add_option("--features-per-user", synth.config.features_per_user,
                        "Feature draws per covered user");
  cmd_synth->add_option("--coverage", synth.config.coverage,
                        "Fraction of users present per view");
  cmd_synth->add_option("--overlap", synth.config.overlap_fraction,
                        "Fraction of users assigned to two communities");
  cmd_synth->add_option("--relation-views", synth.config.relation_views,
                        "How many trailing views are emitted as relation edge lists");
  cmd_synth->add_option("--community-pool", synth.config.community_pool,
                        "Community feature-pool size per view");
  cmd_synth->add_option("--global-pool", synth.config.global_pool,
                        "Global feature-pool size per view");
  cmd_synth->add_option("--seed", synth.config.seed, "RNG seed");

  ExportOptions exporter;
  auto* cmd_export = app.add_subcommand(
      "export", "Convert an edge-list CSV to graphml/gexf, optionally with "
                "community attributes");
  cmd_export->add_option("--edges", exporter.edges, "Edge-list CSV (source,target)")
      ->required();
  cmd_export->add_option("--format", exporter.format,
                         "Target format: edgelist, graphml, gexf (default graphml)");
  cmd_export->add_option("--ground-truth", exporter.ground_truth,
                         "Optional community CSV for node attributes");
  cmd_export->add_option("--out", exporter.out, "Output file")->required();
  cmd_export->add_flag("--undirected", exporter.undirected,
                       "Treat the edge list as undirected");

  try {
    app.parse(argc, argv);
    if (cmd_aggregate->parsed()) run_aggregate(aggregate);
    if (cmd_evaluate->parsed()) run_evaluate(evaluate);
    if (cmd_synth->parsed()) run_synth(synth);
    if (cmd_export->parsed()) run_export(exporter);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(viewfuse::ErrorKind::validation, e.what());
  } catch (const viewfuse::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(viewfuse::ErrorKind::validation,
                std::string("unexpected error: ") + e.what());
  }
}
