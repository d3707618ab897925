// Copyright 2026 the coldsel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// coldsel: command-line front end for cold-start item selection.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coldsel/core.hpp"
#include "coldsel/experiment.hpp"
#include "coldsel/hull.hpp"
#include "coldsel/io.hpp"
#include "coldsel/ipgraph.hpp"
#include "coldsel/metrics.hpp"
#include "coldsel/mf.hpp"
#include "coldsel/oracle.hpp"
#include "coldsel/synth.hpp"

namespace {

using namespace coldsel;

// Config-backed flags: values are collected as strings and applied on top of
// any --config file, so the command line always wins.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app, const std::vector<std::string>& keys) {
    app->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
    for (const auto& key : keys) app->add_option("--" + key, values[key], "config key '" + key + "'");
  }

  ExperimentConfig resolve(CLI::App* app) const {
    ExperimentConfig cfg;
    if (!config_path.empty()) load_config_file(config_path, cfg);
    for (const auto& [key, value] : values) {
      if (app->count("--" + key) > 0) cfg.set(key, value);
    }
    return cfg;
  }
};

io::EmbeddingFormat parse_format(const std::string& name) {
  if (name == "text") return io::EmbeddingFormat::Text;
  if (name == "binary") return io::EmbeddingFormat::Binary;
  throw ValidationError("embedding format must be text or binary, got '" + name + "'");
}

ReportFormat report_format(const std::string& name, const std::string& path) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name.empty()) {
    return std::filesystem::path(path).extension() == ".json" ? ReportFormat::Json : ReportFormat::Csv;
  }
  throw ValidationError("report format must be csv or json, got '" + name + "'");
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot open '" + path + "' for writing");
  out << header << '\n';
  for (const auto& l : lines) out << l << '\n';
}

std::vector<double> parse_edges(const std::string& text) {
  std::vector<double> edges;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!piece.empty()) edges.push_back(io::parse_real(piece, "--edges"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  require(!edges.empty(), "--edges is empty");
  return edges;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cold-start item selection: pick M items that minimise the favourite-item loss."};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate synthetic user and item embeddings");
  ConfigFlags gen_flags;
  gen_flags.attach(gen, {"dim", "seed", "synth_items", "synth_users", "synth_cold_users",
                         "synth_clusters", "synth_center_scale", "synth_noise", "synth_skew"});
  std::string gen_items, gen_users, gen_cold, gen_format = "text";
  gen->add_option("--items-out", gen_items, "item embeddings output")->required();
  gen->add_option("--users-out", gen_users, "warm user embeddings output")->required();
  gen->add_option("--cold-out", gen_cold, "cold user embeddings output");
  gen->add_option("--format", gen_format, "text or binary");

  // mf-train
  auto* mf = app.add_subcommand("mf-train", "train user/item vectors by ALS on a ratings file");
  ConfigFlags mf_flags;
  mf_flags.attach(mf, {"dim", "lambda", "epochs", "seed", "split"});
  std::string mf_ratings, mf_users, mf_items, mf_history, mf_cold_ratings, mf_format = "text";
  bool mf_split = false;
  mf->add_option("--ratings", mf_ratings, "ratings file (user,item,rating[,timestamp])")
      ->required()
      ->check(CLI::ExistingFile);
  mf->add_option("--users-out", mf_users, "warm user embeddings output")->required();
  mf->add_option("--items-out", mf_items, "item embeddings output")->required();
  mf->add_option("--history-out", mf_history, "per-epoch rmse/objective CSV");
  mf->add_flag("--split-users", mf_split, "hold out cold users first (uses --split and --seed)");
  mf->add_option("--cold-ratings-out", mf_cold_ratings, "held-out cold ratings (with --split-users)");
  mf->add_option("--format", mf_format, "text or binary");

  // fit-cold
  auto* fit = app.add_subcommand("fit-cold", "fit cold users against fixed item vectors");
  ConfigFlags fit_flags;
  fit_flags.attach(fit, {"lambda"});
  std::string fit_ratings, fit_items, fit_out, fit_format = "text";
  fit->add_option("--ratings", fit_ratings, "cold user ratings")->required()->check(CLI::ExistingFile);
  fit->add_option("--items", fit_items, "item embeddings")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fit_out, "cold user embeddings output")->required();
  fit->add_option("--format", fit_format, "text or binary");

  // graph-build
  auto* gb = app.add_subcommand("graph-build", "build an inner-product proximity graph");
  ConfigFlags gb_flags;
  gb_flags.attach(gb, {"graph_mode", "k", "ef_construction", "refine_passes"});
  std::string gb_items, gb_out;
  gb->add_option("--items", gb_items, "item embeddings")->required()->check(CLI::ExistingFile);
  gb->add_option("--out", gb_out, "graph output")->required();

  // select
  auto* sel = app.add_subcommand("select", "select M items with one method");
  ConfigFlags sel_flags;
  sel_flags.attach(sel, {"graph_mode", "k", "ef_construction", "refine_passes", "ef_search",
                         "ipgs_exact", "lazy", "directions", "budget", "seed"});
  std::string sel_items, sel_users, sel_graph, sel_out, sel_method = "submodular";
  std::size_t sel_m = 0;
  sel->add_option("--items", sel_items, "item embeddings")->required()->check(CLI::ExistingFile);
  sel->add_option("--users", sel_users, "warm user embeddings")->required()->check(CLI::ExistingFile);
  sel->add_option("--method", sel_method, "max_norm|max_in_degree|user_expectation|ipgs|submodular|hull|exhaustive");
  sel->add_option("--m", sel_m, "subset size")->required();
  sel->add_option("--graph", sel_graph, "prebuilt graph (otherwise built on the fly)")->check(CLI::ExistingFile);
  sel->add_option("--out", sel_out, "selection output (default stdout)");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score a selection on a user population");
  std::string ev_items, ev_users, ev_selection;
  ev->add_option("--items", ev_items, "item embeddings")->required()->check(CLI::ExistingFile);
  ev->add_option("--users", ev_users, "user embeddings")->required()->check(CLI::ExistingFile);
  ev->add_option("--selection", ev_selection, "selection file")->required()->check(CLI::ExistingFile);

  // diagnose
  auto* dg = app.add_subcommand("diagnose", "norm-bias diagnostics");
  std::string dg_items, dg_users, dg_ratings, dg_out = ".", dg_edges = "0.001,0.01,0.05,0.1,0.5,1";
  std::size_t dg_k = 10;
  double dg_high = 5.0;
  dg->add_option("--items", dg_items, "item embeddings")->required()->check(CLI::ExistingFile);
  dg->add_option("--users", dg_users, "user embeddings (enables group occupancy)")->check(CLI::ExistingFile);
  dg->add_option("--ratings", dg_ratings, "ratings (enables norm vs high ratings)")->check(CLI::ExistingFile);
  dg->add_option("--top-k", dg_k, "per-user MIPS depth for group occupancy");
  dg->add_option("--edges", dg_edges, "cumulative norm-rank fractions, comma separated");
  dg->add_option("--high-rating", dg_high, "ratings at or above this count as high");
  dg->add_option("--out-dir", dg_out, "directory for fig_*.csv tables");

  // run
  auto* run = app.add_subcommand("run", "full pipeline: inputs, every method x M, report");
  ConfigFlags run_flags;
  run_flags.attach(run, ExperimentConfig::config_keys());
  std::string run_ratings, run_items, run_users, run_cold, run_out, run_format, run_figures;
  bool run_synthetic = false;
  run->add_option("--ratings", run_ratings, "ratings file: split, train, fit cold users")->check(CLI::ExistingFile);
  run->add_option("--items", run_items, "precomputed item embeddings")->check(CLI::ExistingFile);
  run->add_option("--users", run_users, "precomputed warm user embeddings")->check(CLI::ExistingFile);
  run->add_option("--cold-users", run_cold, "precomputed cold user embeddings")->check(CLI::ExistingFile);
  run->add_flag("--synthetic", run_synthetic, "generate inputs from the synth_* keys");
  run->add_option("--out", run_out, "report path (default stdout, CSV)");
  run->add_option("--format", run_format, "csv or json (default from --out extension)");
  run->add_option("--figures", run_figures, "directory for per-figure CSV tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      const ExperimentConfig cfg = gen_flags.resolve(gen);
      SyntheticSpec spec = cfg.synthetic;
      if (!gen_cold.empty() && spec.n_cold_users == 0) spec.n_cold_users = spec.n_users;
      const SyntheticData data = gen_synthetic(spec);
      const auto fmt = parse_format(gen_format);
      io::save_embeddings(gen_items, data.items, fmt);
      io::save_embeddings(gen_users, data.users, fmt);
      if (!gen_cold.empty()) io::save_embeddings(gen_cold, data.cold_users, fmt);
    } else if (mf->parsed()) {
      const ExperimentConfig cfg = mf_flags.resolve(mf);
      RatingsTable ratings = io::load_ratings(mf_ratings);
      if (mf_split) {
        UserSplit split = split_users(ratings, cfg.split, cfg.seed);
        if (!mf_cold_ratings.empty()) io::save_ratings(mf_cold_ratings, split.cold);
        ratings = std::move(split.warm);
      } else if (!mf_cold_ratings.empty()) {
        throw ValidationError("--cold-ratings-out needs --split-users");
      }
      MfParams params;
      params.dim = cfg.dim;
      params.lambda = cfg.lambda;
      params.epochs = cfg.epochs;
      params.seed = cfg.seed;
      const MfModel model = train_mf(ratings, params);
      const auto fmt = parse_format(mf_format);
      io::save_embeddings(mf_users, model.users, fmt);
      io::save_embeddings(mf_items, model.items, fmt);
      if (!mf_history.empty()) {
        std::vector<std::string> lines;
        for (std::size_t e = 0; e < model.history.size(); ++e) {
          lines.push_back(std::to_string(e) + "," + io::format_real(model.history[e].rmse) + "," +
                          io::format_real(model.history[e].objective));
        }
        write_csv(mf_history, "epoch,rmse,objective", lines);
      }
      std::cerr << "final rmse " << format_g6(model.history.back().rmse) << "\n";
    } else if (fit->parsed()) {
      const ExperimentConfig cfg = fit_flags.resolve(fit);
      const EmbeddingMatrix items = io::load_embeddings(fit_items);
      const RatingsTable ratings = io::load_ratings(fit_ratings);
      const ColdFit out = fit_cold_users(ratings, items, cfg.lambda);
      io::save_embeddings(fit_out, out.users, parse_format(fit_format));
      if (out.users_without_ratings > 0) {
        std::cerr << "warning: " << out.users_without_ratings << " cold users had no ratings\n";
      }
    } else if (gb->parsed()) {
      const ExperimentConfig cfg = gb_flags.resolve(gb);
      const EmbeddingMatrix items = io::load_embeddings(gb_items);
      save_graph(gb_out, build_graph(cfg, items));
    } else if (sel->parsed()) {
      const ExperimentConfig cfg = sel_flags.resolve(sel);
      const Method method = parse_method(sel_method);
      const EmbeddingMatrix items = io::load_embeddings(sel_items);
      const EmbeddingMatrix users = io::load_embeddings(sel_users);
      require(sel_m >= 1 && sel_m <= items.count(), "--m must be in [1, number of items]");
      std::optional<ProximityGraph> graph;
      if (method == Method::MaxInDegree || method == Method::Ipgs) {
        graph = sel_graph.empty() ? build_graph(cfg, items) : load_graph(sel_graph);
        require(graph->n == items.count(), "graph size does not match the item file");
      }
      const SelectionResult result = run_method(method, cfg, users, items, sel_m, graph ? &*graph : nullptr);
      if (sel_out.empty()) {
        io::write_selection(std::cout, result, items);
      } else {
        io::save_selection(sel_out, result, items);
      }
    } else if (ev->parsed()) {
      const EmbeddingMatrix items = io::load_embeddings(ev_items);
      const EmbeddingMatrix users = io::load_embeddings(ev_users);
      const SelectionResult result = io::load_selection(ev_selection, items);
      const double loss = oracle::fav_loss(users, items, result);
      const auto scores = metrics::evaluate_population(users, items, result.ranked, result.m());
      std::cout << "method," << method_name(result.method) << "\n"
                << "m," << result.m() << "\n"
                << "fav_loss," << format_g6(loss) << "\n"
                << "fav_loss_per_user," << format_g6(loss / static_cast<double>(users.count())) << "\n"
                << "precision," << format_g6(scores.precision) << "\n"
                << "map," << format_g6(scores.map) << "\n"
                << "ndcg," << format_g6(scores.ndcg) << "\n";
    } else if (dg->parsed()) {
      const EmbeddingMatrix items = io::load_embeddings(dg_items);
      std::filesystem::create_directories(dg_out);
      const auto dist = metrics::norm_distribution(items);
      std::vector<std::string> lines;
      for (std::size_t i = 0; i < items.count(); ++i) {
        lines.push_back(items.id(i) + "," + io::format_real(dist.normalized[i]));
      }
      write_csv(dg_out + "/fig_norm_distribution.csv", "item,normalized_norm", lines);
      std::cout << "max_norm," << io::format_real(dist.max_norm) << "\n"
                << "median_normalized_norm," << io::format_real(dist.median) << "\n";
      if (!dg_users.empty()) {
        const EmbeddingMatrix users = io::load_embeddings(dg_users);
        const auto edges = parse_edges(dg_edges);
        const auto groups = metrics::norm_group_occupancy(users, items, dg_k, edges);
        lines.clear();
        for (const auto& g : groups) {
          lines.push_back(io::format_real(g.lower) + "," + io::format_real(g.upper) + "," +
                          std::to_string(g.item_count) + "," + io::format_real(g.share));
        }
        write_csv(dg_out + "/fig_norm_groups.csv", "lower,upper,item_count,share", lines);
      }
      if (!dg_ratings.empty()) {
        const RatingsTable ratings = io::load_ratings(dg_ratings);
        const auto buckets = metrics::norm_vs_high_ratings(items, ratings, dg_high);
        lines.clear();
        for (const auto& [count, b] : buckets) {
          lines.push_back(std::to_string(count) + "," + std::to_string(b.count) + "," +
                          io::format_real(b.mean) + "," + io::format_real(b.variance));
        }
        write_csv(dg_out + "/fig_norm_vs_ratings.csv", "high_ratings,items,norm_mean,norm_variance", lines);
      }
    } else if (run->parsed()) {
      const ExperimentConfig cfg = run_flags.resolve(run);
      const int sources = (run_ratings.empty() ? 0 : 1) + (run_items.empty() ? 0 : 1) + (run_synthetic ? 1 : 0);
      require(sources == 1, "run needs exactly one of --ratings, --items/--users, --synthetic");
      ExperimentInputs inputs;
      if (!run_ratings.empty()) {
        inputs = inputs_from_ratings(io::load_ratings(run_ratings), cfg, io::file_digest(run_ratings));
      } else if (run_synthetic) {
        inputs = inputs_from_synthetic(cfg.synthetic);
      } else {
        require(!run_users.empty(), "--items needs --users");
        inputs.items = io::load_embeddings(run_items);
        inputs.warm_users = io::load_embeddings(run_users);
        inputs.digests.emplace_back("items", io::file_digest(run_items));
        inputs.digests.emplace_back("users", io::file_digest(run_users));
        if (!run_cold.empty()) {
          inputs.cold_users = io::load_embeddings(run_cold);
          inputs.digests.emplace_back("cold_users", io::file_digest(run_cold));
        }
      }
      const EvalReport report = run_experiment(cfg, inputs);
      const ReportFormat fmt = report_format(run_format, run_out);
      if (run_out.empty()) {
        write_report(std::cout, report, fmt);
      } else {
        emit_report(report, fmt, run_out);
      }
      if (!run_figures.empty()) emit_figure_tables(report, run_figures);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
