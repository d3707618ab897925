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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coldsel/core.hpp"
#include "coldsel/ipgraph.hpp"
#include "coldsel/mf.hpp"
#include "coldsel/ratings.hpp"
#include "coldsel/synth.hpp"

namespace coldsel {

/// Every knob of a run. Keys of the flat key=value config format are the
/// field names listed in config_keys().
struct ExperimentConfig {
  std::vector<std::size_t> m_grid{5, 20, 50, 100, 200};
  std::vector<Method> methods{Method::MaxNorm, Method::MaxInDegree, Method::UserExpectation,
                              Method::Ipgs, Method::Submodular};
  std::uint64_t seed = 42;
  SplitRatio split;

  // matrix factorisation
  std::size_t dim = 32;
  double lambda = 0.1;
  std::size_t epochs = 20;

  // proximity graph
  GraphMode graph_mode = GraphMode::Approximate;
  std::size_t graph_k = 10;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 64;
  std::size_t refine_passes = 0;
  bool ipgs_exact = false;

  bool lazy_greedy = false;
  std::size_t num_directions = 10000;
  std::uint64_t exhaustive_budget = 2'000'000;

  bool timings = false;
  bool parallel_methods = false;

  // synthetic inputs
  SyntheticSpec synthetic;

  /// Applies one key=value setting; throws ValidationError on unknown keys
  /// or bad values.
  void set(const std::string& key, const std::string& value);
  /// Canonical "key=value" lines, sorted by key.
  std::string canonical() const;
  std::string hash() const;

  static const std::vector<std::string>& config_keys();
};

/// Reads a flat key=value file ('#' comments, blank lines allowed) into cfg.
void load_config_file(const std::string& path, ExperimentConfig& cfg);

struct ExperimentInputs {
  EmbeddingMatrix items;
  EmbeddingMatrix warm_users;
  std::optional<EmbeddingMatrix> cold_users;
  /// name -> digest of every input that fed the run
  std::vector<std::pair<std::string, std::string>> digests;
};

/// Splits users, trains ALS on the warm side, and fits cold users against
/// the learned items. Cold ratings on items unseen in training are dropped.
ExperimentInputs inputs_from_ratings(const RatingsTable& ratings, const ExperimentConfig& cfg,
                                     const std::string& digest);
ExperimentInputs inputs_from_synthetic(const SyntheticSpec& spec);

struct ReportRow {
  std::string method;
  std::size_t m = 0;
  std::string population;  // "warm" | "cold"
  double fav_loss = 0.0;
  double fav_loss_per_user = 0.0;
  double precision = 0.0;
  double map = 0.0;
  double ndcg = 0.0;
  double wall_time_s = 0.0;    // selection time
  double shared_time_s = 0.0;  // graph build time charged to graph methods
  std::string status = "ok";
};

struct EvalReport {
  static constexpr int kSchemaVersion = 1;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<ReportRow> rows;
};

/// NaN-aware field-by-field equality.
bool reports_equal(const EvalReport& a, const EvalReport& b);

/// For each method and M: select on the warm users, then score fav_loss and
/// Precision/MAP/NDCG on the warm and (when present) cold populations. A
/// failing method yields rows with an "error: ..." status and NaN values.
EvalReport run_experiment(const ExperimentConfig& cfg, const ExperimentInputs& inputs);

/// Runs a single selector on the warm users.
SelectionResult run_method(Method method, const ExperimentConfig& cfg, const EmbeddingMatrix& users,
                           const EmbeddingMatrix& items, std::size_t m, const ProximityGraph* graph);

ProximityGraph build_graph(const ExperimentConfig& cfg, const EmbeddingMatrix& items);

enum class ReportFormat { Csv, Json };

void write_report(std::ostream& out, const EvalReport& report, ReportFormat format);
void emit_report(const EvalReport& report, ReportFormat format, const std::string& path);
EvalReport read_report_json(std::istream& in);

/// Long-format tables behind the fav_loss and ranking-metric figures:
/// <dir>/fig_fav_loss.csv and <dir>/fig_rec_metrics.csv.
void emit_figure_tables(const EvalReport& report, const std::string& dir);

/// Six-significant-digit rendering used in CSV output.
std::string format_g6(double value);

}  // namespace coldsel
