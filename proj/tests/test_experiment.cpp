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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "coldsel/experiment.hpp"
#include "coldsel/oracle.hpp"

using namespace coldsel;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("coldsel_exp_" + name)).string();
}

ExperimentInputs small_inputs(std::uint64_t seed = 42) {
  SyntheticSpec s;
  s.n_items = 120;
  s.n_users = 80;
  s.n_cold_users = 40;
  s.dim = 6;
  s.clusters = 4;
  s.seed = seed;
  return inputs_from_synthetic(s);
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.m_grid = {1, 5, 20};
  cfg.graph_k = 5;
  cfg.ef_construction = 40;
  cfg.num_directions = 500;
  cfg.methods = {Method::MaxNorm, Method::MaxInDegree, Method::UserExpectation, Method::Ipgs,
                 Method::Submodular, Method::Hull};
  return cfg;
}

std::string csv_of(const EvalReport& r) {
  std::ostringstream out;
  write_report(out, r, ReportFormat::Csv);
  return out.str();
}

}  // namespace

TEST(Config, SetAndCanonical) {
  ExperimentConfig cfg;
  cfg.set("m_grid", "5, 10");
  cfg.set("methods", "ipgs,submodular");
  cfg.set("graph_mode", "exact");
  cfg.set("lazy", "true");
  cfg.set("split", "3:2");
  EXPECT_EQ(cfg.m_grid, (std::vector<std::size_t>{5, 10}));
  EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::Ipgs, Method::Submodular}));
  EXPECT_EQ(cfg.graph_mode, GraphMode::Exact);
  EXPECT_TRUE(cfg.lazy_greedy);
  EXPECT_EQ(cfg.split.to_string(), "3:2");
  EXPECT_NE(cfg.canonical().find("m_grid=5,10\n"), std::string::npos);
  EXPECT_NE(cfg.hash(), ExperimentConfig{}.hash());
  EXPECT_THROW(cfg.set("nonsense", "1"), ValidationError);
  EXPECT_THROW(cfg.set("k", "-3"), ValidationError);
  EXPECT_THROW(cfg.set("lazy", "maybe"), ValidationError);
  EXPECT_THROW(cfg.set("methods", "magic"), ValidationError);
}

TEST(Config, EveryListedKeyIsSettableAndCanonical) {
  const ExperimentConfig cfg;
  const std::string canon = cfg.canonical();
  for (const auto& key : ExperimentConfig::config_keys()) {
    const auto pos = canon.find(key + "=");
    ASSERT_NE(pos, std::string::npos) << key;
    const auto end = canon.find('\n', pos);
    const std::string value = canon.substr(pos + key.size() + 1, end - pos - key.size() - 1);
    ExperimentConfig copy;
    EXPECT_NO_THROW(copy.set(key, value)) << key;
    EXPECT_EQ(copy.canonical(), canon) << key;
  }
}

TEST(Config, FileWithCommentsAndErrors) {
  const auto path = temp_path("cfg.txt");
  {
    std::ofstream out(path);
    out << "# a comment\n\nseed = 7\nm_grid=3,4  # trailing\n";
  }
  ExperimentConfig cfg;
  load_config_file(path, cfg);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.m_grid, (std::vector<std::size_t>{3, 4}));
  {
    std::ofstream out(path);
    out << "seed 7\n";
  }
  EXPECT_THROW(load_config_file(path, cfg), ValidationError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config_file(path, cfg), ValidationError);
}

TEST(Run, OneRowPerMethodMAndPopulation) {
  const auto cfg = small_config();
  const auto report = run_experiment(cfg, small_inputs());
  EXPECT_EQ(report.rows.size(), cfg.methods.size() * cfg.m_grid.size() * 2);
  std::map<std::tuple<std::string, std::size_t, std::string>, int> seen;
  for (const auto& r : report.rows) {
    EXPECT_EQ(r.status, "ok");
    EXPECT_EQ((++seen[{r.method, r.m, r.population}]), 1);
    EXPECT_GE(r.fav_loss, 0.0);
    EXPECT_EQ(r.wall_time_s, 0.0);
  }
}

TEST(Run, FavLossNonIncreasingInM) {
  auto cfg = small_config();
  cfg.m_grid = {1, 2, 4, 8, 16, 32, 64};
  const auto report = run_experiment(cfg, small_inputs());
  std::map<std::pair<std::string, std::string>, double> last;
  for (const auto& r : report.rows) {
    const auto key = std::make_pair(r.method, r.population);
    if (last.count(key)) {
      EXPECT_LE(r.fav_loss, last[key] + 1e-9) << r.method << " m=" << r.m;
    }
    last[key] = r.fav_loss;
  }
}

TEST(Run, FullSetHasZeroLoss) {
  ExperimentConfig cfg;
  cfg.methods = {Method::MaxNorm};
  auto in = small_inputs();
  cfg.m_grid = {in.items.count()};
  const auto report = run_experiment(cfg, in);
  for (const auto& r : report.rows) EXPECT_EQ(r.fav_loss, 0.0);
}

TEST(Run, GreedyWithinBoundOfExhaustive) {
  SyntheticSpec s;
  s.n_items = 12;
  s.n_users = 15;
  s.dim = 3;
  s.center_scale = 2.0;
  const auto in = inputs_from_synthetic(s);
  ExperimentConfig cfg;
  cfg.methods = {Method::Submodular, Method::Exhaustive};
  cfg.m_grid = {2, 3};
  const auto report = run_experiment(cfg, in);
  double best = 0.0;
  for (double v : oracle::user_best_values(in.warm_users, in.items)) best += v;
  for (std::size_t i = 0; i < cfg.m_grid.size(); ++i) {
    const auto& greedy = report.rows[i];
    const auto& exact = report.rows[cfg.m_grid.size() + i];
    ASSERT_EQ(greedy.method, "submodular");
    ASSERT_EQ(exact.method, "exhaustive");
    EXPECT_LE(exact.fav_loss, greedy.fav_loss + 1e-9);
    const double f_greedy = best - greedy.fav_loss, f_exact = best - exact.fav_loss;
    if (f_exact >= 0.0) {
      EXPECT_GE(f_greedy, 0.632 * f_exact - 1e-9);
    }
  }
}

TEST(Run, MethodFailureIsolatedToItsRows) {
  auto cfg = small_config();
  cfg.methods = {Method::MaxNorm, Method::Exhaustive};
  cfg.m_grid = {20};
  cfg.exhaustive_budget = 1000;
  const auto report = run_experiment(cfg, small_inputs());
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_EQ(report.rows[0].status, "ok");
  EXPECT_EQ(report.rows[2].status.rfind("error: ", 0), 0u);
  EXPECT_TRUE(std::isnan(report.rows[2].fav_loss));
  EXPECT_NE(csv_of(report).find(",nan,"), std::string::npos);
}

TEST(Run, RejectsOversizedM) {
  auto cfg = small_config();
  cfg.m_grid = {1000};
  EXPECT_THROW(run_experiment(cfg, small_inputs()), ValidationError);
}

TEST(Run, DeterministicAndParallelInvariant) {
  auto cfg = small_config();
  const auto in = small_inputs();
  const auto a = run_experiment(cfg, in);
  const auto b = run_experiment(cfg, in);
  EXPECT_EQ(csv_of(a), csv_of(b));
  cfg.parallel_methods = true;
  const auto c = run_experiment(cfg, in);
  ASSERT_EQ(a.rows.size(), c.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].fav_loss, c.rows[i].fav_loss);
    EXPECT_EQ(a.rows[i].ndcg, c.rows[i].ndcg);
  }
}

TEST(Run, TimingsOnlyWhenRequested) {
  auto cfg = small_config();
  cfg.timings = true;
  cfg.methods = {Method::Ipgs};
  const auto r = run_experiment(cfg, small_inputs());
  EXPECT_GT(r.rows[0].shared_time_s, 0.0);
}

TEST(Run, FromRatingsPipeline) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> star(1, 5);
  RatingsTable t;
  for (int u = 0; u < 60; ++u) {
    for (int i = 0; i < 30; ++i) {
      if (rng() % 2) t.add("u" + std::to_string(u), "i" + std::to_string(i), star(rng));
    }
  }
  ExperimentConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 5;
  cfg.m_grid = {3, 10};
  cfg.graph_k = 4;
  const auto in = inputs_from_ratings(t, cfg, "abc");
  EXPECT_EQ(in.warm_users.count(), 48u);
  ASSERT_TRUE(in.cold_users.has_value());
  EXPECT_EQ(in.cold_users->count(), 12u);
  const auto report = run_experiment(cfg, in);
  EXPECT_EQ(report.rows.size(), cfg.methods.size() * 2 * 2);
  EXPECT_EQ(report.inputs.front().second, "abc");
}

TEST(Report, CsvShape) {
  EvalReport empty;
  const std::string header = csv_of(empty);
  EXPECT_EQ(std::count(header.begin(), header.end(), '\n'), 1);
  EXPECT_EQ(header.rfind("schema_version,method,m,population,fav_loss", 0), 0u);
  EvalReport two;
  two.rows.resize(2);
  two.rows[0].method = "max_norm";
  two.rows[0].fav_loss = 1.0 / 3.0;
  const std::string csv = csv_of(two);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("0.333333"), std::string::npos);
  EXPECT_EQ(format_g6(123456789.0), "1.23457e+08");
}

TEST(Report, JsonRoundTrip) {
  const auto report = run_experiment(small_config(), small_inputs());
  std::stringstream ss;
  write_report(ss, report, ReportFormat::Json);
  const auto back = read_report_json(ss);
  EXPECT_TRUE(reports_equal(report, back));
  EvalReport with_nan = report;
  with_nan.rows[0].map = std::nan("");
  std::stringstream ss2;
  write_report(ss2, with_nan, ReportFormat::Json);
  EXPECT_TRUE(reports_equal(with_nan, read_report_json(ss2)));
  std::istringstream junk("{\"schema\": \"other\"}");
  EXPECT_THROW(read_report_json(junk), ValidationError);
}

TEST(Report, FigureTablesAndEmit) {
  const auto report = run_experiment(small_config(), small_inputs());
  const auto dir = temp_path("figs");
  emit_figure_tables(report, dir);
  std::ifstream fav(dir + "/fig_fav_loss.csv");
  std::ifstream rec(dir + "/fig_rec_metrics.csv");
  std::string line;
  std::size_t n = 0;
  while (std::getline(fav, line)) ++n;
  EXPECT_EQ(n, report.rows.size() + 1);
  n = 0;
  while (std::getline(rec, line)) ++n;
  EXPECT_EQ(n, 3 * report.rows.size() + 1);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(emit_report(report, ReportFormat::Csv, "/nonexistent_dir/x/report.csv"), RuntimeError);
}
