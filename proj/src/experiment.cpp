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

#include "coldsel/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "coldsel/hull.hpp"
#include "coldsel/io.hpp"
#include "coldsel/metrics.hpp"
#include "coldsel/oracle.hpp"
#include "coldsel/selectors.hpp"

namespace coldsel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size() && v >= 0) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw ValidationError("config '" + key + "': expected a non-negative integer, got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  return io::parse_real(value, "config '" + key + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ValidationError("config '" + key + "': expected a boolean, got '" + value + "'");
}

bool uses_graph(const std::vector<Method>& methods) {
  return std::any_of(methods.begin(), methods.end(),
                     [](Method m) { return m == Method::MaxInDegree || m == Method::Ipgs; });
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

nlohmann::json real_to_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

double real_from_json(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

const std::vector<std::string>& ExperimentConfig::config_keys() {
  static const std::vector<std::string> keys = {
      "budget",       "dim",          "directions",    "ef_construction",   "ef_search",
      "epochs",       "graph_mode",   "ipgs_exact",    "k",                 "lambda",
      "lazy",         "m_grid",       "methods",       "parallel_methods",  "refine_passes",
      "seed",         "split",        "synth_center_scale", "synth_clusters", "synth_cold_users",
      "synth_items",  "synth_noise",  "synth_skew",    "synth_users",       "timings"};
  return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "m_grid") {
    m_grid.clear();
    for (const auto& v : split_list(value)) {
      const auto m = parse_count(key, v);
      require(m >= 1, "config 'm_grid': values must be >= 1");
      m_grid.push_back(m);
    }
    require(!m_grid.empty(), "config 'm_grid' is empty");
  } else if (key == "methods") {
    methods.clear();
    for (const auto& v : split_list(value)) methods.push_back(parse_method(v));
    require(!methods.empty(), "config 'methods' is empty");
  } else if (key == "seed") {
    seed = parse_count(key, value);
    synthetic.seed = seed;
  } else if (key == "split") {
    split = SplitRatio::parse(value);
  } else if (key == "dim") {
    dim = parse_count(key, value);
    require(dim >= 1, "config 'dim' must be >= 1");
    synthetic.dim = dim;
  } else if (key == "lambda") {
    lambda = parse_double(key, value);
    require(lambda >= 0.0, "config 'lambda' must be >= 0");
  } else if (key == "epochs") {
    epochs = parse_count(key, value);
  } else if (key == "graph_mode") {
    if (value == "exact") {
      graph_mode = GraphMode::Exact;
    } else if (value == "approximate" || value == "approx") {
      graph_mode = GraphMode::Approximate;
    } else {
      throw ValidationError("config 'graph_mode': expected exact or approximate");
    }
  } else if (key == "k") {
    graph_k = parse_count(key, value);
    require(graph_k >= 1, "config 'k' must be >= 1");
  } else if (key == "ef_construction") {
    ef_construction = parse_count(key, value);
    require(ef_construction >= 1, "config 'ef_construction' must be >= 1");
  } else if (key == "ef_search") {
    ef_search = parse_count(key, value);
    require(ef_search >= 1, "config 'ef_search' must be >= 1");
  } else if (key == "refine_passes") {
    refine_passes = parse_count(key, value);
  } else if (key == "ipgs_exact") {
    ipgs_exact = parse_bool(key, value);
  } else if (key == "lazy") {
    lazy_greedy = parse_bool(key, value);
  } else if (key == "directions") {
    num_directions = parse_count(key, value);
    require(num_directions >= 1, "config 'directions' must be >= 1");
  } else if (key == "budget") {
    exhaustive_budget = parse_count(key, value);
  } else if (key == "timings") {
    timings = parse_bool(key, value);
  } else if (key == "parallel_methods") {
    parallel_methods = parse_bool(key, value);
  } else if (key == "synth_items") {
    synthetic.n_items = parse_count(key, value);
  } else if (key == "synth_users") {
    synthetic.n_users = parse_count(key, value);
  } else if (key == "synth_cold_users") {
    synthetic.n_cold_users = parse_count(key, value);
  } else if (key == "synth_clusters") {
    synthetic.clusters = parse_count(key, value);
  } else if (key == "synth_center_scale") {
    synthetic.center_scale = parse_double(key, value);
  } else if (key == "synth_noise") {
    synthetic.noise = parse_double(key, value);
  } else if (key == "synth_skew") {
    synthetic.norm_skew = parse_double(key, value);
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  std::string grid;
  for (std::size_t m : m_grid) grid += (grid.empty() ? "" : ",") + std::to_string(m);
  std::string ms;
  for (Method m : methods) ms += (ms.empty() ? "" : ",") + std::string(method_name(m));
  kv["budget"] = std::to_string(exhaustive_budget);
  kv["dim"] = std::to_string(dim);
  kv["directions"] = std::to_string(num_directions);
  kv["ef_construction"] = std::to_string(ef_construction);
  kv["ef_search"] = std::to_string(ef_search);
  kv["epochs"] = std::to_string(epochs);
  kv["graph_mode"] = graph_mode == GraphMode::Exact ? "exact" : "approximate";
  kv["ipgs_exact"] = ipgs_exact ? "true" : "false";
  kv["k"] = std::to_string(graph_k);
  kv["lambda"] = io::format_real(lambda);
  kv["lazy"] = lazy_greedy ? "true" : "false";
  kv["m_grid"] = grid;
  kv["methods"] = ms;
  kv["parallel_methods"] = parallel_methods ? "true" : "false";
  kv["refine_passes"] = std::to_string(refine_passes);
  kv["seed"] = std::to_string(seed);
  kv["split"] = split.to_string();
  kv["synth_center_scale"] = io::format_real(synthetic.center_scale);
  kv["synth_clusters"] = std::to_string(synthetic.clusters);
  kv["synth_cold_users"] = std::to_string(synthetic.n_cold_users);
  kv["synth_items"] = std::to_string(synthetic.n_items);
  kv["synth_noise"] = io::format_real(synthetic.noise);
  kv["synth_skew"] = io::format_real(synthetic.norm_skew);
  kv["synth_users"] = std::to_string(synthetic.n_users);
  kv["timings"] = timings ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string ExperimentConfig::hash() const { return io::digest_hex(canonical()); }

void load_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    try {
      cfg.set(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

ExperimentInputs inputs_from_ratings(const RatingsTable& ratings, const ExperimentConfig& cfg,
                                     const std::string& digest) {
  const UserSplit split = split_users(ratings, cfg.split, cfg.seed);
  MfParams params;
  params.dim = cfg.dim;
  params.lambda = cfg.lambda;
  params.epochs = cfg.epochs;
  params.seed = cfg.seed;
  MfModel model = train_mf(split.warm, params);
  auto [cold, dropped] = restrict_to_items(split.cold, model.items);
  (void)dropped;
  ColdFit fit = fit_cold_users(cold, model.items, cfg.lambda);
  ExperimentInputs in;
  in.items = std::move(model.items);
  in.warm_users = std::move(model.users);
  in.cold_users = std::move(fit.users);
  in.digests.emplace_back("ratings", digest);
  return in;
}

ExperimentInputs inputs_from_synthetic(const SyntheticSpec& spec) {
  SyntheticData data = gen_synthetic(spec);
  ExperimentInputs in;
  in.items = std::move(data.items);
  in.warm_users = std::move(data.users);
  if (spec.n_cold_users > 0) in.cold_users = std::move(data.cold_users);
  std::ostringstream desc;
  desc << "synthetic items=" << spec.n_items << " users=" << spec.n_users
       << " cold=" << spec.n_cold_users << " dim=" << spec.dim << " clusters=" << spec.clusters
       << " center_scale=" << io::format_real(spec.center_scale)
       << " noise=" << io::format_real(spec.noise) << " skew=" << io::format_real(spec.norm_skew)
       << " seed=" << spec.seed;
  in.digests.emplace_back("synthetic", io::digest_hex(desc.str()));
  return in;
}

ProximityGraph build_graph(const ExperimentConfig& cfg, const EmbeddingMatrix& items) {
  if (cfg.graph_mode == GraphMode::Exact) return build_exact_ip_graph(items, cfg.graph_k);
  ApproxBuildParams p;
  p.k = cfg.graph_k;
  p.ef_construction = cfg.ef_construction;
  p.refine_passes = cfg.refine_passes;
  return build_approx_ip_graph(items, p);
}

SelectionResult run_method(Method method, const ExperimentConfig& cfg, const EmbeddingMatrix& users,
                           const EmbeddingMatrix& items, std::size_t m, const ProximityGraph* graph) {
  switch (method) {
    case Method::MaxNorm:
      return select_max_norm(items, m);
    case Method::UserExpectation:
      return select_user_expectation(users, items, m);
    case Method::Submodular:
      return select_submodular_greedy(users, items, m, cfg.lazy_greedy);
    case Method::MaxInDegree:
      require(graph != nullptr, "max_in_degree needs a proximity graph");
      return select_max_in_degree(items, m, *graph);
    case Method::Ipgs:
      require(graph != nullptr, "ipgs needs a proximity graph");
      return select_ipgs(users, items, m, *graph, cfg.ef_search, cfg.ipgs_exact);
    case Method::Hull:
      return select_hull(users, items, m, cfg.num_directions, cfg.seed, cfg.lazy_greedy);
    case Method::Exhaustive: {
      const auto best = oracle::exhaustive_optimal(users, items, m, cfg.exhaustive_budget);
      SelectionResult out;
      out.method = Method::Exhaustive;
      out.ranked = best.subset;
      out.scores.assign(best.subset.size(), best.coverage);
      return out;
    }
  }
  throw ValidationError("unhandled method");
}

EvalReport run_experiment(const ExperimentConfig& cfg, const ExperimentInputs& inputs) {
  const EmbeddingMatrix& items = inputs.items;
  const EmbeddingMatrix& warm = inputs.warm_users;
  require(!items.empty() && !warm.empty(), "run_experiment: items and warm users are required");
  require(items.dim() == warm.dim(), "run_experiment: item/user dimension mismatch");
  if (inputs.cold_users) {
    require(inputs.cold_users->dim() == items.dim(), "run_experiment: cold user dimension mismatch");
  }
  for (std::size_t m : cfg.m_grid) {
    require(m >= 1 && m <= items.count(), "run_experiment: M=" + std::to_string(m) +
                                              " outside [1, " + std::to_string(items.count()) + "]");
  }

  EvalReport report;
  report.config_hash = cfg.hash();
  report.seed = cfg.seed;
  report.inputs = inputs.digests;

  std::optional<ProximityGraph> graph;
  double graph_time = 0.0;
  if (uses_graph(cfg.methods)) {
    const auto t0 = std::chrono::steady_clock::now();
    graph = build_graph(cfg, items);
    graph_time = seconds_since(t0);
  }

  struct Population {
    std::string name;
    const EmbeddingMatrix* users;
    std::unique_ptr<SelectionProblem> problem;
  };
  std::vector<Population> pops;
  pops.push_back({"warm", &warm, std::make_unique<SelectionProblem>(items, warm, 1)});
  if (inputs.cold_users && !inputs.cold_users->empty()) {
    pops.push_back({"cold", &*inputs.cold_users,
                    std::make_unique<SelectionProblem>(items, *inputs.cold_users, 1)});
  }

  auto run_one = [&](Method method) {
    std::vector<ReportRow> rows;
    const bool graph_method = method == Method::MaxInDegree || method == Method::Ipgs;
    for (std::size_t m : cfg.m_grid) {
      std::optional<SelectionResult> sel;
      std::string status = "ok";
      double wall = 0.0;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        sel = run_method(method, cfg, warm, items, m, graph ? &*graph : nullptr);
        wall = seconds_since(t0);
        sel->validate(items);
      } catch (const std::exception& e) {
        sel.reset();
        status = std::string("error: ") + e.what();
      }
      for (const auto& pop : pops) {
        ReportRow row;
        row.method = std::string(method_name(method));
        row.m = m;
        row.population = pop.name;
        row.status = status;
        if (cfg.timings) {
          row.wall_time_s = wall;
          row.shared_time_s = graph_method ? graph_time : 0.0;
        }
        if (!sel) {
          row.fav_loss = row.fav_loss_per_user = row.precision = row.map = row.ndcg = kNaN;
        } else {
          row.fav_loss = oracle::fav_loss(*pop.problem, sel->ranked);
          row.fav_loss_per_user = row.fav_loss / static_cast<double>(pop.users->count());
          const auto scores = metrics::evaluate_population(*pop.users, items, sel->ranked, m);
          row.precision = scores.precision;
          row.map = scores.map;
          row.ndcg = scores.ndcg;
        }
        rows.push_back(std::move(row));
      }
    }
    return rows;
  };

  std::vector<std::vector<ReportRow>> per_method(cfg.methods.size());
  if (cfg.parallel_methods) {
    std::vector<std::future<std::vector<ReportRow>>> jobs;
    for (Method method : cfg.methods) jobs.push_back(std::async(std::launch::async, run_one, method));
    for (std::size_t i = 0; i < jobs.size(); ++i) per_method[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) per_method[i] = run_one(cfg.methods[i]);
  }
  for (auto& rows : per_method) {
    for (auto& r : rows) report.rows.push_back(std::move(r));
  }
  return report;
}

bool reports_equal(const EvalReport& a, const EvalReport& b) {
  if (a.config_hash != b.config_hash || a.seed != b.seed || a.inputs != b.inputs ||
      a.rows.size() != b.rows.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.method != y.method || x.m != y.m || x.population != y.population || x.status != y.status ||
        !same(x.fav_loss, y.fav_loss) || !same(x.fav_loss_per_user, y.fav_loss_per_user) ||
        !same(x.precision, y.precision) || !same(x.map, y.map) || !same(x.ndcg, y.ndcg) ||
        !same(x.wall_time_s, y.wall_time_s) || !same(x.shared_time_s, y.shared_time_s)) {
      return false;
    }
  }
  return true;
}

std::string format_g6(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_report(std::ostream& out, const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    out << "schema_version,method,m,population,fav_loss,fav_loss_per_user,precision,map,ndcg,"
           "wall_time_s,shared_time_s,status\n";
    for (const auto& r : report.rows) {
      out << EvalReport::kSchemaVersion << ',' << csv_field(r.method) << ',' << r.m << ','
          << r.population << ',' << format_g6(r.fav_loss) << ',' << format_g6(r.fav_loss_per_user)
          << ',' << format_g6(r.precision) << ',' << format_g6(r.map) << ',' << format_g6(r.ndcg)
          << ',' << format_g6(r.wall_time_s) << ',' << format_g6(r.shared_time_s) << ','
          << csv_field(r.status) << '\n';
    }
    return;
  }
  nlohmann::ordered_json j;
  j["schema"] = "coldsel.eval_report";
  j["schema_version"] = EvalReport::kSchemaVersion;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [name, digest] : report.inputs) {
    j["inputs"].push_back({{"name", name}, {"digest", digest}});
  }
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["method"] = r.method;
    row["m"] = r.m;
    row["population"] = r.population;
    row["fav_loss"] = real_to_json(r.fav_loss);
    row["fav_loss_per_user"] = real_to_json(r.fav_loss_per_user);
    row["precision"] = real_to_json(r.precision);
    row["map"] = real_to_json(r.map);
    row["ndcg"] = real_to_json(r.ndcg);
    row["wall_time_s"] = real_to_json(r.wall_time_s);
    row["shared_time_s"] = real_to_json(r.shared_time_s);
    row["status"] = r.status;
    j["rows"].push_back(std::move(row));
  }
  out << j.dump(2) << '\n';
}

EvalReport read_report_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report JSON: ") + e.what());
  }
  if (j.value("schema", "") != "coldsel.eval_report") throw ValidationError("report JSON: wrong schema tag");
  if (j.value("schema_version", 0) != EvalReport::kSchemaVersion) {
    throw ValidationError("report JSON: unsupported schema_version");
  }
  EvalReport r;
  try {
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("inputs")) {
      r.inputs.emplace_back(e.at("name").get<std::string>(), e.at("digest").get<std::string>());
    }
    for (const auto& e : j.at("rows")) {
      ReportRow row;
      row.method = e.at("method").get<std::string>();
      row.m = e.at("m").get<std::size_t>();
      row.population = e.at("population").get<std::string>();
      row.fav_loss = real_from_json(e.at("fav_loss"));
      row.fav_loss_per_user = real_from_json(e.at("fav_loss_per_user"));
      row.precision = real_from_json(e.at("precision"));
      row.map = real_from_json(e.at("map"));
      row.ndcg = real_from_json(e.at("ndcg"));
      row.wall_time_s = real_from_json(e.at("wall_time_s"));
      row.shared_time_s = real_from_json(e.at("shared_time_s"));
      row.status = e.at("status").get<std::string>();
      r.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report JSON: ") + e.what());
  }
  return r;
}

void emit_report(const EvalReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot open '" + path + "' for writing");
  write_report(out, report, format);
  if (!out) throw RuntimeError("write failed for '" + path + "'");
}

void emit_figure_tables(const EvalReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string fav_path = dir + "/fig_fav_loss.csv";
  const std::string rec_path = dir + "/fig_rec_metrics.csv";
  std::ofstream fav(fav_path);
  std::ofstream rec(rec_path);
  if (!fav) throw RuntimeError("cannot open '" + fav_path + "' for writing");
  if (!rec) throw RuntimeError("cannot open '" + rec_path + "' for writing");
  fav << "method,m,population,fav_loss\n";
  rec << "method,m,population,metric,value\n";
  for (const auto& r : report.rows) {
    fav << r.method << ',' << r.m << ',' << r.population << ',' << format_g6(r.fav_loss) << '\n';
    const std::pair<const char*, double> values[] = {
        {"precision", r.precision}, {"map", r.map}, {"ndcg", r.ndcg}};
    for (const auto& [name, v] : values) {
      rec << r.method << ',' << r.m << ',' << r.population << ',' << name << ',' << format_g6(v) << '\n';
    }
  }
}

}  // namespace coldsel
