// simulate | fit | bench | climate. Each command reads one JSON config,
// writes CSV files into the output directory and returns a process exit code.
#pragma once

#include "coroica/causal.hpp"
#include "coroica/cli/config.hpp"
#include "coroica/io/csv.hpp"
#include "coroica/metrics.hpp"
#include "coroica/random.hpp"
#include "coroica/separation.hpp"
#include "coroica/simgen.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace coroica::cli {

namespace fs = std::filesystem;

struct Options {
  fs::path config;
  fs::path out = "out";
  std::optional<std::uint64_t> seed;  // overrides the config's "seed"
  int jobs = 1;
};

namespace detail {

inline std::uint64_t run_seed(Node& root, const Options& opts) {
  const std::uint64_t from_config = root.unsigned_integer("seed", 0);
  return opts.seed.value_or(from_config);
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  out << text;
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

inline const Json& empty_object() {
  static const Json empty = Json::object();
  return empty;
}

/// MCIS of V*X on each group, using `blocks` equal blocks per group.
inline std::vector<std::pair<std::int64_t, double>> mcis_per_group(const Matrix& v, const SignalMatrix& x,
                                                                  const std::vector<std::int64_t>& labels,
                                                                  Index blocks) {
  std::vector<std::pair<std::int64_t, double>> out;
  const auto groups = groups_from_labels(labels);
  for (const auto& members : groups) {
    const auto size = static_cast<Index>(members.size());
    const Index length = size / blocks;
    if (length < 2) {
      throw std::invalid_argument("group " + std::to_string(labels[static_cast<std::size_t>(members.front())]) +
                                  " has too few samples for " + std::to_string(blocks) + " MCIS blocks");
    }
    const auto pre = precompute_cis(x, equal_blocks(members, length));
    out.emplace_back(labels[static_cast<std::size_t>(members.front())], mcis(cis_matrix(v, pre)));
  }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// ---------------------------------------------------------------- simulate

inline int cmd_simulate(const Options& opts, std::ostream& log) {
  const Json doc = load_config(opts.config);
  Node root(doc, "");
  const std::string generator = root.choice("generator", {"blockvar", "garch"});
  const std::uint64_t seed = detail::run_seed(root, opts);
  SimInstance inst;
  if (generator == "blockvar") {
    Node g = root.optional_object("blockvar").value_or(Node(detail::empty_object(), "/blockvar"));
    BlockVarSpec spec = parse_blockvar(g);
    spec.seed = seed;
    root.finish();
    inst = gen_blockvar(spec);
  } else {
    Node g = root.optional_object("garch").value_or(Node(detail::empty_object(), "/garch"));
    GarchSpec spec = parse_garch(g);
    spec.seed = seed;
    root.finish();
    inst = gen_garch(spec);
  }
  fs::create_directories(opts.out);
  io::write_signal(opts.out / "X.csv", inst.X.values(), &inst.group_labels, "x");
  io::write_signal(opts.out / "S.csv", inst.S, &inst.group_labels, "s");
  io::write_matrix(opts.out / "A.csv", inst.A);
  log << "X.csv " << inst.X.samples() << " samples x " << inst.X.channels() << " channels\n"
      << "S.csv " << inst.S.cols() << " samples x " << inst.S.rows() << " sources\n"
      << "A.csv " << inst.A.rows() << " x " << inst.A.cols() << "\n";
  return 0;
}

// ---------------------------------------------------------------- fit

inline int cmd_fit(const Options& opts, std::ostream& log) {
  const Json doc = load_config(opts.config);
  Node root(doc, "");
  Node data = root.object("data");
  const fs::path x_path = resolve(opts.config, data.string("x"));
  std::optional<fs::path> a_path;
  if (data.has("a")) a_path = resolve(opts.config, data.string("a"));
  data.finish();
  Node model_node = root.object("model");
  const MethodSpec method = parse_method_spec(model_node);
  model_node.finish();
  const auto draws = root.integer("random_draws", 1, 1);
  const auto blocks = root.integer("mcis_blocks_per_group", 10, 2);
  std::optional<std::set<std::int64_t>> fit_groups;
  if (root.has("fit_groups")) {
    const auto g = root.integers("fit_groups");
    fit_groups.emplace(g.begin(), g.end());
  }
  const std::uint64_t seed = detail::run_seed(root, opts);
  root.finish();
  if (method.config.method != Method::random && draws != 1) {
    throw ConfigError("/random_draws", "only meaningful for method random");
  }

  const io::LabelledSignal data_in = io::read_signal(x_path);
  const auto labels = data_in.groups.value_or(std::vector<std::int64_t>(static_cast<std::size_t>(data_in.values.cols()), 0));
  std::optional<Matrix> a_true;
  if (a_path) {
    a_true = io::read_matrix(*a_path);
    if (a_true->rows() != data_in.values.rows() || a_true->cols() != data_in.values.rows()) {
      throw std::invalid_argument(a_path->string() + ": mixing matrix must be d x d with d = " +
                                  std::to_string(data_in.values.rows()));
    }
  }

  // Training subset.
  Matrix train = data_in.values;
  std::vector<std::int64_t> train_labels = labels;
  if (fit_groups) {
    IndexSet keep;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (fit_groups->count(labels[i])) keep.push_back(static_cast<Index>(i));
    if (keep.empty()) throw ConfigError("/fit_groups", "selects no samples");
    train.resize(data_in.values.rows(), static_cast<Index>(keep.size()));
    train_labels.clear();
    for (std::size_t i = 0; i < keep.size(); ++i) {
      train.col(static_cast<Index>(i)) = data_in.values.col(keep[i]);
      train_labels.push_back(labels[static_cast<std::size_t>(keep[i])]);
    }
  }
  const SignalMatrix x_train(train);
  const SignalMatrix x_all(data_in.values);

  fs::create_directories(opts.out);
  std::string scores = "method,draw,group,split,metric,value\n";
  for (std::int64_t draw = 0; draw < draws; ++draw) {
    SeparationConfig cfg = method.config;
    cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(draw));
    const SeparationModel model = fit(x_train, train_labels, cfg);
    if (draw == 0) io::write_matrix(opts.out / "V.csv", model.V);
    const std::string prefix = method.label + "," + std::to_string(draw) + ",";
    if (a_true) scores += prefix + "all,all,md," + io::format_double(md_index(model.V, *a_true).value) + "\n";
    for (const auto& [group, value] : detail::mcis_per_group(model.V, x_all, labels, blocks)) {
      const bool in_sample = !fit_groups || fit_groups->count(group);
      scores += prefix + std::to_string(group) + "," + (in_sample ? "in" : "out") + ",mcis," +
                io::format_double(value) + "\n";
    }
    if (draw == 0 && method.config.method != Method::random) {
      log << method.label << ": " << model.matrix_count << " matrices, " << model.iterations << " iterations, "
          << (model.converged ? "converged" : "not converged") << "\n";
    }
  }
  detail::write_text(opts.out / "scores.csv", scores);
  log << "V.csv, scores.csv written to " << opts.out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchCell {
  std::string key;  // "c1=0.5;c2=1"
  std::variant<BlockVarSpec, GarchSpec> spec;
};

struct BenchPlan {
  std::vector<BenchCell> cells;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodSpec> methods;
  std::vector<std::string> metrics;  // md, mcis
  Index mcis_blocks = 10;
  std::uint64_t run_seed = 0;
};

inline BenchPlan parse_bench(const Json& doc, const Options& opts) {
  Node root(doc, "");
  BenchPlan plan;
  const std::string generator = root.choice("generator", {"blockvar", "garch"});
  plan.methods = parse_methods(root, "methods");
  plan.metrics = root.strings("metrics", std::vector<std::string>{"md"});
  for (const auto& m : plan.metrics)
    if (m != "md" && m != "mcis") throw ConfigError("/metrics", "unknown metric '" + m + "'");
  plan.mcis_blocks = root.integer("mcis_blocks_per_group", 10, 2);
  if (root.has("seeds") && root.raw("seeds").is_number()) {
    const auto count = root.integer("seeds", std::nullopt, 1);
    for (std::int64_t s = 0; s < count; ++s) plan.seeds.push_back(static_cast<std::uint64_t>(s));
  } else {
    for (auto s : root.integers("seeds", std::vector<std::int64_t>{0}, 0)) plan.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  plan.run_seed = detail::run_seed(root, opts);

  // Grid: ordered list of (field, values); the first field varies slowest.
  std::vector<std::pair<std::string, std::vector<Json>>> axes;
  if (auto grid = root.optional_object("grid")) {
    const Json& g = root.raw("grid");
    const std::vector<std::string> allowed = generator == "blockvar"
                                                 ? std::vector<std::string>{"n", "d", "m", "subsets_per_group", "c1", "c2"}
                                                 : std::vector<std::string>{"setting", "noise", "n", "d", "segment_length"};
    // Axes follow the order of the allowed list so cell order does not
    // depend on how the document was written.
    for (const auto& name : allowed) {
      if (!g.contains(name)) continue;
      const Json& values = g.at(name);
      std::vector<Json> list;
      if (values.is_array()) list.assign(values.begin(), values.end());
      else list.push_back(values);
      if (list.empty()) throw ConfigError(grid->field(name), "list must not be empty");
      grid->raw(name);
      axes.emplace_back(name, list);
    }
    grid->finish();
  }
  Json base = root.has(generator) ? root.raw(generator) : Json::object();
  if (!base.is_object()) throw ConfigError("/" + generator, "expected an object");
  root.finish();

  std::vector<std::size_t> idx(axes.size(), 0);
  bool more = true;
  while (more) {
    Json spec_json = base;
    std::string key;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const Json& v = axes[a].second[idx[a]];
      spec_json[axes[a].first] = v;
      if (!key.empty()) key += ";";
      key += axes[a].first + "=" +
             (v.is_string() ? v.get<std::string>() : v.is_number() ? io::format_double(v.get<double>()) : v.dump());
    }
    if (key.empty()) key = "base";
    Node spec_node(spec_json, "/grid[" + key + "]");
    BenchCell cell{key, {}};
    if (generator == "blockvar") cell.spec = parse_blockvar(spec_node);
    else cell.spec = parse_garch(spec_node);
    plan.cells.push_back(std::move(cell));
    more = false;
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++idx[a] < axes[a].second.size()) {
        more = true;
        break;
      }
      idx[a] = 0;
    }
  }
  return plan;
}

struct BenchTaskResult {
  std::vector<std::string> rows;  // without trailing newline
  std::vector<Json> errors;
};

inline BenchTaskResult run_bench_task(const BenchPlan& plan, std::size_t cell_index, std::size_t seed_index) {
  const BenchCell& cell = plan.cells[cell_index];
  const std::uint64_t seed_value = plan.seeds[seed_index];
  const std::uint64_t data_seed = derive_seed(plan.run_seed, seed_value);
  BenchTaskResult res;
  const std::string prefix_cell = cell.key + ",";
  auto error_rows = [&](const std::string& method, const std::string& what) {
    res.rows.push_back(prefix_cell + method + "," + std::to_string(seed_value) + ",error,nan");
    res.errors.push_back(Json{{"cell", cell.key}, {"seed", seed_value}, {"method", method}, {"error", what}});
  };
  std::optional<SimInstance> inst;
  try {
    inst = std::visit(
        [&](auto spec) {
          spec.seed = data_seed;
          if constexpr (std::is_same_v<decltype(spec), BlockVarSpec>) return gen_blockvar(spec);
          else return gen_garch(spec);
        },
        cell.spec);
  } catch (const std::exception& e) {
    for (const auto& m : plan.methods) error_rows(m.label, std::string("generator: ") + e.what());
    return res;
  }
  for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
    const MethodSpec& method = plan.methods[mi];
    try {
      SeparationConfig cfg = method.config;
      cfg.seed = derive_seed(data_seed, 1000 + mi);
      const SeparationModel model = fit(inst->X, inst->group_labels, cfg);
      std::vector<std::string> rows;
      const std::string prefix = prefix_cell + method.label + "," + std::to_string(seed_value) + ",";
      for (const auto& metric : plan.metrics) {
        double value = 0.0;
        if (metric == "md") {
          value = md_index(model.V, inst->A).value;
        } else {
          std::vector<double> per_group;
          for (const auto& [g, v] : detail::mcis_per_group(model.V, inst->X, inst->group_labels, plan.mcis_blocks))
            per_group.push_back(v);
          value = std::accumulate(per_group.begin(), per_group.end(), 0.0) / static_cast<double>(per_group.size());
        }
        rows.push_back(prefix + metric + "," + io::format_double(value));
      }
      res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    } catch (const std::exception& e) {
      error_rows(method.label, e.what());
    }
  }
  return res;
}

inline constexpr const char* kBenchHeader = "cell,method,seed,metric,value";

inline int cmd_bench(const Options& opts, std::ostream& log) {
  const Json doc = load_config(opts.config);
  const BenchPlan plan = parse_bench(doc, opts);
  fs::create_directories(opts.out);
  const fs::path results_path = opts.out / "results.csv";
  const fs::path errors_path = opts.out / "errors.json";

  const std::size_t n_tasks = plan.cells.size() * plan.seeds.size();
  const std::size_t rows_per_task = plan.methods.size() * plan.metrics.size();
  auto task_key = [](const std::string& cell, const std::string& seed) { return cell + "\x1f" + seed; };
  std::map<std::string, std::size_t> task_of;
  for (std::size_t c = 0; c < plan.cells.size(); ++c)
    for (std::size_t s = 0; s < plan.seeds.size(); ++s)
      task_of[task_key(plan.cells[c].key, std::to_string(plan.seeds[s]))] = c * plan.seeds.size() + s;

  // Resume: keep tasks whose rows are complete and error-free.
  std::vector<std::vector<std::string>> done(n_tasks);
  std::vector<char> complete(n_tasks, 0);
  if (fs::exists(results_path)) {
    const auto lines = io::read_lines(results_path);
    if (!lines.empty() && lines[0] != kBenchHeader) {
      throw std::invalid_argument(results_path.string() + ": existing file has an unexpected header");
    }
    std::vector<char> bad(n_tasks, 0);
    for (std::size_t r = 1; r < lines.size(); ++r) {
      if (io::blank(lines[r])) continue;
      const auto f = io::split_fields(lines[r]);
      if (f.size() != 5) continue;
      const auto it = task_of.find(task_key(std::string(f[0]), std::string(f[2])));
      if (it == task_of.end()) continue;
      if (f[3] == "error") bad[it->second] = 1;
      done[it->second].push_back(lines[r]);
    }
    for (std::size_t t = 0; t < n_tasks; ++t) {
      complete[t] = !bad[t] && done[t].size() == rows_per_task;
      if (!complete[t]) done[t].clear();
    }
  }

  // Rewrite the kept rows, then append new tasks as they finish.
  auto write_all = [&]() {
    std::string text = std::string(kBenchHeader) + "\n";
    for (const auto& rows : done)
      for (const auto& row : rows) text += row + "\n";
    detail::write_text(results_path, text);
  };
  write_all();
  std::size_t skipped = static_cast<std::size_t>(std::count(complete.begin(), complete.end(), 1));

  std::vector<std::size_t> todo;
  for (std::size_t t = 0; t < n_tasks; ++t)
    if (!complete[t]) todo.push_back(t);

  std::vector<std::vector<Json>> task_errors(n_tasks);
  std::mutex writer;
  std::ofstream append(results_path, std::ios::app | std::ios::binary);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const std::size_t t = todo[i];
      BenchTaskResult res = run_bench_task(plan, t / plan.seeds.size(), t % plan.seeds.size());
      std::lock_guard<std::mutex> lock(writer);
      for (const auto& row : res.rows) append << row << '\n';
      append.flush();
      done[t] = std::move(res.rows);
      task_errors[t] = std::move(res.errors);
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(std::max<std::size_t>(1, todo.size()))));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  append.close();
  write_all();

  Json errors = Json::array();
  for (const auto& list : task_errors)
    for (const auto& e : list) errors.push_back(e);

  // Per (cell, method, metric) medians for quick inspection.
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<double>> grouped;
  std::map<std::string, std::size_t> method_index, metric_index;
  for (std::size_t m = 0; m < plan.methods.size(); ++m) method_index[plan.methods[m].label] = m;
  for (std::size_t m = 0; m < plan.metrics.size(); ++m) metric_index[plan.metrics[m]] = m;
  for (std::size_t t = 0; t < n_tasks; ++t) {
    for (const auto& row : done[t]) {
      const auto f = io::split_fields(row);
      if (f[3] == "error") continue;
      grouped[{t / plan.seeds.size(), method_index.at(std::string(f[1])), metric_index.at(std::string(f[3]))}]
          .push_back(io::parse_double(f[4]).value_or(std::numeric_limits<double>::quiet_NaN()));
    }
  }
  std::string summary = "cell,method,metric,count,median\n";
  for (const auto& [k, values] : grouped) {
    const auto& [c, m, q] = k;
    summary += plan.cells[c].key + "," + plan.methods[m].label + "," + plan.metrics[q] + "," +
               std::to_string(values.size()) + "," + io::format_double(detail::median(values)) + "\n";
  }
  detail::write_text(opts.out / "summary.csv", summary);

  log << plan.cells.size() << " cells x " << plan.seeds.size() << " seeds x " << plan.methods.size()
      << " methods; " << skipped << " tasks resumed, " << todo.size() << " run\n";
  if (!errors.empty()) {
    detail::write_text(errors_path, errors.dump(2) + "\n");
    log << errors.size() << " failures recorded in " << errors_path.string() << "\n";
    return 1;
  }
  if (fs::exists(errors_path)) fs::remove(errors_path);
  return 0;
}

// ---------------------------------------------------------------- climate

/// Ice-core records list age before present; time runs forward as -age.
inline IrregularSeries read_age_series(const fs::path& path) {
  auto [age, value] = io::read_two_columns(path);
  std::vector<std::size_t> order(age.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return age[a] > age[b]; });
  IrregularSeries out;
  for (std::size_t i : order) {
    if (!out.times.empty() && -age[i] == out.times.back()) {
      throw std::invalid_argument(path.string() + ": duplicate age " + io::format_double(age[i]));
    }
    out.times.push_back(-age[i]);
    out.values.push_back(value[i]);
  }
  try {
    out.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return out;
}

struct ClimateSummary {
  std::size_t identified = 0;
  std::size_t in_band = 0;
};

inline ClimateSummary climate_band(const std::vector<ClimateRow>& rows, double lo = 1.5, double hi = 4.5) {
  ClimateSummary s;
  for (const auto& r : rows) {
    if (!std::isfinite(r.ecs)) continue;
    ++s.identified;
    if (r.ecs >= lo && r.ecs <= hi) ++s.in_band;
  }
  return s;
}

inline int cmd_climate(const Options& opts, std::ostream& log) {
  const Json doc = load_config(opts.config);
  Node root(doc, "");
  const fs::path co2_path = resolve(opts.config, root.string("co2"));
  const fs::path temp_path = resolve(opts.config, root.string("temperature"));
  std::vector<std::size_t> lags;
  if (root.has("lags") && root.raw("lags").is_object()) {
    Node range = root.object("lags");
    const auto from = range.integer("from", std::nullopt, 1);
    const auto to = range.integer("to", std::nullopt, from);
    range.finish();
    for (auto p = from; p <= to; ++p) lags.push_back(static_cast<std::size_t>(p));
  } else {
    for (auto p : root.integers("lags", std::nullopt, 1)) lags.push_back(static_cast<std::size_t>(p));
  }
  const double step = root.number("step", 500.0, 1e-9);
  const auto criterion_name = root.choice("criterion", {"spectral_radius", "spectral_norm"}, "spectral_radius");
  const auto methods = parse_methods(root, "methods", true);
  root.finish();
  const auto criterion = criterion_name == "spectral_norm" ? FeedbackCriterion::spectral_norm
                                                            : FeedbackCriterion::spectral_radius;

  const IrregularSeries co2 = read_age_series(co2_path);
  const IrregularSeries temp = read_age_series(temp_path);
  std::vector<ClimateIcaConfig> icas;
  for (const auto& m : methods) icas.push_back({m.label, m.config, m.group_length});
  const auto rows = climate_pipeline(co2, temp, lags, icas, step, criterion);

  fs::create_directories(opts.out);
  std::string text = "lag,method,alpha,beta,ecs,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    text += std::to_string(r.lag) + "," + r.method + "," + io::format_double(r.alpha) + "," +
            io::format_double(r.beta) + "," + io::format_double(r.ecs) + "," + status + "\n";
  }
  detail::write_text(opts.out / "climate.csv", text);
  const ClimateSummary s = climate_band(rows);
  const std::string summary = "ECS in [1.5, 4.5]: " + std::to_string(s.in_band) + " of " +
                              std::to_string(s.identified) + " identified rows (" + std::to_string(rows.size()) +
                              " rows total)\n";
  detail::write_text(opts.out / "climate_summary.txt", summary);
  log << summary;
  return 0;
}

}  // namespace coroica::cli
