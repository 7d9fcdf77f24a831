#include "tfec/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "tfec/errors.hpp"
#include "tfec/io.hpp"

namespace tfec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::vector<std::uint64_t> seeds;
  std::string data;
  std::string grid;  // sweep only
};

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("file not found: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
  return j;
}

// Loads the config file (if any), applies overrides and the data path.
// A "grid" entry is split off for the sweep command.
RunConfig load_config(const CommonOptions& opts, json* grid) {
  RunConfig cfg;
  if (!opts.config_path.empty()) {
    json j = read_json_file(opts.config_path);
    if (!j.is_object()) throw ConfigError(opts.config_path + ": configuration must be a JSON object");
    if (j.contains("grid")) {
      if (grid == nullptr) throw ConfigError("'grid' is only understood by the sweep command");
      *grid = j["grid"];
      j.erase("grid");
    }
    cfg = config_from_json(j, cfg);
  }
  cfg = apply_overrides(cfg, opts.overrides);
  if (!opts.data.empty()) cfg.dataset = opts.data;
  return cfg;
}

std::vector<std::uint64_t> seeds_of(const CommonOptions& opts, const RunConfig& cfg) {
  return opts.seeds.empty() ? std::vector<std::uint64_t>{cfg.seed} : opts.seeds;
}

std::string join_errors(const std::vector<std::string>& errors) {
  std::string msg = "invalid configuration:";
  for (const auto& e : errors) msg += "\n  - " + e;
  return msg;
}

MTSDataset load_checked(const std::vector<RunConfig>& configs) {
  std::vector<std::string> errors;
  for (const auto& c : configs) {
    auto e = validate(c);
    errors.insert(errors.end(), e.begin(), e.end());
  }
  if (configs.front().dataset.empty()) errors.emplace_back("dataset is not set (use --data or the config file)");
  if (!errors.empty()) throw ConfigError(join_errors(errors));

  auto ds = load_corpus(configs.front().dataset, configs.front().merge_splits);
  for (const auto& c : configs) {
    auto e = validate_for(c, ds);
    errors.insert(errors.end(), e.begin(), e.end());
  }
  if (!errors.empty()) throw ConfigError(join_errors(errors));
  return ds;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void print_scores(std::ostream& err, const std::string& prefix, const std::optional<metrics::Scores>& s) {
  if (s) {
    err << prefix << "ACC=" << fixed(s->acc) << " NMI=" << fixed(s->nmi) << " F1=" << fixed(s->f1) << "\n";
  } else {
    err << prefix << "no labels, metrics unavailable\n";
  }
}

void write_run(const fs::path& dir, const RunReport& r) {
  io::write_atomic(dir / "report.json", to_json(r).dump(2) + "\n");
  io::write_atomic(dir / "losses.csv", losses_csv(r));
  io::write_atomic(dir / "embeddings.csv", embeddings_csv(r));
  io::write_atomic(dir / "assignments.csv", assignments_csv(r));
}

std::vector<metrics::Scores> scores_or_throw(const std::vector<RunReport>& reports) {
  std::vector<metrics::Scores> out;
  for (const auto& r : reports) {
    if (!r.scores) return {};
    out.push_back(*r.scores);
  }
  return out;
}

fs::path out_dir(const CommonOptions& opts, const char* fallback) {
  return opts.out.empty() ? fs::path("runs") / fallback : fs::path(opts.out);
}

// Runs every seed, writing into seed_<n>/ when there is more than one.
std::vector<RunReport> train_seeds(const RunConfig& cfg, const MTSDataset& ds, const std::vector<std::uint64_t>& seeds,
                                   const fs::path& dir, std::ostream& err) {
  std::vector<RunReport> reports;
  for (auto seed : seeds) {
    RunConfig c = cfg;
    c.seed = seed;
    auto r = train(c, ds);
    const auto target = seeds.size() > 1 ? dir / ("seed_" + std::to_string(seed)) : dir;
    write_run(target, r);
    print_scores(err, "  seed " + std::to_string(seed) + ": ", r.scores);
    reports.push_back(std::move(r));
  }
  if (seeds.size() > 1) {
    const auto scores = scores_or_throw(reports);
    if (!scores.empty()) io::write_atomic(dir / "summary.json", seed_summary(seeds, scores).dump(2) + "\n");
  }
  return reports;
}

int cmd_stats(const std::vector<std::string>& paths, const std::string& out, std::ostream& err) {
  std::vector<fs::path> p(paths.begin(), paths.end());
  const auto rows = collect_stats(p);
  err << std::left << std::setw(28) << "name" << std::right << std::setw(8) << "N" << std::setw(8) << "T"
      << std::setw(6) << "F" << std::setw(9) << "classes"
      << "  file\n";
  std::string csv = "file,name,n,length,channels,classes\n";
  for (const auto& r : rows) {
    err << std::left << std::setw(28) << r.stats.name << std::right << std::setw(8) << r.stats.n << std::setw(8)
        << r.stats.length << std::setw(6) << r.stats.channels << std::setw(9) << r.stats.class_count << "  "
        << r.file.string() << "\n";
    csv += r.file.filename().string() + "," + r.stats.name + "," + std::to_string(r.stats.n) + "," +
           std::to_string(r.stats.length) + "," + std::to_string(r.stats.channels) + "," +
           std::to_string(r.stats.class_count) + "\n";
  }
  if (!out.empty()) io::write_atomic(fs::path(out) / "stats.csv", csv);
  return kOk;
}

int cmd_train(const CommonOptions& opts, std::ostream& err) {
  const auto cfg = load_config(opts, nullptr);
  const auto seeds = seeds_of(opts, cfg);
  const auto ds = load_checked({cfg});
  const auto dir = out_dir(opts, "train");
  err << "training on " << ds.name << " (N=" << ds.size << ", T=" << ds.length << ", F=" << ds.channels << ")\n";
  const auto reports = train_seeds(cfg, ds, seeds, dir, err);
  if (reports.size() > 1) {
    const auto scores = scores_or_throw(reports);
    if (!scores.empty()) {
      const auto s = seed_summary(seeds, scores);
      err << "mean: ACC=" << fixed(s["acc"]["mean"]) << "±" << fixed(s["acc"]["std"]) << " NMI="
          << fixed(s["nmi"]["mean"]) << "±" << fixed(s["nmi"]["std"]) << " F1=" << fixed(s["f1"]["mean"]) << "±"
          << fixed(s["f1"]["std"]) << "\n";
    }
  }
  err << "wrote " << dir.string() << "\n";
  return kOk;
}

int cmd_ablate(const CommonOptions& opts, std::ostream& err) {
  const auto cfg = load_config(opts, nullptr);
  const auto seeds = seeds_of(opts, cfg);
  const auto ds = load_checked({cfg});
  const auto dir = out_dir(opts, "ablate");

  std::string csv = "seed,row,use_coeh,use_pgcl,use_read,ACC,F1,NMI,marker\n";
  for (auto seed : seeds) {
    RunConfig c = cfg;
    c.seed = seed;
    const auto rows = ablate(c, ds);
    const auto& full = rows.front().report.scores;
    for (const auto& row : rows) {
      const auto& s = row.report.scores;
      std::string marker;
      if (s && full && &row != &rows.front() && (s->acc < full->acc || s->f1 < full->f1 || s->nmi < full->nmi)) {
        marker = "†";
      }
      auto cell = [&](double metrics::Scores::*m) { return s ? io::format_double((*s).*m) : std::string(); };
      csv += std::to_string(seed) + "," + row.name + "," + (row.use_coeh ? "1" : "0") + "," +
             (row.use_pgcl ? "1" : "0") + "," + (row.use_read ? "1" : "0") + "," + cell(&metrics::Scores::acc) +
             "," + cell(&metrics::Scores::f1) + "," + cell(&metrics::Scores::nmi) + "," + marker + "\n";
      print_scores(err, "  seed " + std::to_string(seed) + " " + row.name + ": ", s);
    }
  }
  io::write_atomic(dir / "ablation.csv", csv);
  err << "wrote " << (dir / "ablation.csv").string() << "\n";
  return kOk;
}

const std::vector<std::string>& augmentation_kinds() {
  static const std::vector<std::string> kinds{"coeh", "jitter", "scaling", "permutation", "crop", "mask"};
  return kinds;
}

std::string summary_cells(const json& s) {
  std::string out;
  for (const char* m : {"acc", "nmi", "f1"}) {
    out += "," + io::format_double(s[m]["mean"].get<double>()) + "," + io::format_double(s[m]["std"].get<double>());
  }
  return out;
}

int cmd_compare_aug(const CommonOptions& opts, std::ostream& err) {
  const auto base = load_config(opts, nullptr);
  const auto seeds = seeds_of(opts, base);
  std::vector<RunConfig> configs;
  for (const auto& kind : augmentation_kinds()) {
    RunConfig c = base;
    c.use_coeh = true;
    c.augmentation = kind;
    configs.push_back(c);
  }
  const auto ds = load_checked(configs);
  if (!ds.labels) throw ConfigError("compare-aug needs a labelled corpus");
  const auto dir = out_dir(opts, "compare-aug");

  std::string csv = "augmentation,seeds,acc_mean,acc_std,nmi_mean,nmi_std,f1_mean,f1_std\n";
  json all = json::object();
  for (const auto& c : configs) {
    err << c.augmentation << ":\n";
    std::vector<metrics::Scores> scores;
    for (auto seed : seeds) {
      RunConfig run = c;
      run.seed = seed;
      const auto r = train(run, ds);
      print_scores(err, "  seed " + std::to_string(seed) + ": ", r.scores);
      scores.push_back(*r.scores);
    }
    const auto s = seed_summary(seeds, scores);
    all[c.augmentation] = s;
    csv += c.augmentation + "," + std::to_string(seeds.size()) + summary_cells(s) + "\n";
  }
  io::write_atomic(dir / "compare.json", all.dump(2) + "\n");
  io::write_atomic(dir / "compare.csv", csv);
  err << "wrote " << (dir / "compare.csv").string() << "\n";
  return kOk;
}

int cmd_sweep(const CommonOptions& opts, std::ostream& err) {
  json grid;
  const auto base = load_config(opts, &grid);
  if (!opts.grid.empty()) {
    grid = json::parse(opts.grid, nullptr, false);
    if (grid.is_discarded()) throw ConfigError("--grid is not valid JSON");
  }
  if (grid.is_null()) throw ConfigError("sweep needs a grid (config key 'grid' or --grid)");
  const auto points = expand_grid(grid);
  const auto seeds = seeds_of(opts, base);

  std::vector<RunConfig> configs;
  for (const auto& p : points) configs.push_back(config_from_json(p, base));
  const auto ds = load_checked(configs);
  if (!ds.labels) throw ConfigError("sweep needs a labelled corpus");
  const auto dir = out_dir(opts, "sweep");

  struct Entry {
    std::size_t point;
    json summary;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    err << "point " << i << " " << points[i].dump() << ":\n";
    const auto reports = train_seeds(configs[i], ds, seeds, dir / ("point_" + std::to_string(i)), err);
    entries.push_back({i, seed_summary(seeds, scores_or_throw(reports))});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.summary["nmi"]["mean"].get<double>() > b.summary["nmi"]["mean"].get<double>();
  });

  std::string csv = "rank,point,params,acc_mean,acc_std,nmi_mean,nmi_std,f1_mean,f1_std\n";
  for (std::size_t rank = 0; rank < entries.size(); ++rank) {
    auto params = points[entries[rank].point].dump();
    std::string quoted = "\"";
    for (char ch : params) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    quoted += "\"";
    csv += std::to_string(rank + 1) + "," + std::to_string(entries[rank].point) + "," + quoted +
           summary_cells(entries[rank].summary) + "\n";
  }
  io::write_atomic(dir / "leaderboard.csv", csv);

  RunConfig best = configs[entries.front().point];
  best.seed = seeds.front();
  io::write_atomic(dir / "best_config.json", to_json(best).dump(2) + "\n");
  err << "best point " << entries.front().point << " " << points[entries.front().point].dump()
      << " NMI=" << fixed(entries.front().summary["nmi"]["mean"]) << "\n";
  err << "wrote " << dir.string() << "\n";
  return kOk;
}

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("-c,--config", opts.config_path, "JSON config file");
  sub->add_option("-o,--override", opts.overrides, "key=value, repeatable; wins over the config file")
      ->allow_extra_args(false);
  sub->add_option("--out", opts.out, "output directory");
  sub->add_option("-s,--seed", opts.seeds, "seed list, e.g. 1,2,3")->delimiter(',');
  sub->add_option("-d,--data", opts.data, "corpus path (.ts file or directory)");
}

}  // namespace

std::vector<StatsRow> collect_stats(const std::vector<fs::path>& paths) {
  std::vector<StatsRow> rows;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".ts") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end(),
                [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
      for (const auto& f : files) rows.push_back({f, stats(load_ts(f))});
    } else {
      rows.push_back({p, stats(load_ts(p))});
    }
  }
  return rows;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.values = values;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

json seed_summary(const std::vector<std::uint64_t>& seeds, const std::vector<metrics::Scores>& scores) {
  json out{{"seeds", seeds}};
  const std::pair<const char*, double metrics::Scores::*> fields[] = {
      {"acc", &metrics::Scores::acc}, {"nmi", &metrics::Scores::nmi}, {"f1", &metrics::Scores::f1}};
  for (const auto& [name, member] : fields) {
    std::vector<double> v;
    for (const auto& s : scores) v.push_back(s.*member);
    const auto m = summarize(v);
    out[name] = {{"mean", m.mean}, {"std", m.std}, {"values", m.values}};
  }
  return out;
}

std::vector<json> expand_grid(const json& grid) {
  if (!grid.is_object() || grid.empty()) throw ConfigError("grid must be a non-empty object of value lists");
  std::vector<json> points{json::object()};
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array() || values.empty()) throw ConfigError("grid entry '" + key + "' must be a non-empty list");
    std::vector<json> next;
    for (const auto& p : points) {
      for (const auto& v : values) {
        json q = p;
        q[key] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

int run(const std::vector<std::string>& args, std::ostream& err) {
  CLI::App app{"Multivariate time-series clustering with co-enhanced contrastive learning", "tfec"};
  app.require_subcommand(1);

  std::vector<std::string> stat_paths;
  std::string stats_out;
  auto* stats_cmd = app.add_subcommand("stats", "Print N, T, F and class count of .ts corpora");
  stats_cmd->add_option("paths", stat_paths, ".ts files or directories")->required();
  stats_cmd->add_option("--out", stats_out, "also write stats.csv into this directory");

  CommonOptions opts;
  auto* train_cmd = app.add_subcommand("train", "Train and cluster one corpus");
  auto* ablate_cmd = app.add_subcommand("ablate", "Run the five component ablations");
  auto* compare_cmd = app.add_subcommand("compare-aug", "Compare co-enhancement with five baseline augmentations");
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid search over configuration values");
  for (auto* sub : {train_cmd, ablate_cmd, compare_cmd, sweep_cmd}) add_common(sub, opts);
  sweep_cmd->add_option("--grid", opts.grid, R"(JSON object, e.g. {"alpha":[0.5,1],"beta":[0.3,0.7]})");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    const int code = app.exit(e, out, err);
    err << out.str();
    return code == 0 ? kOk : kUsageOrIo;
  }

  try {
    if (stats_cmd->parsed()) return cmd_stats(stat_paths, stats_out, err);
    if (train_cmd->parsed()) return cmd_train(opts, err);
    if (ablate_cmd->parsed()) return cmd_ablate(opts, err);
    if (compare_cmd->parsed()) return cmd_compare_aug(opts, err);
    if (sweep_cmd->parsed()) return cmd_sweep(opts, err);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const ShapeError& e) {
    err << "internal shape error: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageOrIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageOrIo;
  }
  return kUsageOrIo;
}

}  // namespace tfec::cli
