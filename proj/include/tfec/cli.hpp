#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfec/dataset.hpp"
#include "tfec/metrics.hpp"
#include "tfec/trainer.hpp"

namespace tfec::cli {

enum ExitCode : int { kOk = 0, kNumericFailure = 1, kUsageOrIo = 2 };

struct StatsRow {
  std::filesystem::path file;
  DatasetStats stats;
};

/// Stats for each path; directories contribute every `.ts` inside, sorted by
/// file name. Each file is read on its own (splits are never merged here).
std::vector<StatsRow> collect_stats(const std::vector<std::filesystem::path>& paths);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  std::vector<double> values;
};

MetricSummary summarize(const std::vector<double>& values);

/// {"seeds": [...], "acc": {mean, std, values}, "nmi": ..., "f1": ...}
nlohmann::json seed_summary(const std::vector<std::uint64_t>& seeds, const std::vector<metrics::Scores>& scores);

/// Expands a grid object {"key": [v1, v2, ...], ...} into the list of
/// override sets, last key varying fastest.
std::vector<nlohmann::json> expand_grid(const nlohmann::json& grid);

/// Runs one invocation (argv[0] is the program name). Human-readable output
/// goes to `err`; machine output goes to files.
int run(const std::vector<std::string>& args, std::ostream& err);

}  // namespace tfec::cli
