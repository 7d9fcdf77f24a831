#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfec/dataset.hpp"
#include "tfec/matrix.hpp"
#include "tfec/metrics.hpp"
#include "tfec/model.hpp"
#include "tfec/optim.hpp"

namespace tfec {

/// Everything that determines a run. Serialized as a flat JSON object; the
/// keys are the member names below.
struct RunConfig {
  std::string dataset;        // path to a .ts file or a directory with split files
  bool merge_splits = true;   // append <Name>_TEST.ts to <Name>_TRAIN.ts
  bool normalize = true;      // per-series, per-channel z-normalization
  std::uint64_t seed = 0;
  std::size_t epochs = 100;
  std::size_t batch_size = 0;  // 0: full batch when N <= 256, else 32

  // co-enhancement
  std::size_t crop_length = 0;  // 0: ceil(0.9 T)
  std::size_t neighbors = 3;
  double gamma = 0.2;
  std::string neighbor_space = "input";  // "input" or "embedding"
  /// View-b generator when use_coeh is on: "coeh" or one of the baseline
  /// augmentations (jitter, scaling, permutation, crop, mask).
  std::string augmentation = "coeh";
  double aug_strength = 0.2;

  // reconstruction path
  double mask_ratio = 0.15;

  // contrastive path
  double q = 0.5;
  double alpha = 1.0;
  std::size_t k = 0;  // 0: the corpus class count
  std::size_t kmeans_restarts = 10;
  std::size_t kmeans_max_iter = 100;

  double beta = 0.5;

  bool use_coeh = true;
  bool use_pgcl = true;
  bool use_read = true;

  AdamConfig adam;
  model::ModelConfig model;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Reads a flat config object on top of `base`. Unknown keys and type
/// mismatches are collected and thrown together as one ConfigError.
RunConfig config_from_json(const nlohmann::json& j, const RunConfig& base = {});

/// Applies "key=value" overrides. Values are parsed as JSON where possible
/// and otherwise taken as strings.
RunConfig apply_overrides(const RunConfig& cfg, const std::vector<std::string>& overrides);

/// Dataset-independent checks; returns every violation found.
std::vector<std::string> validate(const RunConfig& cfg);

/// Checks that depend on the corpus (crop length, neighbor count, K).
std::vector<std::string> validate_for(const RunConfig& cfg, const MTSDataset& ds);

struct EpochLoss {
  std::size_t epoch = 0;
  double l_con = 0.0;
  double l_recon = 0.0;
  double l_total = 0.0;
};

struct RunReport {
  RunConfig config;  // effective configuration, defaults resolved
  std::string dataset_name;
  std::size_t n = 0, length = 0, channels = 0, k = 0;
  double beta_effective = 0.0;
  std::vector<EpochLoss> losses;
  Matrix embeddings;  // final fused representations, N x D
  std::vector<int> assignments;
  std::optional<metrics::Scores> scores;
  std::uint64_t frequency_mix_calls = 0;  // made during this run
  double wall_clock_seconds = 0.0;
};

/// beta * l_con + (1 - beta) * l_recon
double total_loss(double l_con, double l_recon, double beta);

/// Trains the encoder under the joint objective and clusters the final
/// fused representations. Deterministic for a given seed.
/// Throws ConfigError (all violations at once) or NumericError (with the
/// epoch index) on a non-finite loss.
RunReport train(const RunConfig& cfg, const MTSDataset& ds);

struct AblationRow {
  std::string name;
  bool use_coeh = true;
  bool use_pgcl = true;
  bool use_read = true;
  RunReport report;
};

/// The five component ablations in order: full, -CoEH, -PGCL, -READ,
/// -PGCL-READ. The last row has nothing to train and reports the k-means
/// clustering of a randomly initialised encoder over enhanced views.
std::vector<AblationRow> ablate(const RunConfig& cfg, const MTSDataset& ds);

struct BaselineResult {
  std::vector<int> assignments;
  std::optional<metrics::Scores> scores;
};

/// k-means (same restarts and seed handling) on the flattened, optionally
/// z-normalized raw series.
BaselineResult kmeans_raw_baseline(const RunConfig& cfg, const MTSDataset& ds);

/// JSON report. With `include_timing` false the wall-clock field is omitted,
/// which makes reruns byte-comparable.
nlohmann::json to_json(const RunReport& report, bool include_timing = true);

std::string losses_csv(const RunReport& report);
std::string embeddings_csv(const RunReport& report);
std::string assignments_csv(const RunReport& report);

}  // namespace tfec
