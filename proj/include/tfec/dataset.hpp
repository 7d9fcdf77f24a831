#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tfec {

/// One multivariate series, T timesteps by F channels, stored time-major
/// (`values[t * channels + c]`).
struct Series {
  std::size_t length = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  Series() = default;
  Series(std::size_t t, std::size_t f, double fill = 0.0) : length(t), channels(f), values(t * f, fill) {}

  double& operator()(std::size_t t, std::size_t c) { return values[t * channels + c]; }
  double operator()(std::size_t t, std::size_t c) const { return values[t * channels + c]; }
};

/// An equal-length corpus of N series with optional class labels.
///
/// Samples are stored row-major as (series, timestep, channel). Labels are
/// dense integers in [0, class_count), assigned in order of first appearance
/// in the source file; they are used only for evaluation.
struct MTSDataset {
  std::string name;
  std::size_t size = 0;      // N
  std::size_t length = 0;    // T
  std::size_t channels = 0;  // F
  std::vector<double> samples;
  std::optional<std::vector<int>> labels;
  std::optional<std::size_t> class_count;
  /// Original label strings, indexed by dense label.
  std::vector<std::string> class_names;

  std::size_t series_stride() const { return length * channels; }
  std::span<const double> series_span(std::size_t i) const {
    return {samples.data() + i * series_stride(), series_stride()};
  }
  std::span<double> series_span(std::size_t i) {
    return {samples.data() + i * series_stride(), series_stride()};
  }
  Series series(std::size_t i) const;
};

struct DatasetStats {
  std::string name;
  std::size_t n = 0;
  std::size_t length = 0;
  std::size_t channels = 0;
  std::size_t class_count = 0;

  bool operator==(const DatasetStats&) const = default;
};

/// Parses UEA/sktime `.ts` text. Throws ParseError (with line number) on
/// malformed content and UnsupportedCorpus for variable-length or
/// timestamped corpora.
MTSDataset parse_ts(std::string_view text);

/// Reads and parses a `.ts` file. Throws IoError if the file cannot be read.
/// The dataset name defaults to the `@problemName` tag, falling back to the
/// file stem.
MTSDataset load_ts(const std::filesystem::path& path);

/// Loads a corpus given either a `.ts` file, a `<Name>_TRAIN.ts` file whose
/// `_TEST` sibling should be appended, or a directory holding the split files.
/// With `merge_splits` false only the named file (or the TRAIN split of a
/// directory) is read.
MTSDataset load_corpus(const std::filesystem::path& path, bool merge_splits);

/// Concatenates two corpora with identical shape. Labels are re-densified by
/// first appearance over the concatenation, using the original label strings.
MTSDataset concat(const MTSDataset& a, const MTSDataset& b);

/// Canonical `.ts` rendering; parse_ts(to_ts(ds)) reproduces ds exactly.
std::string to_ts(const MTSDataset& ds);

/// Per-series, per-channel z-normalization (population std). Channels with
/// std below 1e-8 become all zeros.
MTSDataset znormalize(const MTSDataset& ds);

DatasetStats stats(const MTSDataset& ds);

}  // namespace tfec
