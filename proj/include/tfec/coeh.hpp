#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tfec/dataset.hpp"
#include "tfec/fft.hpp"
#include "tfec/matrix.hpp"
#include "tfec/rng.hpp"

namespace tfec::coeh {

struct Neighbor {
  std::size_t index = 0;
  double weight = 0.0;  // delta_p in (0, 1]
};

/// Neighbors of one anchor with their mixing weights. Weights are strictly
/// positive and sum to at most the mixing budget gamma.
struct NeighborSet {
  std::size_t anchor = 0;
  std::vector<Neighbor> neighbors;
};

/// A cropped (and possibly spectrally enhanced) segment of one series.
struct EnhancedSample {
  Series values;  // L x F
  std::size_t window_start = 0;
  std::size_t source = 0;
};

struct CoehConfig {
  std::size_t crop_length = 0;  // L; 0 means ceil(0.9 T)
  std::size_t neighbors = 3;    // P
  double gamma = 0.2;           // mixing budget

  std::size_t resolved_crop(std::size_t series_length) const;
};

/// Per-channel spectra of one segment: spectra[c] has L bins.
using MultiSpectrum = std::vector<Spectrum>;

/// Pairwise Euclidean distances between the rows of `points`.
Matrix pairwise_distances(const Matrix& points);

/// Pairwise distances between flattened series of a corpus.
Matrix pairwise_distances(const MTSDataset& ds);

/// Density-gated nearest neighbors of `anchor` with softmin weights scaled by
/// gamma. Candidates are the P nearest samples; one is kept only if its
/// distance is at most the median (over all samples) P-NN radius. Weights are
/// gamma * exp(-d/tau) / sum exp(-d/tau) with tau the mean kept distance.
NeighborSet select_neighbors(const Matrix& distances, std::size_t anchor, std::size_t count, double gamma);
NeighborSet select_neighbors(const MTSDataset& ds, std::size_t anchor, std::size_t count, double gamma);

/// Neighbor sets for every sample, sharing one distance matrix and one
/// median-radius computation.
std::vector<NeighborSet> select_all_neighbors(const Matrix& distances, std::size_t count, double gamma);

struct CropResult {
  Series anchor;
  std::vector<Series> neighbors;
  std::size_t window_start = 0;
};

/// Draws one window start uniformly from [0, T - L] and applies it to the
/// anchor and every neighbor.
CropResult aligned_crop(const Series& anchor, std::span<const Series> neighbors, std::size_t crop_length, Rng& rng);

/// Crops `x` at a given window.
Series crop_at(const Series& x, std::size_t start, std::size_t crop_length);

MultiSpectrum spectra_of(const Series& x);
Series synthesize(const MultiSpectrum& spectra, double* max_imag_residual = nullptr);

/// F = q_i + sum_p delta_p q_<i,p>, bin-wise per channel.
MultiSpectrum frequency_mix(const MultiSpectrum& anchor,
                            std::span<const std::pair<MultiSpectrum, double>> neighbors);

/// Number of frequency_mix calls made by this process (instrumentation).
std::uint64_t frequency_mix_calls();

struct ViewPair {
  EnhancedSample view_a;  // aligned crop of the anchor
  EnhancedSample view_b;  // inverse transform of the mixed spectrum
};

/// Builds the temporal view and the frequency-enhanced view of sample i.
ViewPair coenhance(const MTSDataset& ds, std::size_t i, const NeighborSet& neighbors, const CoehConfig& cfg,
                   Rng& rng);
ViewPair coenhance(const MTSDataset& ds, std::size_t i, const CoehConfig& cfg, Rng& rng);

enum class BaselineKind { jitter, scaling, permutation, crop, mask };

BaselineKind parse_baseline_kind(std::string_view name);
std::string_view to_string(BaselineKind kind);

/// Classical augmentations used as comparison baselines.
///   jitter:      x + N(0, s^2)
///   scaling:     each channel times N(1, s^2)
///   permutation: ceil(1/s) time segments, shuffled
///   crop:        keep a random (1-s)T window in place, zero elsewhere
///   mask:        zero a random contiguous span of s*T timesteps
Series baseline_augment(const Series& x, BaselineKind kind, Rng& rng, double strength);

}  // namespace tfec::coeh
