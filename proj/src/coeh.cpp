#include "tfec/coeh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "tfec/errors.hpp"

namespace tfec::coeh {

namespace {

std::atomic<std::uint64_t> g_mix_calls{0};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Indices of the `count` nearest samples to `anchor`, closest first, ties by index.
std::vector<std::size_t> nearest(const Matrix& d, std::size_t anchor, std::size_t count) {
  std::vector<std::size_t> idx;
  idx.reserve(d.rows - 1);
  for (std::size_t j = 0; j < d.rows; ++j) {
    if (j != anchor) idx.push_back(j);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d(anchor, a) < d(anchor, b); });
  idx.resize(std::min(count, idx.size()));
  return idx;
}

double knn_radius(const Matrix& d, std::size_t i, std::size_t count) {
  const auto nn = nearest(d, i, count);
  return nn.empty() ? 0.0 : d(i, nn.back());
}

void check_neighbor_args(std::size_t n, std::size_t anchor, std::size_t count, double gamma) {
  if (anchor >= n) throw ConfigError("select_neighbors: anchor index out of range");
  if (count >= n) {
    throw ConfigError("select_neighbors: neighbor count P=" + std::to_string(count) + " must be below N=" +
                      std::to_string(n));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("select_neighbors: gamma must lie in [0, 1]");
}

NeighborSet gated_neighbors(const Matrix& d, std::size_t anchor, std::size_t count, double gamma, double gate) {
  NeighborSet set;
  set.anchor = anchor;
  if (count == 0 || gamma == 0.0) return set;

  std::vector<std::size_t> kept;
  for (auto j : nearest(d, anchor, count)) {
    if (d(anchor, j) <= gate) kept.push_back(j);
  }
  if (kept.empty()) return set;

  double tau = 0.0;
  for (auto j : kept) tau += d(anchor, j);
  tau /= static_cast<double>(kept.size());

  std::vector<double> w(kept.size());
  if (tau <= 0.0) {
    // every kept distance is zero: the softmin is uniform
    std::fill(w.begin(), w.end(), 1.0);
  } else {
    const double dmin = d(anchor, kept.front());
    for (std::size_t k = 0; k < kept.size(); ++k) w[k] = std::exp(-(d(anchor, kept[k]) - dmin) / tau);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t k = 0; k < kept.size(); ++k) set.neighbors.push_back({kept[k], gamma * w[k] / total});
  return set;
}

double median_radius(const Matrix& d, std::size_t count) {
  std::vector<double> radii(d.rows);
  for (std::size_t i = 0; i < d.rows; ++i) radii[i] = knn_radius(d, i, count);
  return median(std::move(radii));
}

}  // namespace

std::size_t CoehConfig::resolved_crop(std::size_t series_length) const {
  const std::size_t l = crop_length == 0
                            ? static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(series_length)))
                            : crop_length;
  if (l < 1 || l > series_length) {
    throw ConfigError("crop length L=" + std::to_string(l) + " must lie in [1, T=" + std::to_string(series_length) +
                      "]");
  }
  return l;
}

Matrix pairwise_distances(const Matrix& points) {
  Matrix d(points.rows, points.rows);
  for (std::size_t i = 0; i < points.rows; ++i) {
    for (std::size_t j = i + 1; j < points.rows; ++j) {
      const double v = std::sqrt(squared_distance(points.row(i), points.row(j)));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Matrix pairwise_distances(const MTSDataset& ds) {
  Matrix flat(ds.size, ds.series_stride());
  flat.data = ds.samples;
  return pairwise_distances(flat);
}

NeighborSet select_neighbors(const Matrix& distances, std::size_t anchor, std::size_t count, double gamma) {
  check_neighbor_args(distances.rows, anchor, count, gamma);
  if (count == 0) return {anchor, {}};
  return gated_neighbors(distances, anchor, count, gamma, median_radius(distances, count));
}

NeighborSet select_neighbors(const MTSDataset& ds, std::size_t anchor, std::size_t count, double gamma) {
  return select_neighbors(pairwise_distances(ds), anchor, count, gamma);
}

std::vector<NeighborSet> select_all_neighbors(const Matrix& distances, std::size_t count, double gamma) {
  const std::size_t n = distances.rows;
  std::vector<NeighborSet> out;
  out.reserve(n);
  if (n == 0) return out;
  check_neighbor_args(n, 0, count, gamma);
  const double gate = count == 0 ? 0.0 : median_radius(distances, count);
  for (std::size_t i = 0; i < n; ++i) out.push_back(gated_neighbors(distances, i, count, gamma, gate));
  return out;
}

Series crop_at(const Series& x, std::size_t start, std::size_t crop_length) {
  if (start + crop_length > x.length) throw ConfigError("crop window exceeds the series length");
  Series out(crop_length, x.channels);
  std::copy_n(x.values.begin() + static_cast<std::ptrdiff_t>(start * x.channels), crop_length * x.channels,
              out.values.begin());
  return out;
}

CropResult aligned_crop(const Series& anchor, std::span<const Series> neighbors, std::size_t crop_length, Rng& rng) {
  const std::size_t t = anchor.length;
  if (crop_length < 1 || crop_length > t) {
    throw ConfigError("aligned_crop: L=" + std::to_string(crop_length) + " must lie in [1, T=" + std::to_string(t) +
                      "]");
  }
  for (const auto& nb : neighbors) {
    if (nb.length != t || nb.channels != anchor.channels) throw ShapeError("aligned_crop: neighbor shape differs");
  }
  CropResult r;
  r.window_start = static_cast<std::size_t>(uniform_index(rng, 0, t - crop_length));
  r.anchor = crop_at(anchor, r.window_start, crop_length);
  r.neighbors.reserve(neighbors.size());
  for (const auto& nb : neighbors) r.neighbors.push_back(crop_at(nb, r.window_start, crop_length));
  return r;
}

MultiSpectrum spectra_of(const Series& x) {
  MultiSpectrum out(x.channels);
  std::vector<double> channel(x.length);
  for (std::size_t c = 0; c < x.channels; ++c) {
    for (std::size_t t = 0; t < x.length; ++t) channel[t] = x(t, c);
    out[c] = dft_forward(channel);
  }
  return out;
}

Series synthesize(const MultiSpectrum& spectra, double* max_imag_residual) {
  if (spectra.empty()) throw ShapeError("synthesize: no channels");
  const std::size_t l = spectra.front().size();
  Series out(l, spectra.size());
  double residual = 0.0;
  for (std::size_t c = 0; c < spectra.size(); ++c) {
    if (spectra[c].size() != l) throw ShapeError("synthesize: channel spectra differ in length");
    auto inv = dft_inverse(spectra[c]);
    residual = std::max(residual, inv.imag_residual);
    for (std::size_t t = 0; t < l; ++t) out(t, c) = inv.signal[t];
  }
  if (max_imag_residual != nullptr) *max_imag_residual = residual;
  return out;
}

MultiSpectrum frequency_mix(const MultiSpectrum& anchor,
                            std::span<const std::pair<MultiSpectrum, double>> neighbors) {
  g_mix_calls.fetch_add(1, std::memory_order_relaxed);
  MultiSpectrum out = anchor;
  for (const auto& [spec, delta] : neighbors) {
    if (spec.size() != anchor.size()) throw ShapeError("frequency_mix: channel count mismatch");
    for (std::size_t c = 0; c < anchor.size(); ++c) {
      if (spec[c].size() != anchor[c].size()) throw ShapeError("frequency_mix: spectrum length mismatch");
      for (std::size_t k = 0; k < anchor[c].size(); ++k) out[c][k] += delta * spec[c][k];
    }
  }
  return out;
}

std::uint64_t frequency_mix_calls() { return g_mix_calls.load(std::memory_order_relaxed); }

ViewPair coenhance(const MTSDataset& ds, std::size_t i, const NeighborSet& neighbors, const CoehConfig& cfg,
                   Rng& rng) {
  if (i >= ds.size) throw ConfigError("coenhance: sample index out of range");
  const std::size_t l = cfg.resolved_crop(ds.length);
  const Series anchor = ds.series(i);
  std::vector<Series> nb_series;
  nb_series.reserve(neighbors.neighbors.size());
  for (const auto& nb : neighbors.neighbors) nb_series.push_back(ds.series(nb.index));

  auto crop = aligned_crop(anchor, nb_series, l, rng);

  std::vector<std::pair<MultiSpectrum, double>> mixed_in;
  mixed_in.reserve(crop.neighbors.size());
  for (std::size_t p = 0; p < crop.neighbors.size(); ++p) {
    mixed_in.emplace_back(spectra_of(crop.neighbors[p]), neighbors.neighbors[p].weight);
  }
  const auto blended = frequency_mix(spectra_of(crop.anchor), mixed_in);

  ViewPair out;
  out.view_b.values = synthesize(blended);
  out.view_b.window_start = crop.window_start;
  out.view_b.source = i;
  out.view_a.values = std::move(crop.anchor);
  out.view_a.window_start = crop.window_start;
  out.view_a.source = i;
  return out;
}

ViewPair coenhance(const MTSDataset& ds, std::size_t i, const CoehConfig& cfg, Rng& rng) {
  return coenhance(ds, i, select_neighbors(ds, i, cfg.neighbors, cfg.gamma), cfg, rng);
}

BaselineKind parse_baseline_kind(std::string_view name) {
  if (name == "jitter") return BaselineKind::jitter;
  if (name == "scaling") return BaselineKind::scaling;
  if (name == "permutation") return BaselineKind::permutation;
  if (name == "crop") return BaselineKind::crop;
  if (name == "mask") return BaselineKind::mask;
  throw ConfigError("unknown augmentation kind '" + std::string(name) + "'");
}

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::jitter: return "jitter";
    case BaselineKind::scaling: return "scaling";
    case BaselineKind::permutation: return "permutation";
    case BaselineKind::crop: return "crop";
    case BaselineKind::mask: return "mask";
  }
  return "unknown";
}

Series baseline_augment(const Series& x, BaselineKind kind, Rng& rng, double strength) {
  if (!(strength > 0.0)) throw ConfigError("baseline_augment: strength must be positive");
  const std::size_t t_len = x.length;
  const std::size_t f = x.channels;
  Series out = x;
  switch (kind) {
    case BaselineKind::jitter:
      for (auto& v : out.values) v += strength * standard_normal(rng);
      break;
    case BaselineKind::scaling:
      for (std::size_t c = 0; c < f; ++c) {
        const double factor = 1.0 + strength * standard_normal(rng);
        for (std::size_t t = 0; t < t_len; ++t) out(t, c) *= factor;
      }
      break;
    case BaselineKind::permutation: {
      const auto segments = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(1.0 / strength)), 1, t_len);
      std::vector<std::size_t> order(segments);
      std::iota(order.begin(), order.end(), 0);
      tfec::shuffle(order.begin(), order.end(), rng);
      auto bound = [&](std::size_t s) { return s * t_len / segments; };
      std::size_t dst = 0;
      for (auto s : order) {
        for (std::size_t t = bound(s); t < bound(s + 1); ++t, ++dst) {
          for (std::size_t c = 0; c < f; ++c) out(dst, c) = x(t, c);
        }
      }
      break;
    }
    case BaselineKind::crop: {
      const double keep = std::max(0.0, 1.0 - strength) * static_cast<double>(t_len);
      const auto width = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(keep)), 1, t_len);
      const auto start = static_cast<std::size_t>(uniform_index(rng, 0, t_len - width));
      for (std::size_t t = 0; t < t_len; ++t) {
        if (t < start || t >= start + width) {
          for (std::size_t c = 0; c < f; ++c) out(t, c) = 0.0;
        }
      }
      break;
    }
    case BaselineKind::mask: {
      const auto span = std::min<std::size_t>(
          t_len, static_cast<std::size_t>(std::llround(std::min(strength, 1.0) * static_cast<double>(t_len))));
      const auto start = static_cast<std::size_t>(uniform_index(rng, 0, t_len - span));
      for (std::size_t t = start; t < start + span; ++t) {
        for (std::size_t c = 0; c < f; ++c) out(t, c) = 0.0;
      }
      break;
    }
  }
  return out;
}

}  // namespace tfec::coeh
