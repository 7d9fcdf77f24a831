#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tfec/matrix.hpp"

namespace tfec::pgcl {

/// Result of clustering the fused representations plus the confidence-gated
/// subsets used to build contrastive pairs.
struct ClusterState {
  Matrix centroids;              // K x D
  std::vector<int> assignments;  // argmin_p |R_i - c_p|
  std::vector<double> confidences;
  std::vector<std::vector<std::size_t>> highconf;  // per cluster, ascending index
  Matrix highconf_centroids;                       // K x D
  double wcss = 0.0;
  std::vector<double> wcss_trace;  // after each assignment step of the chosen run
  std::size_t iterations = 0;

  std::size_t k() const { return centroids.rows; }
};

/// R = (r + r') / 2
Matrix fuse_views(const Matrix& r, const Matrix& r_prime);

struct KMeansOptions {
  std::size_t max_iter = 100;
  std::size_t restarts = 10;
  /// When set (K x D), run a single Lloyd pass from these centroids instead of
  /// k-means++ restarts; keeps cluster indices stable across refreshes.
  const Matrix* warm_start = nullptr;
};

/// k-means++ seeding and Lloyd iterations; best of `restarts` by WCSS.
/// Empty clusters take the point farthest from its centroid. Confidences are
/// filled in; highconf is left empty. Throws ConfigError if K > N or K == 0
/// and NumericError on non-finite points.
ClusterState kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& opts = {});

/// exp(-|R_i - c_p|^2)
double confidence(std::span<const double> point, std::span<const double> centroid);

/// Keeps the top ceil(q * n_p) members of each cluster by confidence (ties to
/// the lower index) and sets highconf_centroids to their mean representation.
void select_high_confidence(ClusterState& state, const Matrix& fused, double q);

struct ContrastivePairs {
  /// (i, j): view-a encoding of i with view-b encoding of j, same cluster.
  std::vector<std::pair<std::size_t, std::size_t>> positives;
  /// (p, q), p < q: distinct clusters whose high-confidence centroids repel.
  std::vector<std::pair<std::size_t, std::size_t>> negatives;
};

ContrastivePairs build_pairs(const ClusterState& state);

struct ContrastiveResult {
  double value = 0.0;
  double positive_term = 0.0;
  double negative_term = 0.0;  // mean cosine, before scaling by alpha
  Matrix grad_r;               // d value / d r
  Matrix grad_r_prime;         // d value / d r'
};

/// mean_P |r_i - r'_j|^2 + alpha * mean_N cos(c_p, c_q), with c_p the mean of
/// (r_i + r'_i)/2 over highconf[p], recomputed from r and r' so the
/// repulsion term is differentiable. An empty side contributes 0.
ContrastiveResult contrastive_loss(const ContrastivePairs& pairs, const Matrix& r, const Matrix& r_prime,
                                   const ClusterState& state, double alpha, bool with_grad = true);

}  // namespace tfec::pgcl
