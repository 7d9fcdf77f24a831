#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tfec::metrics {

/// Predicted clusters and ground-truth classes for the same N samples.
/// Labels must be non-negative; they need not be dense.
struct PartitionPair {
  std::vector<int> predicted;
  std::vector<int> truth;
};

/// Contingency counts: rows = predicted clusters, cols = truth classes.
std::vector<std::vector<double>> contingency(const PartitionPair& pp);

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres,
/// O(n^3)). Returns, for each row, the column it is matched to.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost);

/// Cluster -> class mapping maximising matched counts; ties are broken by the
/// larger macro-F1, so the result does not depend on how labels are numbered.
/// Clusters left without a class (when Kp > Kt) map to -1.
std::vector<int> best_mapping(const PartitionPair& pp);

/// Clustering accuracy under the optimal one-to-one mapping.
double acc(const PartitionPair& pp);

/// I(U;V) / sqrt(H(U) H(V)), natural logs. Degenerate entropies give 1 if
/// both partitions are single-cluster, else 0.
double nmi(const PartitionPair& pp);

/// Macro-F1 over truth classes after the optimal mapping.
double f1(const PartitionPair& pp);

struct Scores {
  double acc = 0.0;
  double nmi = 0.0;
  double f1 = 0.0;
};

Scores evaluate(std::span<const int> predicted, std::span<const int> truth);

}  // namespace tfec::metrics
