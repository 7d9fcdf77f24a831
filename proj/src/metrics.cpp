#include "tfec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tfec/errors.hpp"

namespace tfec::metrics {

namespace {

std::vector<int> densify(const std::vector<int>& labels, std::size_t& count) {
  std::map<int, int> ids;
  for (int l : labels) {
    if (l < 0) throw ConfigError("metrics: labels must be non-negative");
    ids.emplace(l, 0);
  }
  int next = 0;
  for (auto& [k, v] : ids) v = next++;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids[l]);
  count = ids.size();
  return out;
}

void validate(const PartitionPair& pp) {
  if (pp.predicted.size() != pp.truth.size()) throw ShapeError("metrics: predicted and truth lengths differ");
  if (pp.predicted.empty()) throw ShapeError("metrics: empty partition");
}

struct Dense {
  std::vector<int> pred, truth;
  std::size_t kp = 0, kt = 0;
};

Dense dense(const PartitionPair& pp) {
  validate(pp);
  Dense d;
  d.pred = densify(pp.predicted, d.kp);
  d.truth = densify(pp.truth, d.kt);
  return d;
}

std::vector<std::vector<double>> table(const Dense& d) {
  std::vector<std::vector<double>> t(d.kp, std::vector<double>(d.kt, 0.0));
  for (std::size_t i = 0; i < d.pred.size(); ++i) {
    t[static_cast<std::size_t>(d.pred[i])][static_cast<std::size_t>(d.truth[i])] += 1.0;
  }
  return t;
}

// Mapping from dense predicted ids to dense truth ids (-1 = unmatched).
std::vector<int> dense_mapping(const Dense& d) {
  const auto t = table(d);
  const std::size_t n = std::max(d.kp, d.kt);
  std::vector<double> rows(d.kp, 0.0), cols(d.kt, 0.0);
  for (std::size_t p = 0; p < d.kp; ++p) {
    for (std::size_t c = 0; c < d.kt; ++c) {
      rows[p] += t[p][c];
      cols[c] += t[p][c];
    }
  }
  // Matched count first. Among mappings tied on count, prefer the larger
  // macro-F1. Its per-pair term 2 n_pc / (|p| + |c|) is at most 1, so over
  // at most n pairs, scaled by 1 / (n + 1), it stays below one sample.
  // Without this the choice among ties would depend on label order.
  const double eps = 1.0 / static_cast<double>(n + 1);
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (std::size_t p = 0; p < d.kp; ++p) {
    for (std::size_t c = 0; c < d.kt; ++c) {
      cost[p][c] = -(t[p][c] + eps * 2.0 * t[p][c] / (rows[p] + cols[c]));
    }
  }
  const auto match = hungarian(cost);
  std::vector<int> mapping(d.kp, -1);
  for (std::size_t p = 0; p < d.kp; ++p) {
    if (match[p] < d.kt) mapping[p] = static_cast<int>(match[p]);
  }
  return mapping;
}

double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

}  // namespace

std::vector<std::vector<double>> contingency(const PartitionPair& pp) { return table(dense(pp)); }

std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  for (const auto& row : cost) {
    if (row.size() != n) throw ShapeError("hungarian: cost matrix must be square");
  }
  // potentials formulation, 1-based with a sentinel column 0
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

std::vector<int> best_mapping(const PartitionPair& pp) {
  // expressed in the caller's original label values
  const auto d = dense(pp);
  const auto m = dense_mapping(d);
  std::map<int, int> pred_ids, truth_ids;
  for (std::size_t i = 0; i < d.pred.size(); ++i) {
    pred_ids[d.pred[i]] = pp.predicted[i];
    truth_ids[d.truth[i]] = pp.truth[i];
  }
  int max_pred = *std::max_element(pp.predicted.begin(), pp.predicted.end());
  std::vector<int> out(static_cast<std::size_t>(max_pred) + 1, -1);
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (m[p] >= 0) out[static_cast<std::size_t>(pred_ids[static_cast<int>(p)])] = truth_ids[m[p]];
  }
  return out;
}

double acc(const PartitionPair& pp) {
  const auto d = dense(pp);
  const auto t = table(d);
  const auto m = dense_mapping(d);
  double matched = 0.0;
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (m[p] >= 0) matched += t[p][static_cast<std::size_t>(m[p])];
  }
  return matched / static_cast<double>(d.pred.size());
}

double nmi(const PartitionPair& pp) {
  const auto d = dense(pp);
  const auto t = table(d);
  const double n = static_cast<double>(d.pred.size());
  std::vector<double> rows(d.kp, 0.0), cols(d.kt, 0.0);
  for (std::size_t p = 0; p < d.kp; ++p) {
    for (std::size_t c = 0; c < d.kt; ++c) {
      rows[p] += t[p][c];
      cols[c] += t[p][c];
    }
  }
  const double hu = entropy(rows, n);
  const double hv = entropy(cols, n);
  if (hu <= 0.0 || hv <= 0.0) return (hu <= 0.0 && hv <= 0.0) ? 1.0 : 0.0;
  double mi = 0.0;
  for (std::size_t p = 0; p < d.kp; ++p) {
    for (std::size_t c = 0; c < d.kt; ++c) {
      const double nij = t[p][c];
      if (nij > 0.0) mi += (nij / n) * std::log(n * nij / (rows[p] * cols[c]));
    }
  }
  return std::clamp(mi / std::sqrt(hu * hv), 0.0, 1.0);
}

double f1(const PartitionPair& pp) {
  const auto d = dense(pp);
  const auto m = dense_mapping(d);
  std::vector<double> tp(d.kt, 0.0), predicted(d.kt, 0.0), actual(d.kt, 0.0);
  for (std::size_t i = 0; i < d.pred.size(); ++i) {
    const int mapped = m[static_cast<std::size_t>(d.pred[i])];
    const auto truth = static_cast<std::size_t>(d.truth[i]);
    actual[truth] += 1.0;
    if (mapped < 0) continue;
    predicted[static_cast<std::size_t>(mapped)] += 1.0;
    if (static_cast<std::size_t>(mapped) == truth) tp[truth] += 1.0;
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < d.kt; ++c) {
    if (tp[c] <= 0.0) continue;
    const double precision = tp[c] / predicted[c];
    const double recall = tp[c] / actual[c];
    sum += 2.0 * precision * recall / (precision + recall);
  }
  return sum / static_cast<double>(d.kt);
}

Scores evaluate(std::span<const int> predicted, std::span<const int> truth) {
  PartitionPair pp{{predicted.begin(), predicted.end()}, {truth.begin(), truth.end()}};
  return {acc(pp), nmi(pp), f1(pp)};
}

}  // namespace tfec::metrics
