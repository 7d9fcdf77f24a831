#include "tfec/pgcl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tfec/errors.hpp"
#include "tfec/rng.hpp"

namespace tfec::pgcl {

namespace {

constexpr double kCosEps = 1e-12;

std::size_t nearest_centroid(std::span<const double> x, const Matrix& centroids, double* dist2 = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < centroids.rows; ++p) {
    const double d = squared_distance(x, centroids.row(p));
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  if (dist2 != nullptr) *dist2 = best_d;
  return best;
}

Matrix plus_plus_seed(const Matrix& x, std::size_t k, Rng& rng) {
  Matrix c(k, x.cols);
  const std::size_t n = x.rows;
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = static_cast<std::size_t>(uniform_index(rng, 0, n - 1));
  for (std::size_t p = 0; p < k; ++p) {
    std::copy(x.row(pick).begin(), x.row(pick).end(), c.row(p).begin());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(x.row(i), c.row(p)));
      total += d2[i];
    }
    if (p + 1 == k) break;
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(uniform_index(rng, 0, n - 1));
      continue;
    }
    const double target = uniform_unit(rng) * total;
    double acc = 0.0;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc > target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    while (d2[pick] <= 0.0 && pick > 0) --pick;  // guard the rounding edge at acc == total
  }
  return c;
}

// Lloyd iterations from the given centroids. Returns WCSS.
double lloyd(const Matrix& x, Matrix& centroids, std::vector<int>& assign, std::vector<double>& trace,
             std::size_t max_iter, std::size_t& iterations) {
  const std::size_t n = x.rows;
  const std::size_t k = centroids.rows;
  const std::size_t d = x.cols;
  assign.assign(n, -1);
  trace.clear();
  iterations = 0;

  auto assign_step = [&]() {
    bool changed = false;
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dist = 0.0;
      const int a = static_cast<int>(nearest_centroid(x.row(i), centroids, &dist));
      wcss += dist;
      if (a != assign[i]) {
        assign[i] = a;
        changed = true;
      }
    }
    return std::pair{changed, wcss};
  };

  // moves the point farthest from its own centroid into each empty cluster
  auto repair = [&]() {
    std::vector<std::size_t> counts(k, 0);
    for (int a : assign) ++counts[static_cast<std::size_t>(a)];
    for (std::size_t p = 0; p < k; ++p) {
      if (counts[p] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto a = static_cast<std::size_t>(assign[i]);
        if (counts[a] <= 1) continue;
        const double dist = squared_distance(x.row(i), centroids.row(a));
        if (dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      if (far == n) continue;
      --counts[static_cast<std::size_t>(assign[far])];
      assign[far] = static_cast<int>(p);
      ++counts[p];
    }
    return counts;
  };

  auto recompute = [&](const std::vector<std::size_t>& counts) {
    std::fill(centroids.data.begin(), centroids.data.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = centroids.row(static_cast<std::size_t>(assign[i]));
      const auto xi = x.row(i);
      for (std::size_t j = 0; j < d; ++j) c[j] += xi[j];
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double inv = 1.0 / static_cast<double>(counts[p]);
      for (auto& v : centroids.row(p)) v *= inv;
    }
  };

  for (std::size_t it = 0; it < max_iter; ++it) {
    auto [changed, wcss] = assign_step();
    trace.push_back(wcss);
    ++iterations;
    if (!changed && it > 0) return wcss;

    recompute(repair());
  }

  // iteration budget exhausted: make assignments consistent with the centroids
  auto [unused, wcss] = assign_step();
  (void)unused;
  trace.push_back(wcss);
  const auto before = assign;
  const auto counts = repair();
  if (assign != before) {
    // only reachable with fewer distinct points than clusters
    recompute(counts);
    wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wcss += squared_distance(x.row(i), centroids.row(static_cast<std::size_t>(assign[i])));
    }
  }
  return wcss;
}

}  // namespace

Matrix fuse_views(const Matrix& r, const Matrix& r_prime) {
  require_same_shape(r, r_prime, "fuse_views");
  Matrix out(r.rows, r.cols);
  for (std::size_t k = 0; k < r.data.size(); ++k) out.data[k] = 0.5 * (r.data[k] + r_prime.data[k]);
  return out;
}

ClusterState kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& opts) {
  const std::size_t n = points.rows;
  if (k == 0) throw ConfigError("kmeans: K must be positive");
  if (k > n) throw ConfigError("kmeans: K=" + std::to_string(k) + " exceeds N=" + std::to_string(n));
  if (!std::all_of(points.data.begin(), points.data.end(), [](double v) { return std::isfinite(v); })) {
    throw NumericError("kmeans: non-finite input");
  }

  ClusterState best;
  double best_wcss = std::numeric_limits<double>::infinity();
  auto run = [&](Matrix centroids) {
    ClusterState s;
    s.wcss = lloyd(points, centroids, s.assignments, s.wcss_trace, std::max<std::size_t>(opts.max_iter, 1),
                   s.iterations);
    s.centroids = std::move(centroids);
    if (s.wcss < best_wcss) {
      best_wcss = s.wcss;
      best = std::move(s);
    }
  };

  if (opts.warm_start != nullptr) {
    if (opts.warm_start->rows != k || opts.warm_start->cols != points.cols) {
      throw ShapeError("kmeans: warm-start centroids have the wrong shape");
    }
    run(*opts.warm_start);
  } else {
    const std::size_t restarts = std::max<std::size_t>(opts.restarts, 1);
    for (std::size_t r = 0; r < restarts; ++r) {
      Rng rng = make_rng(seed, {0x6b6d65616e73ULL, r});
      run(plus_plus_seed(points, k, rng));
    }
  }

  best.confidences.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    best.confidences[i] = confidence(points.row(i), best.centroids.row(static_cast<std::size_t>(best.assignments[i])));
  }
  best.highconf.assign(k, {});
  best.highconf_centroids = Matrix(k, points.cols);
  return best;
}

double confidence(std::span<const double> point, std::span<const double> centroid) {
  if (point.size() != centroid.size()) throw ShapeError("confidence: dimension mismatch");
  return std::exp(-squared_distance(point, centroid));
}

void select_high_confidence(ClusterState& state, const Matrix& fused, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("confidence fraction q must lie in (0, 1]");
  const std::size_t k = state.k();
  if (fused.rows != state.assignments.size()) throw ShapeError("select_high_confidence: size mismatch");

  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < state.assignments.size(); ++i) {
    members[static_cast<std::size_t>(state.assignments[i])].push_back(i);
  }
  state.highconf.assign(k, {});
  state.highconf_centroids = Matrix(k, fused.cols);
  for (std::size_t p = 0; p < k; ++p) {
    auto& m = members[p];
    if (m.empty()) continue;
    std::stable_sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
      return state.confidences[a] > state.confidences[b];
    });
    const auto keep = std::min(m.size(), static_cast<std::size_t>(std::ceil(q * static_cast<double>(m.size()) - 1e-12)));
    std::vector<std::size_t> kept(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(keep, 1)));
    std::sort(kept.begin(), kept.end());
    auto c = state.highconf_centroids.row(p);
    for (auto i : kept) {
      const auto row = fused.row(i);
      for (std::size_t j = 0; j < c.size(); ++j) c[j] += row[j];
    }
    for (auto& v : c) v /= static_cast<double>(kept.size());
    state.highconf[p] = std::move(kept);
  }
}

ContrastivePairs build_pairs(const ClusterState& state) {
  ContrastivePairs pairs;
  for (const auto& members : state.highconf) {
    for (auto i : members) {
      for (auto j : members) pairs.positives.emplace_back(i, j);
    }
  }
  for (std::size_t p = 0; p < state.highconf.size(); ++p) {
    if (state.highconf[p].empty()) continue;
    for (std::size_t q = p + 1; q < state.highconf.size(); ++q) {
      if (!state.highconf[q].empty()) pairs.negatives.emplace_back(p, q);
    }
  }
  return pairs;
}

ContrastiveResult contrastive_loss(const ContrastivePairs& pairs, const Matrix& r, const Matrix& r_prime,
                                   const ClusterState& state, double alpha, bool with_grad) {
  require_same_shape(r, r_prime, "contrastive_loss");
  const std::size_t d = r.cols;
  ContrastiveResult out;
  if (with_grad) {
    out.grad_r = Matrix(r.rows, d);
    out.grad_r_prime = Matrix(r.rows, d);
  }

  if (!pairs.positives.empty()) {
    const double inv = 1.0 / static_cast<double>(pairs.positives.size());
    double sum = 0.0;
    for (const auto& [i, j] : pairs.positives) {
      const auto a = r.row(i);
      const auto b = r_prime.row(j);
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = a[c] - b[c];
        sum += diff * diff;
        if (with_grad) {
          out.grad_r(i, c) += 2.0 * diff * inv;
          out.grad_r_prime(j, c) -= 2.0 * diff * inv;
        }
      }
    }
    out.positive_term = sum * inv;
  }

  if (!pairs.negatives.empty()) {
    const std::size_t k = state.highconf.size();
    Matrix centroids(k, d);
    std::vector<double> norms(k, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const auto& members = state.highconf[p];
      if (members.empty()) continue;
      auto c = centroids.row(p);
      for (auto i : members) {
        for (std::size_t j = 0; j < d; ++j) c[j] += 0.5 * (r(i, j) + r_prime(i, j));
      }
      for (auto& v : c) v /= static_cast<double>(members.size());
      double sq = 0.0;
      for (double v : c) sq += v * v;
      norms[p] = std::sqrt(sq);
    }

    const double inv = 1.0 / static_cast<double>(pairs.negatives.size());
    Matrix grad_c(k, d);
    double sum = 0.0;
    for (const auto& [p, q] : pairs.negatives) {
      const auto a = centroids.row(p);
      const auto b = centroids.row(q);
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += a[j] * b[j];
      const double da = norms[p] + kCosEps;
      const double db = norms[q] + kCosEps;
      const double cosine = dot / (da * db);
      sum += cosine;
      if (with_grad) {
        // d cos / d a = b / (da db) - cos * a / (|a| da), the second term vanishing at |a| = 0
        const double wa = norms[p] > 0.0 ? cosine / (norms[p] * da) : 0.0;
        const double wb = norms[q] > 0.0 ? cosine / (norms[q] * db) : 0.0;
        auto ga = grad_c.row(p);
        auto gb = grad_c.row(q);
        for (std::size_t j = 0; j < d; ++j) {
          ga[j] += alpha * inv * (b[j] / (da * db) - wa * a[j]);
          gb[j] += alpha * inv * (a[j] / (da * db) - wb * b[j]);
        }
      }
    }
    out.negative_term = sum * inv;

    if (with_grad) {
      for (std::size_t p = 0; p < k; ++p) {
        const auto& members = state.highconf[p];
        if (members.empty()) continue;
        const double share = 0.5 / static_cast<double>(members.size());
        const auto g = grad_c.row(p);
        for (auto i : members) {
          for (std::size_t j = 0; j < d; ++j) {
            out.grad_r(i, j) += share * g[j];
            out.grad_r_prime(i, j) += share * g[j];
          }
        }
      }
    }
  }

  out.value = out.positive_term + alpha * out.negative_term;
  return out;
}

}  // namespace tfec::pgcl
