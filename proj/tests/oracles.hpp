#pragma once

// Reference computations written independently of the library, used to
// check it. Everything here is deliberately naive.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "tfec/dataset.hpp"

namespace oracle {

using cplx = std::complex<double>;

// O(T^2) direct summation; the angle index is reduced mod T in integers so
// large T does not lose precision.
inline std::vector<cplx> direct_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
      const auto idx = static_cast<long double>((k * t) % n);
      const long double ang = -2.0L * std::numbers::pi_v<long double> * idx / static_cast<long double>(n);
      re += static_cast<long double>(x[t]) * std::cos(ang);
      im += static_cast<long double>(x[t]) * std::sin(ang);
    }
    out[k] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

// Number of samples matched by a cluster -> class map (map[c] = -1 means
// the cluster is left unmatched).
inline int matched(const std::vector<int>& pred, const std::vector<int>& truth, const std::vector<int>& map) {
  int m = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (map[static_cast<std::size_t>(pred[i])] == truth[i]) ++m;
  }
  return m;
}

inline int max_label(const std::vector<int>& v) { return *std::max_element(v.begin(), v.end()); }

// Every one-to-one map from cluster ids to class ids, generated by permuting
// max(Kp, Kt) slots; slots past Kt mean "unmatched".
template <typename Visit>
void for_each_mapping(int kp, int kt, Visit visit) {
  const int n = std::max(kp, kt);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<int> map(static_cast<std::size_t>(kp));
    for (int c = 0; c < kp; ++c) map[static_cast<std::size_t>(c)] = perm[static_cast<std::size_t>(c)] < kt ? perm[static_cast<std::size_t>(c)] : -1;
    visit(map);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

inline double brute_acc(const std::vector<int>& pred, const std::vector<int>& truth) {
  int best = 0;
  for_each_mapping(max_label(pred) + 1, max_label(truth) + 1,
                   [&](const std::vector<int>& map) { best = std::max(best, matched(pred, truth, map)); });
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

// Macro-F1 over the classes that actually occur in `truth`.
inline double f1_under(const std::vector<int>& pred, const std::vector<int>& truth, const std::vector<int>& map) {
  const std::set<int> classes(truth.begin(), truth.end());
  double total = 0.0;
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const bool said = map[static_cast<std::size_t>(pred[i])] == c;
      const bool is = truth[i] == c;
      if (said && is) tp += 1;
      if (said && !is) fp += 1;
      if (!said && is) fn += 1;
    }
    if (tp > 0) total += 2 * tp / (2 * tp + fp + fn);
  }
  return total / static_cast<double>(classes.size());
}

// F1 values reachable under every count-maximising mapping. When several
// mappings tie on matched count they may disagree on F1; the library takes
// the largest.
inline std::vector<double> brute_f1_candidates(const std::vector<int>& pred, const std::vector<int>& truth) {
  int best = -1;
  std::vector<double> values;
  for_each_mapping(max_label(pred) + 1, max_label(truth) + 1, [&](const std::vector<int>& map) {
    const int m = matched(pred, truth, map);
    if (m > best) {
      best = m;
      values.clear();
    }
    if (m == best) values.push_back(f1_under(pred, truth, map));
  });
  return values;
}

inline double entropy_of(const std::map<std::vector<int>, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [key, c] : counts) h -= c / n * std::log(c / n);
  return h;
}

// NMI via I = H(U) + H(V) - H(U,V), sqrt normalisation.
inline double entropy_nmi(const std::vector<int>& u, const std::vector<int>& v) {
  std::map<std::vector<int>, double> cu, cv, cj;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cu[{u[i]}] += 1;
    cv[{v[i]}] += 1;
    cj[{u[i], v[i]}] += 1;
  }
  const double n = static_cast<double>(u.size());
  const double hu = entropy_of(cu, n), hv = entropy_of(cv, n), hj = entropy_of(cj, n);
  if (hu == 0.0 || hv == 0.0) return (hu == 0.0 && hv == 0.0) ? 1.0 : 0.0;
  return (hu + hv - hj) / std::sqrt(hu * hv);
}

// Random partition of n items into labels [0, k).
inline std::vector<int> random_labels(std::mt19937_64& g, std::size_t n, int k) {
  std::vector<int> out(n);
  for (auto& v : out) v = static_cast<int>(g() % static_cast<std::uint64_t>(k));
  return out;
}

// Two-class univariate corpus: class 0 is a sinusoid at bin 3, class 1 at
// bin 11, random phase, additive Gaussian noise.
inline tfec::MTSDataset two_tone(std::uint64_t seed, std::size_t n = 20, std::size_t t = 64, double sigma = 0.1) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  tfec::MTSDataset ds;
  ds.name = "TwoTone";
  ds.size = n;
  ds.length = t;
  ds.channels = 1;
  ds.samples.resize(n * t);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    const double bin = cls == 0 ? 3.0 : 11.0;
    const double ph = phase(g);
    for (std::size_t s = 0; s < t; ++s) {
      ds.samples[i * t + s] =
          std::sin(2.0 * std::numbers::pi * bin * static_cast<double>(s) / static_cast<double>(t) + ph) + noise(g);
    }
    labels[i] = cls;
  }
  ds.labels = labels;
  ds.class_count = 2;
  ds.class_names = {"low", "high"};
  return ds;
}

// Random corpus with F channels and K labels.
inline tfec::MTSDataset random_corpus(std::uint64_t seed, std::size_t n, std::size_t t, std::size_t f, int k) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  tfec::MTSDataset ds;
  ds.name = "Random";
  ds.size = n;
  ds.length = t;
  ds.channels = f;
  ds.samples.resize(n * t * f);
  for (auto& v : ds.samples) v = nd(g);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(k));
  ds.labels = labels;
  ds.class_count = static_cast<std::size_t>(k);
  for (int c = 0; c < k; ++c) ds.class_names.push_back("c" + std::to_string(c));
  return ds;
}

}  // namespace oracle
