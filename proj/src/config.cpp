#include <algorithm>
#include <cmath>
#include <type_traits>
#include <string>
#include <vector>

#include "tfec/coeh.hpp"
#include "tfec/errors.hpp"
#include "tfec/trainer.hpp"

namespace tfec {

namespace {

using nlohmann::json;

std::string join_errors(const std::vector<std::string>& errors) {
  std::string msg = "invalid configuration:";
  for (const auto& e : errors) msg += "\n  - " + e;
  return msg;
}

static_assert(std::is_same_v<std::uint64_t, std::size_t>, "seed is read through the size_t overload");

class Reader {
 public:
  explicit Reader(const json& j) : j_(j) {}

  void get(const char* key, std::string& out) {
    if (!take(key)) return;
    if (!j_[key].is_string()) return mismatch(key, "a string");
    out = j_[key].get<std::string>();
  }
  void get(const char* key, bool& out) {
    if (!take(key)) return;
    if (!j_[key].is_boolean()) return mismatch(key, "true or false");
    out = j_[key].get<bool>();
  }
  void get(const char* key, double& out) {
    if (!take(key)) return;
    if (!j_[key].is_number()) return mismatch(key, "a number");
    out = j_[key].get<double>();
  }
  void get(const char* key, std::size_t& out) {
    if (!take(key)) return;
    const auto& v = j_[key];
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      out = v.get<std::size_t>();
    } else {
      mismatch(key, "a non-negative integer");
    }
  }

  std::vector<std::string> finish() {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) errors_.push_back("unknown key '" + key + "'");
    }
    return errors_;
  }

 private:
  bool take(const char* key) {
    seen_.emplace_back(key);
    return j_.contains(key);
  }
  void mismatch(const char* key, const char* expected) {
    errors_.push_back(std::string("'") + key + "' must be " + expected + ", got " + j_[key].dump());
  }

  const json& j_;
  std::vector<std::string> seen_;
  std::vector<std::string> errors_;
};

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  return json{
      {"dataset", c.dataset},
      {"merge_splits", c.merge_splits},
      {"normalize", c.normalize},
      {"seed", c.seed},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"crop_length", c.crop_length},
      {"neighbors", c.neighbors},
      {"gamma", c.gamma},
      {"neighbor_space", c.neighbor_space},
      {"augmentation", c.augmentation},
      {"aug_strength", c.aug_strength},
      {"mask_ratio", c.mask_ratio},
      {"q", c.q},
      {"alpha", c.alpha},
      {"k", c.k},
      {"kmeans_restarts", c.kmeans_restarts},
      {"kmeans_max_iter", c.kmeans_max_iter},
      {"beta", c.beta},
      {"use_coeh", c.use_coeh},
      {"use_pgcl", c.use_pgcl},
      {"use_read", c.use_read},
      {"lr", c.adam.lr},
      {"beta1", c.adam.beta1},
      {"beta2", c.adam.beta2},
      {"eps", c.adam.eps},
      {"hidden1", c.model.hidden1},
      {"hidden2", c.model.hidden2},
      {"embed_dim", c.model.embed_dim},
      {"kernel1", c.model.kernel1},
      {"kernel2", c.model.kernel2},
      {"separate_read_encoder", c.model.separate_read_encoder},
  };
}

RunConfig config_from_json(const nlohmann::json& j, const RunConfig& base) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c = base;
  Reader r(j);
  r.get("dataset", c.dataset);
  r.get("merge_splits", c.merge_splits);
  r.get("normalize", c.normalize);
  r.get("seed", c.seed);
  r.get("epochs", c.epochs);
  r.get("batch_size", c.batch_size);
  r.get("crop_length", c.crop_length);
  r.get("neighbors", c.neighbors);
  r.get("gamma", c.gamma);
  r.get("neighbor_space", c.neighbor_space);
  r.get("augmentation", c.augmentation);
  r.get("aug_strength", c.aug_strength);
  r.get("mask_ratio", c.mask_ratio);
  r.get("q", c.q);
  r.get("alpha", c.alpha);
  r.get("k", c.k);
  r.get("kmeans_restarts", c.kmeans_restarts);
  r.get("kmeans_max_iter", c.kmeans_max_iter);
  r.get("beta", c.beta);
  r.get("use_coeh", c.use_coeh);
  r.get("use_pgcl", c.use_pgcl);
  r.get("use_read", c.use_read);
  r.get("lr", c.adam.lr);
  r.get("beta1", c.adam.beta1);
  r.get("beta2", c.adam.beta2);
  r.get("eps", c.adam.eps);
  r.get("hidden1", c.model.hidden1);
  r.get("hidden2", c.model.hidden2);
  r.get("embed_dim", c.model.embed_dim);
  r.get("kernel1", c.model.kernel1);
  r.get("kernel2", c.model.kernel2);
  r.get("separate_read_encoder", c.model.separate_read_encoder);
  const auto errors = r.finish();
  if (!errors.empty()) throw ConfigError(join_errors(errors));
  return c;
}

RunConfig apply_overrides(const RunConfig& cfg, const std::vector<std::string>& overrides) {
  json patch = json::object();
  std::vector<std::string> errors;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      errors.push_back("override '" + o + "' is not of the form key=value");
      continue;
    }
    const auto key = o.substr(0, eq);
    const auto value = o.substr(eq + 1);
    json parsed = json::parse(value, nullptr, false);
    patch[key] = parsed.is_discarded() ? json(value) : parsed;
  }
  if (!errors.empty()) throw ConfigError(join_errors(errors));
  return config_from_json(patch, cfg);
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> e;
  if (!(c.beta >= 0.0 && c.beta <= 1.0)) e.push_back("beta must lie in [0, 1]");
  if (!c.use_pgcl && !c.use_read) e.push_back("at least one of use_pgcl and use_read must be true");
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) e.push_back("gamma must lie in [0, 1]");
  if (!(c.q > 0.0 && c.q <= 1.0)) e.push_back("q must lie in (0, 1]");
  if (!(c.mask_ratio >= 0.0 && c.mask_ratio < 1.0)) e.push_back("mask_ratio must lie in [0, 1)");
  if (!std::isfinite(c.alpha) || c.alpha < 0.0) e.push_back("alpha must be a non-negative number");
  if (!(c.aug_strength > 0.0)) e.push_back("aug_strength must be positive");
  if (c.neighbor_space != "input" && c.neighbor_space != "embedding") {
    e.push_back("neighbor_space must be \"input\" or \"embedding\"");
  }
  if (c.augmentation != "coeh") {
    try {
      coeh::parse_baseline_kind(c.augmentation);
    } catch (const ConfigError&) {
      e.push_back("augmentation must be coeh, jitter, scaling, permutation, crop or mask");
    }
  }
  if (!(c.adam.lr > 0.0)) e.push_back("lr must be positive");
  if (!(c.adam.beta1 >= 0.0 && c.adam.beta1 < 1.0)) e.push_back("beta1 must lie in [0, 1)");
  if (!(c.adam.beta2 >= 0.0 && c.adam.beta2 < 1.0)) e.push_back("beta2 must lie in [0, 1)");
  if (!(c.adam.eps > 0.0)) e.push_back("eps must be positive");
  if (c.model.hidden1 == 0 || c.model.hidden2 == 0 || c.model.embed_dim == 0) {
    e.push_back("hidden1, hidden2 and embed_dim must be positive");
  }
  if (c.model.kernel1 % 2 == 0 || c.model.kernel2 % 2 == 0) e.push_back("kernel1 and kernel2 must be odd");
  if (c.kmeans_restarts == 0) e.push_back("kmeans_restarts must be positive");
  if (c.kmeans_max_iter == 0) e.push_back("kmeans_max_iter must be positive");
  return e;
}

std::vector<std::string> validate_for(const RunConfig& c, const MTSDataset& ds) {
  std::vector<std::string> e;
  if (c.crop_length > ds.length) {
    e.push_back("crop_length " + std::to_string(c.crop_length) + " exceeds the series length " +
                std::to_string(ds.length));
  }
  if (c.use_coeh && c.augmentation == "coeh" && c.neighbors >= ds.size) {
    e.push_back("neighbors (" + std::to_string(c.neighbors) + ") must be below N (" + std::to_string(ds.size) + ")");
  }
  const std::size_t k = c.k != 0 ? c.k : ds.class_count.value_or(0);
  if (k == 0) e.push_back("k is 0 and the corpus has no class labels to infer it from");
  if (k > ds.size) e.push_back("k (" + std::to_string(k) + ") exceeds N (" + std::to_string(ds.size) + ")");
  return e;
}

}  // namespace tfec
