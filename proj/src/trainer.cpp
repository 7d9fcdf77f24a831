#include "tfec/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "tfec/coeh.hpp"
#include "tfec/errors.hpp"
#include "tfec/io.hpp"
#include "tfec/pgcl.hpp"
#include "tfec/rng.hpp"

namespace tfec {

namespace {

// Stream identifiers for derive_seed, one per consumer of randomness.
enum Stream : std::uint64_t {
  kModelInit = 1,
  kViews = 2,
  kBatchOrder = 3,
  kMasks = 4,
  kFinalKMeans = 5,
  kEpochKMeans = 6,
};

constexpr std::size_t kFullBatchLimit = 256;
constexpr std::size_t kDefaultMiniBatch = 32;

std::string join(const std::vector<std::string>& errors) {
  std::string msg = "invalid configuration:";
  for (const auto& e : errors) msg += "\n  - " + e;
  return msg;
}

struct Views {
  std::vector<Series> a;
  std::vector<Series> b;
};

class Trainer {
 public:
  Trainer(const RunConfig& cfg, const MTSDataset& ds) : cfg_(cfg) {
    data_ = cfg.normalize ? znormalize(ds) : ds;
    crop_ = coeh::CoehConfig{cfg.crop_length, cfg.neighbors, cfg.gamma}.resolved_crop(data_.length);
    k_ = cfg.k != 0 ? cfg.k : ds.class_count.value_or(0);
    batch_ = cfg.batch_size != 0 ? std::min(cfg.batch_size, data_.size)
                                 : (data_.size <= kFullBatchLimit ? data_.size : kDefaultMiniBatch);
    if (!cfg.use_read) {
      beta_ = 1.0;
    } else if (!cfg.use_pgcl) {
      beta_ = 0.0;
    } else {
      beta_ = cfg.beta;
    }
    if (cfg.use_coeh && cfg.augmentation != "coeh") baseline_ = coeh::parse_baseline_kind(cfg.augmentation);

    Rng init = make_rng(cfg.seed, {kModelInit});
    model_ = model::make_model(cfg.model, data_.channels, crop_, init);
    adam_ = AdamState(model_.store.size(), cfg.adam);
  }

  RunReport run(std::size_t epochs) {
    const auto started = std::chrono::steady_clock::now();
    const auto mix_before = coeh::frequency_mix_calls();

    RunReport report;
    report.config = cfg_;
    report.config.epochs = epochs;
    report.config.crop_length = crop_;
    report.config.k = k_;
    report.config.batch_size = batch_;
    report.dataset_name = data_.name;
    report.n = data_.size;
    report.length = data_.length;
    report.channels = data_.channels;
    report.k = k_;
    report.beta_effective = beta_;

    refresh_input_neighbors();
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
      if (cfg_.neighbor_space == "embedding" && last_fused_) refresh_neighbors(*last_fused_);
      EpochLoss loss;
      try {
        loss = run_epoch(epoch);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ": " + e.what());
      }
      report.losses.push_back(loss);
    }

    // final clustering on fresh views
    report.embeddings = fuse_all(make_views(epochs));
    auto state = pgcl::kmeans(report.embeddings, k_, derive_seed(cfg_.seed, {kFinalKMeans}), kmeans_options());
    report.assignments = state.assignments;
    if (data_.labels) report.scores = metrics::evaluate(report.assignments, *data_.labels);

    report.frequency_mix_calls = coeh::frequency_mix_calls() - mix_before;
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
  }

 private:
  pgcl::KMeansOptions kmeans_options(const Matrix* warm = nullptr) const {
    pgcl::KMeansOptions o;
    o.max_iter = cfg_.kmeans_max_iter;
    o.restarts = cfg_.kmeans_restarts;
    o.warm_start = warm;
    return o;
  }

  bool uses_neighbors() const { return cfg_.use_coeh && !baseline_; }

  void refresh_input_neighbors() {
    if (!uses_neighbors()) return;
    neighbor_sets_ = coeh::select_all_neighbors(coeh::pairwise_distances(data_), cfg_.neighbors, cfg_.gamma);
  }

  void refresh_neighbors(const Matrix& fused) {
    if (!uses_neighbors()) return;
    neighbor_sets_ = coeh::select_all_neighbors(coeh::pairwise_distances(fused), cfg_.neighbors, cfg_.gamma);
  }

  Views make_views(std::size_t epoch) const {
    Views v;
    v.a.resize(data_.size);
    v.b.resize(data_.size);
    const coeh::CoehConfig cc{crop_, cfg_.neighbors, cfg_.gamma};
    for (std::size_t i = 0; i < data_.size; ++i) {
      Rng rng = make_rng(cfg_.seed, {kViews, epoch, i});
      if (!cfg_.use_coeh) {
        // two independent aligned crops
        const auto x = data_.series(i);
        const auto t1 = static_cast<std::size_t>(uniform_index(rng, 0, data_.length - crop_));
        const auto t2 = static_cast<std::size_t>(uniform_index(rng, 0, data_.length - crop_));
        v.a[i] = coeh::crop_at(x, t1, crop_);
        v.b[i] = coeh::crop_at(x, t2, crop_);
      } else if (baseline_) {
        const auto x = data_.series(i);
        auto crop = coeh::aligned_crop(x, {}, crop_, rng);
        v.b[i] = coeh::baseline_augment(crop.anchor, *baseline_, rng, cfg_.aug_strength);
        v.a[i] = std::move(crop.anchor);
      } else {
        auto pair = coeh::coenhance(data_, i, neighbor_sets_[i], cc, rng);
        v.a[i] = std::move(pair.view_a.values);
        v.b[i] = std::move(pair.view_b.values);
      }
    }
    return v;
  }

  std::vector<std::vector<std::size_t>> batches(std::size_t epoch) const {
    std::vector<std::size_t> order(data_.size);
    std::iota(order.begin(), order.end(), 0);
    if (batch_ >= data_.size) return {order};
    Rng rng = make_rng(cfg_.seed, {kBatchOrder, epoch});
    tfec::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s < order.size(); s += batch_) {
      out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(s),
                       order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), s + batch_)));
    }
    return out;
  }

  // Fused representations of all samples without caching activations.
  Matrix fuse_all(const Views& views) const {
    Matrix r(data_.size, cfg_.model.embed_dim), rp(data_.size, cfg_.model.embed_dim);
    for (std::size_t i = 0; i < data_.size; ++i) {
      const auto ra = model::encode(model_.store, model_.encoder, views.a[i]);
      const auto rb = model::encode(model_.store, model_.encoder, views.b[i]);
      std::copy(ra.begin(), ra.end(), r.row(i).begin());
      std::copy(rb.begin(), rb.end(), rp.row(i).begin());
    }
    return pgcl::fuse_views(r, rp);
  }

  pgcl::ClusterState cluster(const Matrix& fused, std::size_t epoch) {
    auto state = warm_centroids_
                     ? pgcl::kmeans(fused, k_, 0, kmeans_options(&*warm_centroids_))
                     : pgcl::kmeans(fused, k_, derive_seed(cfg_.seed, {kEpochKMeans, epoch}), kmeans_options());
    warm_centroids_ = state.centroids;
    pgcl::select_high_confidence(state, fused, cfg_.q);
    last_fused_ = fused;
    return state;
  }

  struct StepLoss {
    double l_con = 0.0;
    double l_recon = 0.0;
  };

  StepLoss step(const Views& views, const std::vector<std::size_t>& batch, const pgcl::ClusterState* global_state,
                std::size_t epoch) {
    const std::size_t b = batch.size();
    const std::size_t d = cfg_.model.embed_dim;
    std::vector<double> grad(model_.store.size(), 0.0);
    StepLoss loss;

    if (cfg_.use_pgcl) {
      std::vector<model::EncoderCache> ca(b), cb(b);
      Matrix r(b, d), rp(b, d);
      for (std::size_t s = 0; s < b; ++s) {
        const auto ra = model::encode(model_.store, model_.encoder, views.a[batch[s]], &ca[s]);
        const auto rb = model::encode(model_.store, model_.encoder, views.b[batch[s]], &cb[s]);
        std::copy(ra.begin(), ra.end(), r.row(s).begin());
        std::copy(rb.begin(), rb.end(), rp.row(s).begin());
      }

      pgcl::ClusterState local;
      if (global_state == nullptr) {
        local = cluster(pgcl::fuse_views(r, rp), epoch);
      } else {
        // restrict the epoch-level high-confidence sets to this batch
        std::vector<std::size_t> position(data_.size, b);
        for (std::size_t s = 0; s < b; ++s) position[batch[s]] = s;
        local.centroids = global_state->centroids;
        local.highconf.assign(global_state->k(), {});
        for (std::size_t p = 0; p < global_state->k(); ++p) {
          for (auto i : global_state->highconf[p]) {
            if (position[i] < b) local.highconf[p].push_back(position[i]);
          }
          std::sort(local.highconf[p].begin(), local.highconf[p].end());
        }
      }

      const auto pairs = pgcl::build_pairs(local);
      auto con = pgcl::contrastive_loss(pairs, r, rp, local, cfg_.alpha, beta_ > 0.0);
      loss.l_con = con.value;
      if (beta_ > 0.0) {
        std::vector<double> g(d);
        for (std::size_t s = 0; s < b; ++s) {
          for (std::size_t j = 0; j < d; ++j) g[j] = beta_ * con.grad_r(s, j);
          model::encode_backward(model_.store, model_.encoder, ca[s], g, grad);
          for (std::size_t j = 0; j < d; ++j) g[j] = beta_ * con.grad_r_prime(s, j);
          model::encode_backward(model_.store, model_.encoder, cb[s], g, grad);
        }
      }
    }

    if (cfg_.use_read) {
      const auto& read_encoder = model_.reconstruction_encoder();
      const double scale = (1.0 - beta_) / static_cast<double>(b);
      double total = 0.0;
      for (std::size_t s = 0; s < b; ++s) {
        const auto i = batch[s];
        Rng rng = make_rng(cfg_.seed, {kMasks, epoch, i});
        const auto& target = views.b[i];
        auto [masked, mask] = model::mask_random(target, cfg_.mask_ratio, rng);
        model::EncoderCache ec;
        model::DecoderCache dc;
        const auto z = model::encode(model_.store, read_encoder, masked, &ec);
        const auto x_hat = model::decode(model_.store, model_.decoder, z, &dc);
        total += model::recon_loss(x_hat, target, mask);
        if (scale > 0.0) {
          std::vector<double> gout(target.values.size());
          model::recon_loss_grad(x_hat, target, gout);
          for (auto& v : gout) v *= scale;
          std::vector<double> gz(z.size(), 0.0);
          model::decode_backward(model_.store, model_.decoder, dc, gout, grad, gz);
          model::encode_backward(model_.store, read_encoder, ec, gz, grad);
        }
      }
      loss.l_recon = total / static_cast<double>(b);
    }

    if (!std::isfinite(total_loss(loss.l_con, loss.l_recon, beta_))) throw NumericError("non-finite loss");
    adam_step(model_.store.values(), grad, adam_);
    return loss;
  }

  EpochLoss run_epoch(std::size_t epoch) {
    const auto views = make_views(epoch);
    const auto groups = batches(epoch);
    std::optional<pgcl::ClusterState> global;
    if (groups.size() > 1 && cfg_.use_pgcl) global = cluster(fuse_all(views), epoch);

    EpochLoss out;
    out.epoch = epoch;
    for (const auto& batch : groups) {
      const auto l = step(views, batch, global ? &*global : nullptr, epoch);
      out.l_con += l.l_con;
      out.l_recon += l.l_recon;
    }
    out.l_con /= static_cast<double>(groups.size());
    out.l_recon /= static_cast<double>(groups.size());
    out.l_total = total_loss(out.l_con, out.l_recon, beta_);
    return out;
  }

  RunConfig cfg_;
  MTSDataset data_;
  std::size_t crop_ = 0;
  std::size_t k_ = 0;
  std::size_t batch_ = 0;
  double beta_ = 0.5;
  std::optional<coeh::BaselineKind> baseline_;
  model::Model model_;
  AdamState adam_;
  std::vector<coeh::NeighborSet> neighbor_sets_;
  std::optional<Matrix> warm_centroids_;
  std::optional<Matrix> last_fused_;
};

void check(const RunConfig& cfg, const MTSDataset& ds, bool allow_frozen) {
  auto errors = validate(cfg);
  if (allow_frozen) {
    std::erase_if(errors, [](const std::string& e) { return e.starts_with("at least one of use_pgcl"); });
  }
  const auto more = validate_for(cfg, ds);
  errors.insert(errors.end(), more.begin(), more.end());
  if (!errors.empty()) throw ConfigError(join(errors));
}

RunReport train_impl(const RunConfig& cfg, const MTSDataset& ds, bool allow_frozen) {
  check(cfg, ds, allow_frozen);
  Trainer t(cfg, ds);
  const bool frozen = !cfg.use_pgcl && !cfg.use_read;
  return t.run(frozen ? 0 : cfg.epochs);
}

}  // namespace

double total_loss(double l_con, double l_recon, double beta) { return beta * l_con + (1.0 - beta) * l_recon; }

RunReport train(const RunConfig& cfg, const MTSDataset& ds) { return train_impl(cfg, ds, false); }

std::vector<AblationRow> ablate(const RunConfig& cfg, const MTSDataset& ds) {
  struct Row {
    const char* name;
    bool coeh, pgcl, read;
  };
  static constexpr Row rows[] = {
      {"full", true, true, true},
      {"-CoEH", false, true, true},
      {"-PGCL", true, false, true},
      {"-READ", true, true, false},
      {"-PGCL-READ", true, false, false},
  };
  std::vector<AblationRow> out;
  for (const auto& row : rows) {
    RunConfig c = cfg;
    c.use_coeh = row.coeh;
    c.use_pgcl = row.pgcl;
    c.use_read = row.read;
    out.push_back({row.name, row.coeh, row.pgcl, row.read, train_impl(c, ds, true)});
  }
  return out;
}

BaselineResult kmeans_raw_baseline(const RunConfig& cfg, const MTSDataset& ds) {
  const auto data = cfg.normalize ? znormalize(ds) : ds;
  const std::size_t k = cfg.k != 0 ? cfg.k : ds.class_count.value_or(0);
  if (k == 0 || k > ds.size) throw ConfigError("kmeans_raw_baseline: invalid K");
  Matrix flat(data.size, data.series_stride());
  flat.data = data.samples;
  pgcl::KMeansOptions o;
  o.max_iter = cfg.kmeans_max_iter;
  o.restarts = cfg.kmeans_restarts;
  auto state = pgcl::kmeans(flat, k, derive_seed(cfg.seed, {kFinalKMeans}), o);
  BaselineResult out;
  out.assignments = state.assignments;
  if (data.labels) out.scores = metrics::evaluate(out.assignments, *data.labels);
  return out;
}

nlohmann::json to_json(const RunReport& r, bool include_timing) {
  using nlohmann::json;
  json losses = json::array();
  for (const auto& l : r.losses) {
    losses.push_back({{"epoch", l.epoch}, {"l_con", l.l_con}, {"l_recon", l.l_recon}, {"l_total", l.l_total}});
  }
  json embeddings = json::array();
  for (std::size_t i = 0; i < r.embeddings.rows; ++i) {
    const auto row = r.embeddings.row(i);
    embeddings.push_back(std::vector<double>(row.begin(), row.end()));
  }
  json j{
      {"config", to_json(r.config)},
      {"dataset", {{"name", r.dataset_name}, {"n", r.n}, {"length", r.length}, {"channels", r.channels}, {"k", r.k}}},
      {"beta_effective", r.beta_effective},
      {"losses", losses},
      {"assignments", r.assignments},
      {"embeddings", embeddings},
      {"frequency_mix_calls", r.frequency_mix_calls},
  };
  j["metrics"] = r.scores ? json{{"acc", r.scores->acc}, {"nmi", r.scores->nmi}, {"f1", r.scores->f1}} : json(nullptr);
  if (include_timing) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

std::string losses_csv(const RunReport& r) {
  std::string out = "epoch,l_con,l_recon,l_total\n";
  for (const auto& l : r.losses) {
    out += std::to_string(l.epoch) + "," + io::format_double(l.l_con) + "," + io::format_double(l.l_recon) + "," +
           io::format_double(l.l_total) + "\n";
  }
  return out;
}

std::string embeddings_csv(const RunReport& r) {
  std::string out;
  for (std::size_t i = 0; i < r.embeddings.rows; ++i) {
    const auto row = r.embeddings.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ',';
      out += io::format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string assignments_csv(const RunReport& r) {
  std::string out = "index,cluster\n";
  for (std::size_t i = 0; i < r.assignments.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(r.assignments[i]) + "\n";
  }
  return out;
}

}  // namespace tfec
