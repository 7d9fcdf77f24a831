#include "tfec/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tfec/errors.hpp"
#include "tfec/io.hpp"
#include "tfec/layers.hpp"

namespace tfec::model {

namespace {

void fill_uniform(std::span<double> w, double bound, Rng& rng) {
  for (auto& v : w) v = (2.0 * uniform_unit(rng) - 1.0) * bound;
}

layers::Conv1dShape conv1_shape(const EncoderShape& s) { return {s.channels, s.hidden1, s.kernel1}; }
layers::Conv1dShape conv2_shape(const EncoderShape& s) { return {s.hidden1, s.hidden2, s.kernel2}; }

}  // namespace

EncoderParams add_encoder(ParamStore& store, const EncoderShape& s, const std::string& prefix) {
  if (s.channels == 0 || s.hidden1 == 0 || s.hidden2 == 0 || s.embed_dim == 0) {
    throw ConfigError("encoder dimensions must be positive");
  }
  if (s.kernel1 % 2 == 0 || s.kernel2 % 2 == 0) throw ConfigError("encoder kernels must be odd");
  EncoderParams p;
  p.shape = s;
  p.conv1_w = store.add(prefix + "conv1.weight", {s.kernel1, s.channels, s.hidden1});
  p.conv1_b = store.add(prefix + "conv1.bias", {s.hidden1});
  p.conv2_w = store.add(prefix + "conv2.weight", {s.kernel2, s.hidden1, s.hidden2});
  p.conv2_b = store.add(prefix + "conv2.bias", {s.hidden2});
  p.proj_w = store.add(prefix + "proj.weight", {s.embed_dim, s.hidden2});
  p.proj_b = store.add(prefix + "proj.bias", {s.embed_dim});
  return p;
}

DecoderParams add_decoder(ParamStore& store, const DecoderShape& s, const std::string& prefix) {
  if (s.embed_dim == 0 || s.hidden == 0 || s.length == 0 || s.channels == 0) {
    throw ConfigError("decoder dimensions must be positive");
  }
  DecoderParams p;
  p.shape = s;
  p.fc1_w = store.add(prefix + "fc1.weight", {s.hidden, s.embed_dim});
  p.fc1_b = store.add(prefix + "fc1.bias", {s.hidden});
  p.fc2_w = store.add(prefix + "fc2.weight", {s.length * s.channels, s.hidden});
  p.fc2_b = store.add(prefix + "fc2.bias", {s.length * s.channels});
  return p;
}

void init_encoder(ParamStore& store, const EncoderParams& enc, Rng& rng) {
  const auto& s = enc.shape;
  fill_uniform(store.view(enc.conv1_w), std::sqrt(6.0 / static_cast<double>(s.channels * s.kernel1)), rng);
  fill_uniform(store.view(enc.conv2_w), std::sqrt(6.0 / static_cast<double>(s.hidden1 * s.kernel2)), rng);
  fill_uniform(store.view(enc.proj_w), std::sqrt(6.0 / static_cast<double>(s.hidden2 + s.embed_dim)), rng);
  for (const auto* b : {&enc.conv1_b, &enc.conv2_b, &enc.proj_b}) {
    auto v = store.view(*b);
    std::fill(v.begin(), v.end(), 0.0);
  }
}

void init_decoder(ParamStore& store, const DecoderParams& dec, Rng& rng) {
  const auto& s = dec.shape;
  const double out = static_cast<double>(s.length * s.channels);
  fill_uniform(store.view(dec.fc1_w), std::sqrt(6.0 / static_cast<double>(s.embed_dim)), rng);
  fill_uniform(store.view(dec.fc2_w), std::sqrt(6.0 / (static_cast<double>(s.hidden) + out)), rng);
  for (const auto* b : {&dec.fc1_b, &dec.fc2_b}) {
    auto v = store.view(*b);
    std::fill(v.begin(), v.end(), 0.0);
  }
}

std::vector<double> encode(const ParamStore& store, const EncoderParams& enc, const Series& x, EncoderCache* cache) {
  const auto& s = enc.shape;
  if (x.channels != s.channels) {
    throw ShapeError("encode: input has " + std::to_string(x.channels) + " channels, encoder expects " +
                     std::to_string(s.channels));
  }
  if (x.length == 0) throw ShapeError("encode: empty input");
  const std::size_t l = x.length;

  EncoderCache local;
  EncoderCache& c = cache != nullptr ? *cache : local;
  c.length = l;
  c.input = x.values;
  c.h1.assign(l * s.hidden1, 0.0);
  c.h2.assign(l * s.hidden2, 0.0);
  c.pooled.assign(s.hidden2, 0.0);
  c.r.assign(s.embed_dim, 0.0);

  layers::conv1d_forward(c.input, l, conv1_shape(s), store.view(enc.conv1_w), store.view(enc.conv1_b), c.h1);
  layers::relu_inplace(c.h1);
  layers::conv1d_forward(c.h1, l, conv2_shape(s), store.view(enc.conv2_w), store.view(enc.conv2_b), c.h2);
  layers::relu_inplace(c.h2);
  layers::mean_pool_forward(c.h2, l, s.hidden2, c.pooled);
  std::vector<double> z(s.embed_dim);
  layers::dense_forward(c.pooled, store.view(enc.proj_w), store.view(enc.proj_b), z);
  c.norm = layers::l2_normalize_forward(z, c.r);
  return c.r;
}

void encode_backward(const ParamStore& store, const EncoderParams& enc, const EncoderCache& c,
                     std::span<const double> grad_r, std::vector<double>& grad) {
  const auto& s = enc.shape;
  const std::size_t l = c.length;
  if (grad_r.size() != s.embed_dim) throw ShapeError("encode_backward: gradient size mismatch");

  std::vector<double> gz(s.embed_dim, 0.0);
  layers::l2_normalize_backward(c.r, c.norm, grad_r, gz);

  std::vector<double> gpooled(s.hidden2, 0.0);
  layers::dense_backward(c.pooled, store.view(enc.proj_w), gz, slice_of(grad, enc.proj_w), slice_of(grad, enc.proj_b),
                         gpooled);

  std::vector<double> gh2(l * s.hidden2, 0.0);
  layers::mean_pool_backward(l, s.hidden2, gpooled, gh2);
  layers::relu_backward(c.h2, gh2);

  std::vector<double> gh1(l * s.hidden1, 0.0);
  layers::conv1d_backward(c.h1, l, conv2_shape(s), store.view(enc.conv2_w), gh2, slice_of(grad, enc.conv2_w),
                          slice_of(grad, enc.conv2_b), gh1);
  layers::relu_backward(c.h1, gh1);

  layers::conv1d_backward(c.input, l, conv1_shape(s), store.view(enc.conv1_w), gh1, slice_of(grad, enc.conv1_w),
                          slice_of(grad, enc.conv1_b), {});
}

Series decode(const ParamStore& store, const DecoderParams& dec, std::span<const double> r, DecoderCache* cache) {
  const auto& s = dec.shape;
  if (r.size() != s.embed_dim) throw ShapeError("decode: representation size mismatch");
  DecoderCache local;
  DecoderCache& c = cache != nullptr ? *cache : local;
  c.r.assign(r.begin(), r.end());
  c.hidden.assign(s.hidden, 0.0);
  layers::dense_forward(c.r, store.view(dec.fc1_w), store.view(dec.fc1_b), c.hidden);
  layers::relu_inplace(c.hidden);
  Series out(s.length, s.channels);
  layers::dense_forward(c.hidden, store.view(dec.fc2_w), store.view(dec.fc2_b), out.values);
  return out;
}

void decode_backward(const ParamStore& store, const DecoderParams& dec, const DecoderCache& c,
                     std::span<const double> grad_out, std::vector<double>& grad, std::span<double> grad_r) {
  const auto& s = dec.shape;
  if (grad_out.size() != s.length * s.channels) throw ShapeError("decode_backward: gradient size mismatch");
  std::vector<double> gh(s.hidden, 0.0);
  layers::dense_backward(c.hidden, store.view(dec.fc2_w), grad_out, slice_of(grad, dec.fc2_w),
                         slice_of(grad, dec.fc2_b), gh);
  layers::relu_backward(c.hidden, gh);
  layers::dense_backward(c.r, store.view(dec.fc1_w), gh, slice_of(grad, dec.fc1_w), slice_of(grad, dec.fc1_b),
                         grad_r);
}

std::size_t MaskSpec::count() const {
  return static_cast<std::size_t>(std::count(hidden.begin(), hidden.end(), std::uint8_t{1}));
}

std::size_t MaskSpec::count_channel(std::size_t c) const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < length; ++t) n += hidden[t * channels + c];
  return n;
}

std::pair<Series, MaskSpec> mask_random(const Series& x, double ratio, Rng& rng) {
  if (!(ratio >= 0.0 && ratio < 1.0)) throw ConfigError("mask ratio must lie in [0, 1)");
  const std::size_t l = x.length;
  MaskSpec mask;
  mask.ratio = ratio;
  mask.length = l;
  mask.channels = x.channels;
  mask.hidden.assign(l * x.channels, 0);
  const auto target = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(l)));

  for (std::size_t c = 0; c < x.channels; ++c) {
    std::size_t masked = 0;
    while (masked < target) {
      const auto remaining = target - masked;
      const auto span = static_cast<std::size_t>(uniform_index(rng, 1, remaining));
      const auto start = static_cast<std::size_t>(uniform_index(rng, 0, l - span));
      for (std::size_t t = start; t < start + span; ++t) {
        auto& h = mask.hidden[t * x.channels + c];
        if (h == 0) {
          h = 1;
          ++masked;
        }
      }
    }
  }

  Series out = x;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (mask.hidden[k] != 0) out.values[k] = 0.0;
  }
  return {std::move(out), std::move(mask)};
}

double recon_loss(const Series& x_hat, const Series& x, const MaskSpec& mask) {
  if (x_hat.length != x.length || x_hat.channels != x.channels) throw ShapeError("recon_loss: shape mismatch");
  if (!mask.hidden.empty() && mask.hidden.size() != x.values.size()) {
    throw ShapeError("recon_loss: mask shape mismatch");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < x.values.size(); ++k) {
    const double d = x_hat.values[k] - x.values[k];
    s += d * d;
  }
  return s / static_cast<double>(x.values.size());
}

void recon_loss_grad(const Series& x_hat, const Series& x, std::span<double> grad) {
  const double scale = 2.0 / static_cast<double>(x.values.size());
  for (std::size_t k = 0; k < x.values.size(); ++k) grad[k] = scale * (x_hat.values[k] - x.values[k]);
}

Model make_model(const ModelConfig& cfg, std::size_t channels, std::size_t crop_length, Rng& rng) {
  Model m;
  m.config = cfg;
  const EncoderShape es{channels, cfg.hidden1, cfg.hidden2, cfg.embed_dim, cfg.kernel1, cfg.kernel2};
  m.encoder = add_encoder(m.store, es, "encoder.");
  if (cfg.separate_read_encoder) m.read_encoder = add_encoder(m.store, es, "read_encoder.");
  m.decoder = add_decoder(m.store, {cfg.embed_dim, cfg.hidden2, crop_length, channels}, "decoder.");
  init_encoder(m.store, m.encoder, rng);
  if (m.read_encoder) init_encoder(m.store, *m.read_encoder, rng);
  init_decoder(m.store, m.decoder, rng);
  return m;
}

void save_checkpoint(const ParamStore& store, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "tfec-checkpoint";
  j["version"] = 1;
  j["tensors"] = nlohmann::json::array();
  for (const auto& s : store.slices()) {
    const auto v = store.view(s);
    j["tensors"].push_back({{"name", s.name}, {"shape", s.shape}, {"data", std::vector<double>(v.begin(), v.end())}});
  }
  io::write_atomic(path, j.dump(1) + "\n");
}

void load_checkpoint(ParamStore& store, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("file not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": invalid checkpoint JSON: " + e.what());
  }
  if (j.value("format", "") != "tfec-checkpoint" || j.value("version", 0) != 1) {
    throw IoError(path.string() + ": not a version-1 tfec checkpoint");
  }
  for (const auto& t : j.at("tensors")) {
    const auto name = t.at("name").get<std::string>();
    const auto* slice = store.find(name);
    if (slice == nullptr) throw ShapeError("checkpoint tensor '" + name + "' has no counterpart in the model");
    if (t.at("shape").get<std::vector<std::size_t>>() != slice->shape) {
      throw ShapeError("checkpoint tensor '" + name + "' has a different shape");
    }
    const auto data = t.at("data").get<std::vector<double>>();
    if (data.size() != slice->size) throw ShapeError("checkpoint tensor '" + name + "' has the wrong element count");
    std::copy(data.begin(), data.end(), store.view(*slice).begin());
  }
}

}  // namespace tfec::model
