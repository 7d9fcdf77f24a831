#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tfec/dataset.hpp"
#include "tfec/params.hpp"
#include "tfec/rng.hpp"

namespace tfec::model {

struct ModelConfig {
  std::size_t hidden1 = 64;
  std::size_t hidden2 = 128;
  std::size_t embed_dim = 64;
  std::size_t kernel1 = 7;
  std::size_t kernel2 = 5;
  /// Give the reconstruction path its own encoder instead of sharing one.
  bool separate_read_encoder = false;
};

struct EncoderShape {
  std::size_t channels = 0;
  std::size_t hidden1 = 64;
  std::size_t hidden2 = 128;
  std::size_t embed_dim = 64;
  std::size_t kernel1 = 7;
  std::size_t kernel2 = 5;
};

/// conv(F->H1, k1) -> ReLU -> conv(H1->H2, k2) -> ReLU -> mean over time
/// -> dense(H2->D) -> L2 normalization.
struct EncoderParams {
  EncoderShape shape;
  ParamSlice conv1_w, conv1_b, conv2_w, conv2_b, proj_w, proj_b;
};

struct DecoderShape {
  std::size_t embed_dim = 0;
  std::size_t hidden = 0;
  std::size_t length = 0;
  std::size_t channels = 0;
};

/// dense(D->H2) -> ReLU -> dense(H2->L*F), reshaped to L x F.
struct DecoderParams {
  DecoderShape shape;
  ParamSlice fc1_w, fc1_b, fc2_w, fc2_b;
};

EncoderParams add_encoder(ParamStore& store, const EncoderShape& shape, const std::string& prefix);
DecoderParams add_decoder(ParamStore& store, const DecoderShape& shape, const std::string& prefix);

/// He-uniform for ReLU-fed layers, Glorot-uniform for the output layers,
/// zero biases.
void init_encoder(ParamStore& store, const EncoderParams& enc, Rng& rng);
void init_decoder(ParamStore& store, const DecoderParams& dec, Rng& rng);

/// Intermediate activations kept for the backward pass.
struct EncoderCache {
  std::vector<double> input;  // L x F
  std::size_t length = 0;
  std::vector<double> h1;      // L x H1, post-ReLU
  std::vector<double> h2;      // L x H2, post-ReLU
  std::vector<double> pooled;  // H2
  std::vector<double> r;       // D, unit norm
  double norm = 0.0;
};

std::vector<double> encode(const ParamStore& store, const EncoderParams& enc, const Series& x,
                           EncoderCache* cache = nullptr);

/// Accumulates d(loss)/d(params) into grad given d(loss)/d(r).
void encode_backward(const ParamStore& store, const EncoderParams& enc, const EncoderCache& cache,
                     std::span<const double> grad_r, std::vector<double>& grad);

struct DecoderCache {
  std::vector<double> r;
  std::vector<double> hidden;  // post-ReLU
};

Series decode(const ParamStore& store, const DecoderParams& dec, std::span<const double> r,
              DecoderCache* cache = nullptr);

/// grad_out is L x F. grad_r may be empty.
void decode_backward(const ParamStore& store, const DecoderParams& dec, const DecoderCache& cache,
                     std::span<const double> grad_out, std::vector<double>& grad, std::span<double> grad_r);

struct MaskSpec {
  double ratio = 0.0;
  std::size_t length = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> hidden;  // L x F, 1 = masked

  std::size_t count() const;
  std::size_t count_channel(std::size_t c) const;
};

/// Hides round(ratio * L) timesteps per channel using contiguous spans;
/// hidden entries are set to 0.
std::pair<Series, MaskSpec> mask_random(const Series& x, double ratio, Rng& rng);

/// Mean squared error over all L x F positions. The mask is accepted for
/// interface symmetry and shape-checked, but does not restrict the average.
double recon_loss(const Series& x_hat, const Series& x, const MaskSpec& mask);

/// d(recon_loss)/d(x_hat), written into grad (size L x F).
void recon_loss_grad(const Series& x_hat, const Series& x, std::span<double> grad);

/// Encoder(s) and decoder in one parameter store.
struct Model {
  ModelConfig config;
  ParamStore store;
  EncoderParams encoder;
  std::optional<EncoderParams> read_encoder;
  DecoderParams decoder;

  const EncoderParams& reconstruction_encoder() const { return read_encoder ? *read_encoder : encoder; }
};

Model make_model(const ModelConfig& cfg, std::size_t channels, std::size_t crop_length, Rng& rng);

/// Versioned JSON checkpoint:
///   {"format": "tfec-checkpoint", "version": 1,
///    "tensors": [{"name": ..., "shape": [...], "data": [...]}, ...]}
void save_checkpoint(const ParamStore& store, const std::filesystem::path& path);

/// Loads values into an existing store; names and shapes must match.
void load_checkpoint(ParamStore& store, const std::filesystem::path& path);

}  // namespace tfec::model
