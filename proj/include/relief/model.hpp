#ifndef RELIEF_MODEL_HPP
#define RELIEF_MODEL_HPP

// Model assembly:
//   - ConvEncoder: four strided 3x3 convs ([16,32,64,128], stride 2, pad 1,
//     ReLU) and a linear map from the flattened features to a 256-d latent.
//   - ConvDecoder: the mirror for autoencoder pretraining; a linear map back
//     to the flattened grid and four transposed convs with pinned per-stage
//     output sizes, finished by a linear 1x1 conv. No skip connections, so
//     everything the decoder sees went through the latent bottleneck.
//   - EdsModel: both encoders (or a learned constant placeholder for an
//     ablated modality), fusion (dense + layer norm + ReLU) over
//     [depth latent | lidar latent | robot state | previous heightmap],
//     two stacked GRUs (hidden 256) and a two-layer decoder head emitting
//     the heightmap.
//
// Network I/O conventions: ranges and depths are divided by 3.0 m with
// invalid pixels at 0 (valid normalized values can never reach 0), and
// heightmaps are shifted by +0.75 m (nominal base height) so typical values
// sit near zero. The shift is undone when predictions leave the model.

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "relief/heightmap.hpp"
#include "relief/io.hpp"
#include "relief/nn.hpp"
#include "relief/range_image.hpp"
#include "relief/sensor.hpp"
#include "relief/tensor.hpp"

namespace relief {

using nlohmann::json;

enum class ModalityMode { fused, depth_only, lidar_only };

inline const char* modality_mode_name(ModalityMode m) {
  switch (m) {
    case ModalityMode::fused: return "fused";
    case ModalityMode::depth_only: return "depth_only";
    case ModalityMode::lidar_only: return "lidar_only";
  }
  return "unknown";
}

inline ModalityMode modality_mode_from_name(const std::string& s) {
  if (s == "fused") return ModalityMode::fused;
  if (s == "depth_only") return ModalityMode::depth_only;
  if (s == "lidar_only") return ModalityMode::lidar_only;
  throw std::invalid_argument("unknown modality mode: " + s);
}

struct ModelConfig {
  int heightmap_dim = 165;
  int state_dim = 15;
  int latent_dim = 256;
  int gru_hidden = 256;
  std::vector<int> channels = {16, 32, 64, 128};
  ModalityMode mode = ModalityMode::fused;
  std::uint64_t init_seed = 1;
  double range_norm = 3.0;        // meters; image normalization divisor
  double heightmap_offset = 0.75; // meters added before entering the network

  json to_json() const {
    return json{{"heightmap_dim", heightmap_dim},
                {"state_dim", state_dim},
                {"latent_dim", latent_dim},
                {"gru_hidden", gru_hidden},
                {"channels", channels},
                {"mode", modality_mode_name(mode)},
                {"init_seed", init_seed},
                {"range_norm", range_norm},
                {"heightmap_offset", heightmap_offset}};
  }

  static ModelConfig from_json(const json& j) {
    ModelConfig c;
    c.heightmap_dim = j.at("heightmap_dim").get<int>();
    c.state_dim = j.at("state_dim").get<int>();
    c.latent_dim = j.at("latent_dim").get<int>();
    c.gru_hidden = j.at("gru_hidden").get<int>();
    c.channels = j.at("channels").get<std::vector<int>>();
    c.mode = modality_mode_from_name(j.at("mode").get<std::string>());
    c.init_seed = j.at("init_seed").get<std::uint64_t>();
    c.range_norm = j.at("range_norm").get<double>();
    c.heightmap_offset = j.at("heightmap_offset").get<double>();
    return c;
  }
};

constexpr int kDepthH = 120, kDepthW = 160;
constexpr int kLidarH = kRangeImageHeight, kLidarW = kRangeImageWidth;

// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> normalize_depth(const DepthImage& img, double range_norm = 3.0) {
  Tensor<T> out({1, img.height, img.width});
  for (std::size_t i = 0; i < img.values.size(); ++i)
    out.data[i] = img.valid[i] ? T(img.values[i] / range_norm) : T(0);
  return out;
}

template <typename T>
Tensor<T> normalize_range(const RangeImage& img, double range_norm = 3.0) {
  Tensor<T> out({1, img.height, img.width});
  for (std::size_t i = 0; i < img.values.size(); ++i)
    out.data[i] = img.valid[i] ? T(img.values[i] / range_norm) : T(0);
  return out;
}

// ---------------------------------------------------------------------------

template <typename T>
class ConvEncoder {
 public:
  ConvEncoder() = default;
  ConvEncoder(const std::string& name, int in_h, int in_w,
              const std::vector<int>& channels, int latent, SplitMix64& rng)
      : in_h_(in_h), in_w_(in_w) {
    int cin = 1, h = in_h, w = in_w;
    for (std::size_t s = 0; s < channels.size(); ++s) {
      convs_.emplace_back(name + ".conv" + std::to_string(s), cin,
                          channels[s], 3, 2, 1, std::sqrt(2.0), rng);
      std::tie(h, w) = convs_.back().out_hw(h, w);
      cin = channels[s];
    }
    out_h_ = h;
    out_w_ = w;
    flat_ = cin * h * w;
    latent_ = Dense<T>(name + ".latent", flat_, latent, 1.0, rng);
  }

  int flat_size() const { return flat_; }
  int out_h() const { return out_h_; }
  int out_w() const { return out_w_; }
  int in_h() const { return in_h_; }
  int in_w() const { return in_w_; }

  void collect(ParamList<T>& out) {
    for (auto& c : convs_) c.collect(out);
    latent_.collect(out);
  }

  struct Cache {
    std::vector<typename Conv2d<T>::Cache> conv;
    std::vector<ReluCache<T>> act;
    typename Dense<T>::Cache latent;
  };

  Tensor<T> forward(const Tensor<T>& image, Cache& c) const {
    if (image.ndim() != 3 || image.dim(0) != 1 || image.dim(1) != in_h_ ||
        image.dim(2) != in_w_)
      throw std::invalid_argument("ConvEncoder: bad input shape");
    c.conv.resize(convs_.size());
    c.act.resize(convs_.size());
    Tensor<T> x = image;
    for (std::size_t s = 0; s < convs_.size(); ++s) {
      x = convs_[s].forward(x, c.conv[s]);
      x = relu(x, c.act[s]);
    }
    return latent_.forward(x.reshaped({flat_}), c.latent);
  }

  Tensor<T> backward(const Tensor<T>& glatent, const Cache& c,
                     GradStore<T>& grads) const {
    Tensor<T> g = latent_.backward(glatent, c.latent, grads);
    g = g.reshaped(c.act.back().x.shape);
    for (int s = int(convs_.size()) - 1; s >= 0; --s) {
      g = relu_backward(g, c.act[std::size_t(s)]);
      g = convs_[std::size_t(s)].backward(g, c.conv[std::size_t(s)], grads);
    }
    return g;
  }

 private:
  int in_h_ = 0, in_w_ = 0, out_h_ = 0, out_w_ = 0, flat_ = 0;
  std::vector<Conv2d<T>> convs_;
  Dense<T> latent_;
};

// ---------------------------------------------------------------------------

template <typename T>
class ConvDecoder {
 public:
  ConvDecoder() = default;
  // Stage output sizes mirror the encoder exactly; the chain ends at the
  // original image resolution.
  ConvDecoder(const std::string& name, int latent, int flat, int c0, int h0,
              int w0, const std::vector<std::pair<int, int>>& stage_hw,
              const std::vector<int>& stage_channels, SplitMix64& rng)
      : c0_(c0), h0_(h0), w0_(w0) {
    expand_ = Dense<T>(name + ".expand", latent, flat, 1.0, rng);
    int cin = c0;
    for (std::size_t s = 0; s < stage_hw.size(); ++s) {
      deconvs_.emplace_back(name + ".deconv" + std::to_string(s), cin,
                            stage_channels[s], stage_hw[s].first,
                            stage_hw[s].second, 3, 2, 1, std::sqrt(2.0), rng);
      cin = stage_channels[s];
    }
    out_ = Conv2d<T>(name + ".out", cin, 1, 1, 1, 0, 1.0, rng);
  }

  void collect(ParamList<T>& out) {
    expand_.collect(out);
    for (auto& d : deconvs_) d.collect(out);
    out_.collect(out);
  }

  struct Cache {
    typename Dense<T>::Cache expand;
    ReluCache<T> expand_act;
    std::vector<typename ConvTranspose2d<T>::Cache> deconv;
    std::vector<ReluCache<T>> act;
    typename Conv2d<T>::Cache out;
  };

  Tensor<T> forward(const Tensor<T>& latent, Cache& c) const {
    Tensor<T> x = expand_.forward(latent, c.expand);
    x = relu(x, c.expand_act);
    x = x.reshaped({c0_, h0_, w0_});
    c.deconv.resize(deconvs_.size());
    c.act.resize(deconvs_.size());
    for (std::size_t s = 0; s < deconvs_.size(); ++s) {
      x = deconvs_[s].forward(x, c.deconv[s]);
      x = relu(x, c.act[s]);
    }
    return out_.forward(x, c.out);
  }

  Tensor<T> backward(const Tensor<T>& gy, const Cache& c,
                     GradStore<T>& grads) const {
    Tensor<T> g = out_.backward(gy, c.out, grads);
    for (int s = int(deconvs_.size()) - 1; s >= 0; --s) {
      g = relu_backward(g, c.act[std::size_t(s)]);
      g = deconvs_[std::size_t(s)].backward(g, c.deconv[std::size_t(s)], grads);
    }
    g = relu_backward(g.reshaped({int(g.numel())}), c.expand_act);
    return expand_.backward(g, c.expand, grads);
  }

 private:
  int c0_ = 0, h0_ = 0, w0_ = 0;
  Dense<T> expand_;
  std::vector<ConvTranspose2d<T>> deconvs_;
  Conv2d<T> out_;
};

// ---------------------------------------------------------------------------
// Symmetric autoencoder for stage-1 pretraining of one modality.

enum class Modality { depth, lidar };

inline const char* modality_name(Modality m) {
  return m == Modality::depth ? "depth" : "lidar";
}

inline Modality modality_from_name(const std::string& s) {
  if (s == "depth") return Modality::depth;
  if (s == "lidar") return Modality::lidar;
  throw std::invalid_argument("unknown modality: " + s);
}

template <typename T>
class Autoencoder {
 public:
  Autoencoder(Modality modality, const ModelConfig& cfg)
      : modality_(modality), cfg_(cfg) {
    SplitMix64 rng(cfg.init_seed ^ (modality == Modality::depth
                                        ? 0x6465707468ULL
                                        : 0x6C69646172ULL));
    const int h = modality == Modality::depth ? kDepthH : kLidarH;
    const int w = modality == Modality::depth ? kDepthW : kLidarW;
    const std::string base = modality_name(modality);
    encoder_ = std::make_unique<ConvEncoder<T>>(base + "_encoder", h, w,
                                                cfg.channels, cfg.latent_dim,
                                                rng);
    // Mirrored stage sizes: walk the encoder chain backwards.
    std::vector<std::pair<int, int>> hw;
    int th = h, tw = w;
    std::vector<std::pair<int, int>> chain{{th, tw}};
    for (int s = 0; s < int(cfg.channels.size()); ++s) {
      th = (th + 2 - 3) / 2 + 1;
      tw = (tw + 2 - 3) / 2 + 1;
      chain.push_back({th, tw});
    }
    for (int s = int(chain.size()) - 2; s >= 0; --s) hw.push_back(chain[std::size_t(s)]);
    std::vector<int> dec_channels;
    for (int s = int(cfg.channels.size()) - 2; s >= 0; --s)
      dec_channels.push_back(cfg.channels[std::size_t(s)]);
    dec_channels.push_back(cfg.channels.front());  // final stage keeps c=16
    decoder_ = std::make_unique<ConvDecoder<T>>(
        base + "_decoder", cfg.latent_dim, encoder_->flat_size(),
        cfg.channels.back(), encoder_->out_h(), encoder_->out_w(), hw,
        dec_channels, rng);
    collect_params();
  }

  Modality modality() const { return modality_; }
  const ModelConfig& config() const { return cfg_; }
  ConvEncoder<T>& encoder() { return *encoder_; }
  const ParamList<T>& params() { return params_; }

  struct Cache {
    typename ConvEncoder<T>::Cache enc;
    typename ConvDecoder<T>::Cache dec;
  };

  Tensor<T> forward(const Tensor<T>& image, Cache& c) const {
    return decoder_->forward(encoder_->forward(image, c.enc), c.dec);
  }

  void backward(const Tensor<T>& gy, const Cache& c, GradStore<T>& grads) const {
    encoder_->backward(decoder_->backward(gy, c.dec, grads), c.enc, grads);
  }

 private:
  void collect_params() {
    params_.clear();
    encoder_->collect(params_);
    decoder_->collect(params_);
    assign_param_ids(params_);
  }

  Modality modality_;
  ModelConfig cfg_;
  std::unique_ptr<ConvEncoder<T>> encoder_;
  std::unique_ptr<ConvDecoder<T>> decoder_;
  ParamList<T> params_;
};

// ---------------------------------------------------------------------------

template <typename T>
class EdsModel {
 public:
  explicit EdsModel(const ModelConfig& cfg) : cfg_(cfg) {
    SplitMix64 rng(cfg.init_seed);
    const int fusion_in = 2 * cfg.latent_dim + cfg.state_dim + cfg.heightmap_dim;

    if (cfg.mode != ModalityMode::lidar_only)
      depth_enc_ = std::make_unique<ConvEncoder<T>>(
          "depth_encoder", kDepthH, kDepthW, cfg.channels, cfg.latent_dim, rng);
    else
      make_placeholder(depth_placeholder_, "depth_placeholder", rng);

    if (cfg.mode != ModalityMode::depth_only)
      lidar_enc_ = std::make_unique<ConvEncoder<T>>(
          "lidar_encoder", kLidarH, kLidarW, cfg.channels, cfg.latent_dim, rng);
    else
      make_placeholder(lidar_placeholder_, "lidar_placeholder", rng);

    fusion_dense_ = Dense<T>("fusion.dense", fusion_in, cfg.latent_dim,
                             std::sqrt(2.0), rng);
    fusion_norm_ = LayerNorm<T>("fusion.norm", cfg.latent_dim);
    gru1_ = GruLayer<T>("gru0", cfg.latent_dim, cfg.gru_hidden, rng);
    gru2_ = GruLayer<T>("gru1", cfg.gru_hidden, cfg.gru_hidden, rng);
    head_hidden_ = Dense<T>("head.hidden", cfg.gru_hidden, 256,
                            std::sqrt(2.0), rng);
    head_out_ = Dense<T>("head.out", 256, cfg.heightmap_dim, 1.0, rng);
    collect_params();
  }

  const ModelConfig& config() const { return cfg_; }
  const ParamList<T>& params() { return params_; }

  bool has_depth_encoder() const { return depth_enc_ != nullptr; }
  bool has_lidar_encoder() const { return lidar_enc_ != nullptr; }
  ConvEncoder<T>* depth_encoder() { return depth_enc_.get(); }
  ConvEncoder<T>* lidar_encoder() { return lidar_enc_.get(); }

  struct State {
    Tensor<T> h1, h2;
  };

  State initial_state() const {
    State s;
    s.h1 = Tensor<T>({cfg_.gru_hidden});
    s.h2 = Tensor<T>({cfg_.gru_hidden});
    return s;
  }

  struct StepCache {
    typename ConvEncoder<T>::Cache depth_enc, lidar_enc;
    typename Dense<T>::Cache fusion_dense;
    typename LayerNorm<T>::Cache fusion_norm;
    ReluCache<T> fusion_act;
    typename GruLayer<T>::Cache gru1, gru2;
    typename Dense<T>::Cache head_hidden;
    ReluCache<T> head_act;
    typename Dense<T>::Cache head_out;
  };

  // One recurrent step in offset space. Inputs: normalized images, the raw
  // 15-d state vector and the previous heightmap in offset space (zeros at
  // t=0: a flat-ground prior at nominal base height). The caller threads the
  // hidden state.
  Tensor<T> step(const Tensor<T>& depth_norm, const Tensor<T>& lidar_norm,
                 const Tensor<T>& robot_state, const Tensor<T>& prev_hm_offset,
                 State& state, StepCache& cache) const {
    if (int(robot_state.numel()) != cfg_.state_dim ||
        int(prev_hm_offset.numel()) != cfg_.heightmap_dim)
      throw std::invalid_argument("EdsModel::step: bad auxiliary input size");

    Tensor<T> dl = depth_enc_
                       ? depth_enc_->forward(depth_norm, cache.depth_enc)
                       : depth_placeholder_.value;
    Tensor<T> ll = lidar_enc_
                       ? lidar_enc_->forward(lidar_norm, cache.lidar_enc)
                       : lidar_placeholder_.value;

    Tensor<T> fused_in({2 * cfg_.latent_dim + cfg_.state_dim + cfg_.heightmap_dim});
    std::size_t o = 0;
    for (const Tensor<T>* src :
         {&std::as_const(dl), &std::as_const(ll), &robot_state, &prev_hm_offset})
      for (T v : src->data) fused_in.data[o++] = v;

    Tensor<T> fused = fusion_dense_.forward(fused_in, cache.fusion_dense);
    fused = fusion_norm_.forward(fused, cache.fusion_norm);
    fused = relu(fused, cache.fusion_act);

    state.h1 = gru1_.forward(fused, state.h1, cache.gru1);
    state.h2 = gru2_.forward(state.h1, state.h2, cache.gru2);

    Tensor<T> h = head_hidden_.forward(state.h2, cache.head_hidden);
    h = relu(h, cache.head_act);
    return head_out_.forward(h, cache.head_out);
  }

  struct StepGrads {
    Tensor<T> prev_hm;  // gradient into the previous prediction (closed loop)
    Tensor<T> h1, h2;   // gradients into the incoming hidden state
  };

  // Adjoint of step(). g_hm is the loss gradient on this step's output;
  // gh1/gh2 carry back the next step's hidden-state gradients (zero at the
  // window end).
  StepGrads backward_step(const Tensor<T>& g_hm, const Tensor<T>& gh1_next,
                          const Tensor<T>& gh2_next, const StepCache& cache,
                          GradStore<T>& grads) const {
    Tensor<T> gh = head_out_.backward(g_hm, cache.head_out, grads);
    gh = relu_backward(gh, cache.head_act);
    Tensor<T> gh2 = head_hidden_.backward(gh, cache.head_hidden, grads);
    for (std::size_t i = 0; i < gh2.data.size(); ++i)
      gh2.data[i] += gh2_next.data[i];

    auto [g_gru2_in, gh2_prev] = gru2_.backward(gh2, cache.gru2, grads);
    for (std::size_t i = 0; i < g_gru2_in.data.size(); ++i)
      g_gru2_in.data[i] += gh1_next.data[i];
    auto [g_fused, gh1_prev] = gru1_.backward(g_gru2_in, cache.gru1, grads);

    Tensor<T> g = relu_backward(g_fused, cache.fusion_act);
    g = fusion_norm_.backward(g, cache.fusion_norm, grads);
    g = fusion_dense_.backward(g, cache.fusion_dense, grads);

    // split the concatenation
    Tensor<T> g_dl({cfg_.latent_dim}), g_ll({cfg_.latent_dim});
    StepGrads out;
    out.prev_hm = Tensor<T>({cfg_.heightmap_dim});
    std::size_t o = 0;
    for (auto& v : g_dl.data) v = g.data[o++];
    for (auto& v : g_ll.data) v = g.data[o++];
    o += std::size_t(cfg_.state_dim);  // robot state is an input, not learned
    for (auto& v : out.prev_hm.data) v = g.data[o++];

    if (depth_enc_)
      depth_enc_->backward(g_dl, cache.depth_enc, grads);
    else
      for (std::size_t i = 0; i < g_dl.data.size(); ++i)
        grads.of(depth_placeholder_).data[i] += g_dl.data[i];
    if (lidar_enc_)
      lidar_enc_->backward(g_ll, cache.lidar_enc, grads);
    else
      for (std::size_t i = 0; i < g_ll.data.size(); ++i)
        grads.of(lidar_placeholder_).data[i] += g_ll.data[i];

    out.h1 = std::move(gh1_prev);
    out.h2 = std::move(gh2_prev);
    return out;
  }

  // Encoder parameters (fine-tuned slower in stage 2 when pretrained).
  void set_encoder_lr_mult(double mult) {
    ParamList<T> enc;
    if (depth_enc_) depth_enc_->collect(enc);
    if (lidar_enc_) lidar_enc_->collect(enc);
    for (auto* p : enc) p->lr_mult = mult;
  }

  // Copy pretrained encoder weights (by name prefix) from an autoencoder.
  void adopt_encoder(Autoencoder<T>& ae) {
    ParamList<T> src;
    ae.encoder().collect(src);
    std::map<std::string, Parameter<T>*> mine;
    for (auto* p : params_) mine[p->name] = p;
    for (auto* p : src) {
      auto it = mine.find(p->name);
      if (it == mine.end())
        throw std::invalid_argument("adopt_encoder: no parameter " + p->name);
      if (it->second->value.shape != p->value.shape)
        throw std::invalid_argument("adopt_encoder: shape mismatch " + p->name);
      it->second->value.data = p->value.data;
    }
  }

 private:
  void make_placeholder(Parameter<T>& p, const std::string& name,
                        SplitMix64& rng) {
    p.name = name;
    p.value = Tensor<T>({cfg_.latent_dim});
    nn_detail::init_uniform(p.value, 0.1, rng);  // learned constant, not zeros
  }

  void collect_params() {
    params_.clear();
    if (depth_enc_)
      depth_enc_->collect(params_);
    else
      params_.push_back(&depth_placeholder_);
    if (lidar_enc_)
      lidar_enc_->collect(params_);
    else
      params_.push_back(&lidar_placeholder_);
    fusion_dense_.collect(params_);
    fusion_norm_.collect(params_);
    gru1_.collect(params_);
    gru2_.collect(params_);
    head_hidden_.collect(params_);
    head_out_.collect(params_);
    assign_param_ids(params_);
  }

  ModelConfig cfg_;
  std::unique_ptr<ConvEncoder<T>> depth_enc_;
  std::unique_ptr<ConvEncoder<T>> lidar_enc_;
  Parameter<T> depth_placeholder_, lidar_placeholder_;
  Dense<T> fusion_dense_;
  LayerNorm<T> fusion_norm_;
  GruLayer<T> gru1_, gru2_;
  Dense<T> head_hidden_, head_out_;
  ParamList<T> params_;
};

// ---------------------------------------------------------------------------
// Checkpoint container: "EDSW", version, config JSON, named f32 parameter
// table, optional optimizer state (AdamW moments and step counts).

constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void save_checkpoint(const std::string& path, const json& config,
                     const ParamList<T>& params,
                     const AdamW<T>* optimizer = nullptr) {
  BinaryWriter w(path);
  w.magic("EDSW");
  w.u32(kCheckpointVersion);
  w.str(config.dump());
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    w.str(p->name);
    w.u32(static_cast<std::uint32_t>(p->value.shape.size()));
    for (int d : p->value.shape) w.u32(static_cast<std::uint32_t>(d));
    for (T v : p->value.data) w.f32(static_cast<float>(v));
  }
  w.scalar<std::uint8_t>(optimizer ? 1 : 0);
  if (optimizer) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      for (T v : optimizer->first_moments()[i].data)
        w.f32(static_cast<float>(v));
      for (T v : optimizer->second_moments()[i].data)
        w.f32(static_cast<float>(v));
      w.u64(static_cast<std::uint64_t>(optimizer->steps()[i]));
    }
  }
  w.close();
}

struct CheckpointData {
  json config;
  std::vector<std::pair<std::string, Tensor<float>>> tensors;
};

inline CheckpointData load_checkpoint(const std::string& path) {
  BinaryReader r(path);
  r.expect_magic("EDSW");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw DataError("unsupported checkpoint version in " + path);
  CheckpointData out;
  out.config = json::parse(r.str());
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.str();
    const std::uint32_t ndim = r.u32();
    std::vector<int> shape;
    for (std::uint32_t d = 0; d < ndim; ++d)
      shape.push_back(static_cast<int>(r.u32()));
    Tensor<float> t(shape);
    t.data = r.f32_array(t.numel());
    out.tensors.emplace_back(name, std::move(t));
  }
  return out;
}

template <typename T>
void load_params_from_checkpoint(const CheckpointData& ckpt,
                                 const ParamList<T>& params) {
  std::map<std::string, const Tensor<float>*> by_name;
  for (const auto& [name, tensor] : ckpt.tensors) by_name[name] = &tensor;
  for (auto* p : params) {
    auto it = by_name.find(p->name);
    if (it == by_name.end())
      throw DataError("checkpoint is missing parameter " + p->name);
    if (it->second->shape != p->value.shape)
      throw DataError("checkpoint shape mismatch for " + p->name);
    for (std::size_t i = 0; i < p->value.data.size(); ++i)
      p->value.data[i] = static_cast<T>(it->second->data[i]);
  }
  if (by_name.size() != params.size())
    throw DataError("checkpoint parameter table does not match the model");
}

}  // namespace relief

#endif  // RELIEF_MODEL_HPP
