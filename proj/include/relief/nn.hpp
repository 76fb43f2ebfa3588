#ifndef RELIEF_NN_HPP
#define RELIEF_NN_HPP

// Differentiable layer toolkit: strided conv / transposed conv (explicit
// adjoint pair), dense, layer norm, ReLU, GRU cell, MSE loss, AdamW and a
// plateau learning-rate schedule, plus a central-finite-difference gradient
// checker.
//
// Layers are templated on the scalar: float for training, double for
// gradient checks. Forward passes write what backward needs into a per-call
// cache, so one layer instance can be unrolled over a sequence (BPTT) with
// one cache per timestep. Backward accumulates into a GradStore, never into
// the parameters themselves; that keeps per-item gradient buffers possible
// for deterministic batch parallelism (items summed in index order give
// results bit-identical to a serial pass).
//
// Matrix products go through Eigen maps over the flat buffers; everything
// else is written out explicitly.

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "relief/random.hpp"
#include "relief/tensor.hpp"

namespace relief {

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  double lr_mult = 1.0;  // stage-2 fine-tunes pretrained encoders at 0.1x
  int id = -1;           // slot in GradStore / optimizer state
};

template <typename T>
using ParamList = std::vector<Parameter<T>*>;

template <typename T>
void assign_param_ids(ParamList<T>& params) {
  for (std::size_t i = 0; i < params.size(); ++i)
    params[i]->id = static_cast<int>(i);
}

template <typename T>
struct GradStore {
  std::vector<Tensor<T>> g;

  void init(const ParamList<T>& params) {
    g.clear();
    g.reserve(params.size());
    for (const auto* p : params) g.emplace_back(p->value.shape);
  }

  void zero() {
    for (auto& t : g) t.zero();
  }

  Tensor<T>& of(const Parameter<T>& p) { return g[std::size_t(p.id)]; }
  const Tensor<T>& of(const Parameter<T>& p) const {
    return g[std::size_t(p.id)];
  }

  // Fixed-order accumulation; the basis of reproducible batch parallelism.
  void add(const GradStore& other) {
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t k = 0; k < g[i].data.size(); ++k)
        g[i].data[k] += other.g[i].data[k];
  }

  void scale(T s) {
    for (auto& t : g)
      for (auto& v : t.data) v *= s;
  }
};

namespace nn_detail {

template <typename T>
using EMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Map = Eigen::Map<EMat<T>>;
template <typename T>
using CMap = Eigen::Map<const EMat<T>>;

template <typename T>
inline T sigmoid(T x) {
  if (x >= T(0)) {
    const T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// Uniform fan-in init; bound sqrt(6/fan_in) ahead of ReLU, sqrt(1/fan_in)
// for linear outputs and recurrent matrices. Biases start at zero.
template <typename T>
void init_uniform(Tensor<T>& t, double bound, SplitMix64& rng) {
  for (auto& v : t.data) v = static_cast<T>(rng.uniform(-bound, bound));
}

inline int conv_out_extent(int in, int kernel, int stride, int pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

// cols is (cin*k*k) x (ho*wo); zero padding.
template <typename T>
void im2col(const T* x, int cin, int h, int w, int kernel, int stride, int pad,
            int ho, int wo, T* cols) {
  for (int ci = 0; ci < cin; ++ci) {
    const T* chan = x + std::size_t(ci) * h * w;
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        T* row = cols + (std::size_t(ci) * kernel * kernel + ky * kernel + kx) *
                            (std::size_t(ho) * wo);
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) {
            for (int ox = 0; ox < wo; ++ox) row[oy * wo + ox] = T(0);
            continue;
          }
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride - pad + kx;
            row[oy * wo + ox] =
                (ix < 0 || ix >= w) ? T(0) : chan[std::size_t(iy) * w + ix];
          }
        }
      }
    }
  }
}

// Scatter-add adjoint of im2col.
template <typename T>
void col2im(const T* cols, int cin, int h, int w, int kernel, int stride,
            int pad, int ho, int wo, T* x) {
  std::fill(x, x + std::size_t(cin) * h * w, T(0));
  for (int ci = 0; ci < cin; ++ci) {
    T* chan = x + std::size_t(ci) * h * w;
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        const T* row =
            cols + (std::size_t(ci) * kernel * kernel + ky * kernel + kx) *
                       (std::size_t(ho) * wo);
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) continue;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix < 0 || ix >= w) continue;
            chan[std::size_t(iy) * w + ix] += row[oy * wo + ox];
          }
        }
      }
    }
  }
}

}  // namespace nn_detail

// ---------------------------------------------------------------------------
// Conv2d: cross-correlation, weight (cout x cin*k*k), input (cin, h, w).

template <typename T>
class Conv2d {
 public:
  Parameter<T> weight, bias;

  Conv2d() = default;
  Conv2d(std::string name, int cin, int cout, int kernel, int stride, int pad,
         double gain, SplitMix64& rng)
      : cin_(cin), cout_(cout), kernel_(kernel), stride_(stride), pad_(pad) {
    weight.name = name + ".weight";
    weight.value = Tensor<T>({cout, cin * kernel * kernel});
    bias.name = name + ".bias";
    bias.value = Tensor<T>({cout});
    const int fan_in = cin * kernel * kernel;
    nn_detail::init_uniform(weight.value, gain * std::sqrt(3.0 / fan_in), rng);
  }

  void collect(ParamList<T>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  std::pair<int, int> out_hw(int h, int w) const {
    return {nn_detail::conv_out_extent(h, kernel_, stride_, pad_),
            nn_detail::conv_out_extent(w, kernel_, stride_, pad_)};
  }

  struct Cache {
    Tensor<T> x;
    int ho = 0, wo = 0;
  };

  Tensor<T> forward(const Tensor<T>& x, Cache& c) const {
    if (x.ndim() != 3 || x.dim(0) != cin_)
      throw std::invalid_argument("Conv2d: bad input shape");
    const int h = x.dim(1), w = x.dim(2);
    const auto [ho, wo] = out_hw(h, w);
    c.x = x;
    c.ho = ho;
    c.wo = wo;

    const int kk = cin_ * kernel_ * kernel_;
    std::vector<T> cols(std::size_t(kk) * ho * wo);
    nn_detail::im2col(x.data.data(), cin_, h, w, kernel_, stride_, pad_, ho, wo,
                      cols.data());

    Tensor<T> y({cout_, ho, wo});
    nn_detail::Map<T> ym(y.data.data(), cout_, std::size_t(ho) * wo);
    nn_detail::CMap<T> wm(weight.value.data.data(), cout_, kk);
    nn_detail::CMap<T> cm(cols.data(), kk, std::size_t(ho) * wo);
    ym.noalias() = wm * cm;
    for (int co = 0; co < cout_; ++co)
      ym.row(co).array() += bias.value.data[std::size_t(co)];
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, const Cache& c,
                     GradStore<T>& grads) const {
    const int h = c.x.dim(1), w = c.x.dim(2);
    const int kk = cin_ * kernel_ * kernel_;
    const std::size_t np = std::size_t(c.ho) * c.wo;

    std::vector<T> cols(std::size_t(kk) * np);
    nn_detail::im2col(c.x.data.data(), cin_, h, w, kernel_, stride_, pad_, c.ho,
                      c.wo, cols.data());

    nn_detail::CMap<T> gym(gy.data.data(), cout_, np);
    nn_detail::CMap<T> cm(cols.data(), kk, np);
    nn_detail::Map<T> dwm(grads.of(weight).data.data(), cout_, kk);
    dwm.noalias() += gym * cm.transpose();

    auto& db = grads.of(bias).data;
    for (int co = 0; co < cout_; ++co) db[std::size_t(co)] += gym.row(co).sum();

    std::vector<T> gcols(std::size_t(kk) * np);
    nn_detail::Map<T> gcm(gcols.data(), kk, np);
    nn_detail::CMap<T> wm(weight.value.data.data(), cout_, kk);
    gcm.noalias() = wm.transpose() * gym;

    Tensor<T> gx({cin_, h, w});
    nn_detail::col2im(gcols.data(), cin_, h, w, kernel_, stride_, pad_, c.ho,
                      c.wo, gx.data.data());
    return gx;
  }

  int cin() const { return cin_; }
  int cout() const { return cout_; }

 private:
  int cin_ = 0, cout_ = 0, kernel_ = 3, stride_ = 2, pad_ = 1;
};

// ---------------------------------------------------------------------------
// ConvTranspose2d: exact adjoint of a Conv2d with a pinned output size, which
// resolves the one-to-many output-shape ambiguity of stride-2 inverses.
// Weight layout matches the equivalent forward conv (cin x cout*k*k).

template <typename T>
class ConvTranspose2d {
 public:
  Parameter<T> weight, bias;

  ConvTranspose2d() = default;
  ConvTranspose2d(std::string name, int cin, int cout, int out_h, int out_w,
                  int kernel, int stride, int pad, double gain, SplitMix64& rng)
      : cin_(cin), cout_(cout), out_h_(out_h), out_w_(out_w), kernel_(kernel),
        stride_(stride), pad_(pad) {
    in_h_ = nn_detail::conv_out_extent(out_h, kernel, stride, pad);
    in_w_ = nn_detail::conv_out_extent(out_w, kernel, stride, pad);
    weight.name = name + ".weight";
    weight.value = Tensor<T>({cin, cout * kernel * kernel});
    bias.name = name + ".bias";
    bias.value = Tensor<T>({cout});
    const int fan_in = cin * kernel * kernel;
    nn_detail::init_uniform(weight.value, gain * std::sqrt(3.0 / fan_in), rng);
  }

  void collect(ParamList<T>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  int out_h() const { return out_h_; }
  int out_w() const { return out_w_; }

  struct Cache {
    Tensor<T> x;
  };

  Tensor<T> forward(const Tensor<T>& x, Cache& c) const {
    if (x.ndim() != 3 || x.dim(0) != cin_ || x.dim(1) != in_h_ ||
        x.dim(2) != in_w_)
      throw std::invalid_argument("ConvTranspose2d: bad input shape");
    c.x = x;

    const int kk = cout_ * kernel_ * kernel_;
    const std::size_t np = std::size_t(in_h_) * in_w_;
    std::vector<T> gcols(std::size_t(kk) * np);
    nn_detail::Map<T> gcm(gcols.data(), kk, np);
    nn_detail::CMap<T> wm(weight.value.data.data(), cin_, kk);
    nn_detail::CMap<T> xm(x.data.data(), cin_, np);
    gcm.noalias() = wm.transpose() * xm;

    Tensor<T> y({cout_, out_h_, out_w_});
    nn_detail::col2im(gcols.data(), cout_, out_h_, out_w_, kernel_, stride_,
                      pad_, in_h_, in_w_, y.data.data());
    for (int co = 0; co < cout_; ++co) {
      T* chan = y.data.data() + std::size_t(co) * out_h_ * out_w_;
      const T b = bias.value.data[std::size_t(co)];
      for (std::size_t i = 0; i < std::size_t(out_h_) * out_w_; ++i)
        chan[i] += b;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, const Cache& c,
                     GradStore<T>& grads) const {
    const int kk = cout_ * kernel_ * kernel_;
    const std::size_t np = std::size_t(in_h_) * in_w_;

    std::vector<T> cols(std::size_t(kk) * np);
    nn_detail::im2col(gy.data.data(), cout_, out_h_, out_w_, kernel_, stride_,
                      pad_, in_h_, in_w_, cols.data());
    nn_detail::CMap<T> cm(cols.data(), kk, np);

    Tensor<T> gx({cin_, in_h_, in_w_});
    nn_detail::Map<T> gxm(gx.data.data(), cin_, np);
    nn_detail::CMap<T> wm(weight.value.data.data(), cin_, kk);
    gxm.noalias() = wm * cm;

    nn_detail::Map<T> dwm(grads.of(weight).data.data(), cin_, kk);
    nn_detail::CMap<T> xm(c.x.data.data(), cin_, np);
    dwm.noalias() += xm * cm.transpose();

    auto& db = grads.of(bias).data;
    for (int co = 0; co < cout_; ++co) {
      const T* chan = gy.data.data() + std::size_t(co) * out_h_ * out_w_;
      T acc = T(0);
      for (std::size_t i = 0; i < std::size_t(out_h_) * out_w_; ++i)
        acc += chan[i];
      db[std::size_t(co)] += acc;
    }
    return gx;
  }

 private:
  int cin_ = 0, cout_ = 0, out_h_ = 0, out_w_ = 0;
  int in_h_ = 0, in_w_ = 0;
  int kernel_ = 3, stride_ = 2, pad_ = 1;
};

// ---------------------------------------------------------------------------

template <typename T>
class Dense {
 public:
  Parameter<T> weight, bias;  // weight (out x in)

  Dense() = default;
  Dense(std::string name, int in, int out, double gain, SplitMix64& rng)
      : in_(in), out_(out) {
    weight.name = name + ".weight";
    weight.value = Tensor<T>({out, in});
    bias.name = name + ".bias";
    bias.value = Tensor<T>({out});
    nn_detail::init_uniform(weight.value, gain * std::sqrt(3.0 / in), rng);
  }

  void collect(ParamList<T>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  struct Cache {
    Tensor<T> x;
  };

  Tensor<T> forward(const Tensor<T>& x, Cache& c) const {
    if (int(x.numel()) != in_)
      throw std::invalid_argument("Dense: bad input size for " + weight.name);
    c.x = x;
    Tensor<T> y({out_});
    nn_detail::CMap<T> wm(weight.value.data.data(), out_, in_);
    nn_detail::CMap<T> xm(x.data.data(), in_, 1);
    nn_detail::Map<T> ym(y.data.data(), out_, 1);
    ym.noalias() = wm * xm;
    for (int o = 0; o < out_; ++o) y.data[std::size_t(o)] += bias.value.data[std::size_t(o)];
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, const Cache& c,
                     GradStore<T>& grads) const {
    nn_detail::CMap<T> gym(gy.data.data(), out_, 1);
    nn_detail::CMap<T> xm(c.x.data.data(), in_, 1);
    nn_detail::Map<T> dwm(grads.of(weight).data.data(), out_, in_);
    dwm.noalias() += gym * xm.transpose();
    for (int o = 0; o < out_; ++o)
      grads.of(bias).data[std::size_t(o)] += gy.data[std::size_t(o)];

    Tensor<T> gx(c.x.shape);
    nn_detail::CMap<T> wm(weight.value.data.data(), out_, in_);
    nn_detail::Map<T> gxm(gx.data.data(), in_, 1);
    gxm.noalias() = wm.transpose() * gym;
    return gx;
  }

  int in() const { return in_; }
  int out() const { return out_; }

 private:
  int in_ = 0, out_ = 0;
};

// ---------------------------------------------------------------------------
// Layer normalization over the whole feature vector, learned scale and shift.

template <typename T>
class LayerNorm {
 public:
  Parameter<T> gamma, beta;
  static constexpr double kEps = 1e-5;

  LayerNorm() = default;
  LayerNorm(std::string name, int dim) : dim_(dim) {
    gamma.name = name + ".gamma";
    gamma.value = Tensor<T>({dim});
    gamma.value.fill(T(1));
    beta.name = name + ".beta";
    beta.value = Tensor<T>({dim});
  }

  void collect(ParamList<T>& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }

  struct Cache {
    Tensor<T> xhat;
    T inv_std = T(0);
  };

  Tensor<T> forward(const Tensor<T>& x, Cache& c) const {
    if (int(x.numel()) != dim_)
      throw std::invalid_argument("LayerNorm: bad input size");
    const T n = T(dim_);
    T mean = T(0);
    for (T v : x.data) mean += v;
    mean /= n;
    T var = T(0);
    for (T v : x.data) var += (v - mean) * (v - mean);
    var /= n;
    const T inv_std = T(1) / std::sqrt(var + T(kEps));
    c.xhat = Tensor<T>({dim_});
    Tensor<T> y({dim_});
    for (int i = 0; i < dim_; ++i) {
      const T xh = (x.data[std::size_t(i)] - mean) * inv_std;
      c.xhat.data[std::size_t(i)] = xh;
      y.data[std::size_t(i)] =
          gamma.value.data[std::size_t(i)] * xh + beta.value.data[std::size_t(i)];
    }
    c.inv_std = inv_std;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, const Cache& c,
                     GradStore<T>& grads) const {
    const T n = T(dim_);
    T mean_gxh = T(0), mean_gxh_xh = T(0);
    std::vector<T> gxh(static_cast<std::size_t>(dim_), T(0));
    for (int i = 0; i < dim_; ++i) {
      const T g = gy.data[std::size_t(i)];
      const T xh = c.xhat.data[std::size_t(i)];
      grads.of(gamma).data[std::size_t(i)] += g * xh;
      grads.of(beta).data[std::size_t(i)] += g;
      gxh[std::size_t(i)] = g * gamma.value.data[std::size_t(i)];
      mean_gxh += gxh[std::size_t(i)];
      mean_gxh_xh += gxh[std::size_t(i)] * xh;
    }
    mean_gxh /= n;
    mean_gxh_xh /= n;
    Tensor<T> gx({dim_});
    for (int i = 0; i < dim_; ++i)
      gx.data[std::size_t(i)] =
          c.inv_std * (gxh[std::size_t(i)] - mean_gxh -
                       c.xhat.data[std::size_t(i)] * mean_gxh_xh);
    return gx;
  }

 private:
  int dim_ = 0;
};

// ---------------------------------------------------------------------------

template <typename T>
struct ReluCache {
  Tensor<T> x;
};

template <typename T>
Tensor<T> relu(const Tensor<T>& x, ReluCache<T>& c) {
  c.x = x;
  Tensor<T> y(x.shape);
  for (std::size_t i = 0; i < x.data.size(); ++i)
    y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
  return y;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& gy, const ReluCache<T>& c) {
  Tensor<T> gx(c.x.shape);
  for (std::size_t i = 0; i < gx.data.size(); ++i)
    gx.data[i] = c.x.data[i] > T(0) ? gy.data[i] : T(0);
  return gx;
}

// ---------------------------------------------------------------------------
// Stacked-friendly GRU layer:
//   z = sigma(Wz x + Uz h + bz)
//   r = sigma(Wr x + Ur h + br)
//   n = tanh(Wn x + r .* (Un h) + bn)
//   h' = (1 - z) .* n + z .* h

template <typename T>
class GruLayer {
 public:
  Parameter<T> wz, wr, wn;  // (hidden x in)
  Parameter<T> uz, ur, un;  // (hidden x hidden)
  Parameter<T> bz, br, bn;  // (hidden)

  GruLayer() = default;
  GruLayer(std::string name, int in, int hidden, SplitMix64& rng)
      : in_(in), hidden_(hidden) {
    auto make = [&](Parameter<T>& p, const char* suffix, int rows, int cols) {
      p.name = name + "." + suffix;
      p.value = Tensor<T>({rows, cols});
      nn_detail::init_uniform(p.value, std::sqrt(1.0 / cols), rng);
    };
    make(wz, "wz", hidden, in);
    make(wr, "wr", hidden, in);
    make(wn, "wn", hidden, in);
    make(uz, "uz", hidden, hidden);
    make(ur, "ur", hidden, hidden);
    make(un, "un", hidden, hidden);
    auto make_b = [&](Parameter<T>& p, const char* suffix) {
      p.name = name + "." + suffix;
      p.value = Tensor<T>({hidden});
    };
    make_b(bz, "bz");
    make_b(br, "br");
    make_b(bn, "bn");
  }

  void collect(ParamList<T>& out) {
    for (auto* p : {&wz, &wr, &wn, &uz, &ur, &un, &bz, &br, &bn})
      out.push_back(p);
  }

  int hidden() const { return hidden_; }
  int in() const { return in_; }

  struct Cache {
    Tensor<T> x, h, z, r, n, unh;
  };

  Tensor<T> forward(const Tensor<T>& x, const Tensor<T>& h, Cache& c) const {
    if (int(x.numel()) != in_ || int(h.numel()) != hidden_)
      throw std::invalid_argument("GruLayer: bad input/hidden size");
    c.x = x;
    c.h = h;
    c.z = Tensor<T>({hidden_});
    c.r = Tensor<T>({hidden_});
    c.n = Tensor<T>({hidden_});
    c.unh = Tensor<T>({hidden_});

    auto gemv = [&](const Parameter<T>& m, const Tensor<T>& v, int cols,
                    Tensor<T>& out) {
      nn_detail::CMap<T> mm(m.value.data.data(), hidden_, cols);
      nn_detail::CMap<T> vm(v.data.data(), cols, 1);
      nn_detail::Map<T> om(out.data.data(), hidden_, 1);
      om.noalias() = mm * vm;
    };

    Tensor<T> az({hidden_}), ar({hidden_}), an({hidden_}), tmp({hidden_});
    gemv(wz, x, in_, az);
    gemv(uz, h, hidden_, tmp);
    for (int i = 0; i < hidden_; ++i)
      c.z.data[std::size_t(i)] = nn_detail::sigmoid(
          az.data[std::size_t(i)] + tmp.data[std::size_t(i)] +
          bz.value.data[std::size_t(i)]);

    gemv(wr, x, in_, ar);
    gemv(ur, h, hidden_, tmp);
    for (int i = 0; i < hidden_; ++i)
      c.r.data[std::size_t(i)] = nn_detail::sigmoid(
          ar.data[std::size_t(i)] + tmp.data[std::size_t(i)] +
          br.value.data[std::size_t(i)]);

    gemv(wn, x, in_, an);
    gemv(un, h, hidden_, c.unh);
    for (int i = 0; i < hidden_; ++i)
      c.n.data[std::size_t(i)] = std::tanh(
          an.data[std::size_t(i)] +
          c.r.data[std::size_t(i)] * c.unh.data[std::size_t(i)] +
          bn.value.data[std::size_t(i)]);

    Tensor<T> hn({hidden_});
    for (int i = 0; i < hidden_; ++i)
      hn.data[std::size_t(i)] =
          (T(1) - c.z.data[std::size_t(i)]) * c.n.data[std::size_t(i)] +
          c.z.data[std::size_t(i)] * h.data[std::size_t(i)];
    return hn;
  }

  // Returns (gx, gh).
  std::pair<Tensor<T>, Tensor<T>> backward(const Tensor<T>& ghn,
                                           const Cache& c,
                                           GradStore<T>& grads) const {
    Tensor<T> daz({hidden_}), dar({hidden_}), dan({hidden_});
    Tensor<T> gh({hidden_});

    for (int i = 0; i < hidden_; ++i) {
      const T g = ghn.data[std::size_t(i)];
      const T z = c.z.data[std::size_t(i)];
      const T r = c.r.data[std::size_t(i)];
      const T n = c.n.data[std::size_t(i)];
      const T h = c.h.data[std::size_t(i)];
      const T gz = g * (h - n);
      const T gn = g * (T(1) - z);
      gh.data[std::size_t(i)] = g * z;
      dan.data[std::size_t(i)] = gn * (T(1) - n * n);
      const T gr = dan.data[std::size_t(i)] * c.unh.data[std::size_t(i)];
      dar.data[std::size_t(i)] = gr * r * (T(1) - r);
      daz.data[std::size_t(i)] = gz * z * (T(1) - z);
    }

    auto outer_add = [&](const Parameter<T>& m, const Tensor<T>& a,
                         const Tensor<T>& v, int cols) {
      nn_detail::Map<T> dm(grads.of(m).data.data(), hidden_, cols);
      nn_detail::CMap<T> am(a.data.data(), hidden_, 1);
      nn_detail::CMap<T> vm(v.data.data(), cols, 1);
      dm.noalias() += am * vm.transpose();
    };
    auto transpose_apply = [&](const Parameter<T>& m, const Tensor<T>& a,
                               int cols, Tensor<T>& out) {
      nn_detail::CMap<T> mm(m.value.data.data(), hidden_, cols);
      nn_detail::CMap<T> am(a.data.data(), hidden_, 1);
      nn_detail::Map<T> om(out.data.data(), cols, 1);
      om.noalias() += mm.transpose() * am;
    };

    // n-gate: the recurrent branch carries r elementwise
    Tensor<T> dan_r({hidden_});
    for (int i = 0; i < hidden_; ++i)
      dan_r.data[std::size_t(i)] =
          dan.data[std::size_t(i)] * c.r.data[std::size_t(i)];

    outer_add(wn, dan, c.x, in_);
    outer_add(un, dan_r, c.h, hidden_);
    outer_add(wr, dar, c.x, in_);
    outer_add(ur, dar, c.h, hidden_);
    outer_add(wz, daz, c.x, in_);
    outer_add(uz, daz, c.h, hidden_);
    for (int i = 0; i < hidden_; ++i) {
      grads.of(bn).data[std::size_t(i)] += dan.data[std::size_t(i)];
      grads.of(br).data[std::size_t(i)] += dar.data[std::size_t(i)];
      grads.of(bz).data[std::size_t(i)] += daz.data[std::size_t(i)];
    }

    Tensor<T> gx({in_});
    transpose_apply(wn, dan, in_, gx);
    transpose_apply(wr, dar, in_, gx);
    transpose_apply(wz, daz, in_, gx);

    transpose_apply(un, dan_r, hidden_, gh);
    transpose_apply(ur, dar, hidden_, gh);
    transpose_apply(uz, daz, hidden_, gh);
    return {std::move(gx), std::move(gh)};
  }

 private:
  int in_ = 0, hidden_ = 0;
};

// ---------------------------------------------------------------------------
// MSE loss, mean over elements; masked variant averages over selected
// entries only and rejects an empty mask (the mean would be undefined).

template <typename T>
std::pair<T, Tensor<T>> mse_loss(const Tensor<T>& pred,
                                 const Tensor<T>& target) {
  if (!pred.same_shape(target))
    throw std::invalid_argument("mse_loss: shape mismatch");
  const T n = T(pred.numel());
  T loss = T(0);
  Tensor<T> grad(pred.shape);
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const T d = pred.data[i] - target.data[i];
    loss += d * d;
    grad.data[i] = T(2) * d / n;
  }
  return {loss / n, std::move(grad)};
}

template <typename T>
std::pair<T, Tensor<T>> mse_loss_masked(const Tensor<T>& pred,
                                        const Tensor<T>& target,
                                        const std::vector<std::uint8_t>& mask) {
  if (!pred.same_shape(target) || mask.size() != pred.numel())
    throw std::invalid_argument("mse_loss_masked: shape mismatch");
  std::size_t n = 0;
  for (auto m : mask) n += (m != 0);
  if (n == 0)
    throw std::invalid_argument("mse_loss_masked: empty mask");
  T loss = T(0);
  Tensor<T> grad(pred.shape);
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    if (!mask[i]) continue;
    const T d = pred.data[i] - target.data[i];
    loss += d * d;
    grad.data[i] = T(2) * d / T(n);
  }
  return {loss / T(n), std::move(grad)};
}

// ---------------------------------------------------------------------------
// AdamW: decoupled weight decay applied separately from the bias-corrected
// Adam displacement. Per-parameter lr_mult scales both.

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

template <typename T>
class AdamW {
 public:
  AdamW() = default;
  AdamW(const ParamList<T>& params, AdamWConfig cfg) : cfg_(cfg) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto* p : params) {
      m_.emplace_back(p->value.shape);
      v_.emplace_back(p->value.shape);
      t_.push_back(0);
    }
  }

  void step(const ParamList<T>& params, const GradStore<T>& grads, double lr) {
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
      Parameter<T>& p = *params[pi];
      const Tensor<T>& g = grads.g[pi];
      const double eff_lr = lr * p.lr_mult;
      ++t_[pi];
      const double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_[pi]));
      const double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_[pi]));
      auto& m = m_[pi].data;
      auto& v = v_[pi].data;
      for (std::size_t i = 0; i < g.data.size(); ++i) {
        // decay first, decoupled from the gradient direction
        p.value.data[i] -= T(eff_lr * cfg_.weight_decay) * p.value.data[i];
        m[i] = T(cfg_.beta1) * m[i] + T(1.0 - cfg_.beta1) * g.data[i];
        v[i] = T(cfg_.beta2) * v[i] + T(1.0 - cfg_.beta2) * g.data[i] * g.data[i];
        const T mhat = m[i] / T(bc1);
        const T vhat = v[i] / T(bc2);
        p.value.data[i] -= T(eff_lr) * mhat / (std::sqrt(vhat) + T(cfg_.eps));
      }
    }
  }

  // Serialized alongside checkpoints when requested.
  const std::vector<Tensor<T>>& first_moments() const { return m_; }
  const std::vector<Tensor<T>>& second_moments() const { return v_; }
  const std::vector<long>& steps() const { return t_; }

 private:
  AdamWConfig cfg_;
  std::vector<Tensor<T>> m_, v_;
  std::vector<long> t_;
};

// ---------------------------------------------------------------------------
// Plateau schedule: halve when the monitored loss has not improved by a
// relative 1e-4 for 3 consecutive observations; patience resets after each
// cut; floor at 1e-6.

class PlateauSchedule {
 public:
  explicit PlateauSchedule(double initial_lr) : lr_(initial_lr) {}

  double observe(double monitored) {
    if (monitored < best_ * (1.0 - kRelImprovement)) {
      best_ = monitored;
      bad_ = 0;
    } else if (++bad_ >= kPatience) {
      lr_ = std::max(lr_ * kFactor, kMinLr);
      bad_ = 0;
    }
    return lr_;
  }

  double lr() const { return lr_; }

  static constexpr double kFactor = 0.5;
  static constexpr int kPatience = 3;
  static constexpr double kMinLr = 1e-6;
  static constexpr double kRelImprovement = 1e-4;

 private:
  double lr_;
  double best_ = std::numeric_limits<double>::infinity();
  int bad_ = 0;
};

// ---------------------------------------------------------------------------
// Central finite differences against analytic gradients, in double. Relative
// error |a - n| / max(|a|, |n|, 1e-8); coordinates are sampled per parameter
// when tensors are large.

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
};

inline GradCheckReport grad_check(
    const std::function<double()>& loss_fn, const ParamList<double>& params,
    const GradStore<double>& analytic, double h = 1e-5,
    int max_coords_per_param = 0, std::uint64_t seed = 0) {
  GradCheckReport report;
  SplitMix64 rng(seed);
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter<double>& p = *params[pi];
    const std::size_t n = p.value.numel();
    std::vector<std::size_t> coords;
    if (max_coords_per_param <= 0 || n <= std::size_t(max_coords_per_param)) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      for (int i = 0; i < max_coords_per_param; ++i)
        coords.push_back(rng.next_below(n));
    }
    for (std::size_t i : coords) {
      const double saved = p.value.data[i];
      const double a = analytic.g[pi].data[i];
      // Two step sizes; ReLU kinks inside the larger interval would
      // otherwise show as false mismatches.
      double rel = std::numeric_limits<double>::infinity();
      for (const double step : {h, h * 0.1}) {
        p.value.data[i] = saved + step;
        const double up = loss_fn();
        p.value.data[i] = saved - step;
        const double down = loss_fn();
        p.value.data[i] = saved;
        const double numeric = (up - down) / (2.0 * step);
        rel = std::min(rel, std::abs(a - numeric) /
                                std::max({std::abs(a), std::abs(numeric), 1e-8}));
      }
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = p.name;
      }
    }
  }
  return report;
}

}  // namespace relief

#endif  // RELIEF_NN_HPP
