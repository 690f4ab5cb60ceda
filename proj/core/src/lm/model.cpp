// Copyright 2026 The stamp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stamp/lm/model.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace stamp::lm {

void ModelConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfigError, "model: " + msg); };
  if (layers < 1) fail("layers must be >= 1");
  if (model_dim < 1 || heads < 1) fail("model_dim and heads must be >= 1");
  if (model_dim % heads != 0) fail("model_dim must be divisible by heads");
  if (context_len < 4) fail("context_len must be >= 4");
  if (vocab_size < 2) fail("vocab_size must be >= 2");
  if (mlp_mult < 1) fail("mlp_mult must be >= 1");
}

std::vector<TensorInfo> ParameterLayout(const ModelConfig& c) {
  std::vector<TensorInfo> out;
  std::size_t offset = 0;
  auto add = [&](std::string name, int rows, int cols) {
    out.push_back({std::move(name), rows, cols, offset});
    offset += (out.back().size() + kTensorAlign - 1) / kTensorAlign * kTensorAlign;
  };
  const int d = c.model_dim;
  const int h = c.mlp_mult * d;
  add("tok_emb", c.vocab_size, d);
  add("pos_emb", c.context_len, d);
  for (int l = 0; l < c.layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    add(p + "ln1.g", 1, d);
    add(p + "ln1.b", 1, d);
    add(p + "attn.w_qkv", d, 3 * d);
    add(p + "attn.b_qkv", 1, 3 * d);
    add(p + "attn.w_o", d, d);
    add(p + "attn.b_o", 1, d);
    add(p + "ln2.g", 1, d);
    add(p + "ln2.b", 1, d);
    add(p + "mlp.w_fc", d, h);
    add(p + "mlp.b_fc", 1, h);
    add(p + "mlp.w_proj", h, d);
    add(p + "mlp.b_proj", 1, d);
  }
  add("lnf.g", 1, d);
  add("lnf.b", 1, d);
  add("w_out", d, c.vocab_size);
  add("b_out", 1, c.vocab_size);
  return out;
}

std::size_t ParameterCount(const ModelConfig& config) {
  const TensorInfo last = ParameterLayout(config).back();
  return (last.offset + last.size() + kTensorAlign - 1) / kTensorAlign * kTensorAlign;
}

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

template <typename T>
T Gelu(T x) {
  const T u = T(kGeluC) * (x + T(kGeluA) * x * x * x);
  return T(0.5) * x * (T(1) + std::tanh(u));
}

template <typename T>
T GeluGrad(T x) {
  const T u = T(kGeluC) * (x + T(kGeluA) * x * x * x);
  const T th = std::tanh(u);
  return T(0.5) * (T(1) + th) + T(0.5) * x * (T(1) - th * th) * T(kGeluC) * (T(1) + T(3 * kGeluA) * x * x);
}

template <typename Mat, typename Col, typename Row>
void LayerNorm(const Mat& x, const Row& gain, const Row& bias, Mat& hat, Col& rstd, Mat& out) {
  using T = typename Mat::Scalar;
  const Col mean = x.rowwise().mean();
  hat = x.colwise() - mean;
  rstd = (hat.array().square().rowwise().mean() + T(kLnEps)).rsqrt().matrix();
  hat = rstd.asDiagonal() * hat;
  out = (hat.array().rowwise() * gain.array()).rowwise() + bias.array();
}

template <typename Mat, typename Col, typename Row, typename GRow>
Mat LayerNormBackward(const Mat& dout, const Mat& hat, const Col& rstd, const Row& gain, GRow dgain,
                      GRow dbias) {
  using T = typename Mat::Scalar;
  dgain += (dout.array() * hat.array()).colwise().sum().matrix();
  dbias += dout.colwise().sum();
  const Mat dhat = (dout.array().rowwise() * gain.array()).matrix();
  const T inv_d = T(1) / static_cast<T>(hat.cols());
  const Col mean_dhat = dhat.rowwise().sum() * inv_d;
  const Col mean_dhat_hat = (dhat.array() * hat.array()).rowwise().sum().matrix() * inv_d;
  Mat dx = dhat.colwise() - mean_dhat;
  dx -= mean_dhat_hat.asDiagonal() * hat;
  return rstd.asDiagonal() * dx;
}

}  // namespace

template <typename T>
void Transformer<T>::BuildLayout() {
  config_.Validate();
  layout_ = ParameterLayout(config_);
  std::size_t i = 0;
  tok_emb_ = layout_[i++].offset;
  pos_emb_ = layout_[i++].offset;
  layer_offsets_.clear();
  for (int l = 0; l < config_.layers; ++l) {
    LayerOffsets o;
    o.ln1_g = layout_[i++].offset;
    o.ln1_b = layout_[i++].offset;
    o.w_qkv = layout_[i++].offset;
    o.b_qkv = layout_[i++].offset;
    o.w_o = layout_[i++].offset;
    o.b_o = layout_[i++].offset;
    o.ln2_g = layout_[i++].offset;
    o.ln2_b = layout_[i++].offset;
    o.w_fc = layout_[i++].offset;
    o.b_fc = layout_[i++].offset;
    o.w_proj = layout_[i++].offset;
    o.b_proj = layout_[i++].offset;
    layer_offsets_.push_back(o);
  }
  lnf_g_ = layout_[i++].offset;
  lnf_b_ = layout_[i++].offset;
  w_out_ = layout_[i++].offset;
  b_out_ = layout_[i++].offset;
}

template <typename T>
Transformer<T>::Transformer(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  BuildLayout();
  params_.assign(ParameterCount(config_), T(0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double resid_scale = 1.0 / std::sqrt(2.0 * config_.layers);
  for (const auto& t : layout_) {
    const bool is_gain = t.name.ends_with(".g");
    const bool is_bias = t.name.ends_with(".b") || t.name.find(".b_") != std::string::npos || t.name == "b_out";
    double std = 0.02;
    if (t.name.ends_with("w_o") || t.name.ends_with("w_proj")) std *= resid_scale;
    for (std::size_t k = 0; k < t.size(); ++k) {
      double v = 0.0;
      if (is_gain) v = 1.0;
      else if (!is_bias) v = std * normal(rng);
      // Round through float so the float32 checkpoint format is exact.
      params_[t.offset + k] = static_cast<T>(static_cast<float>(v));
    }
  }
}

template <typename T>
Transformer<T>::Transformer(const ModelConfig& config, std::span<const T> params)
    : config_(config), params_(params.begin(), params.end()) {
  BuildLayout();
  if (params_.size() != ParameterCount(config_))
    throw Error(ErrorCode::kFormatError, "parameter count " + std::to_string(params_.size()) +
                                             " does not match layout " + std::to_string(ParameterCount(config_)));
}

template <typename T>
typename Transformer<T>::Matrix Transformer<T>::Logits(std::span<const int> ids) const {
  Tape tape;
  return Forward(ids, tape);
}

template <typename T>
typename Transformer<T>::Matrix Transformer<T>::Forward(std::span<const int> ids, Tape& tape) const {
  using MapM = Eigen::Map<const Matrix>;
  using MapR = Eigen::Map<const RowVector>;
  const int n = static_cast<int>(ids.size());
  const int d = config_.model_dim;
  const int hid = config_.mlp_mult * d;
  const int nh = config_.heads;
  const int dh = d / nh;
  if (n == 0) throw Error(ErrorCode::kEmptyOutput, "forward on empty sequence");
  if (n > config_.context_len)
    throw Error(ErrorCode::kContextOverflow, "sequence of " + std::to_string(n) + " tokens exceeds context " +
                                                 std::to_string(config_.context_len));
  const T* p = params_.data();
  tape.ids.assign(ids.begin(), ids.end());
  tape.layers.resize(config_.layers);

  MapM tok(p + tok_emb_, config_.vocab_size, d);
  MapM pos(p + pos_emb_, config_.context_len, d);
  Matrix x(n, d);
  for (int t = 0; t < n; ++t) {
    if (ids[t] < 0 || ids[t] >= config_.vocab_size)
      throw Error(ErrorCode::kFormatError, "token id " + std::to_string(ids[t]) + " out of range");
    x.row(t) = tok.row(ids[t]) + pos.row(t);
  }

  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  for (int l = 0; l < config_.layers; ++l) {
    const LayerOffsets& o = layer_offsets_[l];
    auto& L = tape.layers[l];
    L.x_in = x;
    LayerNorm(x, MapR(p + o.ln1_g, d), MapR(p + o.ln1_b, d), L.ln1_hat, L.ln1_rstd, L.ln1_out);
    L.qkv.noalias() = L.ln1_out * MapM(p + o.w_qkv, d, 3 * d);
    L.qkv.rowwise() += MapR(p + o.b_qkv, 3 * d);
    L.attn.setZero(n, d);
    L.probs.resize(nh);
    for (int h = 0; h < nh; ++h) {
      const auto q = L.qkv.middleCols(h * dh, dh);
      const auto k = L.qkv.middleCols(d + h * dh, dh);
      const auto v = L.qkv.middleCols(2 * d + h * dh, dh);
      Matrix& pr = L.probs[h];
      pr.noalias() = (q * k.transpose()) * scale;
      for (int i = 0; i < n; ++i) {
        const T mx = pr.row(i).head(i + 1).maxCoeff();
        T sum = T(0);
        for (int j = 0; j <= i; ++j) {
          pr(i, j) = std::exp(pr(i, j) - mx);
          sum += pr(i, j);
        }
        pr.row(i).head(i + 1) /= sum;
        pr.row(i).tail(n - i - 1).setZero();
      }
      L.attn.middleCols(h * dh, dh).noalias() = pr * v;
    }
    x.noalias() += L.attn * MapM(p + o.w_o, d, d);
    x.rowwise() += MapR(p + o.b_o, d);
    L.x_mid = x;
    LayerNorm(x, MapR(p + o.ln2_g, d), MapR(p + o.ln2_b, d), L.ln2_hat, L.ln2_rstd, L.ln2_out);
    L.fc_pre.noalias() = L.ln2_out * MapM(p + o.w_fc, d, hid);
    L.fc_pre.rowwise() += MapR(p + o.b_fc, hid);
    L.fc_act = L.fc_pre.unaryExpr([](T v) { return Gelu(v); });
    x.noalias() += L.fc_act * MapM(p + o.w_proj, hid, d);
    x.rowwise() += MapR(p + o.b_proj, d);
  }
  tape.x_last = x;
  LayerNorm(x, MapR(p + lnf_g_, d), MapR(p + lnf_b_, d), tape.lnf_hat, tape.lnf_rstd, tape.lnf_out);
  Matrix logits = tape.lnf_out * MapM(p + w_out_, d, config_.vocab_size);
  logits.rowwise() += MapR(p + b_out_, config_.vocab_size);
  return logits;
}

template <typename T>
void Transformer<T>::Backward(const Tape& tape, const Matrix& dlogits, std::span<T> grad) const {
  using MapM = Eigen::Map<const Matrix>;
  using MapR = Eigen::Map<const RowVector>;
  using GradM = Eigen::Map<Matrix>;
  using GradR = Eigen::Map<RowVector>;
  if (grad.size() != params_.size()) throw Error(ErrorCode::kFormatError, "gradient buffer size mismatch");
  const int n = static_cast<int>(tape.ids.size());
  const int d = config_.model_dim;
  const int hid = config_.mlp_mult * d;
  const int nh = config_.heads;
  const int dh = d / nh;
  const int vocab = config_.vocab_size;
  const T* p = params_.data();
  T* g = grad.data();
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));

  GradM(g + w_out_, d, vocab).noalias() += tape.lnf_out.transpose() * dlogits;
  GradR(g + b_out_, vocab) += dlogits.colwise().sum();
  Matrix dlnf = dlogits * MapM(p + w_out_, d, vocab).transpose();
  Matrix dx = LayerNormBackward(dlnf, tape.lnf_hat, tape.lnf_rstd, MapR(p + lnf_g_, d), GradR(g + lnf_g_, d),
                                GradR(g + lnf_b_, d));

  for (int l = config_.layers - 1; l >= 0; --l) {
    const LayerOffsets& o = layer_offsets_[l];
    const auto& L = tape.layers[l];

    // MLP block: x_out = x_mid + gelu(ln2(x_mid) W_fc + b_fc) W_proj + b_proj
    GradM(g + o.w_proj, hid, d).noalias() += L.fc_act.transpose() * dx;
    GradR(g + o.b_proj, d) += dx.colwise().sum();
    Matrix dfc = dx * MapM(p + o.w_proj, hid, d).transpose();
    dfc.array() *= L.fc_pre.unaryExpr([](T v) { return GeluGrad(v); }).array();
    GradM(g + o.w_fc, d, hid).noalias() += L.ln2_out.transpose() * dfc;
    GradR(g + o.b_fc, hid) += dfc.colwise().sum();
    Matrix dln2 = dfc * MapM(p + o.w_fc, d, hid).transpose();
    dx += LayerNormBackward(dln2, L.ln2_hat, L.ln2_rstd, MapR(p + o.ln2_g, d), GradR(g + o.ln2_g, d),
                            GradR(g + o.ln2_b, d));

    // Attention block: x_mid = x_in + attn(ln1(x_in)) W_o + b_o
    GradM(g + o.w_o, d, d).noalias() += L.attn.transpose() * dx;
    GradR(g + o.b_o, d) += dx.colwise().sum();
    const Matrix dattn = dx * MapM(p + o.w_o, d, d).transpose();
    Matrix dqkv = Matrix::Zero(n, 3 * d);
    for (int h = 0; h < nh; ++h) {
      const auto q = L.qkv.middleCols(h * dh, dh);
      const auto k = L.qkv.middleCols(d + h * dh, dh);
      const auto v = L.qkv.middleCols(2 * d + h * dh, dh);
      const Matrix& pr = L.probs[h];
      const auto dout = dattn.middleCols(h * dh, dh);
      const Matrix dpr = dout * v.transpose();
      dqkv.middleCols(2 * d + h * dh, dh).noalias() += pr.transpose() * dout;
      const ColVector rowdot = (dpr.array() * pr.array()).rowwise().sum().matrix();
      Matrix ds = (pr.array() * (dpr.colwise() - rowdot).array()).matrix();
      ds *= scale;
      dqkv.middleCols(h * dh, dh).noalias() += ds * k;
      dqkv.middleCols(d + h * dh, dh).noalias() += ds.transpose() * q;
    }
    GradM(g + o.w_qkv, d, 3 * d).noalias() += L.ln1_out.transpose() * dqkv;
    GradR(g + o.b_qkv, 3 * d) += dqkv.colwise().sum();
    Matrix dln1 = dqkv * MapM(p + o.w_qkv, d, 3 * d).transpose();
    dx += LayerNormBackward(dln1, L.ln1_hat, L.ln1_rstd, MapR(p + o.ln1_g, d), GradR(g + o.ln1_g, d),
                            GradR(g + o.ln1_b, d));
  }

  GradM tok(g + tok_emb_, vocab, d);
  GradM pos(g + pos_emb_, config_.context_len, d);
  for (int t = 0; t < n; ++t) {
    tok.row(tape.ids[t]) += dx.row(t);
    pos.row(t) += dx.row(t);
  }
}

// ---------------------------------------------------------------------------
// Incremental decoding

template <typename T>
typename Transformer<T>::RowVector Transformer<T>::Decoder::Prefill(std::span<const int> prompt, int batch) {
  const auto& m = *model_;
  const int ctx = m.config_.context_len;
  const int d = m.config_.model_dim;
  Tape tape;
  const Matrix logits = m.Forward(prompt, tape);
  const int n = static_cast<int>(prompt.size());
  k_.assign(m.config_.layers, Matrix());
  v_.assign(m.config_.layers, Matrix());
  for (int l = 0; l < m.config_.layers; ++l) {
    k_[l].setZero(static_cast<Eigen::Index>(batch) * ctx, d);
    v_[l].setZero(static_cast<Eigen::Index>(batch) * ctx, d);
    for (int b = 0; b < batch; ++b) {
      k_[l].middleRows(static_cast<Eigen::Index>(b) * ctx, n) = tape.layers[l].qkv.middleCols(d, d);
      v_[l].middleRows(static_cast<Eigen::Index>(b) * ctx, n) = tape.layers[l].qkv.middleCols(2 * d, d);
    }
  }
  pos_ = n;
  live_ = batch;
  return logits.row(n - 1);
}

template <typename T>
typename Transformer<T>::Matrix Transformer<T>::Decoder::Step(std::span<const int> tokens) {
  using MapM = Eigen::Map<const Matrix>;
  using MapR = Eigen::Map<const RowVector>;
  const auto& m = *model_;
  const auto& c = m.config_;
  const int ctx = c.context_len;
  const int d = c.model_dim;
  const int hid = c.mlp_mult * d;
  const int nh = c.heads;
  const int dh = d / nh;
  const int b_live = live_;
  if (static_cast<int>(tokens.size()) != b_live) throw Error(ErrorCode::kFormatError, "decoder batch mismatch");
  if (pos_ >= ctx) throw Error(ErrorCode::kContextOverflow, "decoder reached the context limit");
  const T* p = m.params_.data();
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));

  MapM tok(p + m.tok_emb_, c.vocab_size, d);
  MapM pos(p + m.pos_emb_, ctx, d);
  Matrix x(b_live, d);
  for (int b = 0; b < b_live; ++b) x.row(b) = tok.row(tokens[b]) + pos.row(pos_);

  Matrix hat, a, qkv, attn(b_live, d), fc;
  ColVector rstd;
  std::vector<T> scores(pos_ + 1);
  for (int l = 0; l < c.layers; ++l) {
    const LayerOffsets& o = m.layer_offsets_[l];
    LayerNorm(x, MapR(p + o.ln1_g, d), MapR(p + o.ln1_b, d), hat, rstd, a);
    qkv.noalias() = a * MapM(p + o.w_qkv, d, 3 * d);
    qkv.rowwise() += MapR(p + o.b_qkv, 3 * d);
    for (int b = 0; b < b_live; ++b) {
      const Eigen::Index base = static_cast<Eigen::Index>(b) * ctx;
      k_[l].row(base + pos_) = qkv.row(b).segment(d, d);
      v_[l].row(base + pos_) = qkv.row(b).segment(2 * d, d);
      for (int h = 0; h < nh; ++h) {
        const auto q = qkv.row(b).segment(h * dh, dh);
        T mx = -std::numeric_limits<T>::infinity();
        for (int j = 0; j <= pos_; ++j) {
          scores[j] = k_[l].row(base + j).segment(h * dh, dh).dot(q) * scale;
          mx = std::max(mx, scores[j]);
        }
        T sum = T(0);
        for (int j = 0; j <= pos_; ++j) {
          scores[j] = std::exp(scores[j] - mx);
          sum += scores[j];
        }
        auto out = attn.row(b).segment(h * dh, dh);
        out.setZero();
        for (int j = 0; j <= pos_; ++j) out += (scores[j] / sum) * v_[l].row(base + j).segment(h * dh, dh);
      }
    }
    x.noalias() += attn * MapM(p + o.w_o, d, d);
    x.rowwise() += MapR(p + o.b_o, d);
    LayerNorm(x, MapR(p + o.ln2_g, d), MapR(p + o.ln2_b, d), hat, rstd, a);
    fc.noalias() = a * MapM(p + o.w_fc, d, hid);
    fc.rowwise() += MapR(p + o.b_fc, hid);
    fc = fc.unaryExpr([](T v) { return Gelu(v); });
    x.noalias() += fc * MapM(p + o.w_proj, hid, d);
    x.rowwise() += MapR(p + o.b_proj, d);
  }
  LayerNorm(x, MapR(p + m.lnf_g_, d), MapR(p + m.lnf_b_, d), hat, rstd, a);
  Matrix logits = a * MapM(p + m.w_out_, d, c.vocab_size);
  logits.rowwise() += MapR(p + m.b_out_, c.vocab_size);
  ++pos_;
  return logits;
}

template <typename T>
void Transformer<T>::Decoder::Retain(std::span<const int> rows) {
  const int ctx = model_->config_.context_len;
  for (std::size_t l = 0; l < k_.size(); ++l) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int src = rows[i];
      if (src == static_cast<int>(i)) continue;
      k_[l].middleRows(static_cast<Eigen::Index>(i) * ctx, ctx) =
          k_[l].middleRows(static_cast<Eigen::Index>(src) * ctx, ctx);
      v_[l].middleRows(static_cast<Eigen::Index>(i) * ctx, ctx) =
          v_[l].middleRows(static_cast<Eigen::Index>(src) * ctx, ctx);
    }
    k_[l].conservativeResize(static_cast<Eigen::Index>(rows.size()) * ctx, Eigen::NoChange);
    v_[l].conservativeResize(static_cast<Eigen::Index>(rows.size()) * ctx, Eigen::NoChange);
  }
  live_ = static_cast<int>(rows.size());
}

template class Transformer<float>;
template class Transformer<double>;

}  // namespace stamp::lm
