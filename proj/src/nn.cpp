#include "rectrack/nn.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "rectrack/error.hpp"

namespace rectrack {

void rmsprop_update(Param& p, double learning_rate, double rho, double eps) {
  assert(p.value.same_shape(p.grad) && p.value.same_shape(p.rms_cache));
  for (std::size_t k = 0; k < p.value.data.size(); ++k) {
    double g = p.grad.data[k];
    double c = rho * p.rms_cache.data[k] + (1.0 - rho) * g * g;
    p.rms_cache.data[k] = c;
    p.value.data[k] -= learning_rate * g / (std::sqrt(c) + eps);
    p.grad.data[k] = 0.0;
  }
}

void zero_grads(std::span<Param* const> params) {
  for (Param* p : params) p->grad.zero();
}

void scale_grads(std::span<Param* const> params, double s) {
  for (Param* p : params)
    for (double& g : p->grad.data) g *= s;
}

double grad_norm(std::span<Param* const> params) {
  double sq = 0.0;
  for (Param* p : params)
    for (double g : p->grad.data) sq += g * g;
  return std::sqrt(sq);
}

void clip_grads(std::span<Param* const> params, double max_norm) {
  if (max_norm <= 0.0) return;
  double n = grad_norm(params);
  if (n > max_norm) scale_grads(params, max_norm / n);
}

void init_uniform(Param& p, Rng& rng, double range) {
  for (double& w : p.value.data) w = rng.uniform(-range, range);
}

Vec Affine::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != in) throw std::invalid_argument("Affine::forward: input size mismatch");
  Vec y(out);
  for (int k = 0; k < out; ++k) {
    const double* row = w.value.row_ptr(k);
    double s = row[in];  // bias column
    for (int j = 0; j < in; ++j) s += row[j] * x[j];
    y[k] = s;
  }
  return y;
}

void Affine::backward(std::span<const double> x, std::span<const double> dy, Vec* dx) {
  assert(static_cast<int>(x.size()) == in && static_cast<int>(dy.size()) == out);
  for (int k = 0; k < out; ++k) {
    double d = dy[k];
    if (d == 0.0) continue;
    double* grow = w.grad.row_ptr(k);
    for (int j = 0; j < in; ++j) grow[j] += d * x[j];
    grow[in] += d;
    if (dx) {
      const double* row = w.value.row_ptr(k);
      for (int j = 0; j < in; ++j) (*dx)[j] += d * row[j];
    }
  }
}

Vec RnnCell::step(std::span<const double> input, std::span<const double> h_prev) const {
  if (static_cast<int>(input.size()) != input_size)
    throw std::invalid_argument("RnnCell::step: input size mismatch");
  if (static_cast<int>(h_prev.size()) != hidden_size)
    throw std::invalid_argument("RnnCell::step: hidden size mismatch");
  Vec h(hidden_size);
  for (int k = 0; k < hidden_size; ++k) {
    const double* row = weights.value.row_ptr(k);
    double s = row[input_size + hidden_size];
    for (int j = 0; j < input_size; ++j) s += row[j] * input[j];
    for (int j = 0; j < hidden_size; ++j) s += row[input_size + j] * h_prev[j];
    h[k] = std::tanh(s);
  }
  return h;
}

void RnnCell::backward(std::span<const double> input, std::span<const double> h_prev,
                       std::span<const double> h, std::span<const double> dh, Vec* dx,
                       Vec* dh_prev) {
  for (int k = 0; k < hidden_size; ++k) {
    double da = dh[k] * (1.0 - h[k] * h[k]);
    if (da == 0.0) continue;
    double* grow = weights.grad.row_ptr(k);
    for (int j = 0; j < input_size; ++j) grow[j] += da * input[j];
    for (int j = 0; j < hidden_size; ++j) grow[input_size + j] += da * h_prev[j];
    grow[input_size + hidden_size] += da;
    const double* row = weights.value.row_ptr(k);
    if (dx)
      for (int j = 0; j < input_size; ++j) (*dx)[j] += da * row[j];
    if (dh_prev)
      for (int j = 0; j < hidden_size; ++j) (*dh_prev)[j] += da * row[input_size + j];
  }
}

LstmCell::LstmCell(int in_size, int h_size)
    : input_size(in_size),
      hidden_size(h_size),
      wi(h_size, in_size + h_size + 1),
      wo(h_size, in_size + h_size + 1),
      wf(h_size, in_size + h_size + 1),
      wg(h_size, in_size + h_size + 1) {}

void LstmCell::init(Rng& rng, double range, double forget_bias) {
  init_uniform(wi, rng, range);
  init_uniform(wo, rng, range);
  init_uniform(wf, rng, range);
  init_uniform(wg, rng, range);
  for (int k = 0; k < hidden_size; ++k) wf.value.at(k, input_size + hidden_size) = forget_bias;
}

namespace {

// Pre-activation of one gate row over [input; h_prev; 1].
double gate_preact(const Matrix& w, int k, std::span<const double> input,
                   std::span<const double> h_prev) {
  const double* row = w.row_ptr(k);
  int in = static_cast<int>(input.size());
  int hs = static_cast<int>(h_prev.size());
  double s = row[in + hs];
  for (int j = 0; j < in; ++j) s += row[j] * input[j];
  for (int j = 0; j < hs; ++j) s += row[in + j] * h_prev[j];
  return s;
}

void gate_backward(Param& w, std::span<const double> input, std::span<const double> h_prev,
                   std::span<const double> da, Vec* dx, Vec* dh_prev) {
  int in = static_cast<int>(input.size());
  int hs = static_cast<int>(h_prev.size());
  for (int k = 0; k < static_cast<int>(da.size()); ++k) {
    double d = da[k];
    if (d == 0.0) continue;
    double* grow = w.grad.row_ptr(k);
    for (int j = 0; j < in; ++j) grow[j] += d * input[j];
    for (int j = 0; j < hs; ++j) grow[in + j] += d * h_prev[j];
    grow[in + hs] += d;
    const double* row = w.value.row_ptr(k);
    if (dx)
      for (int j = 0; j < in; ++j) (*dx)[j] += d * row[j];
    if (dh_prev)
      for (int j = 0; j < hs; ++j) (*dh_prev)[j] += d * row[in + j];
  }
}

}  // namespace

void LstmCell::step(std::span<const double> input, std::span<const double> h_prev,
                    std::span<const double> c_prev, Cache& cache) const {
  if (static_cast<int>(input.size()) != input_size)
    throw std::invalid_argument("LstmCell::step: input size mismatch");
  if (static_cast<int>(h_prev.size()) != hidden_size ||
      static_cast<int>(c_prev.size()) != hidden_size)
    throw std::invalid_argument("LstmCell::step: state size mismatch");
  cache.input.assign(input.begin(), input.end());
  cache.h_prev.assign(h_prev.begin(), h_prev.end());
  cache.c_prev.assign(c_prev.begin(), c_prev.end());
  cache.i.resize(hidden_size);
  cache.o.resize(hidden_size);
  cache.f.resize(hidden_size);
  cache.g.resize(hidden_size);
  cache.c.resize(hidden_size);
  cache.tanh_c.resize(hidden_size);
  cache.h.resize(hidden_size);
  for (int k = 0; k < hidden_size; ++k) {
    double ai = gate_preact(wi.value, k, input, h_prev);
    double ao = gate_preact(wo.value, k, input, h_prev);
    double af = gate_preact(wf.value, k, input, h_prev);
    double ag = gate_preact(wg.value, k, input, h_prev);
    double i = sigmoid(ai), o = sigmoid(ao), f = sigmoid(af), g = std::tanh(ag);
    double c = f * c_prev[k] + i * g;
    double tc = std::tanh(c);
    cache.i[k] = i;
    cache.o[k] = o;
    cache.f[k] = f;
    cache.g[k] = g;
    cache.c[k] = c;
    cache.tanh_c[k] = tc;
    cache.h[k] = o * tc;
  }
}

void LstmCell::backward(const Cache& cache, std::span<const double> dh,
                        std::span<const double> dc_in, Vec* dx, Vec* dh_prev, Vec* dc_prev) {
  Vec dai(hidden_size), dao(hidden_size), daf(hidden_size), dag(hidden_size);
  for (int k = 0; k < hidden_size; ++k) {
    double i = cache.i[k], o = cache.o[k], f = cache.f[k], g = cache.g[k];
    double tc = cache.tanh_c[k];
    double dck = dc_in.empty() ? 0.0 : dc_in[k];
    dck += dh[k] * o * (1.0 - tc * tc);
    double dok = dh[k] * tc;
    double dik = dck * g;
    double dgk = dck * i;
    double dfk = dck * cache.c_prev[k];
    if (dc_prev) (*dc_prev)[k] += dck * f;
    dai[k] = dik * i * (1.0 - i);
    dao[k] = dok * o * (1.0 - o);
    daf[k] = dfk * f * (1.0 - f);
    dag[k] = dgk * (1.0 - g * g);
  }
  gate_backward(wi, cache.input, cache.h_prev, dai, dx, dh_prev);
  gate_backward(wo, cache.input, cache.h_prev, dao, dx, dh_prev);
  gate_backward(wf, cache.input, cache.h_prev, daf, dx, dh_prev);
  gate_backward(wg, cache.input, cache.h_prev, dag, dx, dh_prev);
}

LstmStack::LstmStack(int n_layers, int input_size, int hidden) {
  layers.reserve(n_layers);
  for (int l = 0; l < n_layers; ++l) layers.emplace_back(l == 0 ? input_size : hidden, hidden);
}

void LstmStack::init(Rng& rng, double range, double forget_bias) {
  for (auto& layer : layers) layer.init(rng, range, forget_bias);
}

Vec LstmStack::step(std::span<const double> input, LstmState& state) const {
  std::vector<LstmCell::Cache> caches;
  step_cached(input, state, caches);
  return state.h.back();
}

void LstmStack::step_cached(std::span<const double> input, LstmState& state,
                            std::vector<LstmCell::Cache>& caches) const {
  caches.resize(layers.size());
  std::span<const double> x = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].step(x, state.h[l], state.c[l], caches[l]);
    state.h[l] = caches[l].h;
    state.c[l] = caches[l].c;
    x = state.h[l];
  }
}

void LstmStack::backward(const std::vector<LstmCell::Cache>& caches,
                         std::span<const double> dh_top, std::vector<Vec>& dh_carry,
                         std::vector<Vec>& dc_carry, Vec* dx) {
  int hidden = hidden_size();
  Vec dh_layer(dh_top.begin(), dh_top.end());
  for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
    for (int k = 0; k < hidden; ++k) dh_layer[k] += dh_carry[l][k];
    Vec dx_layer(layers[l].input_size, 0.0);
    Vec dh_prev(hidden, 0.0), dc_prev(hidden, 0.0);
    layers[l].backward(caches[l], dh_layer, dc_carry[l],
                       (l == 0 && !dx) ? nullptr : &dx_layer, &dh_prev, &dc_prev);
    dh_carry[l] = dh_prev;
    dc_carry[l] = dc_prev;
    if (l == 0) {
      if (dx)
        for (std::size_t j = 0; j < dx->size(); ++j) (*dx)[j] += dx_layer[j];
    } else {
      dh_layer = dx_layer;  // input of layer l is h of layer l-1
    }
  }
}

std::vector<Param*> LstmStack::params() {
  std::vector<Param*> out;
  for (auto& layer : layers) {
    out.push_back(&layer.wi);
    out.push_back(&layer.wo);
    out.push_back(&layer.wf);
    out.push_back(&layer.wg);
  }
  return out;
}

RnnRegressor::RnnRegressor(std::span<const int> layer_sizes, int input_size, int output_size) {
  int in = input_size;
  for (int h : layer_sizes) {
    layers.emplace_back(in, h);
    in = h;
  }
  head = Affine(in, output_size);
}

void RnnRegressor::init(Rng& rng, double range) {
  for (auto& cell : layers) cell.init(rng, range);
  init_uniform(head.w, rng, range);
}

std::vector<Param*> RnnRegressor::params() {
  std::vector<Param*> out;
  for (auto& cell : layers) out.push_back(&cell.weights);
  out.push_back(&head.w);
  return out;
}

std::vector<Vec> RnnRegressor::forward(const std::vector<Vec>& inputs) const {
  std::vector<Vec> hs(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) hs[l] = Vec(layers[l].hidden_size, 0.0);
  std::vector<Vec> outputs;
  outputs.reserve(inputs.size());
  for (const Vec& x : inputs) {
    std::span<const double> cur = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      hs[l] = layers[l].step(cur, hs[l]);
      cur = hs[l];
    }
    outputs.push_back(head.forward(cur));
  }
  return outputs;
}

double RnnRegressor::bptt_gradients(const std::vector<Vec>& inputs,
                                    const std::vector<Vec>& targets) {
  if (inputs.empty() || inputs.size() != targets.size())
    throw std::invalid_argument("bptt_gradients: empty or mismatched sequence");
  const std::size_t T = inputs.size();
  const std::size_t L = layers.size();
  // Forward with caches.
  std::vector<std::vector<Vec>> h(T + 1, std::vector<Vec>(L));  // h[t][l], t=0 initial
  for (std::size_t l = 0; l < L; ++l) h[0][l] = Vec(layers[l].hidden_size, 0.0);
  std::vector<Vec> outputs(T);
  double loss = 0.0;
  const int out_dim = head.out;
  for (std::size_t t = 0; t < T; ++t) {
    std::span<const double> cur = inputs[t];
    for (std::size_t l = 0; l < L; ++l) {
      h[t + 1][l] = layers[l].step(cur, h[t][l]);
      cur = h[t + 1][l];
    }
    outputs[t] = head.forward(cur);
    if (!all_finite(outputs[t]))
      throw NumericError("bptt_gradients: non-finite output", static_cast<long>(t));
    for (int k = 0; k < out_dim; ++k) {
      double d = outputs[t][k] - targets[t][k];
      loss += d * d;
    }
  }
  const double norm = 1.0 / (static_cast<double>(T) * out_dim);
  loss *= norm;
  // Backward.
  std::vector<Vec> dh_carry(L);
  for (std::size_t l = 0; l < L; ++l) dh_carry[l] = Vec(layers[l].hidden_size, 0.0);
  for (std::size_t t = T; t-- > 0;) {
    Vec dy(out_dim);
    for (int k = 0; k < out_dim; ++k) dy[k] = 2.0 * norm * (outputs[t][k] - targets[t][k]);
    Vec dh_top(layers.back().hidden_size, 0.0);
    head.backward(h[t + 1][L - 1], dy, &dh_top);
    // Walk layers top-down; the input gradient of layer l feeds h of layer l-1.
    Vec dh_layer = dh_top;
    for (std::size_t l = L; l-- > 0;) {
      for (int k = 0; k < layers[l].hidden_size; ++k) dh_layer[k] += dh_carry[l][k];
      std::span<const double> input = (l == 0) ? std::span<const double>(inputs[t])
                                               : std::span<const double>(h[t + 1][l - 1]);
      Vec dx(input.size(), 0.0);
      Vec dh_prev(layers[l].hidden_size, 0.0);
      layers[l].backward(input, h[t][l], h[t + 1][l], dh_layer, l == 0 ? nullptr : &dx,
                         &dh_prev);
      dh_carry[l] = dh_prev;
      if (l > 0) dh_layer = dx;
    }
  }
  return loss;
}

LstmRegressor::LstmRegressor(int n_layers, int hidden, int input_size, int output_size)
    : stack(n_layers, input_size, hidden), head(hidden, output_size) {}

void LstmRegressor::init(Rng& rng, double range) {
  stack.init(rng, range);
  init_uniform(head.w, rng, range);
}

std::vector<Param*> LstmRegressor::params() {
  std::vector<Param*> out = stack.params();
  out.push_back(&head.w);
  return out;
}

std::vector<Vec> LstmRegressor::forward(const std::vector<Vec>& inputs) const {
  LstmState state(static_cast<int>(stack.layers.size()), stack.hidden_size());
  std::vector<Vec> outputs;
  outputs.reserve(inputs.size());
  for (const Vec& x : inputs) outputs.push_back(head.forward(stack.step(x, state)));
  return outputs;
}

double LstmRegressor::bptt_gradients(const std::vector<Vec>& inputs,
                                     const std::vector<Vec>& targets) {
  if (inputs.empty() || inputs.size() != targets.size())
    throw std::invalid_argument("bptt_gradients: empty or mismatched sequence");
  const std::size_t T = inputs.size();
  const int L = static_cast<int>(stack.layers.size());
  const int hidden = stack.hidden_size();
  LstmState state(L, hidden);
  std::vector<std::vector<LstmCell::Cache>> caches(T);
  std::vector<Vec> outputs(T);
  double loss = 0.0;
  const int out_dim = head.out;
  for (std::size_t t = 0; t < T; ++t) {
    stack.step_cached(inputs[t], state, caches[t]);
    if (!all_finite(state.h.back()))
      throw NumericError("bptt_gradients: non-finite hidden state", static_cast<long>(t));
    outputs[t] = head.forward(state.h.back());
    for (int k = 0; k < out_dim; ++k) {
      double d = outputs[t][k] - targets[t][k];
      loss += d * d;
    }
  }
  const double norm = 1.0 / (static_cast<double>(T) * out_dim);
  loss *= norm;
  std::vector<Vec> dh_carry(L, Vec(hidden, 0.0)), dc_carry(L, Vec(hidden, 0.0));
  for (std::size_t t = T; t-- > 0;) {
    Vec dy(out_dim);
    for (int k = 0; k < out_dim; ++k) dy[k] = 2.0 * norm * (outputs[t][k] - targets[t][k]);
    Vec dh_top(hidden, 0.0);
    head.backward(caches[t].back().h, dy, &dh_top);
    stack.backward(caches[t], dh_top, dh_carry, dc_carry, nullptr);
  }
  return loss;
}

double learning_rate_at(long iteration, const TrainConfig& cfg) {
  long k = iteration / cfg.lr_decay_every;
  return cfg.lr0 * std::pow(cfg.lr_decay, static_cast<double>(k));
}

}  // namespace rectrack
