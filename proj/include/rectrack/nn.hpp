#pragma once

#include <array>
#include <span>
#include <vector>

#include "rectrack/matrix.hpp"
#include "rectrack/rng.hpp"

namespace rectrack {

// A learnable weight block together with its gradient accumulator and the
// RMSprop second-moment cache. All three share one shape.
struct Param {
  Matrix value;
  Matrix grad;
  Matrix rms_cache;

  Param() = default;
  Param(int rows, int cols) : value(rows, cols), grad(rows, cols), rms_cache(rows, cols) {}
};

// RMSprop: cache <- rho*cache + (1-rho)*g^2; value <- value - lr*g/(sqrt(cache)+eps).
// Clears the gradient afterwards.
void rmsprop_update(Param& p, double learning_rate, double rho = 0.95, double eps = 1e-8);

void zero_grads(std::span<Param* const> params);
void scale_grads(std::span<Param* const> params, double s);
double grad_norm(std::span<Param* const> params);
// Rescales gradients so their global L2 norm is at most max_norm (<=0 disables).
void clip_grads(std::span<Param* const> params, double max_norm);

// Uniform init in [-range, range]; the documented default for every weight
// block except the LSTM forget-gate bias.
void init_uniform(Param& p, Rng& rng, double range = 0.08);

// Affine map y = W[:, :in] * x + W[:, in]; the bias lives in the last column
// so each map is a single Param.
struct Affine {
  int in = 0;
  int out = 0;
  Param w;

  Affine() = default;
  Affine(int in_size, int out_size) : in(in_size), out(out_size), w(out_size, in_size + 1) {}

  Vec forward(std::span<const double> x) const;
  // Accumulates into w.grad; if dx != nullptr also accumulates the input gradient.
  void backward(std::span<const double> x, std::span<const double> dy, Vec* dx);
};

// Vanilla RNN cell: h = tanh(W * [x; h_prev; 1]).
struct RnnCell {
  int input_size = 0;
  int hidden_size = 0;
  Param weights;  // hidden_size x (input_size + hidden_size + 1)

  RnnCell() = default;
  RnnCell(int in_size, int h_size)
      : input_size(in_size), hidden_size(h_size), weights(h_size, in_size + h_size + 1) {}

  void init(Rng& rng, double range = 0.08) { init_uniform(weights, rng, range); }

  // Validates dimensions; every output entry lies in (-1, 1).
  Vec step(std::span<const double> input, std::span<const double> h_prev) const;
  // Accumulates into weights.grad and, when non-null, dx/dh_prev.
  void backward(std::span<const double> input, std::span<const double> h_prev,
                std::span<const double> h, std::span<const double> dh, Vec* dx, Vec* dh_prev);
};

// LSTM gates, one weight block per gate, bias folded as in Affine.
// c = f.c_prev + i.g, h = o.tanh(c) with i,o,f sigmoid and g tanh.
struct LstmCell {
  int input_size = 0;
  int hidden_size = 0;
  Param wi, wo, wf, wg;

  LstmCell() = default;
  LstmCell(int in_size, int h_size);

  // Uniform init for all gates, then forget-gate bias column set to 1.0.
  void init(Rng& rng, double range = 0.08, double forget_bias = 1.0);

  struct Cache {
    Vec input, h_prev, c_prev;
    Vec i, o, f, g, c, tanh_c, h;
  };

  void step(std::span<const double> input, std::span<const double> h_prev,
            std::span<const double> c_prev, Cache& cache) const;
  // dh/dc are gradients flowing into this step's h and c outputs; dc_prev and
  // dh_prev receive the carries for the previous step, dx the input gradient.
  void backward(const Cache& cache, std::span<const double> dh, std::span<const double> dc,
                Vec* dx, Vec* dh_prev, Vec* dc_prev);
};

// Recurrent carry for a stack of LSTM layers.
struct LstmState {
  std::vector<Vec> h;
  std::vector<Vec> c;

  LstmState() = default;
  LstmState(int layers, int hidden)
      : h(layers, Vec(hidden, 0.0)), c(layers, Vec(hidden, 0.0)) {}
};

struct LstmStack {
  std::vector<LstmCell> layers;

  LstmStack() = default;
  LstmStack(int n_layers, int input_size, int hidden);

  void init(Rng& rng, double range = 0.08, double forget_bias = 1.0);
  int hidden_size() const { return layers.empty() ? 0 : layers.front().hidden_size; }

  // Advances the state in place; returns the top-layer h.
  Vec step(std::span<const double> input, LstmState& state) const;
  void step_cached(std::span<const double> input, LstmState& state,
                   std::vector<LstmCell::Cache>& caches) const;
  void backward(const std::vector<LstmCell::Cache>& caches, std::span<const double> dh_top,
                std::vector<Vec>& dh_carry, std::vector<Vec>& dc_carry, Vec* dx);
  std::vector<Param*> params();
};

// Small sequence regressor used to exercise backpropagation through time on
// its own: a stack of RNN cells plus an affine head trained with MSE.
struct RnnRegressor {
  std::vector<RnnCell> layers;
  Affine head;

  RnnRegressor(std::span<const int> layer_sizes, int input_size, int output_size);
  void init(Rng& rng, double range = 0.08);
  std::vector<Param*> params();

  std::vector<Vec> forward(const std::vector<Vec>& inputs) const;
  // Unrolls the network over the sequence, accumulates gradients for every
  // Param, and returns the mean squared error. Throws NumericError naming the
  // step if an intermediate value is non-finite.
  double bptt_gradients(const std::vector<Vec>& inputs, const std::vector<Vec>& targets);
};

// LSTM counterpart of RnnRegressor.
struct LstmRegressor {
  LstmStack stack;
  Affine head;

  LstmRegressor(int n_layers, int hidden, int input_size, int output_size);
  void init(Rng& rng, double range = 0.08);
  std::vector<Param*> params();

  std::vector<Vec> forward(const std::vector<Vec>& inputs) const;
  double bptt_gradients(const std::vector<Vec>& inputs, const std::vector<Vec>& targets);
};

// Optimizer schedule shared by the trainers.
struct TrainConfig {
  double lr0 = 0.0003;
  double lr_decay = 0.95;
  long lr_decay_every = 20000;
  long max_iterations = 200000;
  int batch_size = 10;
  double rho = 0.95;
  double eps = 1e-8;
  double grad_clip = 10.0;
};

// lr(k) = lr0 * decay^floor(k / every).
double learning_rate_at(long iteration, const TrainConfig& cfg);

// One row of a training curve: iteration, learning rate, window-averaged
// loss, and up to four per-term columns whose meaning the trainer sets.
struct TrainLogRow {
  long iteration = 0;
  double lr = 0.0;
  double loss = 0.0;
  std::array<double, 4> breakdown{};
};

struct TrainResult {
  long iterations = 0;
  double final_loss = 0.0;
};

}  // namespace rectrack
