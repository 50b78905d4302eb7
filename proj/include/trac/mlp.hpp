#pragma once

#include <cstddef>
#include <vector>

#include "trac/optimizer.hpp"
#include "trac/rng.hpp"

namespace trac {

enum class Activation { kRelu, kCrelu };

// Fixed-architecture fully connected network. With crelu, every hidden
// layer emits [relu(z), relu(-z)], doubling its effective width; the next
// layer's input dimension accounts for that.
struct MlpSpec {
  std::vector<int> layer_sizes;  // input, hidden..., output
  Activation activation = Activation::kRelu;

  int layer_count() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int in_dim(int layer) const;
  int out_dim(int layer) const { return layer_sizes[layer + 1]; }
  std::size_t param_count() const;
};

// Index ranges of one layer's weights/bias inside the flat parameter vector.
struct LayerSlice {
  std::size_t w_begin;
  std::size_t b_begin;
  int rows;  // out_dim
  int cols;  // in_dim
};

std::vector<LayerSlice> layout(const MlpSpec& spec);

// Xavier-uniform weights (limit sqrt(6 / (fan_in + fan_out))), zero biases.
ParamVector init_params(const MlpSpec& spec, Rng& rng);

struct ForwardCache {
  // acts[0] = input, acts[l+1] = output of layer l (post-activation for
  // hidden layers, raw affine output for the final layer).
  std::vector<std::vector<double>> acts;
};

std::vector<double> forward(const MlpSpec& spec, const ParamVector& params,
                            const std::vector<double>& x);
const std::vector<double>& forward_cached(const MlpSpec& spec,
                                          const ParamVector& params,
                                          const std::vector<double>& x,
                                          ForwardCache& cache);

// Exact reverse-mode gradient of <output, upstream> with respect to params.
ParamVector backward(const MlpSpec& spec, const ParamVector& params,
                     const std::vector<double>& x,
                     const std::vector<double>& upstream);

// Accumulates scale * d<output, upstream>/dparams into grad (which must have
// param_count entries). cache must hold a forward pass of x.
void backward_into(const MlpSpec& spec, const ParamVector& params,
                   const ForwardCache& cache, const std::vector<double>& upstream,
                   double* grad, double scale = 1.0);

// ---- categorical policy head ----

// Softmax with max-subtraction. Throws std::invalid_argument on non-finite
// logits.
std::vector<double> softmax(const std::vector<double>& logits);
std::vector<double> log_softmax(const std::vector<double>& logits);
double categorical_entropy(const std::vector<double>& probs);
int categorical_sample(const std::vector<double>& probs, Rng& rng);

}  // namespace trac
