#include "trac/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace trac {

int MlpSpec::in_dim(int layer) const {
  const int nominal = layer_sizes[layer];
  if (layer == 0 || activation != Activation::kCrelu) return nominal;
  return 2 * nominal;
}

std::size_t MlpSpec::param_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layer_count(); ++l) {
    n += static_cast<std::size_t>(out_dim(l)) * (in_dim(l) + 1);
  }
  return n;
}

std::vector<LayerSlice> layout(const MlpSpec& spec) {
  std::vector<LayerSlice> slices;
  std::size_t offset = 0;
  for (int l = 0; l < spec.layer_count(); ++l) {
    LayerSlice s;
    s.rows = spec.out_dim(l);
    s.cols = spec.in_dim(l);
    s.w_begin = offset;
    s.b_begin = offset + static_cast<std::size_t>(s.rows) * s.cols;
    offset = s.b_begin + s.rows;
    slices.push_back(s);
  }
  return slices;
}

ParamVector init_params(const MlpSpec& spec, Rng& rng) {
  ParamVector params(spec.param_count(), 0.0);
  for (const LayerSlice& s : layout(spec)) {
    const double limit = std::sqrt(6.0 / (s.rows + s.cols));
    for (int i = 0; i < s.rows * s.cols; ++i) {
      params[s.w_begin + i] = rng.uniform(-limit, limit);
    }
    // biases stay zero
  }
  return params;
}

namespace {

void affine(const ParamVector& params, const LayerSlice& s,
            const std::vector<double>& in, std::vector<double>& out) {
  out.assign(s.rows, 0.0);
  const double* w = params.data() + s.w_begin;
  for (int r = 0; r < s.rows; ++r) {
    double acc = params[s.b_begin + r];
    const double* row = w + static_cast<std::size_t>(r) * s.cols;
    for (int c = 0; c < s.cols; ++c) acc += row[c] * in[c];
    out[r] = acc;
  }
}

void apply_activation(Activation act, const std::vector<double>& z,
                      std::vector<double>& out) {
  const std::size_t w = z.size();
  if (act == Activation::kRelu) {
    out.resize(w);
    for (std::size_t i = 0; i < w; ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
  } else {
    out.resize(2 * w);
    for (std::size_t i = 0; i < w; ++i) {
      out[i] = z[i] > 0.0 ? z[i] : 0.0;
      out[w + i] = z[i] < 0.0 ? -z[i] : 0.0;
    }
  }
}

}  // namespace

const std::vector<double>& forward_cached(const MlpSpec& spec,
                                          const ParamVector& params,
                                          const std::vector<double>& x,
                                          ForwardCache& cache) {
  if (static_cast<int>(x.size()) != spec.layer_sizes.front()) {
    throw std::invalid_argument("forward: input dimension mismatch");
  }
  if (params.size() != spec.param_count()) {
    throw std::invalid_argument("forward: parameter count mismatch");
  }
  const auto slices = layout(spec);
  const int L = spec.layer_count();
  cache.acts.assign(L + 1, {});
  cache.acts[0] = x;
  std::vector<double> z;
  for (int l = 0; l < L; ++l) {
    affine(params, slices[l], cache.acts[l], z);
    if (l < L - 1) {
      apply_activation(spec.activation, z, cache.acts[l + 1]);
    } else {
      cache.acts[l + 1] = z;
    }
  }
  return cache.acts.back();
}

std::vector<double> forward(const MlpSpec& spec, const ParamVector& params,
                            const std::vector<double>& x) {
  ForwardCache cache;
  return forward_cached(spec, params, x, cache);
}

void backward_into(const MlpSpec& spec, const ParamVector& params,
                   const ForwardCache& cache, const std::vector<double>& upstream,
                   double* grad, double scale) {
  const auto slices = layout(spec);
  const int L = spec.layer_count();
  if (static_cast<int>(upstream.size()) != spec.layer_sizes.back()) {
    throw std::invalid_argument("backward: upstream dimension mismatch");
  }

  std::vector<double> delta = upstream;  // gradient w.r.t. current layer output
  std::vector<double> delta_prev;
  for (int l = L - 1; l >= 0; --l) {
    const LayerSlice& s = slices[l];
    // map activation gradient to pre-activation gradient (hidden layers only)
    if (l < L - 1) {
      const std::vector<double>& a = cache.acts[l + 1];
      std::vector<double> dz(s.rows);
      if (spec.activation == Activation::kRelu) {
        for (int r = 0; r < s.rows; ++r) dz[r] = a[r] > 0.0 ? delta[r] : 0.0;
      } else {
        const int w = s.rows;
        for (int r = 0; r < w; ++r) {
          double d = 0.0;
          if (a[r] > 0.0) d += delta[r];
          if (a[w + r] > 0.0) d -= delta[w + r];
          dz[r] = d;
        }
      }
      delta = std::move(dz);
    }

    const std::vector<double>& in = cache.acts[l];
    double* gw = grad + s.w_begin;
    for (int r = 0; r < s.rows; ++r) {
      const double d = scale * delta[r];
      double* row = gw + static_cast<std::size_t>(r) * s.cols;
      for (int c = 0; c < s.cols; ++c) row[c] += d * in[c];
      grad[s.b_begin + r] += d;
    }

    if (l > 0) {
      delta_prev.assign(s.cols, 0.0);
      const double* w = params.data() + s.w_begin;
      for (int r = 0; r < s.rows; ++r) {
        const double d = delta[r];
        const double* row = w + static_cast<std::size_t>(r) * s.cols;
        for (int c = 0; c < s.cols; ++c) delta_prev[c] += d * row[c];
      }
      delta = delta_prev;
    }
  }
}

ParamVector backward(const MlpSpec& spec, const ParamVector& params,
                     const std::vector<double>& x,
                     const std::vector<double>& upstream) {
  ForwardCache cache;
  forward_cached(spec, params, x, cache);
  ParamVector grad(spec.param_count(), 0.0);
  backward_into(spec, params, cache, upstream, grad.data());
  return grad;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
  double mx = logits[0];
  for (double z : logits) {
    if (!std::isfinite(z)) throw std::invalid_argument("softmax: non-finite logit");
    if (z > mx) mx = z;
  }
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("log_softmax: empty logits");
  double mx = logits[0];
  for (double z : logits) {
    if (!std::isfinite(z)) throw std::invalid_argument("log_softmax: non-finite logit");
    if (z > mx) mx = z;
  }
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

double categorical_entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

int categorical_sample(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace trac
