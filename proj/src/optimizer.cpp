#include "trac/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace trac {

namespace {

void check_dims(const ParamVector& params, const ParamVector& grad) {
  if (params.size() != grad.size()) {
    throw std::invalid_argument("optimizer: params/grad dimension mismatch (" +
                                std::to_string(params.size()) + " vs " +
                                std::to_string(grad.size()) + ")");
  }
}

void check_finite(const ParamVector& grad) {
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw std::invalid_argument("optimizer: non-finite gradient entry");
    }
  }
}

}  // namespace

ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double lr) {
  check_dims(params, grad);
  if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: lr must be positive");
  ParamVector out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    out[i] = params[i] - lr * grad[i];
  }
  return out;
}

Sgd::Sgd(double lr) : lr_(lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("Sgd: lr must be positive");
}

ParamVector Sgd::step(const ParamVector& params, const ParamVector& grad) {
  return sgd_step(params, grad, lr_);
}

Adam::Adam(const AdamConfig& cfg) : cfg_(cfg) {
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("Adam: lr must be positive");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
    throw std::invalid_argument("Adam: betas must be in [0, 1)");
  }
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("Adam: eps must be positive");
}

ParamVector Adam::step(const ParamVector& params, const ParamVector& grad) {
  check_dims(params, grad);
  check_finite(grad);
  if (m_.empty()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  } else if (m_.size() != params.size()) {
    throw std::invalid_argument("Adam: dimension changed between steps");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  ParamVector out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    out[i] = params[i] - cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    if (cfg_.weight_decay > 0.0) {
      out[i] -= cfg_.lr * cfg_.weight_decay * params[i];
    }
  }
  return out;
}

void Adam::reset(const ParamVector& params) {
  m_.assign(params.size(), 0.0);
  v_.assign(params.size(), 0.0);
  t_ = 0;
}

L2Init::L2Init(double lr, double lambda, ParamVector theta_ref)
    : lr_(lr), lambda_(lambda), theta_ref_(std::move(theta_ref)) {
  if (!(lr > 0.0)) throw std::invalid_argument("L2Init: lr must be positive");
  if (lambda < 0.0) throw std::invalid_argument("L2Init: lambda must be >= 0");
}

ParamVector l2_init_step(const ParamVector& params, const ParamVector& grad,
                         double lr, double lambda, const ParamVector& theta_ref) {
  check_dims(params, grad);
  if (params.size() != theta_ref.size()) {
    throw std::invalid_argument("l2_init_step: theta_ref dimension mismatch");
  }
  ParamVector out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    out[i] = params[i] - lr * (grad[i] + lambda * (params[i] - theta_ref[i]));
  }
  return out;
}

ParamVector L2Init::step(const ParamVector& params, const ParamVector& grad) {
  return l2_init_step(params, grad, lr_, lambda_, theta_ref_);
}

void L2Init::reset(const ParamVector& params) { theta_ref_ = params; }

}  // namespace trac
