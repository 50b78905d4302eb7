#include "trac/trac.hpp"

#include <cmath>
#include <stdexcept>

namespace trac {

namespace {

double inner_product(const ParamVector& a, const ParamVector& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

TracOptimizer::TracOptimizer(ParamVector theta_ref, std::unique_ptr<Optimizer> base,
                             TracConfig cfg)
    : cfg_(std::move(cfg)),
      theta_ref_(std::move(theta_ref)),
      theta_base_(theta_ref_),
      base_(std::move(base)),
      scaling_(cfg_.s_floor) {
  if (cfg_.betas.empty()) {
    throw std::invalid_argument("TracOptimizer: beta grid must be nonempty");
  }
  if (!base_) {
    throw std::invalid_argument("TracOptimizer: base optimizer required");
  }
  tuners_.reserve(cfg_.betas.size());
  for (double beta : cfg_.betas) {
    tuners_.emplace_back(beta, cfg_.eps, cfg_.tuner_clamp_at_zero);
  }
  tuner_outputs_.assign(tuners_.size(), 0.0);
}

ParamVector TracOptimizer::step(const ParamVector& params, const ParamVector& grad) {
  if (params.size() != theta_ref_.size() || grad.size() != theta_ref_.size()) {
    throw std::invalid_argument("TracOptimizer: dimension mismatch");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw std::invalid_argument("TracOptimizer: non-finite gradient entry");
    }
  }

  // h is taken against the pre-update offset, so capture it before the base
  // consumes the gradient.
  double h = 0.0;
  if (cfg_.h_mode == HMode::kMetaOffset) {
    for (std::size_t i = 0; i < grad.size(); ++i) {
      h += grad[i] * (params[i] - theta_ref_[i]);
    }
  } else {
    for (std::size_t i = 0; i < grad.size(); ++i) {
      h += grad[i] * (theta_base_[i] - theta_ref_[i]);
    }
  }
  last_h_ = h;

  theta_base_ = base_->step(theta_base_, grad);

  double s_sum = cfg_.s_floor;
  for (std::size_t j = 0; j < tuners_.size(); ++j) {
    tuner_outputs_[j] = tuners_[j].step(h);
    s_sum += tuner_outputs_[j];
  }
  scaling_ = s_sum;

  ParamVector out(params.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = theta_ref_[i] + (theta_base_[i] - theta_ref_[i]) * scaling_;
  }
  return out;
}

void TracOptimizer::reset(const ParamVector& params) {
  theta_ref_ = params;
  theta_base_ = params;
  base_->reset(params);
  tuners_.clear();
  for (double beta : cfg_.betas) {
    tuners_.emplace_back(beta, cfg_.eps, cfg_.tuner_clamp_at_zero);
  }
  tuner_outputs_.assign(tuners_.size(), 0.0);
  scaling_ = cfg_.s_floor;
  last_h_ = 0.0;
}

SimplifiedTrac::SimplifiedTrac(ParamVector theta_ref, double eta, double beta,
                               double alpha, double s_init)
    : theta_ref_(std::move(theta_ref)),
      theta_base_(theta_ref_),
      eta_(eta),
      beta_(beta),
      alpha_(alpha),
      scaling_(s_init) {
  if (!(eta > 0.0)) throw std::invalid_argument("SimplifiedTrac: eta must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("SimplifiedTrac: beta must be in (0, 1]");
  }
}

ParamVector SimplifiedTrac::step(const ParamVector& theta, const ParamVector& grad) {
  if (theta.size() != theta_ref_.size() || grad.size() != theta_ref_.size()) {
    throw std::invalid_argument("SimplifiedTrac: dimension mismatch");
  }
  if (scaling_ == 0.0) {
    throw std::domain_error("SimplifiedTrac: degenerate state S = 0");
  }
  ParamVector offset(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) offset[i] = theta[i] - theta_ref_[i];
  last_h_ = inner_product(grad, offset);

  for (std::size_t i = 0; i < theta_base_.size(); ++i) {
    theta_base_[i] -= eta_ * grad[i];
  }
  scaling_ = beta_ * scaling_ - alpha_ * last_h_;

  ParamVector out(theta.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = theta_ref_[i] + (theta_base_[i] - theta_ref_[i]) * scaling_;
  }
  return out;
}

WarmstartOptimizer::WarmstartOptimizer(std::unique_ptr<Optimizer> base,
                                       int warm_steps, TracConfig cfg,
                                       bool engage_trac)
    : base_(std::move(base)),
      cfg_(std::move(cfg)),
      warm_steps_(warm_steps),
      engage_trac_(engage_trac) {
  if (warm_steps < 0) {
    throw std::invalid_argument("WarmstartOptimizer: warm_steps must be >= 0");
  }
  if (!base_) {
    throw std::invalid_argument("WarmstartOptimizer: base optimizer required");
  }
}

ParamVector WarmstartOptimizer::step(const ParamVector& params, const ParamVector& grad) {
  if (!engaged_ && engage_trac_ && steps_taken_ >= warm_steps_) {
    theta_ref_ = params;
    // the base is (re-)initialized at theta_ref when the meta-optimizer is
    // created, so warmup moment state does not leak into the engaged phase
    base_->reset(params);
    trac_ = std::make_unique<TracOptimizer>(params, std::move(base_), cfg_);
    engaged_ = true;
  }
  ++steps_taken_;
  if (trac_) return trac_->step(params, grad);
  return base_->step(params, grad);
}

const TracOptimizer* WarmstartOptimizer::as_trac() const {
  return trac_ ? trac_.get() : nullptr;
}

const ParamVector& WarmstartOptimizer::theta_ref() const {
  if (!engaged_) {
    throw std::logic_error("WarmstartOptimizer: not engaged yet");
  }
  return theta_ref_;
}

PrivilegedResetOptimizer::PrivilegedResetOptimizer(std::unique_ptr<Optimizer> inner,
                                                   Reinit reinit,
                                                   std::uint64_t reinit_seed)
    : inner_(std::move(inner)), reinit_(std::move(reinit)), rng_(reinit_seed) {
  if (!inner_) {
    throw std::invalid_argument("PrivilegedResetOptimizer: inner optimizer required");
  }
}

ParamVector PrivilegedResetOptimizer::step(const ParamVector& params,
                                           const ParamVector& grad) {
  return inner_->step(params, grad);
}

bool PrivilegedResetOptimizer::on_task_boundary(ParamVector& params) {
  params = reinit_(rng_);
  inner_->reset(params);
  ++resets_;
  return true;
}

}  // namespace trac
