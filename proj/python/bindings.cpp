#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "trac/cartpole.hpp"
#include "trac/erfi.hpp"
#include "trac/harness.hpp"
#include "trac/mlp.hpp"
#include "trac/oco.hpp"
#include "trac/optimizer.hpp"
#include "trac/ppo.hpp"
#include "trac/simplified_check.hpp"
#include "trac/trac.hpp"
#include "trac/tuner.hpp"

namespace py = pybind11;

namespace {

trac::Activation activation_from(const std::string& name) {
  if (name == "relu") return trac::Activation::kRelu;
  if (name == "crelu") return trac::Activation::kCrelu;
  throw std::invalid_argument("activation must be 'relu' or 'crelu'");
}

trac::TracConfig trac_config(const std::vector<double>& betas, double eps,
                             const std::string& h_mode, bool clamp_at_zero) {
  trac::TracConfig cfg;
  cfg.betas = betas;
  cfg.eps = eps;
  cfg.s_floor = eps;
  cfg.h_mode = h_mode == "base_offset" ? trac::HMode::kBaseOffset
                                       : trac::HMode::kMetaOffset;
  cfg.tuner_clamp_at_zero = clamp_at_zero;
  return cfg;
}

py::dict summary_dict(const trac::RunRecord& rec) {
  py::dict d;
  d["cumulative_mean_episode_reward"] = rec.summary.cumulative_mean_episode_reward;
  d["post_first_shift_mean_reward"] = rec.summary.post_first_shift_mean_reward;
  d["task_count"] = rec.summary.task_count;
  d["seed"] = rec.summary.seed;
  py::list rewards;
  py::list scaling;
  for (const auto& row : rec.updates) {
    rewards.append(row.mean_episode_reward);
    scaling.append(row.mean_scaling);
  }
  d["mean_episode_reward_per_update"] = rewards;
  d["mean_scaling_per_update"] = scaling;
  d["episodes"] = static_cast<int>(rec.episodes.size());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parameter-free meta-optimizer for lifelong learning, with the "
            "CartPole PPO bench and an online-convex-optimization suite";

  // ---- special function ----
  m.def("erfi", py::overload_cast<double>(&trac::erfi),
        "Imaginary error function (argument clamped to [-6, 6])", py::arg("x"));
  m.def("erfi_norm", &trac::erfi_norm, "erfi(x) / erfi(1/sqrt(2))", py::arg("x"));

  // ---- tuner ----
  py::class_<trac::DiscountedTuner>(m, "DiscountedTuner")
      .def(py::init<double, double, bool>(), py::arg("beta"),
           py::arg("eps") = 1e-8, py::arg("clamp_at_zero") = false)
      .def("step", &trac::DiscountedTuner::step, py::arg("h"))
      .def_property_readonly("variance", &trac::DiscountedTuner::variance)
      .def_property_readonly("negative_sum", &trac::DiscountedTuner::negative_sum)
      .def_property_readonly("step_count", &trac::DiscountedTuner::step_count);

  // ---- optimizers ----
  py::class_<trac::Optimizer>(m, "Optimizer")
      .def("step", &trac::Optimizer::step, py::arg("params"), py::arg("grad"));

  py::class_<trac::Sgd, trac::Optimizer>(m, "Sgd").def(py::init<double>(),
                                                       py::arg("lr"));

  py::class_<trac::Adam, trac::Optimizer>(m, "Adam")
      .def(py::init([](double lr, double beta1, double beta2, double eps,
                       double weight_decay) {
             return trac::Adam({lr, beta1, beta2, eps, weight_decay});
           }),
           py::arg("lr") = 0.01, py::arg("beta1") = 0.9, py::arg("beta2") = 0.999,
           py::arg("eps") = 1e-8, py::arg("weight_decay") = 0.0);

  py::class_<trac::L2Init, trac::Optimizer>(m, "L2Init")
      .def(py::init<double, double, trac::ParamVector>(), py::arg("lr"),
           py::arg("lam"), py::arg("theta_ref"));

  py::class_<trac::TracOptimizer, trac::Optimizer>(m, "Trac")
      .def(py::init([](const trac::ParamVector& theta_ref, const std::string& base,
                       double lr, const std::vector<double>& betas, double eps,
                       const std::string& h_mode, bool clamp_at_zero) {
             std::unique_ptr<trac::Optimizer> inner;
             if (base == "adam") {
               inner = std::make_unique<trac::Adam>(trac::AdamConfig{.lr = lr});
             } else if (base == "sgd") {
               inner = std::make_unique<trac::Sgd>(lr);
             } else {
               throw std::invalid_argument("base must be 'adam' or 'sgd'");
             }
             return trac::TracOptimizer(theta_ref, std::move(inner),
                                        trac_config(betas, eps, h_mode,
                                                    clamp_at_zero));
           }),
           py::arg("theta_ref"), py::arg("base") = "adam", py::arg("lr") = 0.01,
           py::arg("betas") = trac::kDefaultBetaGrid, py::arg("eps") = 1e-8,
           py::arg("h_mode") = "meta_offset", py::arg("clamp_at_zero") = false)
      .def_property_readonly("scaling", &trac::TracOptimizer::scaling)
      .def_property_readonly("tuner_outputs", &trac::TracOptimizer::tuner_outputs)
      .def_property_readonly("theta_ref", &trac::TracOptimizer::theta_ref)
      .def_property_readonly("theta_base", &trac::TracOptimizer::theta_base)
      .def_property_readonly("last_h", &trac::TracOptimizer::last_h);

  py::class_<trac::SimplifiedTrac>(m, "SimplifiedTrac")
      .def(py::init<trac::ParamVector, double, double, double, double>(),
           py::arg("theta_ref"), py::arg("eta"), py::arg("beta"), py::arg("alpha"),
           py::arg("s_init"))
      .def("step", &trac::SimplifiedTrac::step, py::arg("theta"), py::arg("grad"))
      .def_property_readonly("scaling", &trac::SimplifiedTrac::scaling)
      .def_property_readonly("last_h", &trac::SimplifiedTrac::last_h);

  // ---- environment ----
  py::class_<trac::CartPole>(m, "CartPole")
      .def(py::init<>())
      .def("reset",
           [](trac::CartPole& env, std::uint64_t seed) {
             trac::Rng rng(seed);
             return env.reset(rng);
           },
           py::arg("seed"))
      .def("step",
           [](trac::CartPole& env, int action) {
             const trac::StepResult r = env.step(action);
             return py::make_tuple(r.observation, r.reward, r.done, r.truncated);
           },
           py::arg("action"));

  // ---- networks ----
  py::class_<trac::MlpSpec>(m, "MlpSpec")
      .def(py::init([](const std::vector<int>& sizes, const std::string& act) {
             return trac::MlpSpec{sizes, activation_from(act)};
           }),
           py::arg("layer_sizes"), py::arg("activation") = "relu")
      .def_property_readonly("param_count", &trac::MlpSpec::param_count);
  m.def("init_params",
        [](const trac::MlpSpec& spec, std::uint64_t seed) {
          trac::Rng rng(seed);
          return trac::init_params(spec, rng);
        },
        py::arg("spec"), py::arg("seed"));
  m.def("mlp_forward", &trac::forward, py::arg("spec"), py::arg("params"),
        py::arg("x"));
  m.def("mlp_backward", &trac::backward, py::arg("spec"), py::arg("params"),
        py::arg("x"), py::arg("upstream"));
  m.def("softmax", &trac::softmax, py::arg("logits"));

  // ---- oco bench ----
  py::class_<trac::QuadraticLossSeq>(m, "QuadraticLossSeq")
      .def(py::init([](const std::vector<trac::ParamVector>& centers,
                       int task_length, int total_steps) {
             return trac::QuadraticLossSeq{centers, task_length, total_steps};
           }),
           py::arg("centers"), py::arg("task_length"), py::arg("total_steps"));
  m.def("best_fixed_comparator", &trac::best_fixed_comparator, py::arg("seq"));
  m.def("run_oco",
        [](trac::Optimizer& opt, const trac::QuadraticLossSeq& seq,
           const trac::ParamVector& x_init) {
          const trac::RegretRecord rec = trac::run_oco(opt, seq, x_init);
          py::dict d;
          d["regret"] = rec.regret;
          d["cumulative_loss"] = rec.cumulative_loss;
          d["comparator"] = rec.comparator;
          d["scaling"] = rec.scaling;
          return d;
        },
        py::arg("optimizer"), py::arg("seq"), py::arg("x_init"));

  // ---- lifelong training ----
  m.def("lifelong_train",
        [](const std::string& optimizer, std::int64_t total_env_steps,
           std::uint64_t seed, int shift_period, double offset_range,
           bool signed_offsets, double lr, int warm_steps, bool shared_trunk) {
          trac::PpoConfig cfg;
          trac::ShiftOptions shift{shift_period, offset_range, signed_offsets};
          trac::Activation act = optimizer == "crelu_adam"
                                     ? trac::Activation::kCrelu
                                     : trac::Activation::kRelu;
          trac::OptimizerFactory factory;
          if (optimizer == "adam" || optimizer == "crelu_adam") {
            factory = [lr](const trac::ParamVector&, std::uint64_t) {
              return std::make_unique<trac::Adam>(trac::AdamConfig{.lr = lr});
            };
          } else if (optimizer == "trac") {
            factory = [lr](const trac::ParamVector& init, std::uint64_t) {
              return std::make_unique<trac::TracOptimizer>(
                  init, std::make_unique<trac::Adam>(trac::AdamConfig{.lr = lr}));
            };
          } else if (optimizer == "warmstart_trac") {
            factory = [lr, warm_steps](const trac::ParamVector&, std::uint64_t) {
              return std::make_unique<trac::WarmstartOptimizer>(
                  std::make_unique<trac::Adam>(trac::AdamConfig{.lr = lr}),
                  warm_steps);
            };
          } else {
            throw std::invalid_argument(
                "optimizer must be adam, crelu_adam, trac, or warmstart_trac");
          }
          const trac::RunRecord rec = trac::lifelong_train(
              cfg, shift, act, factory, total_env_steps, seed, shared_trunk);
          return summary_dict(rec);
        },
        py::arg("optimizer"), py::arg("total_env_steps"), py::arg("seed") = 0,
        py::arg("shift_period") = 200, py::arg("offset_range") = 2.0,
        py::arg("signed_offsets") = true, py::arg("lr") = 0.01,
        py::arg("warm_steps") = 30, py::arg("shared_trunk") = true);

  // ---- experiment harness ----
  m.def("run_experiment_json",
        [](const std::string& config_json, const std::string& out_root) {
          const auto config = trac::ExperimentConfig::from_json(config_json);
          trac::run_experiment(config, out_root);
        },
        py::arg("config_json"), py::arg("out_root"));
  m.def("default_config_json", [](const std::string& experiment) {
    trac::ExperimentConfig config;
    config.experiment = trac::experiment_from_string(experiment);
    return config.to_json();
  });
  m.def("simplified_equivalence_report", [](int steps) {
    trac::SimplifiedOptions opts;
    opts.steps = steps;
    const trac::SimplifiedReport rep = trac::run_simplified_equivalence(opts);
    py::dict d;
    d["max_identity_deviation"] = rep.max_identity_deviation;
    d["max_discount_deviation"] = rep.max_discount_deviation;
    d["min_abs_scaling"] = rep.min_abs_scaling;
    d["final_scaling"] = rep.final_scaling;
    return d;
  }, py::arg("steps") = 1000);
}
