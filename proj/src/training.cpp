#include "iepinn/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace iepinn {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

using Eigen::Index;
using Eigen::MatrixXd;

ScalarGrid grid_from_row(const MatrixXd& out, Index channel, Index ny, Index nx,
                         double h, double t) {
  ScalarGrid g(ny, nx, h, t);
  for (Index i = 0; i < ny; ++i)
    for (Index j = 0; j < nx; ++j) g.values(i, j) = out(channel, i * nx + j);
  return g;
}

}  // namespace

std::int64_t TrainingSchedule::scaled(std::int64_t iters) const {
  return static_cast<std::int64_t>(
      std::llround(static_cast<double>(iters) * desk_scale_factor));
}

void TrainingSchedule::validate() const {
  if (stage_a_iters < 0 || stage_b_iters < 0 || stage_c_iters < 0)
    throw ValidationError("TrainingSchedule: iteration counts must be >= 0");
  if (!(learning_rate > 0.0))
    throw ValidationError("TrainingSchedule: learning_rate must be positive");
  if (!(desk_scale_factor > 0.0) || desk_scale_factor > 1.0)
    throw ValidationError("TrainingSchedule: desk_scale_factor must be in (0, 1]");
}

AdamState AdamState::for_params(const NetworkParameters& params) {
  AdamState s;
  s.m = NetworkParameters::zeros_like(params);
  s.v = NetworkParameters::zeros_like(params);
  return s;
}

void AdamState::update(NetworkParameters& params, const NetworkParameters& grads,
                       double learning_rate) {
  ++step;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
  auto apply = [&](auto& theta, auto& m_t, auto& v_t, const auto& g) {
    m_t = kBeta1 * m_t + (1.0 - kBeta1) * g;
    v_t.array() = kBeta2 * v_t.array() + (1.0 - kBeta2) * g.array().square();
    theta.array() -=
        learning_rate * (m_t.array() / c1) / ((v_t.array() / c2).sqrt() + kAdamEps);
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    apply(params.weights[l], m.weights[l], v.weights[l], grads.weights[l]);
    apply(params.biases[l], m.biases[l], v.biases[l], grads.biases[l]);
  }
}

TrainingState train(const Dataset& dataset, const TrainingSchedule& schedule,
                    const LossWeights& weights, double E_c,
                    const NetworkConfig& fitting_cfg,
                    const NetworkConfig& elasticity_cfg, const EncodingConfig& enc,
                    const TrainOptions& options) {
  dataset.validate();
  schedule.validate();

  TrainingState st;
  st.models = ModelSet::create(fitting_cfg, elasticity_cfg, enc, schedule.seed);
  st.adam_displacement = AdamState::for_params(st.models.displacement.params());
  st.adam_strain = AdamState::for_params(st.models.strain.params());
  st.adam_elasticity = AdamState::for_params(st.models.elasticity.params());

  const TotalLossEvaluator eval(dataset, weights, E_c, enc);

  const std::int64_t iters_a = schedule.scaled(schedule.stage_a_iters);
  const std::int64_t iters_b = schedule.scaled(schedule.stage_b_iters);
  const std::int64_t iters_c = schedule.scaled(schedule.stage_c_iters);
  const std::int64_t total = iters_a + iters_b + iters_c;
  const std::int64_t checkpoint_every = std::max<std::int64_t>(1, total / 100);
  st.history.reserve(static_cast<std::size_t>(total));

  auto checkpoint = [&](std::int64_t iter) {
    if (options.checkpoint_dir.empty()) return;
    char name[64];
    std::snprintf(name, sizeof(name), "/checkpoint_%06lld.npk",
                  static_cast<long long>(iter));
    save_checkpoint(st.models, options.checkpoint_dir + name);
  };

  auto run_stage = [&](int stage, std::int64_t iters, Objective objective,
                       bool update_u, bool update_s, bool update_e) {
    if (iters == 0) return;  // stage skipped cleanly
    st.stage = stage;
    for (std::int64_t k = 0; k < iters; ++k) {
      ModelGradients grads;
      LossBreakdown bd;
      try {
        bd = eval.evaluate_with_gradients(st.models, objective, grads);
      } catch (const std::exception& e) {
        if (!options.checkpoint_dir.empty())
          save_checkpoint(st.models, options.checkpoint_dir + "/abort.npk");
        throw std::runtime_error("training aborted at iteration " +
                                 std::to_string(st.iteration) + ": " + e.what());
      }
      if (update_u)
        st.adam_displacement.update(st.models.displacement.params(),
                                    grads.displacement, schedule.learning_rate);
      if (update_s)
        st.adam_strain.update(st.models.strain.params(), grads.strain,
                              schedule.learning_rate);
      if (update_e)
        st.adam_elasticity.update(st.models.elasticity.params(), grads.elasticity,
                                  schedule.learning_rate);
      ++st.iteration;
      // The last row of each stage is re-evaluated after the update, so the
      // stage objective at the outgoing parameters matches the history.
      if (k + 1 == iters) bd = eval.evaluate(st.models, objective);
      st.history.push_back({st.iteration, stage, bd});
      if (st.iteration % checkpoint_every == 0) checkpoint(st.iteration);
    }
  };

  run_stage(1, iters_a, Objective::displacement_only, true, false, false);
  run_stage(2, iters_b, Objective::displacement_strain, true, true, false);
  run_stage(3, iters_c, Objective::full, true, true, true);

  if (total > 0 && !options.checkpoint_dir.empty())
    save_checkpoint(st.models, options.checkpoint_dir + "/final.npk");
  return st;
}

PredictedFields predict_fields(const TrainingState& state, const Dataset& dataset) {
  dataset.validate();
  const Index ny = dataset.measured.ny(), nx = dataset.measured.nx();
  const double h = dataset.measured.h(), t = dataset.measured.t();
  const auto& enc = state.models.displacement.encoding_config();

  const MatrixXd u_out =
      state.models.displacement.evaluate(node_coordinates(ny, nx));
  const MatrixXd s_out = state.models.strain.evaluate(cell_coordinates(ny, nx));
  const MatrixXd e_out = state.models.elasticity.evaluate(cell_coordinates(ny, nx));
  (void)enc;

  PredictedFields f;
  f.displacement.ux = grid_from_row(u_out, 0, ny, nx, h, t);
  f.displacement.uy = grid_from_row(u_out, 1, ny, nx, h, t);
  f.strain.exx = grid_from_row(s_out, 0, ny - 1, nx - 1, h, t);
  f.strain.eyy = grid_from_row(s_out, 1, ny - 1, nx - 1, h, t);
  f.strain.gxy = grid_from_row(s_out, 2, ny - 1, nx - 1, h, t);
  f.elasticity.E = grid_from_row(e_out, 0, ny - 1, nx - 1, h, t);
  f.elasticity.nu = grid_from_row(e_out, 1, ny - 1, nx - 1, h, t);

  if ((f.elasticity.nu.values.array() >= 0.5).any())
    std::cerr << "warning: predicted Poisson's ratio exceeds 0.5 at "
              << (f.elasticity.nu.values.array() >= 0.5).count()
              << " points; the softplus head does not bound it above\n";

  // Constitutive law applied to the raw prediction; nu may sit outside the
  // physical range mid-pipeline, so this does not go through the validated
  // ElasticityField path.
  const Eigen::ArrayXXd k =
      f.elasticity.E.values.array() / (1.0 - f.elasticity.nu.values.array().square());
  const auto& nu = f.elasticity.nu.values.array();
  f.stress.sxx = f.strain.exx;
  f.stress.sxx.values =
      (k * (f.strain.exx.values.array() + nu * f.strain.eyy.values.array())).matrix();
  f.stress.syy = f.strain.exx;
  f.stress.syy.values =
      (k * (nu * f.strain.exx.values.array() + f.strain.eyy.values.array())).matrix();
  f.stress.txy = f.strain.exx;
  f.stress.txy.values =
      (k * (1.0 - nu) * 0.5 * f.strain.gxy.values.array()).matrix();

  f.residual = pde_residual(f.stress, h, t);
  return f;
}

void write_history_csv(const std::vector<HistoryRow>& history,
                       const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open for writing: " + path);
  f << "iteration,L_u,L_eps,L_r,L_E,total\n";
  char line[256];
  for (const auto& row : history) {
    std::snprintf(line, sizeof(line), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(row.iteration), row.loss.L_u,
                  row.loss.L_eps, row.loss.L_r, row.loss.L_E, row.loss.total);
    f << line;
  }
}

}  // namespace iepinn
