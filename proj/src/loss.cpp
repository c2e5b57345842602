#include "iepinn/loss.hpp"

#include <cmath>

namespace iepinn {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

MatrixXd sign_of(const MatrixXd& m) {
  return m.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

void require_match(Index ar, Index ac, Index br, Index bc, const char* what) {
  if (ar != br || ac != bc)
    throw ValidationError(std::string("lattice mismatch in ") + what);
}

// Network outputs are channels x N with column n = i*nx + j.
MatrixXd row_to_grid(const MatrixXd& out, Index channel, Index ny, Index nx) {
  MatrixXd g(ny, nx);
  for (Index i = 0; i < ny; ++i)
    for (Index j = 0; j < nx; ++j) g(i, j) = out(channel, i * nx + j);
  return g;
}

void grid_to_row(const MatrixXd& g, MatrixXd& out, Index channel) {
  for (Index i = 0; i < g.rows(); ++i)
    for (Index j = 0; j < g.cols(); ++j) out(channel, i * g.cols() + j) = g(i, j);
}

// Adjoint of the 2x2 strain stencils: scatters cell-lattice cotangents
// back onto the displacement nodes.
void scatter2(MatrixXd& node_bar, const MatrixXd& cell_bar, const double w[2][2]) {
  const Index r = cell_bar.rows(), c = cell_bar.cols();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      if (w[a][b] != 0.0) node_bar.block(a, b, r, c) += w[a][b] * cell_bar;
}

// Adjoint of the 3x3 residual stencils.
void scatter3(MatrixXd& parent_bar, const MatrixXd& out_bar, const double w[3][3],
              double scale) {
  const Index r = out_bar.rows(), c = out_bar.cols();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (w[a][b] != 0.0)
        parent_bar.block(a, b, r, c) += (w[a][b] * scale) * out_bar;
}

constexpr double kWx[2][2] = {{-0.5, 0.5}, {-0.5, 0.5}};
constexpr double kWy[2][2] = {{0.5, 0.5}, {-0.5, -0.5}};
constexpr double kDCol[3][3] = {{-1, 0, 1}, {-1, 0, 1}, {-1, 0, 1}};
constexpr double kDRow[3][3] = {{1, 1, 1}, {0, 0, 0}, {-1, -1, -1}};
constexpr double kBox[3][3] = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};

}  // namespace

double loss_displacement(const DisplacementField& pred,
                         const DisplacementField& measured) {
  require_match(pred.ny(), pred.nx(), measured.ny(), measured.nx(),
                "loss_displacement");
  const double n = static_cast<double>(pred.ny() * pred.nx());
  return ((pred.ux.values - measured.ux.values).array().abs().sum() +
          (pred.uy.values - measured.uy.values).array().abs().sum()) /
         n;
}

double loss_strain(const StrainField& pred, const StrainField& derived) {
  require_match(pred.ny(), pred.nx(), derived.ny(), derived.nx(), "loss_strain");
  const double n = static_cast<double>(pred.ny() * pred.nx());
  return ((pred.exx.values - derived.exx.values).array().abs().sum() +
          (pred.eyy.values - derived.eyy.values).array().abs().sum() +
          (pred.gxy.values - derived.gxy.values).array().abs().sum()) /
         n;
}

double loss_residual(const ResidualField& res, const ScalarGrid& E_pred) {
  const ScalarGrid Et = local_modulus_sum(E_pred);
  require_match(res.ny(), res.nx(), Et.ny(), Et.nx(), "loss_residual");
  if ((Et.values.array() <= 0.0).any())
    throw ValidationError("loss_residual: non-positive local modulus sum");
  const double n = static_cast<double>(res.ny() * res.nx());
  return ((res.rx.values.array().abs() + res.ry.values.array().abs()) /
          Et.values.array())
             .sum() /
         n;
}

double loss_mean_modulus(const ScalarGrid& E_pred, double E_c) {
  if (!(E_c > 0.0)) throw ValidationError("loss_mean_modulus: E_c must be positive");
  const double n = static_cast<double>(E_pred.ny() * E_pred.nx());
  return (E_pred.values.array() - E_c).abs().sum() / n;
}

Eigen::MatrixXd node_coordinates(Index ny, Index nx) {
  MatrixXd coords(2, ny * nx);
  for (Index i = 0; i < ny; ++i)
    for (Index j = 0; j < nx; ++j) {
      const Index n = i * nx + j;
      coords(0, n) = static_cast<double>(j) / static_cast<double>(nx - 1);
      coords(1, n) = static_cast<double>(ny - 1 - i) / static_cast<double>(ny - 1);
    }
  return coords;
}

Eigen::MatrixXd cell_coordinates(Index ny, Index nx) {
  MatrixXd coords(2, (ny - 1) * (nx - 1));
  for (Index i = 0; i + 1 < ny; ++i)
    for (Index j = 0; j + 1 < nx; ++j) {
      const Index n = i * (nx - 1) + j;
      coords(0, n) = (static_cast<double>(j) + 0.5) / static_cast<double>(nx - 1);
      coords(1, n) =
          (static_cast<double>(ny - 1 - i) - 0.5) / static_cast<double>(ny - 1);
    }
  return coords;
}

TotalLossEvaluator::TotalLossEvaluator(const Dataset& dataset,
                                       const LossWeights& weights, double E_c,
                                       const EncodingConfig& enc)
    : dataset_(dataset), weights_(weights), E_c_(E_c) {
  dataset_.validate();
  if (!(E_c > 0.0)) throw ValidationError("TotalLossEvaluator: E_c must be positive");
  if (weights.lambda_u < 0 || weights.lambda_eps < 0 || weights.lambda_r < 0 ||
      weights.lambda_E < 0)
    throw ValidationError("LossWeights must be non-negative");
  const Index ny = dataset_.measured.ny(), nx = dataset_.measured.nx();
  if (ny < 6 || nx < 6)
    throw ValidationError("TotalLossEvaluator: dataset lattice must be >= 6x6");
  node_features_ = encode_batch(node_coordinates(ny, nx), enc);
  cell_features_ = encode_batch(cell_coordinates(ny, nx), enc);
}

LossBreakdown TotalLossEvaluator::evaluate(const ModelSet& models,
                                           Objective objective) const {
  return run(models, objective, nullptr);
}

LossBreakdown TotalLossEvaluator::evaluate_with_gradients(
    const ModelSet& models, Objective objective, ModelGradients& grads) const {
  return run(models, objective, &grads);
}

LossBreakdown TotalLossEvaluator::run(const ModelSet& models, Objective objective,
                                      ModelGradients* grads) const {
  const auto& meas = dataset_.measured;
  const Index ny = meas.ny(), nx = meas.nx();
  const Index ny1 = ny - 1, nx1 = nx - 1;
  const Index ny3 = ny - 3, nx3 = nx - 3;
  const double n_nodes = static_cast<double>(ny * nx);
  const double n_cells = static_cast<double>(ny1 * nx1);
  const double n_res = static_cast<double>(ny3 * nx3);
  const double h = meas.h(), t = meas.t();

  LossBreakdown bd;

  // Displacement network on the node lattice.
  const auto utr = models.displacement.evaluate_traced(node_features_);
  DisplacementField upred;
  upred.ux = ScalarGrid{};
  upred.ux.values = row_to_grid(utr.out, 0, ny, nx);
  upred.ux.h = h;
  upred.ux.t = t;
  upred.uy = upred.ux;
  upred.uy.values = row_to_grid(utr.out, 1, ny, nx);

  bd.L_u = loss_displacement(upred, meas);
  MatrixXd ux_bar, uy_bar;
  if (grads) {
    ux_bar = (weights_.lambda_u / n_nodes) *
             sign_of(upred.ux.values - meas.ux.values);
    uy_bar = (weights_.lambda_u / n_nodes) *
             sign_of(upred.uy.values - meas.uy.values);
  }

  MatrixXd strain_bar;  // 3 x n_cells cotangent of the strain network output
  CoordinateNetwork::Trace str_trace, elas_trace;
  bool have_strain = false, have_elas = false;

  if (objective != Objective::displacement_only) {
    const StrainField derived = strain_from_displacement(upred);
    str_trace = models.strain.evaluate_traced(cell_features_);
    have_strain = true;
    StrainField spred;
    spred.exx.values = row_to_grid(str_trace.out, 0, ny1, nx1);
    spred.eyy.values = row_to_grid(str_trace.out, 1, ny1, nx1);
    spred.gxy.values = row_to_grid(str_trace.out, 2, ny1, nx1);
    bd.L_eps = loss_strain(spred, derived);

    MatrixXd exx_bar, eyy_bar, gxy_bar;
    if (grads) {
      exx_bar = (weights_.lambda_eps / n_cells) *
                sign_of(spred.exx.values - derived.exx.values);
      eyy_bar = (weights_.lambda_eps / n_cells) *
                sign_of(spred.eyy.values - derived.eyy.values);
      gxy_bar = (weights_.lambda_eps / n_cells) *
                sign_of(spred.gxy.values - derived.gxy.values);
      // The derived strain enters with opposite sign; push it back through
      // the stencil adjoints onto the displacement nodes.
      scatter2(ux_bar, -exx_bar, kWx);
      scatter2(uy_bar, -eyy_bar, kWy);
      scatter2(ux_bar, -gxy_bar, kWy);
      scatter2(uy_bar, -gxy_bar, kWx);
    }

    if (objective == Objective::full) {
      elas_trace = models.elasticity.evaluate_traced(cell_features_);
      have_elas = true;
      const MatrixXd E = row_to_grid(elas_trace.out, 0, ny1, nx1);
      const MatrixXd nu = row_to_grid(elas_trace.out, 1, ny1, nx1);

      // Constitutive law evaluated inline: nu is only softplus-positive
      // during training, so the (0, 0.5) invariant is checked post hoc.
      const Eigen::ArrayXXd k = E.array() / (1.0 - nu.array().square());
      StressField sig;
      sig.sxx.values =
          (k * (spred.exx.values.array() + nu.array() * spred.eyy.values.array()))
              .matrix();
      sig.syy.values =
          (k * (nu.array() * spred.exx.values.array() + spred.eyy.values.array()))
              .matrix();
      sig.txy.values =
          (k * (1.0 - nu.array()) * 0.5 * spred.gxy.values.array()).matrix();
      sig.sxx.h = sig.syy.h = sig.txy.h = h;
      sig.sxx.t = sig.syy.t = sig.txy.t = t;

      const ResidualField res = pde_residual(sig, h, t);
      ScalarGrid Egrid;
      Egrid.values = E;
      Egrid.h = h;
      Egrid.t = t;
      const ScalarGrid Et = local_modulus_sum(Egrid);

      bd.L_r = ((res.rx.values.array().abs() + res.ry.values.array().abs()) /
                Et.values.array())
                   .sum() /
               n_res;
      bd.L_E = (E.array() - E_c_).abs().sum() / n_cells;

      if (grads) {
        const MatrixXd rx_bar =
            ((weights_.lambda_r / n_res) * sign_of(res.rx.values).array() /
             Et.values.array())
                .matrix();
        const MatrixXd ry_bar =
            ((weights_.lambda_r / n_res) * sign_of(res.ry.values).array() /
             Et.values.array())
                .matrix();
        const MatrixXd Et_bar =
            (-(weights_.lambda_r / n_res) *
             (res.rx.values.array().abs() + res.ry.values.array().abs()) /
             Et.values.array().square())
                .matrix();

        MatrixXd sxx_bar = MatrixXd::Zero(ny1, nx1);
        MatrixXd syy_bar = MatrixXd::Zero(ny1, nx1);
        MatrixXd txy_bar = MatrixXd::Zero(ny1, nx1);
        const double inv_ht = 1.0 / (h * t);
        scatter3(sxx_bar, rx_bar, kDCol, inv_ht);
        scatter3(txy_bar, rx_bar, kDRow, inv_ht);
        scatter3(syy_bar, ry_bar, kDRow, inv_ht);
        scatter3(txy_bar, ry_bar, kDCol, inv_ht);

        // Through the constitutive law into predicted strain.
        exx_bar.array() += k * (sxx_bar.array() + nu.array() * syy_bar.array());
        eyy_bar.array() += k * (nu.array() * sxx_bar.array() + syy_bar.array());
        gxy_bar.array() += k * (1.0 - nu.array()) * 0.5 * txy_bar.array();

        // Into the modulus: stress scaling, box-sum normalizer, mean
        // constraint.
        MatrixXd E_bar =
            ((sig.sxx.values.array() * sxx_bar.array() +
              sig.syy.values.array() * syy_bar.array() +
              sig.txy.values.array() * txy_bar.array()) /
             E.array())
                .matrix();
        E_bar.array() += (weights_.lambda_E / n_cells) * sign_of(E.array().matrix() -
                         MatrixXd::Constant(ny1, nx1, E_c_)).array();
        scatter3(E_bar, Et_bar, kBox, 1.0);

        // Into Poisson's ratio.
        const Eigen::ArrayXXd dk =
            E.array() * 2.0 * nu.array() / (1.0 - nu.array().square()).square();
        MatrixXd nu_bar =
            ((dk * (spred.exx.values.array() + nu.array() * spred.eyy.values.array()) +
              k * spred.eyy.values.array()) *
                 sxx_bar.array() +
             (dk * (nu.array() * spred.exx.values.array() + spred.eyy.values.array()) +
              k * spred.exx.values.array()) *
                 syy_bar.array() +
             ((dk * (1.0 - nu.array()) - k) * 0.5 * spred.gxy.values.array()) *
                 txy_bar.array())
                .matrix();

        MatrixXd elas_bar(2, ny1 * nx1);
        grid_to_row(E_bar, elas_bar, 0);
        grid_to_row(nu_bar, elas_bar, 1);
        grads->elasticity = models.elasticity.backward(elas_trace, elas_bar);
      }
    }

    if (grads) {
      strain_bar.resize(3, ny1 * nx1);
      grid_to_row(exx_bar, strain_bar, 0);
      grid_to_row(eyy_bar, strain_bar, 1);
      grid_to_row(gxy_bar, strain_bar, 2);
      grads->strain = models.strain.backward(str_trace, strain_bar);
    }
  }

  if (grads) {
    MatrixXd u_bar(2, ny * nx);
    grid_to_row(ux_bar, u_bar, 0);
    grid_to_row(uy_bar, u_bar, 1);
    grads->displacement = models.displacement.backward(utr, u_bar);
    if (!have_strain)
      grads->strain = NetworkParameters::zeros_like(models.strain.params());
    if (!have_elas)
      grads->elasticity = NetworkParameters::zeros_like(models.elasticity.params());
  }

  bd.total = weights_.lambda_u * bd.L_u + weights_.lambda_eps * bd.L_eps +
             weights_.lambda_r * bd.L_r + weights_.lambda_E * bd.L_E;
  if (!std::isfinite(bd.total))
    throw std::runtime_error("total loss is non-finite");
  return bd;
}

LossBreakdown total_loss(const ModelSet& models, const Dataset& dataset,
                         const LossWeights& weights, double E_c) {
  const TotalLossEvaluator eval(dataset, weights, E_c,
                                models.displacement.encoding_config());
  return eval.evaluate(models, Objective::full);
}

}  // namespace iepinn
