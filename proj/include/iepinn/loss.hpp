#pragma once

#include "iepinn/grid.hpp"
#include "iepinn/kernels.hpp"
#include "iepinn/network.hpp"

namespace iepinn {

struct LossWeights {
  double lambda_u = 2.0;
  double lambda_eps = 1.0;
  double lambda_r = 3.0;
  double lambda_E = 0.02;
};

struct LossBreakdown {
  double L_u = 0.0;
  double L_eps = 0.0;
  double L_r = 0.0;
  double L_E = 0.0;
  double total = 0.0;
};

// Which terms are active; mirrors the three pretraining stages.
enum class Objective { displacement_only, displacement_strain, full };

double loss_displacement(const DisplacementField& pred,
                         const DisplacementField& measured);
double loss_strain(const StrainField& pred, const StrainField& derived);
double loss_residual(const ResidualField& res, const ScalarGrid& E_pred);
double loss_mean_modulus(const ScalarGrid& E_pred, double E_c);

struct ModelGradients {
  NetworkParameters displacement;
  NetworkParameters strain;
  NetworkParameters elasticity;
};

// Normalized [0,1]^2 coordinates of the displacement-node lattice and of
// the cell-center lattice (nodes offset by half a spacing), as 2xN
// matrices in row-major lattice order.
Eigen::MatrixXd node_coordinates(Eigen::Index ny, Eigen::Index nx);
Eigen::MatrixXd cell_coordinates(Eigen::Index ny, Eigen::Index nx);

// Evaluates the weighted objective on one dataset. Encoded coordinate
// features are cached at construction, so per-iteration work is only the
// network passes and the stencil pipeline.
class TotalLossEvaluator {
public:
  TotalLossEvaluator(const Dataset& dataset, const LossWeights& weights,
                     double E_c, const EncodingConfig& enc);

  LossBreakdown evaluate(const ModelSet& models, Objective objective) const;
  LossBreakdown evaluate_with_gradients(const ModelSet& models,
                                        Objective objective,
                                        ModelGradients& grads) const;

  const LossWeights& weights() const { return weights_; }
  double mean_modulus_target() const { return E_c_; }

private:
  LossBreakdown run(const ModelSet& models, Objective objective,
                    ModelGradients* grads) const;

  Dataset dataset_;
  LossWeights weights_;
  double E_c_;
  Eigen::MatrixXd node_features_;  // encoded node lattice
  Eigen::MatrixXd cell_features_;  // encoded cell-center lattice
};

LossBreakdown total_loss(const ModelSet& models, const Dataset& dataset,
                         const LossWeights& weights, double E_c);

}  // namespace iepinn
