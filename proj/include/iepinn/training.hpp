#pragma once

#include <functional>
#include <string>
#include <vector>

#include "iepinn/loss.hpp"

namespace iepinn {

// Stage lengths follow the sequential pretraining protocol: displacement
// fitting only, then displacement + strain, then the full objective.
// desk_scale multiplies every stage length (rounded, ratios preserved).
struct TrainingSchedule {
  std::int64_t stage_a_iters = 50'000;
  std::int64_t stage_b_iters = 100'000;
  std::int64_t stage_c_iters = 50'000;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  double desk_scale_factor = 1.0;

  std::int64_t scaled(std::int64_t iters) const;
  void validate() const;
};

struct AdamState {
  NetworkParameters m;
  NetworkParameters v;
  std::int64_t step = 0;

  static AdamState for_params(const NetworkParameters& params);
  void update(NetworkParameters& params, const NetworkParameters& grads,
              double learning_rate);
};

struct HistoryRow {
  std::int64_t iteration = 0;
  int stage = 0;  // 1, 2, 3
  LossBreakdown loss;
};

struct TrainingState {
  ModelSet models;
  AdamState adam_displacement;
  AdamState adam_strain;
  AdamState adam_elasticity;
  std::int64_t iteration = 0;
  int stage = 0;
  std::vector<HistoryRow> history;
};

struct TrainOptions {
  // When set, checkpoints land here every max(1, total/100) iterations.
  std::string checkpoint_dir;
};

TrainingState train(const Dataset& dataset, const TrainingSchedule& schedule,
                    const LossWeights& weights, double E_c,
                    const NetworkConfig& fitting_cfg,
                    const NetworkConfig& elasticity_cfg,
                    const EncodingConfig& enc,
                    const TrainOptions& options = {});

struct PredictedFields {
  DisplacementField displacement;  // node lattice
  StrainField strain;              // cell lattice, from the strain network
  StressField stress;              // cell lattice
  ElasticityField elasticity;      // cell lattice
  ResidualField residual;          // (ny-3)x(nx-3)
};

PredictedFields predict_fields(const TrainingState& state, const Dataset& dataset);

void write_history_csv(const std::vector<HistoryRow>& history,
                       const std::string& path);

}  // namespace iepinn
