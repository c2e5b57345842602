#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "iepinn/errors.hpp"

namespace iepinn {

// Sine/cosine positional encoding with frequencies f_min^(2k/omega),
// k = 1..omega, applied to each normalized coordinate. Output blocks are
// ordered [sin-x, cos-x, sin-y, cos-y], each of length omega.
struct EncodingConfig {
  double f_min = 1e-4;
  int omega = 64;

  int dim() const { return 4 * omega; }
};

enum class HeadActivation { linear, softplus };

struct NetworkConfig {
  int depth = 16;    // hidden layers
  int width = 128;   // neurons per hidden layer
  int outputs = 2;
  HeadActivation head = HeadActivation::linear;
  double sine_scale = 30.0;  // first-layer sine frequency multiplier
};

// Per-layer weights and biases; also reused as the congruent container for
// gradients and optimizer moments.
struct NetworkParameters {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static NetworkParameters zeros_like(const NetworkParameters& other);
  bool all_finite() const;
  bool same_values(const NetworkParameters& other) const;
  std::size_t count() const;
};

void positional_encode(double x, double y, const EncodingConfig& cfg,
                       double* out);

// Encodes a 2xN coordinate matrix into a dim()xN feature matrix.
Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& coords,
                             const EncodingConfig& cfg);

// Fully connected coordinate network: positional encoding, `depth` sine
// hidden layers (the first scaled by sine_scale), affine head, optional
// softplus on every output channel.
class CoordinateNetwork {
public:
  CoordinateNetwork() = default;
  CoordinateNetwork(const NetworkConfig& net, const EncodingConfig& enc);

  void initialize(std::uint64_t seed);

  // coords is 2xN (x; y), output is outputs x N.
  Eigen::MatrixXd evaluate(const Eigen::MatrixXd& coords) const;
  Eigen::MatrixXd evaluate_encoded(const Eigen::MatrixXd& encoded) const;

  struct Trace {
    std::vector<Eigen::MatrixXd> inputs;  // inputs[l] feeds layer l
    std::vector<Eigen::MatrixXd> pre;     // affine outputs per layer
    Eigen::MatrixXd out;                  // after head activation
  };
  Trace evaluate_traced(const Eigen::MatrixXd& encoded) const;

  // Reverse-mode gradients of sum(out_bar .* out) with respect to every
  // weight and bias.
  NetworkParameters backward(const Trace& trace,
                             const Eigen::MatrixXd& out_bar) const;

  const NetworkConfig& net_config() const { return net_; }
  const EncodingConfig& encoding_config() const { return enc_; }
  NetworkParameters& params() { return params_; }
  const NetworkParameters& params() const { return params_; }

private:
  NetworkConfig net_;
  EncodingConfig enc_;
  NetworkParameters params_;
};

// The three coordinate networks of the inverse pipeline. The displacement
// net is evaluated on grid nodes; strain and elasticity nets on the
// cell-center lattice. Only the elasticity head is softplus.
struct ModelSet {
  CoordinateNetwork displacement;  // 2 outputs: ux, uy
  CoordinateNetwork strain;        // 3 outputs: exx, eyy, gxy
  CoordinateNetwork elasticity;    // 2 outputs: E, nu

  static ModelSet create(const NetworkConfig& fitting,
                         const NetworkConfig& elasticity,
                         const EncodingConfig& enc, std::uint64_t seed);
};

// Checkpoint pack: all three networks' tensors in one .npk file.
void save_checkpoint(const ModelSet& models, const std::string& path);
void load_checkpoint(ModelSet& models, const std::string& path);

}  // namespace iepinn
