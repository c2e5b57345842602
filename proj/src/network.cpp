#include "iepinn/network.hpp"

#include <cmath>
#include <random>

#include "iepinn/container.hpp"

namespace iepinn {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

NetworkParameters NetworkParameters::zeros_like(const NetworkParameters& other) {
  NetworkParameters p;
  p.weights.reserve(other.weights.size());
  p.biases.reserve(other.biases.size());
  for (const auto& w : other.weights)
    p.weights.push_back(MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : other.biases) p.biases.push_back(VectorXd::Zero(b.size()));
  return p;
}

bool NetworkParameters::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

bool NetworkParameters::same_values(const NetworkParameters& other) const {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size())
    return false;
  for (std::size_t l = 0; l < weights.size(); ++l)
    if (weights[l].rows() != other.weights[l].rows() ||
        weights[l].cols() != other.weights[l].cols() ||
        weights[l] != other.weights[l])
      return false;
  for (std::size_t l = 0; l < biases.size(); ++l)
    if (biases[l].size() != other.biases[l].size() || biases[l] != other.biases[l])
      return false;
  return true;
}

std::size_t NetworkParameters::count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

void positional_encode(double x, double y, const EncodingConfig& cfg, double* out) {
  const int w = cfg.omega;
  for (int k = 1; k <= w; ++k) {
    const double freq = std::pow(cfg.f_min, 2.0 * k / w);
    out[k - 1] = std::sin(freq * x);
    out[w + k - 1] = std::cos(freq * x);
    out[2 * w + k - 1] = std::sin(freq * y);
    out[3 * w + k - 1] = std::cos(freq * y);
  }
}

Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& coords, const EncodingConfig& cfg) {
  if (coords.rows() != 2)
    throw ValidationError("encode_batch: coords must be 2xN");
  MatrixXd enc(cfg.dim(), coords.cols());
  for (Index n = 0; n < coords.cols(); ++n)
    positional_encode(coords(0, n), coords(1, n), cfg, enc.col(n).data());
  return enc;
}

CoordinateNetwork::CoordinateNetwork(const NetworkConfig& net, const EncodingConfig& enc)
    : net_(net), enc_(enc) {
  if (net.depth < 1 || net.width < 1 || net.outputs < 1)
    throw ValidationError("NetworkConfig: depth, width and outputs must be >= 1");
  if (!(net.sine_scale > 0.0))
    throw ValidationError("NetworkConfig: sine_scale must be positive");
  if (enc.omega < 1 || !(enc.f_min > 0.0))
    throw ValidationError("EncodingConfig: omega >= 1 and f_min > 0 required");
  params_.weights.resize(net.depth + 1);
  params_.biases.resize(net.depth + 1);
  params_.weights[0] = MatrixXd::Zero(net.width, enc.dim());
  params_.biases[0] = VectorXd::Zero(net.width);
  for (int l = 1; l < net.depth; ++l) {
    params_.weights[l] = MatrixXd::Zero(net.width, net.width);
    params_.biases[l] = VectorXd::Zero(net.width);
  }
  params_.weights[net.depth] = MatrixXd::Zero(net.outputs, net.width);
  params_.biases[net.depth] = VectorXd::Zero(net.outputs);
}

void CoordinateNetwork::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto fill_uniform = [&](MatrixXd& w, VectorXd& b, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Index i = 0; i < w.rows(); ++i)
      for (Index j = 0; j < w.cols(); ++j) w(i, j) = u(rng);
    for (Index i = 0; i < b.size(); ++i) b(i) = u(rng);
  };
  // Sinusoidal-representation initialization: first layer 1/fan_in (its
  // pre-activation is multiplied by sine_scale), deeper layers
  // sqrt(6/fan_in)/sine_scale.
  fill_uniform(params_.weights[0], params_.biases[0], 1.0 / enc_.dim());
  for (std::size_t l = 1; l < params_.weights.size(); ++l) {
    const double fan_in = static_cast<double>(params_.weights[l].cols());
    fill_uniform(params_.weights[l], params_.biases[l],
                 std::sqrt(6.0 / fan_in) / net_.sine_scale);
  }
}

CoordinateNetwork::Trace CoordinateNetwork::evaluate_traced(
    const MatrixXd& encoded) const {
  if (encoded.rows() != enc_.dim())
    throw ValidationError("CoordinateNetwork: encoded input has wrong dimension");
  const int L = net_.depth;
  Trace tr;
  tr.inputs.resize(L + 1);
  tr.pre.resize(L + 1);
  tr.inputs[0] = encoded;
  for (int l = 0; l <= L; ++l) {
    tr.pre[l] = (params_.weights[l] * tr.inputs[l]).colwise() + params_.biases[l];
    if (!tr.pre[l].allFinite())
      throw std::runtime_error("CoordinateNetwork: non-finite activation at layer " +
                               std::to_string(l));
    if (l < L) {
      const double s = (l == 0) ? net_.sine_scale : 1.0;
      tr.inputs[l + 1] = (s * tr.pre[l].array()).sin().matrix();
    }
  }
  if (net_.head == HeadActivation::softplus)
    tr.out = tr.pre[L].unaryExpr([](double z) { return softplus(z); });
  else
    tr.out = tr.pre[L];
  return tr;
}

Eigen::MatrixXd CoordinateNetwork::evaluate_encoded(const MatrixXd& encoded) const {
  return evaluate_traced(encoded).out;
}

Eigen::MatrixXd CoordinateNetwork::evaluate(const MatrixXd& coords) const {
  return evaluate_encoded(encode_batch(coords, enc_));
}

NetworkParameters CoordinateNetwork::backward(const Trace& trace,
                                              const MatrixXd& out_bar) const {
  const int L = net_.depth;
  NetworkParameters grads = NetworkParameters::zeros_like(params_);

  MatrixXd delta;  // gradient w.r.t. the current layer's pre-activation
  if (net_.head == HeadActivation::softplus)
    delta = out_bar.cwiseProduct(
        trace.pre[L].unaryExpr([](double z) { return sigmoid(z); }));
  else
    delta = out_bar;

  for (int l = L; l >= 0; --l) {
    grads.weights[l] = delta * trace.inputs[l].transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      MatrixXd input_bar = params_.weights[l].transpose() * delta;
      const double s = (l - 1 == 0) ? net_.sine_scale : 1.0;
      delta = input_bar.cwiseProduct(
          (s * trace.pre[l - 1].array()).cos().matrix() * s);
    }
  }
  return grads;
}

ModelSet ModelSet::create(const NetworkConfig& fitting,
                          const NetworkConfig& elasticity,
                          const EncodingConfig& enc, std::uint64_t seed) {
  NetworkConfig ucfg = fitting;
  ucfg.outputs = 2;
  ucfg.head = HeadActivation::linear;
  NetworkConfig scfg = fitting;
  scfg.outputs = 3;
  scfg.head = HeadActivation::linear;
  NetworkConfig ecfg = elasticity;
  ecfg.outputs = 2;
  ecfg.head = HeadActivation::softplus;

  ModelSet m;
  m.displacement = CoordinateNetwork(ucfg, enc);
  m.strain = CoordinateNetwork(scfg, enc);
  m.elasticity = CoordinateNetwork(ecfg, enc);
  m.displacement.initialize(seed);
  m.strain.initialize(seed + 0x9e3779b97f4a7c15ull);
  m.elasticity.initialize(seed + 2 * 0x9e3779b97f4a7c15ull);
  return m;
}

namespace {

void add_network_blocks(TextContainer& c, const std::string& prefix,
                        const CoordinateNetwork& net) {
  const auto& p = net.params();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    c.add_block(prefix + "_W" + std::to_string(l), p.weights[l]);
    c.add_block(prefix + "_b" + std::to_string(l), p.biases[l]);
  }
}

void read_network_blocks(const TextContainer& c, const std::string& prefix,
                         CoordinateNetwork& net) {
  auto& p = net.params();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto& w = c.block(prefix + "_W" + std::to_string(l));
    const auto& b = c.block(prefix + "_b" + std::to_string(l));
    if (w.rows() != p.weights[l].rows() || w.cols() != p.weights[l].cols() ||
        b.rows() != p.biases[l].size() || b.cols() != 1)
      throw ValidationError("checkpoint tensor shape mismatch at " + prefix +
                            " layer " + std::to_string(l));
    p.weights[l] = w;
    p.biases[l] = b.col(0);
  }
}

void set_net_header(TextContainer& c, const std::string& prefix,
                    const CoordinateNetwork& net) {
  c.set(prefix + "_depth", static_cast<std::int64_t>(net.net_config().depth));
  c.set(prefix + "_width", static_cast<std::int64_t>(net.net_config().width));
}

}  // namespace

void save_checkpoint(const ModelSet& models, const std::string& path) {
  TextContainer c;
  c.magic = "npk 1";
  set_net_header(c, "displacement", models.displacement);
  set_net_header(c, "strain", models.strain);
  set_net_header(c, "elasticity", models.elasticity);
  c.set("omega", static_cast<std::int64_t>(models.displacement.encoding_config().omega));
  c.set("f_min", models.displacement.encoding_config().f_min);
  c.set("sine_scale", models.displacement.net_config().sine_scale);
  add_network_blocks(c, "displacement", models.displacement);
  add_network_blocks(c, "strain", models.strain);
  add_network_blocks(c, "elasticity", models.elasticity);
  c.write(path);
}

void load_checkpoint(ModelSet& models, const std::string& path) {
  const TextContainer c = TextContainer::read(path, "npk 1");
  read_network_blocks(c, "displacement", models.displacement);
  read_network_blocks(c, "strain", models.strain);
  read_network_blocks(c, "elasticity", models.elasticity);
}

}  // namespace iepinn
