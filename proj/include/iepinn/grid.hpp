#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "iepinn/errors.hpp"

namespace iepinn {

// Regular 2-D sample grid. Row index i runs top to bottom (decreasing
// physical y), column index j left to right (increasing physical x).
// h is the vertical spacing, t the horizontal spacing.
struct ScalarGrid {
  Eigen::MatrixXd values;  // ny x nx
  double h = 1.0;
  double t = 1.0;

  ScalarGrid() = default;
  ScalarGrid(Eigen::Index ny, Eigen::Index nx, double h_ = 1.0, double t_ = 1.0,
             double fill = 0.0)
      : values(Eigen::MatrixXd::Constant(ny, nx, fill)), h(h_), t(t_) {}

  Eigen::Index ny() const { return values.rows(); }
  Eigen::Index nx() const { return values.cols(); }

  void validate(const std::string& name) const;
};

struct DisplacementField {
  ScalarGrid ux;  // mm
  ScalarGrid uy;  // mm

  Eigen::Index ny() const { return ux.ny(); }
  Eigen::Index nx() const { return ux.nx(); }
  double h() const { return ux.h; }
  double t() const { return ux.t; }

  void validate() const;
};

// Strain channels live on the cell-center lattice, one smaller per axis
// than the displacement grid they derive from.
struct StrainField {
  ScalarGrid exx;
  ScalarGrid eyy;
  ScalarGrid gxy;  // engineering shear

  Eigen::Index ny() const { return exx.ny(); }
  Eigen::Index nx() const { return exx.nx(); }

  void validate() const;
};

struct StressField {
  ScalarGrid sxx;  // MPa
  ScalarGrid syy;  // MPa
  ScalarGrid txy;  // MPa

  Eigen::Index ny() const { return sxx.ny(); }
  Eigen::Index nx() const { return sxx.nx(); }

  void validate() const;
};

struct ElasticityField {
  ScalarGrid E;   // MPa, strictly positive
  ScalarGrid nu;  // dimensionless, in (0, 0.5)

  Eigen::Index ny() const { return E.ny(); }
  Eigen::Index nx() const { return E.nx(); }

  void validate() const;
};

struct Dataset {
  DisplacementField measured;
  std::optional<ElasticityField> truth_elasticity;
  std::optional<DisplacementField> truth_displacement;
  std::optional<double> applied_force;
  std::optional<double> snr;
  std::optional<std::int64_t> rng_seed;
  bool calibration_capable = false;

  void validate() const;
};

// u' = u + eps, eps ~ N(0, sigma^2) with sigma = |mean(u)/snr|; the mean is
// pooled over both channels. Deterministic for a fixed seed.
DisplacementField add_noise(const DisplacementField& clean, double snr,
                            std::uint64_t seed);

Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& dataset, const std::string& path);

}  // namespace iepinn
