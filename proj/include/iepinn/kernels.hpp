#pragma once

#include "iepinn/grid.hpp"

namespace iepinn {

// Equilibrium residual, shape (ny-3)x(nx-3) relative to the parent
// displacement grid (two smaller per axis than the stress lattice).
struct ResidualField {
  ScalarGrid rx;  // force density
  ScalarGrid ry;

  Eigen::Index ny() const { return rx.ny(); }
  Eigen::Index nx() const { return rx.nx(); }
};

// 2x2 forward-difference stencils applied to the displacement grid; output
// lattice (ny-1)x(nx-1). Unit spacing is assumed: no division by h or t.
StrainField strain_from_displacement(const DisplacementField& u);

// Pointwise plane-stress constitutive law.
StressField stress_from_strain(const StrainField& eps, const ElasticityField& elas);

// 3x3 divergence stencils on the stress lattice, divided by h*t.
ResidualField pde_residual(const StressField& sig, double h, double t);

// 3x3 box sum of the modulus grid; normalizes the residual loss.
ScalarGrid local_modulus_sum(const ScalarGrid& E);

}  // namespace iepinn
