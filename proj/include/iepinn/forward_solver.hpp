#pragma once

#include <utility>
#include <vector>

#include "iepinn/grid.hpp"

namespace iepinn {

// Synthetic elasticity phantom: a background material plus disk or
// axis-aligned rectangle inclusions, geometry in grid units.
struct Inclusion {
  enum class Shape { disk, rectangle };
  Shape shape = Shape::disk;
  // disk: center (cx, cy) and radius; rectangle: corners (x0, y0)-(x1, y1).
  double cx = 0, cy = 0, radius = 0;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double E = 1.0;
  double nu = 0.3;
};

struct PhantomSpec {
  double background_E = 1.0;
  double background_nu = 0.3;
  std::vector<Inclusion> inclusions;
};

// Left edge: ux = 0 (uy free, bottom-left node pinned in y). Right edge:
// prescribed ux = stretch * body length. Top/bottom traction-free.
struct BoundaryCondition {
  double stretch = 0.01;
};

// Cell-center elasticity map on an ny x nx cell lattice; inclusion
// membership by center-point test.
ElasticityField rasterize_phantom(const PhantomSpec& spec, Eigen::Index ny,
                                  Eigen::Index nx, double h = 1.0, double t = 1.0);

// Bilinear quadrilateral plane-stress solve, one element per elasticity
// cell, 2x2 Gauss quadrature, direct sparse factorization. Returns nodal
// displacements ((ny+1) x (nx+1)) and the applied force recovered from the
// reactions on the loaded edge.
std::pair<DisplacementField, double> solve_forward(const ElasticityField& elas,
                                                   const BoundaryCondition& bc);

}  // namespace iepinn
