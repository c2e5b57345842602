#include "iepinn/forward_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

namespace iepinn {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Plane-stress stiffness of one t x h bilinear rectangle, 2x2 Gauss.
// Local nodes counterclockwise from the bottom-left corner.
Eigen::Matrix<double, 8, 8> element_stiffness(double E, double nu, double h,
                                              double t) {
  Eigen::Matrix3d D;
  D << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, (1.0 - nu) / 2.0;
  D *= E / (1.0 - nu * nu);

  const double g = 1.0 / std::sqrt(3.0);
  const double gauss[2] = {-g, g};
  const double jac = (t / 2.0) * (h / 2.0);

  Eigen::Matrix<double, 8, 8> ke = Eigen::Matrix<double, 8, 8>::Zero();
  for (double xi : gauss)
    for (double eta : gauss) {
      const double dn_dxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4,
                                -(1 + eta) / 4};
      const double dn_deta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4,
                                 (1 - xi) / 4};
      Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
      for (int n = 0; n < 4; ++n) {
        const double dn_dx = dn_dxi[n] * 2.0 / t;
        const double dn_dy = dn_deta[n] * 2.0 / h;
        B(0, 2 * n) = dn_dx;
        B(1, 2 * n + 1) = dn_dy;
        B(2, 2 * n) = dn_dy;
        B(2, 2 * n + 1) = dn_dx;
      }
      ke += B.transpose() * D * B * jac;
    }
  return ke;
}

}  // namespace

ElasticityField rasterize_phantom(const PhantomSpec& spec, Index ny, Index nx,
                                  double h, double t) {
  if (ny < 1 || nx < 1) throw ValidationError("rasterize_phantom: empty lattice");
  const double width = static_cast<double>(nx) * t;
  const double height = static_cast<double>(ny) * h;

  for (const auto& inc : spec.inclusions) {
    if (inc.shape == Inclusion::Shape::disk) {
      if (inc.cx - inc.radius < 0 || inc.cx + inc.radius > width ||
          inc.cy - inc.radius < 0 || inc.cy + inc.radius > height)
        throw ValidationError("rasterize_phantom: disk inclusion outside domain");
    } else {
      if (inc.x0 < 0 || inc.y0 < 0 || inc.x1 > width || inc.y1 > height ||
          inc.x0 >= inc.x1 || inc.y0 >= inc.y1)
        throw ValidationError(
            "rasterize_phantom: rectangle inclusion outside domain");
    }
  }

  ElasticityField elas;
  elas.E = ScalarGrid(ny, nx, h, t, spec.background_E);
  elas.nu = ScalarGrid(ny, nx, h, t, spec.background_nu);
  for (Index i = 0; i < ny; ++i)
    for (Index j = 0; j < nx; ++j) {
      const double x = (static_cast<double>(j) + 0.5) * t;
      const double y = (static_cast<double>(ny - i) - 0.5) * h;
      for (const auto& inc : spec.inclusions) {
        bool inside;
        if (inc.shape == Inclusion::Shape::disk) {
          const double dx = x - inc.cx, dy = y - inc.cy;
          inside = dx * dx + dy * dy <= inc.radius * inc.radius;
        } else {
          inside = x >= inc.x0 && x <= inc.x1 && y >= inc.y0 && y <= inc.y1;
        }
        if (inside) {
          elas.E.values(i, j) = inc.E;
          elas.nu.values(i, j) = inc.nu;
        }
      }
    }
  elas.validate();
  return elas;
}

std::pair<DisplacementField, double> solve_forward(const ElasticityField& elas,
                                                   const BoundaryCondition& bc) {
  elas.validate();
  if (!(bc.stretch > 0.0))
    throw ValidationError("solve_forward: stretch must be positive");
  const Index ny = elas.ny(), nx = elas.nx();
  if (ny < 4 || nx < 4)
    throw ValidationError("solve_forward: grid must be at least 4x4");
  const double h = elas.E.h, t = elas.E.t;
  const Index nny = ny + 1, nnx = nx + 1;  // node lattice
  const Index ndof = 2 * nny * nnx;
  const double length = static_cast<double>(nx) * t;

  auto node = [&](Index i, Index j) { return i * nnx + j; };

  // Assemble the global stiffness.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(ny * nx) * 64);
  for (Index i = 0; i < ny; ++i)
    for (Index j = 0; j < nx; ++j) {
      const auto ke =
          element_stiffness(elas.E.values(i, j), elas.nu.values(i, j), h, t);
      const Index nodes[4] = {node(i + 1, j), node(i + 1, j + 1), node(i, j + 1),
                              node(i, j)};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int da = 0; da < 2; ++da)
            for (int db = 0; db < 2; ++db)
              triplets.emplace_back(2 * nodes[a] + da, 2 * nodes[b] + db,
                                    ke(2 * a + da, 2 * b + db));
    }
  Eigen::SparseMatrix<double> K(ndof, ndof);
  K.setFromTriplets(triplets.begin(), triplets.end());

  // Essential boundary conditions.
  VectorXd prescribed = VectorXd::Zero(ndof);
  std::vector<char> fixed(static_cast<std::size_t>(ndof), 0);
  for (Index i = 0; i < nny; ++i) {
    fixed[2 * node(i, 0)] = 1;  // left edge ux = 0
    fixed[2 * node(i, nx)] = 1;
    prescribed[2 * node(i, nx)] = bc.stretch * length;  // right edge ux
  }
  fixed[2 * node(ny, 0) + 1] = 1;  // pin uy at the bottom-left node

  std::vector<Index> free_index(static_cast<std::size_t>(ndof), -1);
  Index nfree = 0;
  for (Index d = 0; d < ndof; ++d)
    if (!fixed[static_cast<std::size_t>(d)]) free_index[static_cast<std::size_t>(d)] = nfree++;

  // Reduced system K_ff u_f = -K_fc u_c.
  std::vector<Eigen::Triplet<double>> ff;
  ff.reserve(triplets.size());
  VectorXd rhs = VectorXd::Zero(nfree);
  for (Index col = 0; col < K.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      const Index r = it.row(), c = it.col();
      const bool rf = !fixed[static_cast<std::size_t>(r)];
      const bool cf = !fixed[static_cast<std::size_t>(c)];
      if (rf && cf)
        ff.emplace_back(free_index[static_cast<std::size_t>(r)],
                        free_index[static_cast<std::size_t>(c)], it.value());
      else if (rf && !cf)
        rhs[free_index[static_cast<std::size_t>(r)]] -= it.value() * prescribed[c];
    }
  Eigen::SparseMatrix<double> Kff(nfree, nfree);
  Kff.setFromTriplets(ff.begin(), ff.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(Kff);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("solve_forward: singular system (insufficient constraints?)");
  const VectorXd uf = solver.solve(rhs);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("solve_forward: linear solve failed");

  VectorXd u = prescribed;
  for (Index d = 0; d < ndof; ++d)
    if (!fixed[static_cast<std::size_t>(d)]) u[d] = uf[free_index[static_cast<std::size_t>(d)]];

  // Reactions at the loaded edge give the applied force.
  const VectorXd reactions = K * u;
  double applied_force = 0.0;
  for (Index i = 0; i < nny; ++i) applied_force += reactions[2 * node(i, nx)];

  DisplacementField disp;
  disp.ux = ScalarGrid(nny, nnx, h, t);
  disp.uy = ScalarGrid(nny, nnx, h, t);
  for (Index i = 0; i < nny; ++i)
    for (Index j = 0; j < nnx; ++j) {
      disp.ux.values(i, j) = u[2 * node(i, j)];
      disp.uy.values(i, j) = u[2 * node(i, j) + 1];
    }
  return {std::move(disp), applied_force};
}

}  // namespace iepinn
