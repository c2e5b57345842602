#include "iepinn/kernels.hpp"

namespace iepinn {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

// Sum over a 3-row band of the right-minus-left column difference:
// the w_xx / transposed-w_xy pattern [[-1,0,1],[-1,0,1],[-1,0,1]].
MatrixXd dcol3(const MatrixXd& m) {
  const Index r = m.rows() - 2, c = m.cols() - 2;
  MatrixXd out = MatrixXd::Zero(r, c);
  for (Index a = 0; a < 3; ++a)
    out += m.block(a, 2, r, c) - m.block(a, 0, r, c);
  return out;
}

// Sum over a 3-column band of the top-minus-bottom row difference:
// the w_yy / w_xy pattern [[1,1,1],[0,0,0],[-1,-1,-1]]. Rows run top to
// bottom, so top minus bottom is +d/dy.
MatrixXd drow3(const MatrixXd& m) {
  const Index r = m.rows() - 2, c = m.cols() - 2;
  MatrixXd out = MatrixXd::Zero(r, c);
  for (Index b = 0; b < 3; ++b)
    out += m.block(0, b, r, c) - m.block(2, b, r, c);
  return out;
}

// 2x2 stencils of the strain-displacement relation.
MatrixXd wx2(const MatrixXd& m) {  // [[-0.5,0.5],[-0.5,0.5]]
  const Index r = m.rows() - 1, c = m.cols() - 1;
  return 0.5 * (m.block(0, 1, r, c) + m.block(1, 1, r, c) -
                m.block(0, 0, r, c) - m.block(1, 0, r, c));
}

MatrixXd wy2(const MatrixXd& m) {  // [[0.5,0.5],[-0.5,-0.5]]
  const Index r = m.rows() - 1, c = m.cols() - 1;
  return 0.5 * (m.block(0, 0, r, c) + m.block(0, 1, r, c) -
                m.block(1, 0, r, c) - m.block(1, 1, r, c));
}

ScalarGrid like(const ScalarGrid& parent, MatrixXd values) {
  ScalarGrid g;
  g.values = std::move(values);
  g.h = parent.h;
  g.t = parent.t;
  return g;
}

}  // namespace

StrainField strain_from_displacement(const DisplacementField& u) {
  u.validate();
  if (u.ny() < 2 || u.nx() < 2)
    throw ValidationError("strain_from_displacement: grid smaller than 2x2");
  StrainField eps;
  eps.exx = like(u.ux, wx2(u.ux.values));
  eps.eyy = like(u.ux, wy2(u.uy.values));
  eps.gxy = like(u.ux, wy2(u.ux.values) + wx2(u.uy.values));
  return eps;
}

StressField stress_from_strain(const StrainField& eps, const ElasticityField& elas) {
  eps.validate();
  elas.validate();
  if (eps.ny() != elas.ny() || eps.nx() != elas.nx())
    throw ValidationError("stress_from_strain: lattice mismatch");

  const auto& E = elas.E.values.array();
  const auto& nu = elas.nu.values.array();
  const auto k = E / (1.0 - nu.square());

  StressField sig;
  sig.sxx = like(eps.exx, (k * (eps.exx.values.array() + nu * eps.eyy.values.array())).matrix());
  sig.syy = like(eps.exx, (k * (nu * eps.exx.values.array() + eps.eyy.values.array())).matrix());
  sig.txy = like(eps.exx, (k * (1.0 - nu) * 0.5 * eps.gxy.values.array()).matrix());
  return sig;
}

ResidualField pde_residual(const StressField& sig, double h, double t) {
  sig.validate();
  if (sig.ny() < 3 || sig.nx() < 3)
    throw ValidationError("pde_residual: stress lattice smaller than 3x3");
  if (!(h > 0.0) || !(t > 0.0))
    throw ValidationError("pde_residual: spacing must be positive");

  const double inv_ht = 1.0 / (h * t);
  ResidualField r;
  r.rx = like(sig.sxx, (dcol3(sig.sxx.values) + drow3(sig.txy.values)) * inv_ht);
  r.ry = like(sig.sxx, (drow3(sig.syy.values) + dcol3(sig.txy.values)) * inv_ht);
  return r;
}

ScalarGrid local_modulus_sum(const ScalarGrid& E) {
  E.validate("local_modulus_sum: E");
  if (E.ny() < 3 || E.nx() < 3)
    throw ValidationError("local_modulus_sum: lattice smaller than 3x3");
  const Index r = E.ny() - 2, c = E.nx() - 2;
  MatrixXd out = MatrixXd::Zero(r, c);
  for (Index a = 0; a < 3; ++a)
    for (Index b = 0; b < 3; ++b)
      out += E.values.block(a, b, r, c);
  return like(E, std::move(out));
}

}  // namespace iepinn
