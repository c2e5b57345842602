#include "iepinn/grid.hpp"

#include <cmath>
#include <random>

#include "iepinn/container.hpp"

namespace iepinn {

void ScalarGrid::validate(const std::string& name) const {
  if (ny() < 1 || nx() < 1)
    throw ValidationError(name + ": empty grid");
  if (!(h > 0.0) || !(t > 0.0))
    throw ValidationError(name + ": grid spacing must be positive");
  if (!values.allFinite())
    throw ValidationError(name + ": non-finite entries");
}

namespace {

void require_same_lattice(const ScalarGrid& a, const ScalarGrid& b,
                          const std::string& what) {
  if (a.ny() != b.ny() || a.nx() != b.nx() || a.h != b.h || a.t != b.t)
    throw ValidationError("dimension mismatch between channels: " + what);
}

}  // namespace

void DisplacementField::validate() const {
  ux.validate("ux");
  uy.validate("uy");
  require_same_lattice(ux, uy, "ux vs uy");
}

void StrainField::validate() const {
  exx.validate("exx");
  eyy.validate("eyy");
  gxy.validate("gxy");
  require_same_lattice(exx, eyy, "exx vs eyy");
  require_same_lattice(exx, gxy, "exx vs gxy");
}

void StressField::validate() const {
  sxx.validate("sxx");
  syy.validate("syy");
  txy.validate("txy");
  require_same_lattice(sxx, syy, "sxx vs syy");
  require_same_lattice(sxx, txy, "sxx vs txy");
}

void ElasticityField::validate() const {
  E.validate("E");
  nu.validate("nu");
  require_same_lattice(E, nu, "E vs nu");
  if ((E.values.array() <= 0.0).any())
    throw ValidationError("ElasticityField: E must be strictly positive");
  if ((nu.values.array() <= 0.0).any() || (nu.values.array() >= 0.5).any())
    throw ValidationError("ElasticityField: nu must lie in (0, 0.5)");
}

void Dataset::validate() const {
  measured.validate();
  if (truth_elasticity) truth_elasticity->validate();
  if (truth_displacement) {
    truth_displacement->validate();
    if (truth_displacement->ny() != measured.ny() ||
        truth_displacement->nx() != measured.nx())
      throw ValidationError("truth_displacement dimensions do not match measured");
  }
  if (calibration_capable &&
      (!applied_force || !(*applied_force > 0.0)))
    throw ValidationError(
        "calibration-capable dataset requires applied_force > 0");
  if (snr && !(*snr > 0.0)) throw ValidationError("snr must be positive");
}

DisplacementField add_noise(const DisplacementField& clean, double snr,
                            std::uint64_t seed) {
  clean.validate();
  if (!(snr > 0.0)) throw ValidationError("add_noise: snr must be positive");

  const double n = static_cast<double>(2 * clean.ny() * clean.nx());
  const double mean = (clean.ux.values.sum() + clean.uy.values.sum()) / n;
  if (mean == 0.0) throw ValidationError("add_noise: degenerate signal mean");
  const double sigma = std::abs(mean / snr);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);

  DisplacementField noisy = clean;
  for (Eigen::Index i = 0; i < clean.ny(); ++i)
    for (Eigen::Index j = 0; j < clean.nx(); ++j)
      noisy.ux.values(i, j) += normal(rng);
  for (Eigen::Index i = 0; i < clean.ny(); ++i)
    for (Eigen::Index j = 0; j < clean.nx(); ++j)
      noisy.uy.values(i, j) += normal(rng);
  return noisy;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  dataset.validate();
  TextContainer c;
  c.magic = "efd 1";
  c.set("ny", static_cast<std::int64_t>(dataset.measured.ny()));
  c.set("nx", static_cast<std::int64_t>(dataset.measured.nx()));
  c.set("h", dataset.measured.h());
  c.set("t", dataset.measured.t());
  c.set("calibration_capable",
        static_cast<std::int64_t>(dataset.calibration_capable ? 1 : 0));
  if (dataset.applied_force) c.set("applied_force", *dataset.applied_force);
  if (dataset.snr) c.set("snr", *dataset.snr);
  if (dataset.rng_seed) c.set("seed", *dataset.rng_seed);

  c.add_block("ux", dataset.measured.ux.values);
  c.add_block("uy", dataset.measured.uy.values);
  if (dataset.truth_elasticity) {
    c.add_block("truth_E", dataset.truth_elasticity->E.values);
    c.add_block("truth_nu", dataset.truth_elasticity->nu.values);
  }
  if (dataset.truth_displacement) {
    c.add_block("truth_ux", dataset.truth_displacement->ux.values);
    c.add_block("truth_uy", dataset.truth_displacement->uy.values);
  }
  c.write(path);
}

Dataset load_dataset(const std::string& path) {
  const TextContainer c = TextContainer::read(path, "efd 1");
  const auto ny = c.header_int("ny");
  const auto nx = c.header_int("nx");
  const double h = c.header_double("h");
  const double t = c.header_double("t");

  auto make_grid = [&](const std::string& name) {
    ScalarGrid g;
    g.values = c.block(name);
    g.h = h;
    g.t = t;
    return g;
  };
  auto check_dims = [&](const std::string& name, Eigen::Index r, Eigen::Index co) {
    const auto& m = c.block(name);
    if (m.rows() != r || m.cols() != co)
      throw ValidationError(path + ": dimension mismatch for [" + name + "]");
  };

  check_dims("ux", ny, nx);
  check_dims("uy", ny, nx);

  Dataset d;
  d.measured.ux = make_grid("ux");
  d.measured.uy = make_grid("uy");
  if (c.has_key("applied_force")) d.applied_force = c.header_double("applied_force");
  if (c.has_key("snr")) d.snr = c.header_double("snr");
  if (c.has_key("seed")) d.rng_seed = c.header_int("seed");
  if (c.has_key("calibration_capable"))
    d.calibration_capable = c.header_int("calibration_capable") != 0;

  if (c.has_block("truth_E") || c.has_block("truth_nu")) {
    check_dims("truth_E", ny - 1, nx - 1);
    check_dims("truth_nu", ny - 1, nx - 1);
    ElasticityField elas;
    elas.E = make_grid("truth_E");
    elas.nu = make_grid("truth_nu");
    d.truth_elasticity = std::move(elas);
  }
  if (c.has_block("truth_ux") || c.has_block("truth_uy")) {
    check_dims("truth_ux", ny, nx);
    check_dims("truth_uy", ny, nx);
    DisplacementField u;
    u.ux = make_grid("truth_ux");
    u.uy = make_grid("truth_uy");
    d.truth_displacement = std::move(u);
  }
  d.validate();
  return d;
}

}  // namespace iepinn
