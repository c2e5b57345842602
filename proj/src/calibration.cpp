#include "iepinn/calibration.hpp"

#include "iepinn/container.hpp"

namespace iepinn {

double boundary_force(const StressField& sig, double h) {
  sig.validate();
  if (!(h > 0.0)) throw ValidationError("boundary_force: h must be positive");
  return sig.sxx.values.col(sig.nx() - 1).sum() * h;
}

CalibrationResult calibrate(const ScalarGrid& E_relative,
                            const StressField& sig_relative, double F_applied,
                            double h) {
  E_relative.validate("calibrate: E_relative");
  if (!(F_applied > 0.0))
    throw ValidationError("calibrate: applied force must be positive");
  if (E_relative.ny() != sig_relative.ny() || E_relative.nx() != sig_relative.nx())
    throw ValidationError("calibrate: modulus and stress lattices differ");

  const double bf = boundary_force(sig_relative, h);
  if (bf == 0.0 || (bf < 0.0) != (F_applied < 0.0))
    throw ValidationError(
        "uncalibratable: predicted boundary force is zero or of opposite sign");

  CalibrationResult result;
  result.boundary_force_predicted = bf;
  result.c_hat = F_applied / bf;
  result.E_absolute = E_relative;
  result.E_absolute.values *= result.c_hat;
  return result;
}

void save_calibration(const CalibrationResult& result, const std::string& path) {
  TextContainer c;
  c.magic = "efd 1";
  c.set("ny", static_cast<std::int64_t>(result.E_absolute.ny()));
  c.set("nx", static_cast<std::int64_t>(result.E_absolute.nx()));
  c.set("h", result.E_absolute.h);
  c.set("t", result.E_absolute.t);
  c.set("c_hat", result.c_hat);
  c.set("boundary_force_predicted", result.boundary_force_predicted);
  c.add_block("E_absolute", result.E_absolute.values);
  c.write(path);
}

CalibrationResult load_calibration(const std::string& path) {
  const TextContainer c = TextContainer::read(path, "efd 1");
  CalibrationResult result;
  result.c_hat = c.header_double("c_hat");
  result.boundary_force_predicted = c.header_double("boundary_force_predicted");
  result.E_absolute.values = c.block("E_absolute");
  result.E_absolute.h = c.header_double("h");
  result.E_absolute.t = c.header_double("t");
  if (result.E_absolute.ny() != c.header_int("ny") ||
      result.E_absolute.nx() != c.header_int("nx"))
    throw ValidationError(path + ": E_absolute block does not match header dims");
  return result;
}

}  // namespace iepinn
