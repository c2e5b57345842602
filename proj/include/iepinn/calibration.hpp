#pragma once

#include <string>

#include "iepinn/grid.hpp"

namespace iepinn {

struct CalibrationResult {
  double c_hat = 0.0;                      // absolute scale multiplier
  double boundary_force_predicted = 0.0;   // before rescaling
  ScalarGrid E_absolute;
};

// Rectangle-rule traction resultant on the loaded (rightmost) column of
// the stress lattice.
double boundary_force(const StressField& sig, double h);

// Phase 2: c_hat = F / boundary_force(sig_relative), E_absolute = c_hat * E.
CalibrationResult calibrate(const ScalarGrid& E_relative,
                            const StressField& sig_relative, double F_applied,
                            double h);

void save_calibration(const CalibrationResult& result, const std::string& path);
CalibrationResult load_calibration(const std::string& path);

}  // namespace iepinn
