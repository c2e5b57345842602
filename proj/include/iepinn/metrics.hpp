#pragma once

#include <optional>
#include <string>
#include <utility>

#include "iepinn/grid.hpp"
#include "iepinn/training.hpp"

namespace iepinn {

double mae(const ScalarGrid& pred, const ScalarGrid& truth);

// Percent.
double mre(const ScalarGrid& pred, const ScalarGrid& truth);

ScalarGrid error_map(const ScalarGrid& pred, const ScalarGrid& truth);

// Renders the grid as a PNG heatmap (fixed perceptually-uniform palette,
// min/max printed in the bottom margin). An explicit range pins the color
// scale; otherwise the grid's own min/max is used.
void export_heatmap(const ScalarGrid& grid, const std::string& path,
                    std::optional<std::pair<double, double>> range = {});

// Writes metrics.csv plus predicted/true/error heatmaps for every field
// into run_dir.
void export_report(const std::string& run_dir, const PredictedFields& fields,
                   const Dataset& dataset,
                   const std::optional<ScalarGrid>& E_absolute = {});

}  // namespace iepinn
