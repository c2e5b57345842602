#include "iepinn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "png_writer.hpp"

namespace iepinn {

namespace {

using Eigen::Index;

void require_match(const ScalarGrid& a, const ScalarGrid& b, const char* what) {
  if (a.ny() != b.ny() || a.nx() != b.nx())
    throw ValidationError(std::string("lattice mismatch in ") + what);
}

// Viridis control points, linearly interpolated.
constexpr std::uint8_t kPalette[9][3] = {
    {68, 1, 84},   {71, 44, 122},  {59, 81, 139},  {44, 113, 142}, {33, 144, 141},
    {39, 173, 129}, {92, 200, 99}, {170, 220, 50}, {253, 231, 37}};

void colorize(double v01, std::uint8_t* rgb) {
  const double s = std::clamp(v01, 0.0, 1.0) * 8.0;
  const int lo = std::min(7, static_cast<int>(s));
  const double f = s - lo;
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<std::uint8_t>(
        std::lround((1.0 - f) * kPalette[lo][c] + f * kPalette[lo + 1][c]));
}

// 5x7 glyphs for the margin annotation.
struct Glyph {
  char ch;
  std::uint8_t rows[7];
};
constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'e', {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E}},
    {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}},
    {'m', {0x00, 0x00, 0x1A, 0x15, 0x15, 0x15, 0x15}},
    {'i', {0x04, 0x00, 0x0C, 0x04, 0x04, 0x04, 0x0E}},
    {'n', {0x00, 0x00, 0x16, 0x19, 0x11, 0x11, 0x11}},
    {'a', {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F}},
    {'x', {0x00, 0x00, 0x11, 0x0A, 0x04, 0x0A, 0x11}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

void draw_text(std::vector<std::uint8_t>& rgb, int width, int height,
               int x0, int y0, const std::string& text) {
  int x = x0;
  for (char ch : text) {
    const Glyph* glyph = nullptr;
    for (const auto& g : kFont)
      if (g.ch == ch) glyph = &g;
    if (!glyph) glyph = &kFont[std::size(kFont) - 1];
    for (int r = 0; r < 7; ++r)
      for (int c = 0; c < 5; ++c)
        if (glyph->rows[r] & (1 << (4 - c))) {
          const int px = x + c, py = y0 + r;
          if (px >= 0 && px < width && py >= 0 && py < height) {
            auto* p = &rgb[3 * (static_cast<std::size_t>(py) * width + px)];
            p[0] = p[1] = p[2] = 0;
          }
        }
    x += 6;
  }
}

}  // namespace

double mae(const ScalarGrid& pred, const ScalarGrid& truth) {
  require_match(pred, truth, "mae");
  return (pred.values - truth.values).array().abs().mean();
}

double mre(const ScalarGrid& pred, const ScalarGrid& truth) {
  require_match(pred, truth, "mre");
  if ((truth.values.array() <= 0.0).any())
    throw ValidationError("mre: truth must be strictly positive");
  return 100.0 *
         ((pred.values - truth.values).array().abs() / truth.values.array()).mean();
}

ScalarGrid error_map(const ScalarGrid& pred, const ScalarGrid& truth) {
  require_match(pred, truth, "error_map");
  ScalarGrid g = pred;
  g.values = (pred.values - truth.values).array().abs().matrix();
  return g;
}

void export_heatmap(const ScalarGrid& grid, const std::string& path,
                    std::optional<std::pair<double, double>> range) {
  grid.validate("export_heatmap");
  const double lo = range ? range->first : grid.values.minCoeff();
  const double hi = range ? range->second : grid.values.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  const int scale =
      std::max<int>(1, 256 / static_cast<int>(std::max(grid.ny(), grid.nx())));
  const int iw = std::max<int>(static_cast<int>(grid.nx()) * scale, 120);
  const int ih = static_cast<int>(grid.ny()) * scale;
  const int margin = 12;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(iw) * (ih + margin) * 3, 255);

  for (int py = 0; py < ih; ++py)
    for (int px = 0; px < static_cast<int>(grid.nx()) * scale; ++px) {
      const double v = grid.values(py / scale, px / scale);
      colorize((v - lo) / span, &rgb[3 * (static_cast<std::size_t>(py) * iw + px)]);
    }

  char text[96];
  std::snprintf(text, sizeof(text), "min=%.3g max=%.3g", lo, hi);
  draw_text(rgb, iw, ih + margin, 2, ih + 2, text);
  detail::write_png(path, iw, ih + margin, rgb);
}

void export_report(const std::string& run_dir, const PredictedFields& fields,
                   const Dataset& dataset,
                   const std::optional<ScalarGrid>& E_absolute) {
  std::ofstream csv(run_dir + "/metrics.csv");
  if (!csv) throw ValidationError("cannot open " + run_dir + "/metrics.csv");
  csv << "field,mae,mre\n";
  auto emit = [&](const std::string& name, const ScalarGrid& pred,
                  const ScalarGrid& truth) {
    char line[128];
    if ((truth.values.array() > 0.0).all())
      std::snprintf(line, sizeof(line), "%s,%.17g,%.17g\n", name.c_str(),
                    mae(pred, truth), mre(pred, truth));
    else
      std::snprintf(line, sizeof(line), "%s,%.17g,\n", name.c_str(),
                    mae(pred, truth));
    csv << line;
    export_heatmap(error_map(pred, truth), run_dir + "/err_" + name + ".png");
    export_heatmap(truth, run_dir + "/truth_" + name + ".png");
  };

  export_heatmap(fields.elasticity.E, run_dir + "/pred_E.png");
  export_heatmap(fields.elasticity.nu, run_dir + "/pred_nu.png");
  export_heatmap(fields.displacement.ux, run_dir + "/pred_ux.png");
  export_heatmap(fields.displacement.uy, run_dir + "/pred_uy.png");
  export_heatmap(fields.strain.exx, run_dir + "/pred_exx.png");
  export_heatmap(fields.strain.eyy, run_dir + "/pred_eyy.png");
  export_heatmap(fields.strain.gxy, run_dir + "/pred_gxy.png");
  export_heatmap(fields.stress.sxx, run_dir + "/pred_sxx.png");
  export_heatmap(fields.stress.syy, run_dir + "/pred_syy.png");
  export_heatmap(fields.stress.txy, run_dir + "/pred_txy.png");

  if (dataset.truth_elasticity) {
    emit("E", fields.elasticity.E, dataset.truth_elasticity->E);
    emit("nu", fields.elasticity.nu, dataset.truth_elasticity->nu);
    if (E_absolute) emit("E_absolute", *E_absolute, dataset.truth_elasticity->E);
  }
  if (dataset.truth_displacement) {
    emit("ux", fields.displacement.ux, dataset.truth_displacement->ux);
    emit("uy", fields.displacement.uy, dataset.truth_displacement->uy);
  }
}

}  // namespace iepinn
