#include "qwalk/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

using Rgb = std::array<unsigned char, 3>;

constexpr std::array<std::array<double, 3>, 5> kStops{{
    {68, 1, 84},
    {59, 82, 139},
    {33, 145, 140},
    {94, 201, 98},
    {253, 231, 37},
}};

Rgb colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * (kStops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos),
                                       kStops.size() - 2);
  const double f = pos - static_cast<double>(i);
  Rgb out{};
  for (int c = 0; c < 3; ++c) {
    const double v = kStops[i][c] + f * (kStops[i + 1][c] - kStops[i][c]);
    out[c] = static_cast<unsigned char>(std::lround(v));
  }
  return out;
}

}  // namespace

std::string render_ppm(const Eigen::MatrixXd& values, const MaskMatrix* blank,
                       int scale) {
  if (scale < 1) throw ValidationError("render scale must be >= 1");
  if (values.size() == 0) throw ValidationError("nothing to render");
  if (blank && (blank->rows() != values.rows() ||
                blank->cols() != values.cols())) {
    throw ValidationError("render mask does not match the matrix");
  }
  auto skipped = [&](Eigen::Index r, Eigen::Index c) {
    return !std::isfinite(values(r, c)) || (blank && (*blank)(r, c));
  };
  double peak = 0.0;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (!skipped(r, c)) peak = std::max(peak, values(r, c));
    }
  }

  const auto width = values.cols() * scale;
  const auto height = values.rows() * scale;
  std::string out = "P6\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(width * height * 3));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    std::string line;
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      Rgb px{255, 255, 255};
      if (!skipped(r, c)) px = colour(peak > 0.0 ? values(r, c) / peak : 0.0);
      for (int s = 0; s < scale; ++s) line.append(px.begin(), px.end());
    }
    for (int s = 0; s < scale; ++s) out += line;
  }
  return out;
}

}  // namespace qwalk
