#pragma once

#include <string>

#include <Eigen/Dense>

#include "qwalk/correlations.hpp"

namespace qwalk {

/// Binary PPM (P6) heatmap, one `scale` x `scale` block per matrix entry,
/// row 0 at the top. Values are divided by the largest finite value and
/// mapped through a fixed five-stop colormap:
///   0.00 (68,1,84)  0.25 (59,82,139)  0.50 (33,145,140)
///   0.75 (94,201,98)  1.00 (253,231,37)
/// with linear interpolation and rounding to nearest. NaN entries and
/// entries where `blank` is true are drawn white.
std::string render_ppm(const Eigen::MatrixXd& values, const MaskMatrix* blank,
                       int scale = 1);

}  // namespace qwalk
