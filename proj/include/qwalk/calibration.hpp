#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/lattice.hpp"

namespace qwalk {

/// Closed interval; lo == hi pins the parameter.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool pinned() const { return lo == hi; }
  double span() const { return hi - lo; }
};

struct GridOptions {
  std::size_t c_points = 64;
  std::size_t z_points = 64;
  std::size_t rounds = 6;
  double shrink = 4.0;
};

struct TracePoint {
  double c = 0.0;
  double z = 0.0;
  double sse = 0.0;
};

struct CalibrationResult {
  double c_fit = 0.0;
  double z_eff_fit = 0.0;
  double residual = 0.0;
  /// For a uniform-beta template only C*z is identifiable.
  double cz_product() const { return c_fit * z_eff_fit; }
  bool degenerate = false;
  /// Best point sits on an outer edge of a free parameter's range.
  bool boundary_warning = false;
  std::vector<TracePoint> grid_trace;
};

/// Candidate device for a trial coupling: the template's coupling profile
/// rescaled so its largest edge equals `c`, propagated over `z`.
LatticeSpec calibration_model(const LatticeSpec& tmpl, double c, double z_mm);

/// Sum of squared differences between simulated and measured output
/// probabilities for light injected at `input_site`.
double calibration_sse(const Eigen::VectorXd& measured, const LatticeSpec& tmpl,
                       Site input_site, double c, double z_mm);

/// Least-squares fit of (C, z_eff) to a single-photon output pattern by a
/// coarse grid followed by repeatedly shrunk grids around the incumbent.
/// `measured` is normalized to unit sum before fitting.
CalibrationResult fit_coupling(const Eigen::VectorXd& measured,
                               const LatticeSpec& tmpl, Site input_site,
                               Range c_range, Range z_range,
                               const GridOptions& grid = {});

}  // namespace qwalk
