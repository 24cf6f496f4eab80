#include "qwalk/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "qwalk/errors.hpp"
#include "qwalk/evolution.hpp"

namespace qwalk {

namespace {

void check_range(const Range& r, const char* name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo < 0.0 ||
      r.hi < r.lo) {
    throw ValidationError(std::string(name) +
                          " range must satisfy 0 <= lo <= hi");
  }
}

Eigen::VectorXd normalized(const Eigen::VectorXd& measured) {
  if (!measured.allFinite()) {
    throw ValidationError("measured pattern contains NaN or inf");
  }
  if ((measured.array() < 0.0).any()) {
    throw ValidationError("measured pattern has negative entries");
  }
  const double total = measured.sum();
  if (!(total > 0.0)) throw ValidationError("measured pattern sums to zero");
  return measured / total;
}

std::vector<double> axis(double lo, double hi, std::size_t points) {
  if (lo == hi || points < 2) return {lo};
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) /
                      static_cast<double>(points - 1);
  }
  out.back() = hi;
  return out;
}

// Window of width `width` centred on `centre`, slid back inside `outer`.
Range window(double centre, double width, const Range& outer) {
  if (outer.pinned()) return outer;
  width = std::min(width, outer.span());
  double lo = centre - width / 2.0;
  double hi = centre + width / 2.0;
  if (lo < outer.lo) {
    hi += outer.lo - lo;
    lo = outer.lo;
  }
  if (hi > outer.hi) {
    lo -= hi - outer.hi;
    hi = outer.hi;
  }
  return {std::max(lo, outer.lo), hi};
}

double sse_at(const Spectrum& spectrum, Eigen::Index input, double z,
              const Eigen::VectorXd& target) {
  const Eigen::VectorXd p =
      spectrum.evolve_basis_state(input, z).cwiseAbs2();
  return (p - target).squaredNorm();
}

bool better(const TracePoint& a, const TracePoint& b) {
  return std::tie(a.sse, a.c, a.z) < std::tie(b.sse, b.c, b.z);
}

}  // namespace

LatticeSpec calibration_model(const LatticeSpec& tmpl, double c, double z_mm) {
  tmpl.validate();
  LatticeSpec spec = tmpl;
  const double peak = tmpl.coupling.empty()
                          ? 0.0
                          : *std::max_element(tmpl.coupling.begin(),
                                              tmpl.coupling.end());
  for (double& w : spec.coupling) w = peak > 0.0 ? c * (w / peak) : c;
  spec.length_mm = z_mm;
  return spec;
}

double calibration_sse(const Eigen::VectorXd& measured, const LatticeSpec& tmpl,
                       Site input_site, double c, double z_mm) {
  const Eigen::VectorXd target = normalized(measured);
  const LatticeSpec spec = calibration_model(tmpl, c, z_mm);
  if (static_cast<std::size_t>(target.size()) != spec.n_sites) {
    throw ValidationError("measured pattern length does not match the template");
  }
  const Spectrum spectrum(build_single_hamiltonian(spec).matrix);
  return sse_at(spectrum, static_cast<Eigen::Index>(input_site), z_mm, target);
}

CalibrationResult fit_coupling(const Eigen::VectorXd& measured,
                               const LatticeSpec& tmpl, Site input_site,
                               Range c_range, Range z_range,
                               const GridOptions& grid) {
  tmpl.validate();
  check_range(c_range, "coupling");
  check_range(z_range, "length");
  if (grid.c_points < 1 || grid.z_points < 1 || !(grid.shrink > 1.0)) {
    throw ValidationError("grid needs >= 1 point per axis and shrink > 1");
  }
  const Eigen::VectorXd target = normalized(measured);
  if (static_cast<std::size_t>(target.size()) != tmpl.n_sites) {
    throw ValidationError("measured pattern length does not match the template");
  }
  if (input_site >= tmpl.n_sites) {
    throw ValidationError("calibration input site out of range");
  }
  const auto input = static_cast<Eigen::Index>(input_site);

  CalibrationResult result;
  TracePoint best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  Range c_win = c_range;
  Range z_win = z_range;
  double c_step = 0.0;
  double z_step = 0.0;

  // A near-degenerate valley can leave the incumbent on the edge of a
  // shrunken window; such rounds re-centre without shrinking, up to a cap.
  constexpr std::size_t kMaxRecentres = 64;
  std::size_t recentres = 0;
  for (std::size_t round = 0; round <= grid.rounds;) {
    const auto cs = axis(c_win.lo, c_win.hi, grid.c_points);
    const auto zs = axis(z_win.lo, z_win.hi, grid.z_points);
    for (double c : cs) {
      const LatticeSpec spec = calibration_model(tmpl, c, 0.0);
      const Spectrum spectrum(build_single_hamiltonian(spec).matrix);
      for (double z : zs) {
        const TracePoint pt{c, z, sse_at(spectrum, input, z, target)};
        result.grid_trace.push_back(pt);
        // Only strict improvements replace the incumbent.
        if (better(pt, best)) best = pt;
      }
    }
    c_step = cs.size() > 1 ? cs[1] - cs[0] : 0.0;
    z_step = zs.size() > 1 ? zs[1] - zs[0] : 0.0;
    auto inner_edge = [](double x, const std::vector<double>& ax,
                         const Range& outer) {
      return ax.size() > 1 && ((x == ax.front() && x > outer.lo) ||
                               (x == ax.back() && x < outer.hi));
    };
    const bool drifting =
        round > 0 && recentres < kMaxRecentres &&
        (inner_edge(best.c, cs, c_range) || inner_edge(best.z, zs, z_range));
    if (drifting) {
      ++recentres;
      c_win = window(best.c, c_win.span(), c_range);
      z_win = window(best.z, z_win.span(), z_range);
      continue;
    }
    c_win = window(best.c, c_win.span() / grid.shrink, c_range);
    z_win = window(best.z, z_win.span() / grid.shrink, z_range);
    ++round;
  }

  result.c_fit = best.c;
  result.z_eff_fit = best.z;
  result.residual = best.sse;
  const bool uniform_beta =
      std::all_of(tmpl.beta.begin(), tmpl.beta.end(),
                  [&](double b) { return b == tmpl.beta.front(); });
  result.degenerate = uniform_beta && !c_range.pinned() && !z_range.pinned();
  auto on_edge = [](double x, double lo, double hi, double step) {
    return x - lo <= 0.5 * step || hi - x <= 0.5 * step;
  };
  if (result.degenerate) {
    // Any point on the C*z valley is an equally good fit, so only the
    // product's reachable interval matters.
    const double step = best.c * z_step + best.z * c_step;
    result.boundary_warning =
        on_edge(result.cz_product(), c_range.lo * z_range.lo,
                c_range.hi * z_range.hi, step);
  } else {
    result.boundary_warning =
        (!c_range.pinned() && on_edge(best.c, c_range.lo, c_range.hi, c_step)) ||
        (!z_range.pinned() && on_edge(best.z, z_range.lo, z_range.hi, z_step));
  }
  return result;
}

}  // namespace qwalk
