#include "qwalk/measurement.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

CoincidenceCounts CoincidenceCounts::from_raw(const CountMatrix& raw,
                                              double integration_s) {
  if (raw.rows() != raw.cols() || raw.rows() == 0) {
    throw ValidationError("count matrix must be non-empty and square");
  }
  const auto n = raw.rows();
  CoincidenceCounts out;
  out.counts = CountMatrix::Zero(n, n);
  out.present = MaskMatrix::Constant(n, n, false);
  out.integration_s = integration_s;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q <= r; ++q) {
      const std::int64_t a = raw(q, r);
      const std::int64_t b = raw(r, q);
      if (a < -1 || b < -1) {
        throw ValidationError("counts must be >= 0, or -1 for absent pairs");
      }
      std::int64_t total = 0;
      bool seen = false;
      if (a >= 0) {
        total += a;
        seen = true;
      }
      if (q != r && b >= 0) {
        total += b;
        seen = true;
      }
      out.counts(q, r) = out.counts(r, q) = seen ? total : 0;
      out.present(q, r) = out.present(r, q) = seen;
    }
  }
  return out;
}

void CoincidenceCounts::validate() const {
  const auto n = counts.rows();
  if (n == 0 || counts.cols() != n || present.rows() != n ||
      present.cols() != n) {
    throw ValidationError("count matrix and mask must be square and matching");
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q < n; ++q) {
      if (counts(q, r) != counts(r, q) || present(q, r) != present(r, q)) {
        throw ValidationError("counts must be symmetric");
      }
      if (counts(q, r) < 0) throw ValidationError("counts must be >= 0");
    }
  }
  if (!singles.empty() && singles.size() != static_cast<std::size_t>(n)) {
    throw ValidationError("singles must have one entry per output");
  }
  for (auto s : singles) {
    if (s < 0) throw ValidationError("singles must be >= 0");
  }
  if (!efficiency.empty() && efficiency.size() != static_cast<std::size_t>(n)) {
    throw ValidationError("efficiency must have one entry per output");
  }
  for (double e : efficiency) {
    if (!(e > 0.0 && e <= 1.0)) {
      throw ValidationError("detector efficiencies must lie in (0, 1]");
    }
  }
  if (!(integration_s > 0.0) || !std::isfinite(integration_s)) {
    throw ValidationError("integration time must be positive");
  }
}

CorrectedCounts correct_counts(const CoincidenceCounts& raw,
                               const CorrectionOptions& options) {
  raw.validate();
  const auto n = raw.n_sites();
  Eigen::VectorXd factor = Eigen::VectorXd::Ones(n);
  if (!raw.efficiency.empty()) {
    for (Eigen::Index q = 0; q < n; ++q) factor(q) = raw.efficiency[q];
  }
  if (options.singles_correction) {
    if (raw.singles.empty()) {
      throw ValidationError("singles correction requested without singles");
    }
    const double mean =
        std::accumulate(raw.singles.begin(), raw.singles.end(), 0.0) /
        static_cast<double>(n);
    for (Eigen::Index q = 0; q < n; ++q) {
      if (raw.singles[q] == 0) {
        throw ValidationError("singles correction needs non-zero singles");
      }
      factor(q) *= static_cast<double>(raw.singles[q]) / mean;
    }
  }

  CorrectedCounts out;
  out.present = raw.present;
  out.weight.resize(n, n);
  out.values.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q < n; ++q) {
      double w = 1.0 / (factor(q) * factor(r));
      if (q == r) w *= 2.0;
      out.weight(q, r) = w;
      out.values(q, r) =
          raw.present(q, r) ? w * static_cast<double>(raw.counts(q, r)) : kNaN;
    }
  }
  return out;
}

GammaEstimate estimate_gamma(const CoincidenceCounts& raw,
                             const CorrectionOptions& options) {
  const CorrectedCounts corr = correct_counts(raw, options);
  const auto n = raw.n_sites();

  double total = 0.0;
  double weighted_var = 0.0;  // sum of w^2 n over present unordered pairs
  int nonzero = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q <= r; ++q) {
      if (!raw.present(q, r)) continue;
      const double c = static_cast<double>(raw.counts(q, r));
      total += corr.values(q, r);
      weighted_var += corr.weight(q, r) * corr.weight(q, r) * c;
      nonzero += raw.counts(q, r) > 0;
    }
  }
  if (!(total > 0.0)) {
    throw ValidationError("total corrected counts must be positive");
  }

  GammaEstimate est;
  est.degenerate = nonzero == 1;
  est.low_statistics = MaskMatrix::Constant(n, n, false);
  est.sigma = Eigen::MatrixXd::Constant(n, n, kNaN);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q <= r; ++q) {
      if (!raw.present(q, r)) continue;
      const double c = static_cast<double>(raw.counts(q, r));
      const double w2 = corr.weight(q, r) * corr.weight(q, r);
      const double g = corr.values(q, r) / total;
      // d(gamma_i)/d(n_j) = w_i delta_ij / T - gamma_i w_j / T, Poisson var n_j.
      const double own = w2 * std::max(c, 1.0);
      const double var =
          (own - 2.0 * g * w2 * c + g * g * weighted_var) / (total * total);
      gamma(q, r) = gamma(r, q) = g;
      est.sigma(q, r) = est.sigma(r, q) = std::sqrt(std::max(var, 0.0));
      est.low_statistics(q, r) = est.low_statistics(r, q) =
          raw.counts(q, r) == 0;
    }
  }
  est.gamma.gamma = std::move(gamma);
  est.gamma.present = raw.present;
  est.gamma.meta.source = Source::Measured;
  return est;
}

ViolationMap violation_significance(const GammaEstimate& est) {
  ViolationMap out = violation_map(est.gamma);
  const auto n = est.gamma.n_sites();
  if (est.sigma.rows() != n || est.sigma.cols() != n) {
    throw ValidationError("sigma matrix does not match gamma");
  }
  const auto& g = est.gamma.gamma;
  const auto& s = est.sigma;
  out.sigma_v = Eigen::MatrixXd::Constant(n, n, kNaN);
  out.n_sigma = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q < r; ++q) {
      if (out.indeterminate(q, r)) continue;
      const double gqq = g(q, q);
      const double grr = g(r, r);
      double var = s(q, r) * s(q, r);
      if (gqq > 0.0 && grr > 0.0) {
        const double dq = -std::sqrt(grr / gqq) / 3.0;
        const double dr = -std::sqrt(gqq / grr) / 3.0;
        var += dq * dq * s(q, q) * s(q, q) + dr * dr * s(r, r) * s(r, r);
      } else if (gqq > 0.0 || grr > 0.0) {
        out.indeterminate(q, r) = out.indeterminate(r, q) = true;
        continue;
      }
      // Both diagonals zero: V = gamma(q, r) and only its own error counts.
      const double sv = std::sqrt(var);
      out.sigma_v(q, r) = out.sigma_v(r, q) = sv;
      const double v = out.v(q, r);
      const double ns = (v < 0.0 && sv > 0.0) ? -v / sv : 0.0;
      out.n_sigma(q, r) = out.n_sigma(r, q) = ns;
    }
  }
  return out;
}

CoincidenceCounts synthesize_counts(const CorrelationMatrix& gamma,
                                    double events, std::uint64_t seed,
                                    double integration_s) {
  gamma.validate();
  if (!(events > 0.0) || !std::isfinite(events)) {
    throw ValidationError("event count must be positive");
  }
  const auto n = gamma.n_sites();
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  CountMatrix raw = CountMatrix::Constant(n, n, -1);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q <= r; ++q) {
      if (!gamma.present(q, r)) continue;
      double mean = events * gamma.gamma(q, r);
      if (q == r) mean *= 0.5;
      std::int64_t draw = 0;
      if (mean > 0.0) {
        std::poisson_distribution<std::int64_t> poisson(mean);
        draw = poisson(rng);
      }
      raw(q, r) = draw;
    }
  }
  return CoincidenceCounts::from_raw(raw, integration_s);
}

}  // namespace qwalk
