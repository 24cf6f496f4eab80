#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/correlations.hpp"

namespace qwalk {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Coincidence counts between detector pairs. Stored symmetric: entry
/// (q, r) and (r, q) both hold the unordered-pair total. Diagonal entries
/// come from the fibre splitter on output q.
struct CoincidenceCounts {
  CountMatrix counts;
  MaskMatrix present;
  std::vector<std::int64_t> singles;  // empty when not recorded
  std::vector<double> efficiency;     // empty means all 1
  double integration_s = 1.0;

  /// Symmetrizes raw data by summing (q, r) and (r, q). Entries equal to -1
  /// are absent; a pair is absent only when both raw entries are.
  static CoincidenceCounts from_raw(const CountMatrix& raw,
                                    double integration_s = 1.0);

  Eigen::Index n_sites() const { return counts.rows(); }
  void validate() const;
};

struct CorrectionOptions {
  /// Divide (q, r) by the singles rates at q and r relative to their mean.
  bool singles_correction = false;
};

struct CorrectedCounts {
  Eigen::MatrixXd values;
  /// Multiplicative factor applied to each raw count.
  Eigen::MatrixXd weight;
  MaskMatrix present;
};

/// Divides by efficiency[q] * efficiency[r]; the diagonal is doubled to undo
/// the balanced splitter that sends both photons to distinct detectors only
/// half the time.
CorrectedCounts correct_counts(const CoincidenceCounts& raw,
                               const CorrectionOptions& options = {});

struct GammaEstimate {
  CorrelationMatrix gamma;
  Eigen::MatrixXd sigma;
  /// Entries with zero raw counts; their sigma uses one count instead.
  MaskMatrix low_statistics;
  /// Only a single non-zero pair: normalization fixes it, sigma is 0.
  bool degenerate = false;
};

/// Normalized Gamma with first-order Poisson errors. The propagation keeps
/// the covariance introduced by dividing every entry by the common total.
GammaEstimate estimate_gamma(const CoincidenceCounts& raw,
                             const CorrectionOptions& options = {});

/// V from the Gamma estimate and sigma_V from independent first-order
/// propagation of the three Gamma entries it involves. Pairs where a
/// diagonal Gamma is zero have unbounded partials and are marked
/// indeterminate with n_sigma 0.
ViolationMap violation_significance(const GammaEstimate& est);

/// Poisson counts with mean `events * gamma(q, r)` off the diagonal and
/// `events * gamma(q, q) / 2` on it (the splitter loss correct_counts
/// undoes). Deterministic for a seed.
CoincidenceCounts synthesize_counts(const CorrelationMatrix& gamma,
                                    double events, std::uint64_t seed,
                                    double integration_s = 3600.0);

}  // namespace qwalk
