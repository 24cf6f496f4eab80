#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "qwalk/evolution.hpp"
#include "qwalk/lattice.hpp"

namespace qwalk {

enum class Source { Simulated, Measured };

struct CorrelationMeta {
  std::optional<FockPair> input;
  bool indistinguishable = true;
  Source source = Source::Simulated;
};

using MaskMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Symmetric N x N matrix whose (q, r) entry is the probability of one
/// photon at q and one at r as an unordered pair, so the upper triangle
/// including the diagonal sums to 1. `present` marks entries that exist;
/// measured data may leave pairs unmeasured.
struct CorrelationMatrix {
  Eigen::MatrixXd gamma;
  MaskMatrix present;
  CorrelationMeta meta;

  static CorrelationMatrix from_dense(Eigen::MatrixXd gamma,
                                      CorrelationMeta meta = {});

  Eigen::Index n_sites() const { return gamma.rows(); }
  bool complete() const { return present.all(); }

  /// Sum over q <= r of present entries.
  double unordered_total() const;

  /// Throws ValidationError unless square, symmetric and non-negative.
  void validate() const;
};

/// Classical-limit test values. Diagonal entries and pairs with absent
/// inputs are NaN in `v`. `sigma_v` and `n_sigma` are empty for noiseless
/// input.
struct ViolationMap {
  Eigen::MatrixXd v;
  Eigen::MatrixXd sigma_v;
  Eigen::MatrixXd n_sigma;
  MaskMatrix indeterminate;

  bool has_errors() const { return sigma_v.size() > 0; }

  /// Smallest off-diagonal V, ignoring NaN.
  double min_v() const;
  /// Largest n_sigma; 0 when there are no errors.
  double max_n_sigma() const;
};

/// Two indistinguishable photons entering at `input` (order irrelevant).
CorrelationMatrix quantum_correlation(const EvolutionOperator& u,
                                      FockPair input);

/// Two distinguishable photons: the incoherent sum of both exit orderings.
CorrelationMatrix distinguishable_correlation(const EvolutionOperator& u,
                                              FockPair input);

/// (sum sqrt(a b))^2 / (sum a * sum b) over the full matrix, skipping pairs
/// absent in either argument.
double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b);

/// V(q, r) = gamma(q, r) - (2/3) sqrt(gamma(q, q) gamma(r, r)) for q != r.
ViolationMap violation_map(const CorrelationMatrix& gamma);

}  // namespace qwalk
