#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "qwalk/correlations.hpp"
#include "qwalk/lattice.hpp"

namespace qwalk {

struct DisorderOptions {
  double sigma_beta = 0.0;
  double sigma_coupling = 0.0;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
};

struct EnsembleResult {
  /// Present when a photon pair was requested.
  std::optional<CorrelationMatrix> mean_gamma;
  /// Mean single-photon output for light injected at the first input site.
  Eigen::VectorXd mean_distribution;
  /// 1 / sum p^2 of mean_distribution.
  double participation_of_mean = 0.0;
  /// Average over trials of each trial's participation ratio.
  double mean_participation = 0.0;
};

/// Effective number of occupied sites, 1 / sum p^2.
double participation_ratio(const Eigen::VectorXd& p);

/// Seed for trial `stream` of a run seeded with `seed` (splitmix64 mix).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream);

/// Disorder average over independently sampled devices. Trials are reduced
/// in index order with a running mean, so zero disorder reproduces the
/// clean device bit for bit.
EnsembleResult run_ensemble(const LatticeSpec& base, Site first,
                            std::optional<Site> second, bool distinguishable,
                            const DisorderOptions& options);

}  // namespace qwalk
