#include "qwalk/ensemble.hpp"

#include "qwalk/errors.hpp"
#include "qwalk/evolution.hpp"

namespace qwalk {

double participation_ratio(const Eigen::VectorXd& p) {
  const double s = p.squaredNorm();
  if (!(s > 0.0)) throw ValidationError("participation ratio of zero vector");
  return 1.0 / s;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EnsembleResult run_ensemble(const LatticeSpec& base, Site first,
                            std::optional<Site> second, bool distinguishable,
                            const DisorderOptions& options) {
  base.validate();
  if (options.trials < 1) throw ValidationError("trials must be >= 1");
  if (first >= base.n_sites || (second && *second >= base.n_sites)) {
    throw ValidationError("input site out of range");
  }

  EnsembleResult result;
  Eigen::MatrixXd gamma_mean;
  const auto n = static_cast<Eigen::Index>(base.n_sites);
  result.mean_distribution = Eigen::VectorXd::Zero(n);
  if (second) gamma_mean = Eigen::MatrixXd::Zero(n, n);

  for (std::size_t t = 0; t < options.trials; ++t) {
    const LatticeSpec spec =
        sample_disordered_spec(base, options.sigma_beta, options.sigma_coupling,
                               trial_seed(options.seed, t));
    const EvolutionOperator u =
        propagator(build_single_hamiltonian(spec).matrix, spec.length_mm);
    const double w = 1.0 / static_cast<double>(t + 1);

    const Eigen::VectorXd p = single_photon_distribution(u, first);
    result.mean_distribution += w * (p - result.mean_distribution);
    result.mean_participation +=
        w * (participation_ratio(p) - result.mean_participation);

    if (second) {
      const FockPair pair{first, *second};
      const CorrelationMatrix g = distinguishable
                                      ? distinguishable_correlation(u, pair)
                                      : quantum_correlation(u, pair);
      gamma_mean += w * (g.gamma - gamma_mean);
    }
  }

  result.participation_of_mean = participation_ratio(result.mean_distribution);
  if (second) {
    FockPair pair{std::min(first, *second), std::max(first, *second)};
    result.mean_gamma = CorrelationMatrix::from_dense(
        std::move(gamma_mean), {pair, !distinguishable, Source::Simulated});
  }
  return result;
}

}  // namespace qwalk
