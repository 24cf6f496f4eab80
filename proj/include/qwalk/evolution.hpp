#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/lattice.hpp"

namespace qwalk {

using Complex = std::complex<double>;

inline constexpr double kUnitarityTolerance = 1e-12;
inline constexpr double kProbabilityTolerance = 1e-10;

/// U = exp(-i H z) for a real symmetric H.
struct EvolutionOperator {
  Eigen::MatrixXcd matrix;
  double z_mm = 0.0;

  Eigen::Index dim() const { return matrix.rows(); }
};

using AmplitudeVector = Eigen::VectorXcd;

/// Cached spectral decomposition H = V diag(lambda) V^T.
///
/// Building it once and evaluating many lengths is what the z-slice render
/// and the calibration grid rely on.
class Spectrum {
 public:
  explicit Spectrum(const Eigen::MatrixXd& hamiltonian);

  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
  Eigen::Index dim() const { return values_.size(); }

  /// Full propagator. z == 0 returns the exact identity. The result is
  /// symmetric entry-for-entry because only the upper triangle is computed.
  EvolutionOperator propagator(double z_mm) const;

  /// Column `input` of exp(-i H z), i.e. the evolved basis state.
  AmplitudeVector evolve_basis_state(Eigen::Index input, double z_mm) const;

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

/// Throws ValidationError if H is not square and exactly symmetric, and
/// NumericalError for non-finite entries.
void check_symmetric(const Eigen::MatrixXd& h);

EvolutionOperator propagator(const Eigen::MatrixXd& hamiltonian, double z_mm);

/// max |U^dagger U - I|.
double unitarity_defect(const Eigen::MatrixXcd& u);

/// p_q = |U(q, input)|^2.
Eigen::VectorXd single_photon_distribution(const EvolutionOperator& u,
                                           Site input_site);

AmplitudeVector evolve_two_photon(const TwoPhotonHamiltonian& h2, double z_mm,
                                  const FockPair& input);

/// Squared magnitudes of a two-photon amplitude vector as a symmetric N x N
/// matrix of unordered-pair probabilities.
Eigen::MatrixXd pair_probabilities(const AmplitudeVector& amplitudes,
                                   std::size_t n_sites);

}  // namespace qwalk
