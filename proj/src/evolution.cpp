#include "qwalk/evolution.hpp"

#include <cmath>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

void check_symmetric(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw ValidationError("Hamiltonian must be a non-empty square matrix");
  }
  if (!h.allFinite()) throw NumericalError("Hamiltonian has non-finite entries");
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < h.cols(); ++j) {
      if (h(i, j) != h(j, i)) {
        throw ValidationError("Hamiltonian is not symmetric");
      }
    }
  }
}

Spectrum::Spectrum(const Eigen::MatrixXd& hamiltonian) {
  check_symmetric(hamiltonian);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed");
  }
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
  if (!values_.allFinite() || !vectors_.allFinite()) {
    throw NumericalError("eigendecomposition produced non-finite values");
  }
}

namespace {

void check_length(double z_mm) {
  if (!std::isfinite(z_mm) || z_mm < 0.0) {
    throw ValidationError("propagation length must be finite and >= 0");
  }
}

Complex phase_factor(double eigenvalue, double z_mm) {
  const double angle = -eigenvalue * z_mm;
  if (!std::isfinite(angle)) throw NumericalError("phase overflow in exp(-iHz)");
  return std::polar(1.0, angle);
}

}  // namespace

EvolutionOperator Spectrum::propagator(double z_mm) const {
  check_length(z_mm);
  const Eigen::Index n = dim();
  if (z_mm == 0.0) {
    return {Eigen::MatrixXcd::Identity(n, n), 0.0};
  }
  Eigen::VectorXcd phase(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    phase(m) = phase_factor(values_(m), z_mm);
  }
  // (V diag(phase)) V^T, upper triangle mirrored.
  const Eigen::MatrixXcd weighted =
      vectors_.cast<Complex>() * phase.asDiagonal();
  Eigen::MatrixXcd u(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index row = 0; row <= col; ++row) {
      Complex acc = 0.0;
      for (Eigen::Index m = 0; m < n; ++m) {
        acc += weighted(row, m) * vectors_(col, m);
      }
      u(row, col) = acc;
      u(col, row) = acc;
    }
  }
  return {std::move(u), z_mm};
}

AmplitudeVector Spectrum::evolve_basis_state(Eigen::Index input,
                                             double z_mm) const {
  check_length(z_mm);
  if (input < 0 || input >= dim()) {
    throw ValidationError("basis index out of range");
  }
  AmplitudeVector out = AmplitudeVector::Zero(dim());
  if (z_mm == 0.0) {
    out(input) = 1.0;
    return out;
  }
  Eigen::VectorXcd coeff(dim());
  for (Eigen::Index m = 0; m < dim(); ++m) {
    coeff(m) = vectors_(input, m) * phase_factor(values_(m), z_mm);
  }
  out = vectors_.cast<Complex>() * coeff;
  return out;
}

EvolutionOperator propagator(const Eigen::MatrixXd& hamiltonian, double z_mm) {
  check_length(z_mm);
  if (z_mm == 0.0) {
    check_symmetric(hamiltonian);
    const auto n = hamiltonian.rows();
    return {Eigen::MatrixXcd::Identity(n, n), 0.0};
  }
  return Spectrum(hamiltonian).propagator(z_mm);
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd gram = u.adjoint() * u;
  return (gram - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
      .cwiseAbs()
      .maxCoeff();
}

Eigen::VectorXd single_photon_distribution(const EvolutionOperator& u,
                                           Site input_site) {
  if (input_site >= static_cast<Site>(u.dim())) {
    throw ValidationError("input site " + std::to_string(input_site) +
                          " out of range for " + std::to_string(u.dim()) +
                          " sites");
  }
  return u.matrix.col(static_cast<Eigen::Index>(input_site)).cwiseAbs2();
}

AmplitudeVector evolve_two_photon(const TwoPhotonHamiltonian& h2, double z_mm,
                                  const FockPair& input) {
  if (static_cast<std::size_t>(h2.matrix.rows()) != h2.dim() ||
      two_photon_dim(h2.n_sites) != h2.dim()) {
    throw ValidationError("two-photon Hamiltonian has inconsistent dimension");
  }
  const auto index =
      static_cast<Eigen::Index>(fock_index(input.j, input.k, h2.n_sites));
  return Spectrum(h2.matrix).evolve_basis_state(index, z_mm);
}

Eigen::MatrixXd pair_probabilities(const AmplitudeVector& amplitudes,
                                   std::size_t n_sites) {
  if (static_cast<std::size_t>(amplitudes.size()) != two_photon_dim(n_sites)) {
    throw ValidationError("amplitude vector does not match the Fock basis");
  }
  const auto n = static_cast<Eigen::Index>(n_sites);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index idx = 0; idx < amplitudes.size(); ++idx) {
    const auto [j, k] = fock_pair(static_cast<std::size_t>(idx), n_sites);
    const double p = std::norm(amplitudes(idx));
    out(j, k) = p;
    out(k, j) = p;
  }
  return out;
}

}  // namespace qwalk
