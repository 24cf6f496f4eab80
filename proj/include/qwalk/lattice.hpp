#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qwalk {

using Site = std::size_t;

/// Physical description of a waveguide array. Units are mm and mm^-1.
///
/// The Hamiltonian carries -beta[j] on site j and -coupling[j] on the edge
/// (j, j+1). label_offset only shifts human-readable site labels.
struct LatticeSpec {
  std::size_t n_sites = 1;
  std::vector<double> beta;
  std::vector<double> coupling;
  double length_mm = 0.0;
  int label_offset = 0;

  /// Uniform array with n sites, propagation constant b and coupling c.
  static LatticeSpec uniform(std::size_t n, double c, double length_mm,
                             double b = 0.0, int label_offset = 0);

  /// Throws ValidationError if any invariant is broken.
  void validate() const;

  bool operator==(const LatticeSpec&) const = default;
};

struct SingleHamiltonian {
  Eigen::MatrixXd matrix;
};

/// Unordered photon pair (j <= k) labelling a two-photon Fock state.
struct FockPair {
  Site j = 0;
  Site k = 0;
  bool operator==(const FockPair&) const = default;
};

/// Closed-form bijection between pairs j <= k and 0..D-1, row-major over j.
std::size_t fock_index(Site j, Site k, std::size_t n_sites);
FockPair fock_pair(std::size_t index, std::size_t n_sites);

/// N(N+1)/2; throws ResourceError on overflow.
std::size_t two_photon_dim(std::size_t n_sites);

struct TwoPhotonHamiltonian {
  Eigen::MatrixXd matrix;
  std::vector<FockPair> basis;
  std::size_t n_sites = 0;

  std::size_t dim() const { return basis.size(); }
};

inline constexpr std::size_t kDefaultDimensionCap = 1'000'000;

SingleHamiltonian build_single_hamiltonian(const LatticeSpec& spec);

/// Hopping amplitudes follow the bosonic ladder factors, so moves into or
/// out of a doubly occupied site carry sqrt(2) times the edge coupling.
TwoPhotonHamiltonian build_two_photon_hamiltonian(
    const LatticeSpec& spec, std::size_t dimension_cap = kDefaultDimensionCap);

/// N^n for distinguishable photons, binomial(N+n-1, n) otherwise.
std::uint64_t hilbert_dim(std::uint64_t n_photons, std::uint64_t n_sites,
                          bool distinguishable);

/// Independent uniform perturbations on [-sigma, +sigma] for every beta and
/// coupling entry. Negative couplings are clamped to zero.
LatticeSpec sample_disordered_spec(const LatticeSpec& base, double sigma_beta,
                                   double sigma_coupling, std::uint64_t seed);

}  // namespace qwalk
