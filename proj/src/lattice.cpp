#include "qwalk/lattice.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

LatticeSpec LatticeSpec::uniform(std::size_t n, double c, double length_mm,
                                 double b, int label_offset) {
  LatticeSpec spec;
  spec.n_sites = n;
  spec.beta.assign(n, b);
  spec.coupling.assign(n > 0 ? n - 1 : 0, c);
  spec.length_mm = length_mm;
  spec.label_offset = label_offset;
  return spec;
}

void LatticeSpec::validate() const {
  if (n_sites < 1) throw ValidationError("lattice needs at least one site");
  if (beta.size() != n_sites) {
    throw ValidationError("beta has " + std::to_string(beta.size()) +
                          " entries, expected " + std::to_string(n_sites));
  }
  if (coupling.size() != n_sites - 1) {
    throw ValidationError("coupling has " + std::to_string(coupling.size()) +
                          " entries, expected " + std::to_string(n_sites - 1));
  }
  for (double b : beta) {
    if (!std::isfinite(b)) throw ValidationError("non-finite beta entry");
  }
  for (double c : coupling) {
    if (!std::isfinite(c) || c < 0.0) {
      throw ValidationError("coupling entries must be finite and >= 0");
    }
  }
  if (!std::isfinite(length_mm) || length_mm < 0.0) {
    throw ValidationError("length_mm must be finite and >= 0");
  }
}

SingleHamiltonian build_single_hamiltonian(const LatticeSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n_sites);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) h(j, j) = -spec.beta[j];
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    h(j, j + 1) = -spec.coupling[j];
    h(j + 1, j) = -spec.coupling[j];
  }
  return {std::move(h)};
}

std::size_t two_photon_dim(std::size_t n_sites) {
  if (n_sites > 0 &&
      n_sites > (std::numeric_limits<std::size_t>::max() / (n_sites + 1))) {
    throw ResourceError("two-photon dimension overflows");
  }
  return n_sites * (n_sites + 1) / 2;
}

std::size_t fock_index(Site j, Site k, std::size_t n_sites) {
  if (j > k || k >= n_sites) {
    throw ValidationError("fock_index requires 0 <= j <= k < n_sites, got (" +
                          std::to_string(j) + "," + std::to_string(k) + ")");
  }
  // Rows before j hold N + (N-1) + ... + (N-j+1) entries.
  return j * n_sites - j * (j - 1) / 2 + (k - j);
}

FockPair fock_pair(std::size_t index, std::size_t n_sites) {
  if (index >= two_photon_dim(n_sites)) {
    throw ValidationError("Fock index " + std::to_string(index) +
                          " out of range");
  }
  Site j = 0;
  std::size_t row = n_sites;
  while (index >= row) {
    index -= row;
    ++j;
    --row;
  }
  return {j, j + index};
}

namespace {

// Photon number on site s for the two-photon state (lo, hi).
struct Occupation {
  Site lo;
  Site hi;
  int count(Site s) const { return (s == lo) + (s == hi); }
};

}  // namespace

TwoPhotonHamiltonian build_two_photon_hamiltonian(const LatticeSpec& spec,
                                                  std::size_t dimension_cap) {
  spec.validate();
  const std::size_t n = spec.n_sites;
  const std::size_t d = two_photon_dim(n);
  if (d > dimension_cap) {
    throw ResourceError("two-photon dimension " + std::to_string(d) +
                        " exceeds cap " + std::to_string(dimension_cap));
  }

  TwoPhotonHamiltonian out;
  out.n_sites = n;
  out.basis.reserve(d);
  for (Site j = 0; j < n; ++j) {
    for (Site k = j; k < n; ++k) out.basis.push_back({j, k});
  }
  out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                     static_cast<Eigen::Index>(d));

  for (std::size_t col = 0; col < d; ++col) {
    const auto [j, k] = out.basis[col];
    const auto c = static_cast<Eigen::Index>(col);
    out.matrix(c, c) = -(spec.beta[j] + spec.beta[k]);

    const Occupation occ{j, k};
    // Move one photon from `from` to `to` across edge e.
    auto hop = [&](Site from, Site to, double coupling) {
      const int n_from = occ.count(from);
      if (n_from == 0 || coupling == 0.0) return;
      const int n_to = occ.count(to);
      Site a = (from == j) ? to : j;
      Site b = (from == j) ? k : to;
      if (a > b) std::swap(a, b);
      const auto row = static_cast<Eigen::Index>(fock_index(a, b, n));
      const double amp = -coupling * std::sqrt(double(n_from * (n_to + 1)));
      out.matrix(row, c) = amp;
    };
    for (Site e = 0; e + 1 < n; ++e) {
      hop(e, e + 1, spec.coupling[e]);
      hop(e + 1, e, spec.coupling[e]);
    }
  }
  return out;
}

std::uint64_t hilbert_dim(std::uint64_t n_photons, std::uint64_t n_sites,
                          bool distinguishable) {
  if (n_photons < 1 || n_sites < 1) {
    throw ValidationError("hilbert_dim needs n_photons >= 1 and n_sites >= 1");
  }
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (distinguishable) {
    std::uint64_t dim = 1;
    for (std::uint64_t i = 0; i < n_photons; ++i) {
      if (dim > kMax / n_sites) throw ResourceError("Hilbert dimension overflows");
      dim *= n_sites;
    }
    return dim;
  }
  // binomial(N + n - 1, n); every partial product is itself a binomial.
  const std::uint64_t k = std::min(n_photons, n_sites - 1);
  const std::uint64_t top = n_sites + n_photons - 1;
  if (top < n_sites) throw ResourceError("Hilbert dimension overflows");
  std::uint64_t acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // acc * factor / i is an exact integer; cancel the gcd first so the
    // division can be applied to the factor before multiplying.
    const std::uint64_t g = std::gcd(acc, i);
    const std::uint64_t factor = (top - k + i) / (i / g);
    acc /= g;
    if (acc > kMax / factor) throw ResourceError("Hilbert dimension overflows");
    acc *= factor;
  }
  return acc;
}

LatticeSpec sample_disordered_spec(const LatticeSpec& base, double sigma_beta,
                                   double sigma_coupling, std::uint64_t seed) {
  base.validate();
  if (!(sigma_beta >= 0.0) || !(sigma_coupling >= 0.0)) {
    throw ValidationError("disorder widths must be >= 0");
  }
  LatticeSpec out = base;
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // Draw order is fixed (all beta, then all coupling) so a given seed
  // reproduces the same device regardless of which widths are zero.
  for (double& b : out.beta) b += sigma_beta * unit(rng);
  for (double& c : out.coupling) {
    c += sigma_coupling * unit(rng);
    if (c < 0.0) c = 0.0;
  }
  return out;
}

}  // namespace qwalk
