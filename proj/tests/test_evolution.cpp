#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/evolution.hpp"

using namespace qwalk;

namespace {

LatticeSpec random_spec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LatticeSpec spec = LatticeSpec::uniform(n, 1.0, 0.2 + 1.5 * u(rng));
  for (double& b : spec.beta) b = 2.0 * u(rng) - 1.0;
  for (double& c : spec.coupling) c = 1.0 + 6.0 * u(rng);
  return spec;
}

}  // namespace

TEST_CASE("zero length gives the exact identity") {
  const auto h = build_single_hamiltonian(LatticeSpec::uniform(5, 3.0, 0.0));
  const auto u = propagator(h.matrix, 0.0);
  CHECK(u.matrix == Eigen::MatrixXcd::Identity(5, 5));
  const Eigen::VectorXd p = single_photon_distribution(u, 2);
  CHECK(p == Eigen::VectorXd::Unit(5, 2));
}

TEST_CASE("two-site propagator closed form") {
  const double c = 1.7;
  const double z = 0.41;
  const auto u = propagator(
      build_single_hamiltonian(LatticeSpec::uniform(2, c, z)).matrix, z);
  // exp(i C z sigma_x) = cos(Cz) I + i sin(Cz) sigma_x
  CHECK(std::abs(u.matrix(0, 0) - Complex(std::cos(c * z), 0.0)) < 1e-14);
  CHECK(std::abs(u.matrix(0, 1) - Complex(0.0, std::sin(c * z))) < 1e-14);
  CHECK(std::abs(u.matrix(1, 1) - Complex(std::cos(c * z), 0.0)) < 1e-14);
}

TEST_CASE("spectral propagator agrees with Pade exponential") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 5u, 21u}) {
    const auto spec = random_spec(rng, n);
    const auto h = build_single_hamiltonian(spec).matrix;
    const auto u = propagator(h, spec.length_mm);
    const auto ref = oracle::pade_propagator(h, spec.length_mm);
    CHECK((u.matrix - ref).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("unitarity and symmetry") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = random_spec(rng, 1 + trial);
    const auto u = propagator(build_single_hamiltonian(spec).matrix, spec.length_mm);
    CHECK(unitarity_defect(u.matrix) < kUnitarityTolerance);
    CHECK(u.matrix == u.matrix.transpose());
  }
  const auto spec = LatticeSpec::uniform(21, 5.0, 0.782);
  const auto h2 = build_two_photon_hamiltonian(spec);
  const auto u2 = propagator(h2.matrix, spec.length_mm);
  CHECK(u2.dim() == 231);
  CHECK(unitarity_defect(u2.matrix) < kUnitarityTolerance);
  CHECK(u2.matrix == u2.matrix.transpose());
}

TEST_CASE("composition of lengths") {
  std::mt19937_64 rng(5);
  const auto spec = random_spec(rng, 9);
  const Spectrum s(build_single_hamiltonian(spec).matrix);
  const Eigen::MatrixXcd prod = s.propagator(0.3).matrix * s.propagator(0.55).matrix;
  CHECK((prod - s.propagator(0.85).matrix).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("global beta shift leaves probabilities unchanged") {
  auto spec = LatticeSpec::uniform(7, 2.0, 0.9);
  auto shifted = spec;
  for (double& b : shifted.beta) b += 3.25;
  const auto u = propagator(build_single_hamiltonian(spec).matrix, 0.9);
  const auto v = propagator(build_single_hamiltonian(shifted).matrix, 0.9);
  CHECK((u.matrix.cwiseAbs2() - v.matrix.cwiseAbs2()).cwiseAbs().maxCoeff() <
        1e-10);

  const auto a = evolve_two_photon(build_two_photon_hamiltonian(spec), 0.9, {2, 4});
  const auto b =
      evolve_two_photon(build_two_photon_hamiltonian(shifted), 0.9, {2, 4});
  CHECK((a.cwiseAbs2() - b.cwiseAbs2()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("mirror symmetry of a uniform array") {
  const std::size_t n = 8;
  const auto u = propagator(
      build_single_hamiltonian(LatticeSpec::uniform(n, 3.0, 0.7)).matrix, 0.7);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(u.matrix(q, k) - u.matrix(n - 1 - q, n - 1 - k)) < 1e-12);
    }
  }
}

TEST_CASE("single-photon distribution") {
  const auto spec = LatticeSpec::uniform(21, 5.0, 0.782);
  const auto u = propagator(build_single_hamiltonian(spec).matrix, spec.length_mm);
  const Eigen::VectorXd p = single_photon_distribution(u, 10);
  CHECK(std::abs(p.sum() - 1.0) < kProbabilityTolerance);
  for (int q = 0; q < 21; ++q) CHECK(std::abs(p(q) - p(20 - q)) < 1e-10);

  // Ballistic spreading: the centre is not the maximum and the two lobes
  // sit symmetrically away from it.
  Eigen::Index peak = 0;
  p.maxCoeff(&peak);
  CHECK(peak != 10);
  CHECK(std::abs(peak - 10) == 6);

  // Regression values from the first verified run.
  CHECK(p(4) == doctest::Approx(0.12076695595633308).epsilon(1e-9));
  CHECK(p(10) == doctest::Approx(0.04466588854441213).epsilon(1e-9));
  CHECK(p(0) == doctest::Approx(0.0035917501545503533).epsilon(1e-9));

  CHECK_THROWS_AS(single_photon_distribution(u, 21), ValidationError);
}

TEST_CASE("two-photon evolution") {
  SUBCASE("zero length") {
    const auto h2 = build_two_photon_hamiltonian(LatticeSpec::uniform(4, 1.0, 0.0));
    const auto a = evolve_two_photon(h2, 0.0, {1, 3});
    CHECK(a == AmplitudeVector::Unit(10, fock_index(1, 3, 4)));
  }
  SUBCASE("Hong-Ou-Mandel coupler") {
    const double c = 2.0;
    const double z = std::numbers::pi / 4.0 / c;
    const auto h2 = build_two_photon_hamiltonian(LatticeSpec::uniform(2, c, z));
    const auto a = evolve_two_photon(h2, z, {0, 1});
    CHECK(std::norm(a(0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(a(1)) < 1e-24);
    CHECK(std::norm(a(2)) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("norm preserved") {
    std::mt19937_64 rng(9);
    const auto spec = random_spec(rng, 12);
    const auto h2 = build_two_photon_hamiltonian(spec);
    const auto a = evolve_two_photon(h2, spec.length_mm, {3, 3});
    CHECK(std::abs(a.squaredNorm() - 1.0) < 1e-10);
  }
  SUBCASE("invalid input") {
    const auto h2 = build_two_photon_hamiltonian(LatticeSpec::uniform(3, 1.0, 0.0));
    CHECK_THROWS_AS(evolve_two_photon(h2, 1.0, {2, 1}), ValidationError);
    CHECK_THROWS_AS(evolve_two_photon(h2, 1.0, {0, 3}), ValidationError);
    auto broken = h2;
    broken.basis.pop_back();
    CHECK_THROWS_AS(evolve_two_photon(broken, 1.0, {0, 1}), ValidationError);
  }
}

TEST_CASE("propagator input validation") {
  Eigen::MatrixXd h(2, 2);
  h << 0, 1, 2, 0;
  CHECK_THROWS_AS(propagator(h, 1.0), ValidationError);
  h << 0, std::nan(""), std::nan(""), 0;
  CHECK_THROWS_AS(propagator(h, 1.0), NumericalError);
  h << 0, 1, 1, 0;
  CHECK_THROWS_AS(propagator(h, -1.0), ValidationError);
}
