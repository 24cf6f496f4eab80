// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qwalk/calibration.hpp"
#include "qwalk/correlations.hpp"
#include "qwalk/ensemble.hpp"
#include "qwalk/evolution.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/measurement.hpp"

using namespace qwalk;

namespace {

constexpr std::size_t kSites = 21;
constexpr double kCoupling = 5.0;
constexpr double kLength = 0.782;
constexpr Site kCentre = 10;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

LatticeSpec device() { return LatticeSpec::uniform(kSites, kCoupling, kLength); }

EvolutionOperator device_propagator() {
  return propagator(build_single_hamiltonian(device()).matrix, kLength);
}

double min_offdiag_v(const CorrelationMatrix& g) { return violation_map(g).min_v(); }

Outcome dimension_constants() {
  const auto indist = hilbert_dim(2, 21, false);
  const auto dist = hilbert_dim(2, 21, true);
  return {indist == 231 && dist == 441 && indist == oracle::count_multisets(2, 21),
          "indistinguishable " + std::to_string(indist) + ", distinguishable " +
              std::to_string(dist)};
}

Outcome closed_form_vs_fock() {
  const auto spec = device();
  const auto u = device_propagator();
  const Spectrum s2(build_two_photon_hamiltonian(spec).matrix);
  double worst = 0.0;
  int pairs = 0;
  for (Site j = 0; j < kSites; ++j) {
    for (Site k = j; k < kSites; ++k) {
      const auto g = quantum_correlation(u, {j, k});
      const auto amp = s2.evolve_basis_state(
          static_cast<Eigen::Index>(fock_index(j, k, kSites)), kLength);
      worst = std::max(worst,
                       (g.gamma - pair_probabilities(amp, kSites)).cwiseAbs().maxCoeff());
      ++pairs;
    }
  }
  return {pairs == 231 && worst < 1e-10,
          std::to_string(pairs) + " inputs, max |diff| = " + fmt("%.3g", worst)};
}

Outcome unitarity_and_normalization() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> sites(2, kSites);
  double worst_u = 0.0;
  double worst_norm = 0.0;
  std::size_t max_dim = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = sites(rng);
    LatticeSpec spec = LatticeSpec::uniform(n, 1.0, 0.1 + 1.9 * u01(rng));
    for (double& b : spec.beta) b = 10.0 * (u01(rng) - 0.5);
    for (double& c : spec.coupling) c = 0.5 + 9.5 * u01(rng);
    std::uniform_int_distribution<Site> site(0, n - 1);
    Site j = site(rng), k = site(rng);
    if (j > k) std::swap(j, k);

    const auto u = propagator(build_single_hamiltonian(spec).matrix, spec.length_mm);
    worst_u = std::max(worst_u, unitarity_defect(u.matrix));
    if (t % 10 == 0) {
      const auto u2 = propagator(build_two_photon_hamiltonian(spec).matrix, spec.length_mm);
      worst_u = std::max(worst_u, unitarity_defect(u2.matrix));
      max_dim = std::max(max_dim, static_cast<std::size_t>(u2.dim()));
    }
    for (const auto& g : {quantum_correlation(u, {j, k}),
                          distinguishable_correlation(u, {j, k})}) {
      worst_norm = std::max(worst_norm, std::abs(g.unordered_total() - 1.0));
    }
  }
  // The largest two-photon operator is always checked explicitly.
  const auto u2 =
      propagator(build_two_photon_hamiltonian(device()).matrix, kLength);
  worst_u = std::max(worst_u, unitarity_defect(u2.matrix));
  max_dim = std::max(max_dim, static_cast<std::size_t>(u2.dim()));
  return {worst_u < 1e-12 && worst_norm < 1e-10 && max_dim == 231,
          "max |U'U - I| = " + fmt("%.3g", worst_u) + " (D up to " +
              std::to_string(max_dim) + "), max |sum - 1| = " + fmt("%.3g", worst_norm)};
}

Outcome hom_limit() {
  const double z = 1.0;
  const double c = std::numbers::pi / 4.0 / z;
  const auto u = propagator(build_single_hamiltonian(LatticeSpec::uniform(2, c, z)).matrix, z);
  const auto q = quantum_correlation(u, {0, 1});
  const auto d = distinguishable_correlation(u, {0, 1});
  const double dq = std::max({q.gamma(0, 1), std::abs(q.gamma(0, 0) - 0.5),
                              std::abs(q.gamma(1, 1) - 0.5)});
  const double dd = std::max({std::abs(d.gamma(0, 1) - 0.5), std::abs(d.gamma(0, 0) - 0.25),
                              std::abs(d.gamma(1, 1) - 0.25)});
  return {q.gamma(0, 1) < 1e-12 && dq < 1e-10 && dd < 1e-10,
          "quantum G01 = " + fmt("%.3g", q.gamma(0, 1)) + ", distinguishable max dev = " +
              fmt("%.3g", dd)};
}

Outcome violation_dichotomy() {
  const auto u = device_propagator();
  bool ok = true;
  std::string detail;
  for (const FockPair in : {FockPair{10, 11}, FockPair{9, 11}}) {
    const double vd = min_offdiag_v(distinguishable_correlation(u, in));
    const double vq = min_offdiag_v(quantum_correlation(u, in));
    ok = ok && vd >= -1e-10 && vq < -0.001;
    detail += "(" + std::to_string(in.j) + "," + std::to_string(in.k) + "): dist min V " +
              fmt("%.3g", vd) + ", quantum min V " + fmt("%.4g", vq) + "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome significance_pipeline() {
  const auto ideal = quantum_correlation(device_propagator(), {10, 11});
  const auto ideal_v = violation_map(ideal);
  const auto counts = synthesize_counts(ideal, 1e6, 20240601);
  const auto vm = violation_significance(estimate_gamma(counts));

  int flagged = 0;
  int spill = 0;
  for (Eigen::Index r = 0; r < vm.v.rows(); ++r) {
    for (Eigen::Index q = 0; q < r; ++q) {
      if (vm.n_sigma(q, r) > 3.0) {
        ++flagged;
        if (!(ideal_v.v(q, r) < 0.0)) ++spill;
      }
    }
  }
  const double spill_frac = flagged ? double(spill) / flagged : 0.0;

  const auto corr = correct_counts(counts);
  const Eigen::MatrixXd boot =
      oracle::bootstrap_sigma_v(counts.counts.cast<double>(), corr.weight, 100000, 77);
  // V(q, r) is built from the (q, r), (q, q) and (r, r) cells; first-order
  // propagation is only meaningful when all three hold enough counts.
  int compared = 0;
  double worst_rel = 0.0;
  double worst_pair_only = 0.0;
  for (Eigen::Index r = 0; r < vm.v.rows(); ++r) {
    for (Eigen::Index q = 0; q < r; ++q) {
      if (counts.counts(q, r) < 25 || vm.indeterminate(q, r)) continue;
      const double rel = std::abs(vm.sigma_v(q, r) / boot(q, r) - 1.0);
      worst_pair_only = std::max(worst_pair_only, rel);
      if (counts.counts(q, q) < 25 || counts.counts(r, r) < 25) continue;
      ++compared;
      worst_rel = std::max(worst_rel, rel);
    }
  }
  const double max_ns = vm.max_n_sigma();
  return {max_ns >= 10.0 && spill_frac <= 0.05 && worst_rel < 0.05 && compared > 0,
          "max n_sigma " + fmt("%.1f", max_ns) + ", flagged " + std::to_string(flagged) +
              " with spill " + std::to_string(spill) + ", sigma_V vs bootstrap worst " +
              fmt("%.2f%%", 100.0 * worst_rel) + " over " + std::to_string(compared) +
              " pairs (" + fmt("%.2f%%", 100.0 * worst_pair_only) +
              " if only the pair cell needs 25 counts)"};
}

Outcome calibration_round_trip() {
  const auto spec = device();
  const double truth = kCoupling * kLength;
  const Eigen::VectorXd clean = single_photon_distribution(device_propagator(), kCentre);
  const Range c_range{1.0, 10.0};
  const Range z_range{0.1, 2.0};

  const auto fit = fit_coupling(clean, spec, kCentre, c_range, z_range);
  const double err0 = std::abs(fit.cz_product() / truth - 1.0);

  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.01);
    Eigen::VectorXd noisy = clean;
    for (auto& p : noisy) p = std::max(0.0, p * (1.0 + noise(rng)));
    noisy /= noisy.sum();
    const auto f = fit_coupling(noisy, spec, kCentre, c_range, z_range);
    worst = std::max(worst, std::abs(f.cz_product() / truth - 1.0));
  }
  return {err0 < 1e-3 && fit.residual < 1e-10 && worst < 0.05,
          "noiseless Cz error " + fmt("%.3g", err0) + ", residual " +
              fmt("%.3g", fit.residual) + "; 1% noise worst Cz error " +
              fmt("%.3g", worst) + " over 20 seeds"};
}

Outcome figure_regression() {
  const auto u = device_propagator();
  const auto g = quantum_correlation(u, {10, 11});
  const auto mirrored = quantum_correlation(u, {9, 10});
  const auto n = static_cast<Eigen::Index>(kSites);
  double mirror_dev = 0.0;
  for (Eigen::Index q = 0; q < n; ++q) {
    for (Eigen::Index r = 0; r < n; ++r) {
      mirror_dev = std::max(mirror_dev,
                            std::abs(g.gamma(q, r) - mirrored.gamma(n - 1 - q, n - 1 - r)));
    }
  }
  // Split between the two input waveguides.
  const Eigen::Index lo = 11;
  const Eigen::Index hi = n - lo;
  const double low_low = g.gamma.topLeftCorner(lo, lo).sum();
  const double high_high = g.gamma.bottomRightCorner(hi, hi).sum();
  const double low_high = g.gamma.topRightCorner(lo, hi).sum();
  const double high_low = g.gamma.bottomLeftCorner(hi, lo).sum();
  const double min_same = std::min(low_low, high_high);
  const double max_cross = std::max(low_high, high_low);
  const double ratio = min_same / max_cross;

  const auto g2 = quantum_correlation(u, {9, 11});
  const double centre_edge = g2.gamma(kCentre, kCentre + 7);

  // Frozen from the first verified run. The quadrant ratio never reaches 5
  // for this lattice (it stays between about 1.9 and 3.3 for any Cz), so
  // that part of the check fails by design; see README.
  constexpr double kFrozenRatio = 2.485680898;
  constexpr double kFrozenCentreEdge = 8.352910381e-4;
  const bool frozen = std::abs(ratio / kFrozenRatio - 1.0) < 1e-9 &&
                      std::abs(centre_edge / kFrozenCentreEdge - 1.0) < 1e-9;
  return {mirror_dev < 1e-10 && ratio > 5.0 && centre_edge < 1e-3 && frozen,
          "mirror dev " + fmt("%.3g", mirror_dev) + ", same/cross quadrant ratio " +
              fmt("%.10g", ratio) + " (needs > 5), G(10,17) for (9,11) = " +
              fmt("%.10g", centre_edge) + (frozen ? ", regressions hold" : ", regression drift")};
}

Outcome localization_trend() {
  std::vector<double> pr;
  for (const double sigma : {0.0, kCoupling, 3.0 * kCoupling}) {
    DisorderOptions opts;
    opts.sigma_beta = sigma;
    opts.trials = 500;
    opts.seed = 31337;
    pr.push_back(run_ensemble(device(), kCentre, std::nullopt, false, opts).mean_participation);
  }
  return {pr[0] > pr[1] && pr[1] > pr[2],
          "mean participation " + fmt("%.3f", pr[0]) + " > " + fmt("%.3f", pr[1]) + " > " +
              fmt("%.3f", pr[2])};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"dimension constants", 1e-3, dimension_constants},
      {"closed form vs Fock space, N=21, all inputs", 60.0, closed_form_vs_fock},
      {"unitarity and normalization, 1000 cases", 120.0, unitarity_and_normalization},
      {"two-site bunching limit", 10.0, hom_limit},
      {"violation dichotomy", 10.0, violation_dichotomy},
      {"significance pipeline", 300.0, significance_pipeline},
      {"calibration round trip", 60.0, calibration_round_trip},
      {"correlation map regression", 10.0, figure_regression},
      {"localization trend", 120.0, localization_trend},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] %s: %s (%.3g s of %.3g s)%s\n", pass ? "PASS" : "FAIL",
                c.name.c_str(), o.detail.c_str(), secs, c.budget_s,
                in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
