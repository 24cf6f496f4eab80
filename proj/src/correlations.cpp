#include "qwalk/correlations.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Looser than kUnitarityTolerance so that propagators rebuilt from CSV or
// summed over long lengths still pass.
constexpr double kAcceptUnitarity = 1e-9;

void check_inputs(const EvolutionOperator& u, FockPair& input) {
  if (u.matrix.rows() != u.matrix.cols()) {
    throw ValidationError("propagator must be square");
  }
  if (input.j > input.k) std::swap(input.j, input.k);
  if (input.k >= static_cast<Site>(u.dim())) {
    throw ValidationError("input site out of range");
  }
  if (unitarity_defect(u.matrix) > kAcceptUnitarity) {
    throw ValidationError("propagator is not unitary");
  }
}

}  // namespace

CorrelationMatrix CorrelationMatrix::from_dense(Eigen::MatrixXd gamma,
                                                CorrelationMeta meta) {
  CorrelationMatrix out;
  out.present = MaskMatrix::Constant(gamma.rows(), gamma.cols(), true);
  out.gamma = std::move(gamma);
  out.meta = meta;
  return out;
}

double CorrelationMatrix::unordered_total() const {
  double total = 0.0;
  for (Eigen::Index r = 0; r < gamma.cols(); ++r) {
    for (Eigen::Index q = 0; q <= r; ++q) {
      if (present(q, r)) total += gamma(q, r);
    }
  }
  return total;
}

void CorrelationMatrix::validate() const {
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0) {
    throw ValidationError("correlation matrix must be non-empty and square");
  }
  if (present.rows() != gamma.rows() || present.cols() != gamma.cols()) {
    throw ValidationError("presence mask does not match the matrix");
  }
  for (Eigen::Index r = 0; r < gamma.cols(); ++r) {
    for (Eigen::Index q = 0; q < gamma.rows(); ++q) {
      if (present(q, r) != present(r, q)) {
        throw ValidationError("presence mask is not symmetric");
      }
      if (!present(q, r)) continue;
      if (!std::isfinite(gamma(q, r)) || gamma(q, r) < 0.0) {
        throw ValidationError("correlation entries must be finite and >= 0");
      }
      if (gamma(q, r) != gamma(r, q)) {
        throw ValidationError("correlation matrix is not symmetric");
      }
    }
  }
}

CorrelationMatrix quantum_correlation(const EvolutionOperator& u,
                                      FockPair input) {
  check_inputs(u, input);
  const auto n = u.dim();
  const auto a = static_cast<Eigen::Index>(input.j);
  const auto b = static_cast<Eigen::Index>(input.k);
  // A doubly occupied input state carries an extra 1/2 so totals stay 1.
  const double input_norm = (a == b) ? 0.5 : 1.0;
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q <= r; ++q) {
      const Complex amp = u.matrix(q, a) * u.matrix(r, b) +
                          u.matrix(q, b) * u.matrix(r, a);
      double p = std::norm(amp) * input_norm;
      if (q == r) p *= 0.5;
      g(q, r) = p;
      g(r, q) = p;
    }
  }
  return CorrelationMatrix::from_dense(
      std::move(g), {input, true, Source::Simulated});
}

CorrelationMatrix distinguishable_correlation(const EvolutionOperator& u,
                                              FockPair input) {
  check_inputs(u, input);
  const auto n = u.dim();
  const auto a = static_cast<Eigen::Index>(input.j);
  const auto b = static_cast<Eigen::Index>(input.k);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q <= r; ++q) {
      double p = std::norm(u.matrix(q, a) * u.matrix(r, b)) +
                 std::norm(u.matrix(q, b) * u.matrix(r, a));
      if (q == r) p *= 0.5;
      g(q, r) = p;
      g(r, q) = p;
    }
  }
  return CorrelationMatrix::from_dense(
      std::move(g), {input, false, Source::Simulated});
}

double similarity(const CorrelationMatrix& a, const CorrelationMatrix& b) {
  a.validate();
  b.validate();
  if (a.gamma.rows() != b.gamma.rows()) {
    throw ValidationError("similarity needs matrices of equal size (" +
                          std::to_string(a.gamma.rows()) + " vs " +
                          std::to_string(b.gamma.rows()) + ")");
  }
  double overlap = 0.0;
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (Eigen::Index r = 0; r < a.gamma.cols(); ++r) {
    for (Eigen::Index q = 0; q < a.gamma.rows(); ++q) {
      if (!a.present(q, r) || !b.present(q, r)) continue;
      overlap += std::sqrt(a.gamma(q, r) * b.gamma(q, r));
      sum_a += a.gamma(q, r);
      sum_b += b.gamma(q, r);
    }
  }
  if (sum_a <= 0.0 || sum_b <= 0.0) {
    throw ValidationError("similarity of an all-zero matrix is undefined");
  }
  // Clamp rounding excess; Cauchy-Schwarz bounds the exact value by 1.
  return std::min(1.0, overlap * overlap / (sum_a * sum_b));
}

ViolationMap violation_map(const CorrelationMatrix& gamma) {
  gamma.validate();
  const auto n = gamma.n_sites();
  ViolationMap out;
  out.v = Eigen::MatrixXd::Constant(n, n, kNaN);
  out.indeterminate = MaskMatrix::Constant(n, n, false);
  const auto& g = gamma.gamma;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index q = 0; q < r; ++q) {
      if (!gamma.present(q, r) || !gamma.present(q, q) ||
          !gamma.present(r, r)) {
        out.indeterminate(q, r) = out.indeterminate(r, q) = true;
        continue;
      }
      const double v = g(q, r) - (2.0 / 3.0) * std::sqrt(g(q, q) * g(r, r));
      out.v(q, r) = v;
      out.v(r, q) = v;
    }
  }
  return out;
}

double ViolationMap::min_v() const {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isnan(v.data()[i])) best = std::min(best, v.data()[i]);
  }
  return best;
}

double ViolationMap::max_n_sigma() const {
  if (n_sigma.size() == 0) return 0.0;
  double best = 0.0;
  for (Eigen::Index i = 0; i < n_sigma.size(); ++i) {
    if (!std::isnan(n_sigma.data()[i])) best = std::max(best, n_sigma.data()[i]);
  }
  return best;
}

}  // namespace qwalk
