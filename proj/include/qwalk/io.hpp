#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qwalk/calibration.hpp"
#include "qwalk/correlations.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/measurement.hpp"

namespace qwalk::io {

/// Shortest decimal text that round-trips to the same double; "nan" for NaN.
std::string format_double(double x);

/// Accepts scalar "beta"/"coupling" as shorthand for uniform values.
LatticeSpec lattice_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LatticeSpec& spec);
LatticeSpec load_lattice_spec(const std::filesystem::path& path);

/// One value per line; blank lines and lines starting with '#' are skipped.
Eigen::VectorXd read_vector_csv(std::istream& in);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(std::ostream& out, const Eigen::VectorXd& v,
                      const std::vector<std::string>& comments = {});

/// Plain numeric matrix, comma separated, one row per line.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& comments = {});

/// Gamma CSV: '#' header lines "input=j,k", "indistinguishable=true|false",
/// "source=simulated|measured", then N rows of N values; -1 marks an
/// absent pair.
CorrelationMatrix read_correlation_csv(std::istream& in);
CorrelationMatrix read_correlation_csv(const std::filesystem::path& path);
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& g);
nlohmann::json to_json(const CorrelationMatrix& g);

/// Counts CSV: "# integration_s=<float>" then N rows of integers, -1 absent.
CoincidenceCounts read_counts_csv(std::istream& in);
CoincidenceCounts read_counts_csv(const std::filesystem::path& path);
void write_counts_csv(std::ostream& out, const CoincidenceCounts& counts);

/// Sidecar JSON {"singles": [...], "efficiency": [...]}; both optional.
void apply_sidecar(CoincidenceCounts& counts, const nlohmann::json& sidecar);

nlohmann::json to_json(const ViolationMap& vm);
nlohmann::json to_json(const CalibrationResult& result, bool with_trace);

/// Matrix to JSON rows with NaN mapped to null.
nlohmann::json matrix_json(const Eigen::MatrixXd& m);

}  // namespace qwalk::io
