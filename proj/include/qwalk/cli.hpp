#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qwalk::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

/// Everything a command needs. Running the same RunConfig twice produces
/// byte-identical artifacts.
struct RunConfig {
  std::string command;

  // Lattice: either a JSON spec or uniform parameters.
  std::string spec_path;
  std::optional<std::size_t> sites;
  double coupling = 5.0;
  double beta = 0.0;
  std::optional<double> length_mm;
  std::optional<int> label_offset;

  std::vector<std::size_t> inputs;
  bool distinguishable = false;

  std::uint64_t seed = 0;
  std::size_t trials = 100;
  double sigma_beta = 0.0;
  double sigma_coupling = 0.0;

  std::string format = "csv";
  std::string render;
  int render_scale = 1;
  std::string out;

  // simulate-single
  std::size_t z_slices = 0;

  // correlate
  double emit_counts = 0.0;

  // violations
  std::string gamma_path;
  std::string counts_path;
  std::string sidecar_path;
  bool singles_correction = false;

  // similarity
  std::string path_a;
  std::string path_b;

  // calibrate
  std::string measured_path;
  std::string c_range = "1:10";
  std::string z_range = "0.1:2";
  std::size_t grid = 64;
  std::size_t rounds = 6;
  bool trace = false;

  // dim
  std::uint64_t photons = 2;
};

/// Executes a parsed configuration. Errors are reported on `err` and
/// mapped to exit codes.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv-style arguments (without the program name) and executes.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace qwalk::cli
