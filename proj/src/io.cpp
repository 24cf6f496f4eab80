#include "qwalk/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qwalk/errors.hpp"

namespace qwalk::io {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& token) {
  const std::string t = trim(token);
  if (t == "nan" || t == "NaN") return std::nan("");
  double value = 0.0;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw ValidationError("not a number: '" + t + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& token) {
  const std::string t = trim(token);
  std::int64_t value = 0;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw ValidationError("not an integer: '" + t + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// Reads '#' comments into key=value pairs and the remaining rows as tokens.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_table(std::istream& in) {
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string body = trim(std::string_view(t).substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        table.meta.emplace_back(trim(body.substr(0, eq)),
                                trim(body.substr(eq + 1)));
      }
      continue;
    }
    table.rows.push_back(split(t, ','));
  }
  return table;
}

void check_square(const CsvTable& table) {
  const auto n = table.rows.size();
  if (n == 0) throw ValidationError("matrix CSV has no rows");
  for (const auto& row : table.rows) {
    if (row.size() != n) {
      throw ValidationError("matrix CSV must be square (" + std::to_string(n) +
                            " rows, a row has " + std::to_string(row.size()) +
                            " columns)");
    }
  }
}

void write_comments(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& c : lines) out << "# " << c << '\n';
}

std::vector<std::string> correlation_comments(const CorrelationMatrix& g) {
  std::vector<std::string> lines;
  if (g.meta.input) {
    lines.push_back("input=" + std::to_string(g.meta.input->j) + "," +
                    std::to_string(g.meta.input->k));
  }
  lines.push_back(std::string("indistinguishable=") +
                  (g.meta.indistinguishable ? "true" : "false"));
  lines.push_back(std::string("source=") +
                  (g.meta.source == Source::Simulated ? "simulated"
                                                      : "measured"));
  return lines;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buf, ptr);
}

LatticeSpec lattice_from_json(const nlohmann::json& j) {
  try {
    LatticeSpec spec;
    const auto n = j.at("n_sites").get<std::int64_t>();
    if (n < 1) throw ValidationError("n_sites must be >= 1");
    spec.n_sites = static_cast<std::size_t>(n);
    const auto& beta = j.at("beta");
    if (beta.is_number()) {
      spec.beta.assign(spec.n_sites, beta.get<double>());
    } else {
      spec.beta = beta.get<std::vector<double>>();
    }
    const auto& coupling = j.at("coupling");
    if (coupling.is_number()) {
      spec.coupling.assign(spec.n_sites - 1, coupling.get<double>());
    } else {
      spec.coupling = coupling.get<std::vector<double>>();
    }
    spec.length_mm = j.at("length_mm").get<double>();
    spec.label_offset = j.value("label_offset", 0);
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad lattice spec: ") + e.what());
  }
}

nlohmann::json to_json(const LatticeSpec& spec) {
  return {{"n_sites", spec.n_sites},
          {"beta", spec.beta},
          {"coupling", spec.coupling},
          {"length_mm", spec.length_mm},
          {"label_offset", spec.label_offset}};
}

LatticeSpec load_lattice_spec(const std::filesystem::path& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return lattice_from_json(j);
}

Eigen::VectorXd read_vector_csv(std::istream& in) {
  const CsvTable table = read_table(in);
  Eigen::VectorXd v(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != 1) {
      throw ValidationError("vector CSV expects one value per line");
    }
    v(static_cast<Eigen::Index>(i)) = parse_double(table.rows[i][0]);
  }
  if (v.size() == 0) throw ValidationError("vector CSV is empty");
  return v;
}

Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_vector_csv(in);
}

void write_vector_csv(std::ostream& out, const Eigen::VectorXd& v,
                      const std::vector<std::string>& comments) {
  write_comments(out, comments);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << format_double(v(i)) << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& comments) {
  write_comments(out, comments);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

CorrelationMatrix read_correlation_csv(std::istream& in) {
  const CsvTable table = read_table(in);
  check_square(table);
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  CorrelationMatrix g;
  g.gamma = Eigen::MatrixXd::Zero(n, n);
  g.present = MaskMatrix::Constant(n, n, true);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double x = parse_double(table.rows[r][c]);
      if (x == -1.0) {
        g.present(r, c) = false;
      } else {
        g.gamma(r, c) = x;
      }
    }
  }
  g.meta.source = Source::Measured;
  for (const auto& [key, value] : table.meta) {
    if (key == "input") {
      const auto parts = split(value, ',');
      if (parts.size() != 2) throw ValidationError("bad input header");
      g.meta.input = FockPair{static_cast<Site>(parse_int(parts[0])),
                              static_cast<Site>(parse_int(parts[1]))};
    } else if (key == "indistinguishable") {
      g.meta.indistinguishable = value == "true";
    } else if (key == "source") {
      g.meta.source = value == "simulated" ? Source::Simulated
                                           : Source::Measured;
    }
  }
  g.validate();
  return g;
}

CorrelationMatrix read_correlation_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_correlation_csv(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& g) {
  Eigen::MatrixXd m = g.gamma;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!g.present.data()[i]) m.data()[i] = -1.0;
  }
  write_matrix_csv(out, m, correlation_comments(g));
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (std::isnan(m(r, c))) {
        row.push_back(nullptr);
      } else {
        row.push_back(m(r, c));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const CorrelationMatrix& g) {
  Eigen::MatrixXd m = g.gamma;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!g.present.data()[i]) m.data()[i] = std::nan("");
  }
  nlohmann::json j = {
      {"gamma", matrix_json(m)},
      {"indistinguishable", g.meta.indistinguishable},
      {"source", g.meta.source == Source::Simulated ? "simulated" : "measured"}};
  if (g.meta.input) j["input"] = {g.meta.input->j, g.meta.input->k};
  return j;
}

CoincidenceCounts read_counts_csv(std::istream& in) {
  const CsvTable table = read_table(in);
  check_square(table);
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  CountMatrix raw(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) raw(r, c) = parse_int(table.rows[r][c]);
  }
  double integration_s = 1.0;
  for (const auto& [key, value] : table.meta) {
    if (key == "integration_s") integration_s = parse_double(value);
  }
  auto counts = CoincidenceCounts::from_raw(raw, integration_s);
  counts.validate();
  return counts;
}

CoincidenceCounts read_counts_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_counts_csv(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_counts_csv(std::ostream& out, const CoincidenceCounts& counts) {
  // Upper triangle only, so re-reading (which sums both triangles) is exact.
  out << "# integration_s=" << format_double(counts.integration_s) << '\n';
  const auto n = counts.n_sites();
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (c > 0) out << ',';
      if (c < r) {
        out << -1;
      } else {
        out << (counts.present(r, c) ? counts.counts(r, c) : -1);
      }
    }
    out << '\n';
  }
}

void apply_sidecar(CoincidenceCounts& counts, const nlohmann::json& sidecar) {
  try {
    if (sidecar.contains("singles")) {
      counts.singles = sidecar.at("singles").get<std::vector<std::int64_t>>();
    }
    if (sidecar.contains("efficiency")) {
      counts.efficiency = sidecar.at("efficiency").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad sidecar: ") + e.what());
  }
  counts.validate();
}

nlohmann::json to_json(const ViolationMap& vm) {
  nlohmann::json j = {{"v", matrix_json(vm.v)}};
  if (vm.has_errors()) {
    j["sigma_v"] = matrix_json(vm.sigma_v);
    j["n_sigma"] = matrix_json(vm.n_sigma);
  }
  return j;
}

nlohmann::json to_json(const CalibrationResult& result, bool with_trace) {
  nlohmann::json j = {{"c_fit", result.c_fit},
                      {"z_eff_fit", result.z_eff_fit},
                      {"cz_product", result.cz_product()},
                      {"residual", result.residual},
                      {"degenerate", result.degenerate},
                      {"boundary_warning", result.boundary_warning}};
  if (with_trace) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& pt : result.grid_trace) trace.push_back({pt.c, pt.z, pt.sse});
    j["grid_trace"] = std::move(trace);
  }
  return j;
}

}  // namespace qwalk::io
