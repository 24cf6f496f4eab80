#include "qwalk/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qwalk/calibration.hpp"
#include "qwalk/correlations.hpp"
#include "qwalk/ensemble.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/evolution.hpp"
#include "qwalk/io.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/measurement.hpp"
#include "qwalk/render.hpp"

namespace qwalk::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Length of the calibrated device: 700 um coupling region plus the 82 um
// effective contribution of the fan-in/fan-out bends.
constexpr double kDefaultLengthMm = 0.782;

LatticeSpec resolve_lattice(const RunConfig& cfg) {
  LatticeSpec spec;
  if (!cfg.spec_path.empty()) {
    spec = io::load_lattice_spec(cfg.spec_path);
    if (cfg.length_mm) spec.length_mm = *cfg.length_mm;
  } else if (cfg.sites) {
    if (*cfg.sites < 1) throw ValidationError("--sites must be >= 1");
    spec = LatticeSpec::uniform(*cfg.sites, cfg.coupling,
                                cfg.length_mm.value_or(kDefaultLengthMm),
                                cfg.beta,
                                -static_cast<int>(*cfg.sites / 2));
  } else {
    throw ValidationError("a lattice is required: --spec PATH or --sites N");
  }
  if (cfg.label_offset) spec.label_offset = *cfg.label_offset;
  spec.validate();
  return spec;
}

Site checked_site(std::size_t site, const LatticeSpec& spec) {
  if (site >= spec.n_sites) {
    throw ValidationError("input site " + std::to_string(site) +
                          " out of range for " + std::to_string(spec.n_sites) +
                          " sites");
  }
  return site;
}

std::string label(Site s, int offset) {
  return std::to_string(static_cast<long long>(s) + offset);
}

// Path next to --out: "run.csv" + "nsigma.csv" -> "run.nsigma.csv".
fs::path sibling(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  return p.parent_path() / (p.stem().string() + "." + suffix);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << content;
  if (!f) throw ValidationError("failed writing " + path.string());
}

// Primary artifact goes to --out when given, otherwise to stdout.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
  } else {
    write_file(cfg.out, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void require_out(const RunConfig& cfg, const char* what) {
  if (cfg.out.empty()) {
    throw ValidationError(std::string(what) + " requires --out");
  }
}

Range parse_range(const std::string& text, const char* name) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const double x = std::stod(text);
      return {x, x};
    }
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::logic_error&) {
    throw ValidationError(std::string("bad ") + name + " range '" + text +
                          "', expected LO:HI or a single value");
  }
}

std::string csv_text(const Eigen::VectorXd& v,
                     const std::vector<std::string>& comments) {
  std::ostringstream s;
  io::write_vector_csv(s, v, comments);
  return s.str();
}

std::string csv_text(const Eigen::MatrixXd& m,
                     const std::vector<std::string>& comments) {
  std::ostringstream s;
  io::write_matrix_csv(s, m, comments);
  return s.str();
}

json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

int cmd_simulate_single(const RunConfig& cfg, std::ostream& out) {
  const LatticeSpec spec = resolve_lattice(cfg);
  if (cfg.inputs.size() != 1) {
    throw ValidationError("simulate-single takes exactly one --input site");
  }
  const Site input = checked_site(cfg.inputs[0], spec);
  const Spectrum spectrum(build_single_hamiltonian(spec).matrix);
  const Eigen::VectorXd p =
      single_photon_distribution(spectrum.propagator(spec.length_mm), input);

  std::size_t slices = cfg.z_slices;
  if (!cfg.render.empty() && slices == 0) slices = 100;
  Eigen::MatrixXd image;
  if (slices > 0) {
    const auto n = static_cast<Eigen::Index>(spec.n_sites);
    image.resize(static_cast<Eigen::Index>(slices), n);
    for (std::size_t i = 0; i < slices; ++i) {
      const double z = slices == 1 ? spec.length_mm
                                   : spec.length_mm * static_cast<double>(i) /
                                         static_cast<double>(slices - 1);
      image.row(static_cast<Eigen::Index>(i)) =
          spectrum.evolve_basis_state(static_cast<Eigen::Index>(input), z)
              .cwiseAbs2()
              .transpose();
    }
  }

  if (cfg.format == "json") {
    json j = {{"input", input},
              {"length_mm", spec.length_mm},
              {"distribution", vector_json(p)}};
    if (slices > 0) j["slices"] = io::matrix_json(image);
    emit(cfg, out, dump(j));
  } else {
    emit(cfg, out,
         csv_text(p, {"input=" + std::to_string(input),
                      "length_mm=" + io::format_double(spec.length_mm)}));
    if (cfg.z_slices > 0 && !cfg.out.empty()) {
      write_file(sibling(cfg.out, "slices.csv"),
                 csv_text(image, {"rows=z from 0 to length_mm",
                                  "columns=output site"}));
    }
  }
  if (!cfg.render.empty()) {
    require_out(cfg, "--render");
    write_file(sibling(cfg.out, "ppm"),
               render_ppm(image, nullptr, cfg.render_scale));
  }
  return kOk;
}

int cmd_correlate(const RunConfig& cfg, std::ostream& out) {
  const LatticeSpec spec = resolve_lattice(cfg);
  if (cfg.inputs.size() != 2) {
    throw ValidationError("correlate takes two input sites: --input J,K");
  }
  const FockPair pair{checked_site(cfg.inputs[0], spec),
                      checked_site(cfg.inputs[1], spec)};
  const EvolutionOperator u =
      propagator(build_single_hamiltonian(spec).matrix, spec.length_mm);
  const CorrelationMatrix g = cfg.distinguishable
                                  ? distinguishable_correlation(u, pair)
                                  : quantum_correlation(u, pair);

  std::optional<CoincidenceCounts> counts;
  if (cfg.emit_counts > 0.0) {
    require_out(cfg, "--emit-counts");
    counts = synthesize_counts(g, cfg.emit_counts, cfg.seed);
  }

  if (cfg.format == "json") {
    json j = io::to_json(g);
    if (counts) {
      std::ostringstream s;
      io::write_counts_csv(s, *counts);
      j["counts_csv"] = s.str();
    }
    emit(cfg, out, dump(j));
  } else {
    std::ostringstream s;
    io::write_correlation_csv(s, g);
    emit(cfg, out, s.str());
    if (counts) {
      std::ostringstream c;
      io::write_counts_csv(c, *counts);
      write_file(sibling(cfg.out, "counts.csv"), c.str());
    }
  }
  if (!cfg.render.empty()) {
    require_out(cfg, "--render");
    write_file(sibling(cfg.out, "ppm"),
               render_ppm(g.gamma, nullptr, cfg.render_scale));
  }
  if (!cfg.out.empty()) {
    const ViolationMap vm = violation_map(g);
    out << "min V = " << io::format_double(vm.min_v()) << "\n";
  }
  return kOk;
}

int cmd_violations(const RunConfig& cfg, std::ostream& out) {
  if (cfg.gamma_path.empty() == cfg.counts_path.empty()) {
    throw ValidationError("violations takes exactly one of --gamma or --counts");
  }
  ViolationMap vm;
  if (!cfg.gamma_path.empty()) {
    vm = violation_map(io::read_correlation_csv(fs::path(cfg.gamma_path)));
  } else {
    CoincidenceCounts counts = io::read_counts_csv(fs::path(cfg.counts_path));
    if (!cfg.sidecar_path.empty()) {
      std::ifstream in(cfg.sidecar_path);
      if (!in) throw ValidationError("cannot open " + cfg.sidecar_path);
      json side;
      try {
        in >> side;
      } catch (const json::exception& e) {
        throw ValidationError(cfg.sidecar_path + ": " + e.what());
      }
      io::apply_sidecar(counts, side);
    }
    CorrectionOptions opts;
    opts.singles_correction = cfg.singles_correction;
    vm = violation_significance(estimate_gamma(counts, opts));
  }

  if (cfg.format == "json") {
    emit(cfg, out, dump(io::to_json(vm)));
  } else {
    emit(cfg, out, csv_text(vm.v, {"quantity=V", "diagonal=nan"}));
    if (vm.has_errors() && !cfg.out.empty()) {
      write_file(sibling(cfg.out, "nsigma.csv"),
                 csv_text(vm.n_sigma, {"quantity=n_sigma"}));
      write_file(sibling(cfg.out, "sigma_v.csv"),
                 csv_text(vm.sigma_v, {"quantity=sigma_V"}));
    }
  }

  if (!cfg.render.empty()) {
    require_out(cfg, "--render");
    // Non-violating pairs stay white.
    const auto n = vm.v.rows();
    Eigen::MatrixXd strength(n, n);
    MaskMatrix blank(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        const double v = vm.v(r, c);
        strength(r, c) = vm.has_errors() ? vm.n_sigma(r, c) : -v;
        blank(r, c) = std::isnan(v) || v >= 0.0;
      }
    }
    write_file(sibling(cfg.out, "ppm"),
               render_ppm(strength, &blank, cfg.render_scale));
  }

  if (!cfg.out.empty()) {
    const int offset = cfg.label_offset.value_or(0);
    double worst = 0.0;
    Eigen::Index wq = -1, wr = -1;
    for (Eigen::Index r = 0; r < vm.v.rows(); ++r) {
      for (Eigen::Index q = 0; q < r; ++q) {
        const double score = vm.has_errors() ? vm.n_sigma(q, r) : -vm.v(q, r);
        if (score > worst) {
          worst = score;
          wq = q;
          wr = r;
        }
      }
    }
    if (wq < 0) {
      out << "no violation\n";
    } else {
      out << "strongest violation at (" << label(wq, offset) << ","
          << label(wr, offset) << "): V = " << io::format_double(vm.v(wq, wr));
      if (vm.has_errors()) out << ", " << io::format_double(worst) << " sigma";
      out << "\n";
    }
  }
  return kOk;
}

int cmd_similarity(const RunConfig& cfg, std::ostream& out) {
  const auto a = io::read_correlation_csv(fs::path(cfg.path_a));
  const auto b = io::read_correlation_csv(fs::path(cfg.path_b));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f\n", similarity(a, b));
  out << buf;
  return kOk;
}

int cmd_calibrate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.measured_path.empty()) throw ValidationError("--measured is required");
  const LatticeSpec tmpl = resolve_lattice(cfg);
  if (cfg.inputs.size() != 1) {
    throw ValidationError("calibrate takes exactly one --input site");
  }
  const Site input = checked_site(cfg.inputs[0], tmpl);
  const Eigen::VectorXd measured = io::read_vector_csv(fs::path(cfg.measured_path));
  GridOptions grid;
  grid.c_points = grid.z_points = cfg.grid;
  grid.rounds = cfg.rounds;
  const CalibrationResult result =
      fit_coupling(measured, tmpl, input, parse_range(cfg.c_range, "coupling"),
                   parse_range(cfg.z_range, "length"), grid);

  if (!cfg.out.empty()) {
    if (cfg.format == "json") {
      write_file(cfg.out, dump(io::to_json(result, cfg.trace)));
    } else {
      std::ostringstream s;
      s << "c_fit,z_eff_fit,cz_product,residual,degenerate,boundary_warning\n"
        << io::format_double(result.c_fit) << ','
        << io::format_double(result.z_eff_fit) << ','
        << io::format_double(result.cz_product()) << ','
        << io::format_double(result.residual) << ',' << result.degenerate
        << ',' << result.boundary_warning << '\n';
      write_file(cfg.out, s.str());
      if (cfg.trace) {
        std::ostringstream t;
        t << "c,z,sse\n";
        for (const auto& pt : result.grid_trace) {
          t << io::format_double(pt.c) << ',' << io::format_double(pt.z) << ','
            << io::format_double(pt.sse) << '\n';
        }
        write_file(sibling(cfg.out, "trace.csv"), t.str());
      }
    }
  }

  out << "C = " << io::format_double(result.c_fit) << " mm^-1\n"
      << "z_eff = " << io::format_double(result.z_eff_fit) << " mm\n"
      << "Cz = " << io::format_double(result.cz_product()) << "\n"
      << "residual = " << io::format_double(result.residual) << "\n"
      << "degenerate = " << (result.degenerate ? "yes" : "no");
  if (result.degenerate) out << " (only C*z is identified; pin one range)";
  out << "\n";
  if (result.boundary_warning) {
    out << "warning: best fit lies on the search range boundary\n";
  }
  return kOk;
}

int cmd_ensemble(const RunConfig& cfg, std::ostream& out) {
  const LatticeSpec spec = resolve_lattice(cfg);
  if (cfg.inputs.empty() || cfg.inputs.size() > 2) {
    throw ValidationError("ensemble takes --input J or --input J,K");
  }
  const Site first = checked_site(cfg.inputs[0], spec);
  std::optional<Site> second;
  if (cfg.inputs.size() == 2) second = checked_site(cfg.inputs[1], spec);
  DisorderOptions opts;
  opts.sigma_beta = cfg.sigma_beta;
  opts.sigma_coupling = cfg.sigma_coupling;
  opts.trials = cfg.trials;
  opts.seed = cfg.seed;
  const EnsembleResult res =
      run_ensemble(spec, first, second, cfg.distinguishable, opts);

  const std::vector<std::string> single_comments = {
      "input=" + std::to_string(first),
      "participation_ratio=" + io::format_double(res.participation_of_mean),
      "mean_trial_participation_ratio=" +
          io::format_double(res.mean_participation),
      "trials=" + std::to_string(cfg.trials),
      "seed=" + std::to_string(cfg.seed)};

  if (cfg.format == "json") {
    json j = {{"mean_distribution", vector_json(res.mean_distribution)},
              {"participation_ratio", res.participation_of_mean},
              {"mean_trial_participation_ratio", res.mean_participation},
              {"trials", cfg.trials},
              {"seed", cfg.seed}};
    if (res.mean_gamma) j["mean_gamma"] = io::to_json(*res.mean_gamma);
    emit(cfg, out, dump(j));
  } else if (res.mean_gamma) {
    std::ostringstream s;
    io::write_correlation_csv(s, *res.mean_gamma);
    emit(cfg, out, s.str());
    if (!cfg.out.empty()) {
      write_file(sibling(cfg.out, "single.csv"),
                 csv_text(res.mean_distribution, single_comments));
    }
  } else {
    emit(cfg, out, csv_text(res.mean_distribution, single_comments));
  }
  if (!cfg.render.empty()) {
    require_out(cfg, "--render");
    const Eigen::MatrixXd img =
        res.mean_gamma ? res.mean_gamma->gamma
                       : Eigen::MatrixXd(res.mean_distribution.transpose());
    write_file(sibling(cfg.out, "ppm"), render_ppm(img, nullptr, cfg.render_scale));
  }
  if (!cfg.out.empty()) {
    out << "participation ratio of mean = "
        << io::format_double(res.participation_of_mean) << "\n"
        << "mean participation ratio = "
        << io::format_double(res.mean_participation) << "\n";
  }
  return kOk;
}

int cmd_dim(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.sites) throw ValidationError("dim requires --sites");
  out << hilbert_dim(cfg.photons, *cfg.sites, cfg.distinguishable) << "\n";
  return kOk;
}

void add_lattice_options(CLI::App* sub, RunConfig& cfg) {
  auto* spec = sub->add_option("--spec", cfg.spec_path, "Lattice JSON file");
  auto* sites = sub->add_option("--sites", cfg.sites, "Uniform array size N");
  sub->add_option("--coupling", cfg.coupling, "Uniform coupling C (mm^-1)")
      ->excludes(spec);
  sub->add_option("--beta", cfg.beta, "Uniform propagation constant (mm^-1)")
      ->excludes(spec);
  sub->add_option("--length", cfg.length_mm, "Propagation length z (mm)");
  sub->add_option("--label-offset", cfg.label_offset,
                  "Offset added to site indices in printed labels");
  spec->excludes(sites);
}

void add_output_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--format", cfg.format, "Artifact format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--render", cfg.render, "Write a heatmap next to --out")
      ->check(CLI::IsMember({"ppm"}));
  sub->add_option("--render-scale", cfg.render_scale, "Pixels per cell")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", cfg.out, "Output path (default: stdout)");
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "simulate-single") return cmd_simulate_single(cfg, out);
    if (cfg.command == "correlate") return cmd_correlate(cfg, out);
    if (cfg.command == "violations") return cmd_violations(cfg, out);
    if (cfg.command == "similarity") return cmd_similarity(cfg, out);
    if (cfg.command == "calibrate") return cmd_calibrate(cfg, out);
    if (cfg.command == "ensemble") return cmd_ensemble(cfg, out);
    if (cfg.command == "dim") return cmd_dim(cfg, out);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Quantum walks of one and two photons in coupled waveguide arrays",
               "qwalk"};
  app.require_subcommand(1);

  auto* single = app.add_subcommand(
      "simulate-single", "Single-photon output distribution");
  add_lattice_options(single, cfg);
  single->add_option("--input", cfg.inputs, "Input site")->required();
  single->add_option("--z-slices", cfg.z_slices,
                     "Sample the distribution at this many lengths in [0, z]");
  add_output_options(single, cfg);

  auto* corr = app.add_subcommand("correlate", "Two-photon correlation matrix");
  add_lattice_options(corr, cfg);
  corr->add_option("--input", cfg.inputs, "Input sites J,K")
      ->required()
      ->delimiter(',');
  corr->add_flag("--distinguishable", cfg.distinguishable,
                 "Photons made distinguishable (e.g. by delay)");
  corr->add_option("--emit-counts", cfg.emit_counts,
                   "Also write synthetic Poisson counts with this many events");
  corr->add_option("--seed", cfg.seed, "Seed for synthetic counts");
  add_output_options(corr, cfg);

  auto* viol = app.add_subcommand("violations", "Classical-limit violations");
  auto* gamma_opt = viol->add_option("--gamma", cfg.gamma_path, "Gamma CSV");
  auto* counts_opt = viol->add_option("--counts", cfg.counts_path, "Counts CSV");
  gamma_opt->excludes(counts_opt);
  viol->add_option("--sidecar", cfg.sidecar_path,
                   "JSON with singles and efficiency")
      ->needs(counts_opt);
  viol->add_flag("--singles-correction", cfg.singles_correction,
                 "Divide by normalized singles rates")
      ->needs(counts_opt);
  viol->add_option("--label-offset", cfg.label_offset,
                   "Offset added to site indices in printed labels");
  add_output_options(viol, cfg);

  auto* sim = app.add_subcommand("similarity", "Similarity of two Gamma CSVs");
  sim->add_option("a", cfg.path_a, "First Gamma CSV")->required();
  sim->add_option("b", cfg.path_b, "Second Gamma CSV")->required();

  auto* cal = app.add_subcommand("calibrate",
                                 "Fit C and effective length to a pattern");
  add_lattice_options(cal, cfg);
  cal->add_option("--measured", cfg.measured_path,
                  "Measured output pattern, one value per line")
      ->required();
  cal->add_option("--input", cfg.inputs, "Input site")->required();
  cal->add_option("--c-range", cfg.c_range, "Coupling range LO:HI or value");
  cal->add_option("--z-range", cfg.z_range, "Length range LO:HI or value");
  cal->add_option("--grid", cfg.grid, "Grid points per axis")
      ->check(CLI::PositiveNumber);
  cal->add_option("--rounds", cfg.rounds, "Refinement rounds");
  cal->add_flag("--trace", cfg.trace, "Write every sampled (C, z, SSE)");
  add_output_options(cal, cfg);

  auto* ens = app.add_subcommand("ensemble", "Disorder-averaged walk");
  add_lattice_options(ens, cfg);
  ens->add_option("--input", cfg.inputs, "Input site J or sites J,K")
      ->required()
      ->delimiter(',');
  ens->add_flag("--distinguishable", cfg.distinguishable,
                "Photons made distinguishable");
  ens->add_option("--trials", cfg.trials, "Disorder samples")
      ->check(CLI::PositiveNumber);
  ens->add_option("--seed", cfg.seed, "Base seed");
  ens->add_option("--sigma-beta", cfg.sigma_beta, "Half-width of beta noise")
      ->check(CLI::NonNegativeNumber);
  ens->add_option("--sigma-coupling", cfg.sigma_coupling,
                  "Half-width of coupling noise")
      ->check(CLI::NonNegativeNumber);
  add_output_options(ens, cfg);

  auto* dim = app.add_subcommand("dim", "Hilbert-space dimension");
  dim->add_option("--photons", cfg.photons, "Photon number")->required();
  dim->add_option("--sites", cfg.sites, "Waveguide count")->required();
  dim->add_flag("--distinguishable", cfg.distinguishable,
                "Distinguishable photons");

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("qwalk");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  return execute(cfg, out, err);
}

}  // namespace qwalk::cli
