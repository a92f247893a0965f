// Command-line front end: config-driven spectral sweeps, Hartman width
// scans, the oracle validation suite, and SVG re-rendering from CSV.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvewire/curvewire.hpp"

namespace {

using namespace curvewire;
namespace fs = std::filesystem;

int resolve_threads(int flag_value) {
  if (const char* env = std::getenv("CURVEWIRE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    std::fprintf(stderr, "warning: ignoring invalid CURVEWIRE_THREADS='%s'\n", env);
  }
  return flag_value;
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  long resolution = 0;   // number of lattice intervals; 0 keeps the config value
  bool emit_svg = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_config = true) {
  auto* c = cmd->add_option("--config", opt.config_path, "TOML configuration file");
  if (needs_config) c->required();
  cmd->add_option("--out-dir", opt.out_dir, "output directory (created if missing)");
  cmd->add_option("--threads", opt.threads, "worker threads (CURVEWIRE_THREADS overrides)");
  cmd->add_option("--resolution", opt.resolution,
                  "override the number of lattice intervals L/a");
  cmd->add_flag("--emit-svg", opt.emit_svg, "also write an SVG plot");
}

io::RunConfig load_config(const CommonOptions& opt) {
  io::RunConfig cfg = io::parse_config(opt.config_path);
  if (opt.resolution > 0)
    cfg.sweep.lattice_constant =
        cfg.sweep.profile.length() / static_cast<double>(opt.resolution);
  return cfg;
}

int run_spectrum_cmd(const CommonOptions& opt, const std::string& command_line) {
  const auto t_start = std::chrono::steady_clock::now();
  io::RunConfig cfg = load_config(opt);
  const int threads = resolve_threads(opt.threads);

  Spectrum spectrum;
  if (cfg.sweep.auto_converge) {
    auto [a_final, spec] = converge_resolution(cfg.sweep, threads);
    spectrum = std::move(spec);
    if (!spectrum.resolution_converged)
      std::fprintf(stderr, "warning: resolution loop hit the halving budget at a = %g\n",
                   a_final);
  } else {
    spectrum = run_spectrum(cfg.sweep, threads);
  }

  fs::create_directories(opt.out_dir);
  const std::string csv = (fs::path(opt.out_dir) / "spectrum.csv").string();
  const std::string manifest = (fs::path(opt.out_dir) / "manifest.json").string();
  const std::string svg = (fs::path(opt.out_dir) / "spectrum.svg").string();
  io::write_spectrum_csv(spectrum, csv);
  std::vector<std::string> outputs{csv};
  if (opt.emit_svg) {
    io::emit_plot(spectrum, svg, spectrum.profile_descriptor);
    outputs.push_back(svg);
  }
  io::RunStats stats;
  stats.threads = threads;
  stats.command = command_line;
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  io::write_manifest(manifest, cfg, &spectrum, nullptr, stats, outputs);

  std::printf("wrote %s (%zu points, a = %.6g a0, D = %.10g a0)\n", csv.c_str(),
              spectrum.size(), spectrum.lattice_constant, spectrum.arc_length);
  if (opt.emit_svg) std::printf("wrote %s\n", svg.c_str());
  std::printf("wrote %s\n", manifest.c_str());
  return 0;
}

int run_hartman_cmd(const CommonOptions& opt, const std::string& command_line) {
  const auto t_start = std::chrono::steady_clock::now();
  io::RunConfig cfg = load_config(opt);
  const int threads = resolve_threads(opt.threads);

  const HartmanScan scan = hartman_scan(cfg.sweep.profile, cfg.stretch_factors, cfg.e_probe,
                                        cfg.sweep, threads, cfg.stretch_mode);

  fs::create_directories(opt.out_dir);
  const std::string csv = (fs::path(opt.out_dir) / "hartman.csv").string();
  const std::string manifest = (fs::path(opt.out_dir) / "hartman_manifest.json").string();
  io::write_hartman_csv(scan, csv);
  io::RunStats stats;
  stats.threads = threads;
  stats.command = command_line;
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  io::write_manifest(manifest, cfg, nullptr, &scan, stats, {csv});

  std::printf("stretch      D (a0)        tau_W (fs)\n");
  for (const auto& row : scan.rows) {
    if (row.skipped)
      std::printf("%-8.4g skipped: %s\n", row.stretch, row.note.c_str());
    else
      std::printf("%-8.4g %-13.6f %-12.4f\n", row.stretch, row.arc_length,
                  units::atomic_time_to_fs(row.tau_w));
  }
  const double e_mev = units::hartree_to_mev(scan.e_probe);
  std::printf("fit over %zu rows at E = %g meV: slope = %.6g fs/a0, max residual = %.3g fs\n",
              scan.fitted_rows, e_mev, units::atomic_time_to_fs(scan.fit_slope),
              units::atomic_time_to_fs(scan.fit_max_residual));
  const double expected = std::sqrt(cfg.sweep.m0 / (2.0 * scan.e_probe));
  std::printf("classical slope sqrt(m0/2E) = %.6g fs/a0\n",
              units::atomic_time_to_fs(expected));
  std::printf("wrote %s\nwrote %s\n", csv.c_str(), manifest.c_str());
  return 0;
}

int run_validate_cmd(int threads_flag) {
  const int threads = resolve_threads(threads_flag);
  (void)threads;  // the oracle suite is cheap enough to run serially
  int failures = 0;
  const auto report = [&](bool ok, const char* name, double measured, double bound) {
    std::printf("[%s] %-42s %.3e (bound %.1e)\n", ok ? "PASS" : "FAIL", name, measured, bound);
    if (!ok) ++failures;
  };

  // Ideal wire: full transmission and interface-referenced phase.
  {
    const Chain chain = build_chain(Profile::flat(1000.0), 0.2);
    double worst_t = 0.0, worst_phase = 0.0;
    for (const double e_mev : {1.0, 10.0, 50.0, 100.0}) {
      const double e = units::mev_to_hartree(e_mev);
      const SMatrixPoint pt = solve_smatrix(chain, e);
      worst_t = std::max(worst_t, std::abs(std::norm(pt.s.tl) - 1.0));
      const double expect = wrap_phase(pt.k * chain.length);
      worst_phase = std::max(worst_phase, std::abs(wrap_phase(std::arg(pt.s.tl) - expect)));
    }
    report(worst_t < 1e-10, "flat wire |t|^2 = 1", worst_t, 1e-10);
    report(worst_phase < 1e-9, "flat wire arg t = k L", worst_phase, 1e-9);
  }

  // Single-site impurity against the closed form.
  {
    const double t0 = 1.0 / (2.0 * 0.2 * 0.2);
    Chain chain = build_chain(Profile::flat(200.0 * 0.2), 0.2);
    const double v = 0.3 * t0;
    chain.onsite[chain.n_sites() / 2] += v;
    double worst = 0.0;
    for (const double frac : {0.3, 1.0, 2.5}) {
      const double e = frac * t0;
      const SMatrixPoint pt = solve_smatrix(chain, e);
      const double expect =
          oracle::delta_impurity_transmission(v, t0, pt.k * chain.lattice_constant);
      worst = std::max(worst, std::abs(std::norm(pt.s.tl) - expect));
    }
    report(worst < 1e-6, "delta impurity vs closed form", worst, 1e-6);
  }

  // Seeded random chains: wave matching against the transfer matrix.
  {
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> onsite_jitter(-0.05, 0.05);
    std::uniform_real_distribution<double> hop_jitter(0.85, 1.0);
    std::uniform_real_distribution<double> energy_pick(0.15, 3.85);
    std::uniform_int_distribution<std::size_t> size_pick(20, 200);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      Chain chain;
      chain.lattice_constant = 1.0;
      chain.lead_hopping = 0.5;
      chain.onsite.resize(size_pick(rng));
      chain.hopping.resize(chain.onsite.size() - 1);
      chain.length = static_cast<double>(chain.hopping.size());
      const double t0 = chain.lead_hopping;
      for (auto& v : chain.onsite) v = 2.0 * t0 + onsite_jitter(rng) * t0;
      for (auto& h : chain.hopping) h = t0 * hop_jitter(rng);
      const double e = energy_pick(rng) * t0;
      const SMatrixPoint pt = solve_smatrix(chain, e);
      const auto ref = oracle::transfer_matrix_smatrix(chain, e);
      worst = std::max({worst, std::abs(pt.s.rl - ref.s.rl), std::abs(pt.s.tl - ref.s.tl),
                        std::abs(pt.s.tr - ref.s.tr), std::abs(pt.s.rr - ref.s.rr)});
    }
    report(worst < 1e-8, "wave matching vs transfer matrix (50x)", worst, 1e-8);
  }

  // Rectangular well against the continuum closed form at converged spacing.
  {
    const double depth = units::mev_to_hartree(-20.0);
    double worst = 0.0;
    for (const double e_mev : {5.0, 10.0, 20.0, 30.0}) {
      const double e = units::mev_to_hartree(e_mev);
      const double expect = oracle::analytic_square_well_transmission(e, depth, 200.0);
      const Chain chain = oracle::square_well_chain(1000.0, 0.05, depth, 400.0, 600.0);
      const double t = transmission_reflection(solve_smatrix(chain, e)).first;
      worst = std::max(worst, std::abs(t - expect) / expect);
    }
    report(worst < 1e-3, "square well vs continuum closed form", worst, 1e-3);
  }

  std::printf(failures == 0 ? "validation suite passed\n"
                            : "validation suite FAILED (%d)\n",
              failures);
  return failures;
}

int run_plot_cmd(const std::string& csv_path, const std::string& out_dir) {
  const Spectrum spectrum = io::read_spectrum_csv(csv_path);
  fs::create_directories(out_dir);
  const std::string svg =
      (fs::path(out_dir) / fs::path(csv_path).stem().concat(".svg").string()).string();
  io::emit_plot(spectrum, svg, spectrum.profile_descriptor);
  std::printf("wrote %s\n", svg.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum transport along deformed one-dimensional wires"};
  app.set_version_flag("--version", io::tool_version);
  app.require_subcommand(1);

  CommonOptions spectrum_opt;
  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "transmission / time-delay sweep for one profile");
  add_common(spectrum_cmd, spectrum_opt);

  CommonOptions hartman_opt;
  auto* hartman_cmd =
      app.add_subcommand("hartman", "Wigner delay versus arc length width scan");
  add_common(hartman_cmd, hartman_opt);

  int validate_threads = 1;
  auto* validate_cmd = app.add_subcommand("validate", "run the reference-solver cross checks");
  validate_cmd->add_option("--threads", validate_threads,
                           "worker threads (CURVEWIRE_THREADS overrides)");

  std::string plot_csv, plot_out = ".";
  auto* plot_cmd = app.add_subcommand("plot", "re-render an SVG from a spectrum CSV");
  plot_cmd->add_option("csv", plot_csv, "spectrum CSV produced by the spectrum subcommand")
      ->required();
  plot_cmd->add_option("--out-dir", plot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  std::string command_line;
  for (int i = 0; i < argc; ++i) {
    if (i) command_line += ' ';
    command_line += argv[i];
  }

  try {
    if (spectrum_cmd->parsed()) return run_spectrum_cmd(spectrum_opt, command_line);
    if (hartman_cmd->parsed()) return run_hartman_cmd(hartman_opt, command_line);
    if (validate_cmd->parsed()) return run_validate_cmd(validate_threads);
    if (plot_cmd->parsed()) return run_plot_cmd(plot_csv, plot_out);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
