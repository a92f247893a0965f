#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "curvewire/io.hpp"

using namespace curvewire;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("curvewire_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int counter() {
    static int n = 0;
    return n++;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Spectrum tiny_spectrum() {
  SweepConfig cfg;
  cfg.profile = Profile::flat(1000.0);
  cfg.e_min = units::mev_to_hartree(1.0);
  cfg.e_max = units::mev_to_hartree(50.0);
  cfg.n_energies = 12;
  return run_spectrum(cfg, 2);
}

}  // namespace

TEST_CASE("minimal config takes the standard defaults") {
  const io::RunConfig cfg = io::parse_config_text("profile = \"single_gaussian\"\n");
  REQUIRE(cfg.profile.kind == "single_gaussian");
  REQUIRE(cfg.profile.length == Approx(1000.0));
  REQUIRE(cfg.profile.amplitude == Approx(0.2 * 1000.0));
  REQUIRE(cfg.profile.center == Approx(0.5 * 1000.0));
  REQUIRE(cfg.profile.width == Approx(1000.0 / (4.0 * std::numbers::pi)).epsilon(1e-14));
  REQUIRE(cfg.sweep.m0 == 1.0);
  REQUIRE(cfg.sweep.n_energies == 600);
  REQUIRE(cfg.sweep.scale == GridScale::log_spaced);
  REQUIRE(units::hartree_to_mev(cfg.sweep.e_min) == Approx(0.5));
  REQUIRE(units::hartree_to_mev(cfg.sweep.e_max) == Approx(120.0));
  REQUIRE(cfg.sweep.profile.descriptor() == cfg.sweep.profile.descriptor());
  REQUIRE(cfg.stretch_factors == std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5});
  REQUIRE(units::hartree_to_mev(cfg.e_probe) == Approx(50.0));
}

TEST_CASE("empty config names the missing required key") {
  REQUIRE_THROWS_WITH(io::parse_config_text(""), ContainsSubstring("profile"));
  REQUIRE_THROWS_WITH(io::parse_config_text("# only a comment\n"),
                      ContainsSubstring("required"));
}

TEST_CASE("double-Gaussian config with odd parity") {
  const io::RunConfig cfg = io::parse_config_text(
      "profile = \"double_gaussian\"\n"
      "s = 150.0\n"
      "parity = \"odd\"\n");
  REQUIRE(cfg.profile.shift == Approx(150.0));
  REQUIRE(cfg.profile.parity == Parity::odd);
  // The built profile is the difference of the two dents.
  const auto p = cfg.sweep.profile.eval(350.0);
  REQUIRE(p.f == Approx(200.0).epsilon(1e-3));
  const auto q = cfg.sweep.profile.eval(650.0);
  REQUIRE(q.f == Approx(-200.0).epsilon(1e-3));
}

TEST_CASE("config errors carry line numbers and field names") {
  REQUIRE_THROWS_WITH(io::parse_config_text("profile = \"single_gaussian\"\nsigma = -4\n"),
                      ContainsSubstring("sigma"));
  REQUIRE_THROWS_WITH(io::parse_config_text("profile = \"single_gaussian\"\nsigma = oops\n"),
                      ContainsSubstring(":2:"));
  REQUIRE_THROWS_WITH(
      io::parse_config_text("profile = \"single_gaussian\"\nn_energies = 1\n"),
      ContainsSubstring("n_energies"));
  REQUIRE_THROWS_WITH(io::parse_config_text("profile = \"flat\"\nwhatever = 3\n"),
                      ContainsSubstring("whatever"));
  REQUIRE_THROWS_WITH(io::parse_config_text("profile = \"flat\"\nsigma = 10\n"),
                      ContainsSubstring("does not apply"));
  REQUIRE_THROWS_WITH(io::parse_config_text("profile = \"flat\"\n[table]\n"),
                      ContainsSubstring(":2:"));
  REQUIRE_THROWS_WITH(io::parse_config_text("profile = \"nope\"\n"),
                      ContainsSubstring("unknown profile"));
  REQUIRE_THROWS_WITH(io::parse_config_text("profile = \"flat\"\nprofile = \"flat\"\n"),
                      ContainsSubstring("duplicate"));
}

TEST_CASE("config round trip reproduces itself exactly") {
  const std::string source =
      "profile = \"double_gaussian\"\n"
      "L = 1000\n"
      "A = 180.5\n"
      "sigma = 70.25\n"
      "s = 210\n"
      "parity = \"even\"\n"
      "e_min_meV = 0.75\n"
      "e_max_meV = 90\n"
      "n_energies = 321\n"
      "grid = \"linear\"\n"
      "lattice_constant = 0.25\n"
      "auto_converge = true\n"
      "m0 = 1.5\n"
      "e_probe_meV = 42\n"
      "stretch_factors = [0.5, 1.0, 2.0]\n"
      "stretch_mode = \"sigma_only\"\n";
  const io::RunConfig cfg = io::parse_config_text(source);
  const std::string rendered = io::render_config(cfg);
  const io::RunConfig cfg2 = io::parse_config_text(rendered);
  REQUIRE(io::render_config(cfg2) == rendered);
  REQUIRE(cfg2.profile.amplitude == cfg.profile.amplitude);
  REQUIRE(cfg2.profile.width == cfg.profile.width);
  REQUIRE(cfg2.sweep.n_energies == cfg.sweep.n_energies);
  REQUIRE(cfg2.sweep.lattice_constant == cfg.sweep.lattice_constant);
  REQUIRE(cfg2.sweep.auto_converge == cfg.sweep.auto_converge);
  REQUIRE(cfg2.stretch_mode == StretchMode::width_only);
  REQUIRE(cfg2.stretch_factors == cfg.stretch_factors);
}

TEST_CASE("tabulated config reads a samples file") {
  TempDir dir;
  {
    std::ofstream samples(dir.file("wire.dat"));
    samples << "# x f\n";
    for (int i = 0; i <= 200; ++i) samples << i * 5.0 << " " << 0.0 << "\n";
  }
  const std::string config = "profile = \"tabulated\"\nsamples_file = \"wire.dat\"\n";
  const io::RunConfig cfg = io::parse_config_text(config, "<t>", dir.path.string());
  REQUIRE(cfg.sweep.profile.is_flat());
  REQUIRE(cfg.sweep.profile.length() == Approx(1000.0));

  REQUIRE_THROWS_WITH(io::parse_config_text("profile = \"tabulated\"\n"),
                      ContainsSubstring("samples_file"));
  REQUIRE_THROWS_WITH(
      io::parse_config_text("profile = \"tabulated\"\nsamples_file = \"wire.dat\"\nL = 5\n",
                            "<t>", dir.path.string()),
      ContainsSubstring("L"));
}

TEST_CASE("spectrum CSV: exact header, LF endings, re-read fidelity, determinism") {
  TempDir dir;
  const Spectrum spec = tiny_spectrum();
  const std::string path = dir.file("spectrum.csv");
  io::write_spectrum_csv(spec, path);

  const std::string text = slurp(path);
  REQUIRE(text.rfind("E_meV,T,R,phase_F_rad,tau_W_fs,tau_C_fs,flag\n", 0) == 0);
  REQUIRE(text.find('\r') == std::string::npos);
  const std::size_t rows = static_cast<std::size_t>(
      std::count(text.begin(), text.end(), '\n'));
  REQUIRE(rows == spec.size() + 1);

  const Spectrum back = io::read_spectrum_csv(path);
  REQUIRE(back.size() == spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    REQUIRE(back.energy[i] == Approx(spec.energy[i]).epsilon(1e-10));
    REQUIRE(back.transmission[i] == Approx(spec.transmission[i]).margin(1e-10));
    REQUIRE(back.wigner[i] == Approx(spec.wigner[i]).epsilon(1e-10));
    REQUIRE(back.friedel[i] == Approx(spec.friedel[i]).epsilon(1e-10));
    REQUIRE(back.flags[i] == spec.flags[i]);
  }

  io::write_spectrum_csv(spec, dir.file("again.csv"));
  REQUIRE(slurp(dir.file("again.csv")) == text);

  REQUIRE_THROWS_AS(io::read_spectrum_csv(dir.file("missing.csv")), std::runtime_error);
  {
    std::ofstream bad(dir.file("bad.csv"));
    bad << "nope\n";
  }
  REQUIRE_THROWS_WITH(io::read_spectrum_csv(dir.file("bad.csv")),
                      ContainsSubstring("header"));
}

TEST_CASE("manifest embeds the config echo and the run record") {
  TempDir dir;
  const io::RunConfig cfg = io::parse_config_text("profile = \"flat\"\nn_energies = 12\n"
                                                  "e_min_meV = 1\ne_max_meV = 50\n");
  Spectrum spec = run_spectrum(cfg.sweep, 1);
  io::RunStats stats;
  stats.threads = 3;
  stats.wall_seconds = 1.25;
  stats.command = "curvewire spectrum --config demo.toml";
  const std::string path = dir.file("manifest.json");
  io::write_manifest(path, cfg, &spec, nullptr, stats, {"spectrum.csv"});

  const auto j = nlohmann::json::parse(slurp(path));
  REQUIRE(j["tool"]["name"] == "curvewire");
  REQUIRE(j["units"]["hartree_in_mev"] == Approx(27211.386));
  REQUIRE(j["run"]["threads"] == 3);
  REQUIRE(j["spectrum"]["n_points"] == spec.size());
  REQUIRE(j["spectrum"]["lattice_constant_a0"] == Approx(spec.lattice_constant));
  // The embedded config text parses back to the same configuration.
  const io::RunConfig echoed =
      io::parse_config_text(j["config_text"].get<std::string>());
  REQUIRE(io::render_config(echoed) == io::render_config(cfg));
}

TEST_CASE("SVG plot is well-formed XML with one root and three curves") {
  TempDir dir;
  const Spectrum spec = tiny_spectrum();
  const std::string path = dir.file("plot.svg");
  io::emit_plot(spec, path, "flat test wire");
  const std::string text = slurp(path);

  REQUIRE(text.rfind("<?xml", 0) == 0);
  // Exactly one root element.
  std::size_t svg_open = 0, svg_close = 0, pos = 0;
  while ((pos = text.find("<svg", pos)) != std::string::npos) { ++svg_open; pos += 4; }
  pos = 0;
  while ((pos = text.find("</svg>", pos)) != std::string::npos) { ++svg_close; pos += 6; }
  REQUIRE(svg_open == 1);
  REQUIRE(svg_close == 1);

  // Minimal well-formedness: every tag closes (self-closing or matched).
  int depth = 0;
  pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const std::size_t end = text.find('>', pos);
    REQUIRE(end != std::string::npos);
    const std::string tag = text.substr(pos, end - pos + 1);
    if (tag.rfind("<?", 0) == 0) {
    } else if (tag.rfind("</", 0) == 0) {
      --depth;
    } else if (tag.back() == '>' && tag[tag.size() - 2] == '/') {
    } else {
      ++depth;
    }
    REQUIRE(depth >= 0);
    pos = end + 1;
  }
  REQUIRE(depth == 0);

  REQUIRE(std::count(text.begin(), text.end(), '\n') > 10);
  std::size_t paths = 0;
  pos = 0;
  while ((pos = text.find("<path", pos)) != std::string::npos) { ++paths; pos += 5; }
  REQUIRE(paths == 3);
  REQUIRE_THAT(text, ContainsSubstring("E (meV)"));
  REQUIRE_THAT(text, ContainsSubstring("tau (fs)"));

  // The flat wire draws a horizontal T = 1 line: its path keeps one y value.
  const std::size_t t_path = text.find("<path d=\"");
  const std::size_t t_end = text.find('"', t_path + 9);
  const std::string d = text.substr(t_path + 9, t_end - t_path - 9);
  std::vector<double> ys;
  std::istringstream ds(d);
  std::string tok;
  bool want_y = false;
  while (ds >> tok) {
    if (tok == "M" || tok == "L") { want_y = false; continue; }
    if (!want_y) { want_y = true; continue; }
    ys.push_back(std::stod(tok));
    want_y = false;
  }
  REQUIRE(ys.size() >= 12);
  for (const double y : ys) REQUIRE(y == Approx(ys.front()).margin(1e-6));
}

TEST_CASE("hartman CSV lists one row per stretch with flags") {
  TempDir dir;
  const Profile dent = Profile::single_gaussian(1000.0, 200.0, 500.0,
                                                1000.0 / (4.0 * std::numbers::pi));
  SweepConfig numerics;
  const double stretches[] = {1.0, 6.0};
  const HartmanScan scan =
      hartman_scan(dent, stretches, units::mev_to_hartree(50.0), numerics);
  const std::string path = dir.file("hartman.csv");
  io::write_hartman_csv(scan, path);
  const std::string text = slurp(path);
  REQUIRE(text.rfind("stretch,D_a0,tau_W_fs,flag\n", 0) == 0);
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 3);
  REQUIRE(text.find(",2\n") != std::string::npos);  // skipped row flag
}
