#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curvewire/observables.hpp"
#include "curvewire/profile.hpp"
#include "curvewire/sweep.hpp"
#include "curvewire/units.hpp"

namespace curvewire::io {

inline constexpr const char* tool_name = "curvewire";
inline constexpr const char* tool_version = "0.1.0";

// ---------------------------------------------------------------------------
// Flat key = value document in TOML syntax (strings, numbers, booleans,
// number arrays, # comments). The configuration schema is flat, so tables
// and nested values are rejected up front with the offending line.
// ---------------------------------------------------------------------------

namespace toml_mini {

struct Value {
  enum class Kind { string, number, boolean, number_array };
  Kind kind = Kind::string;
  std::string str;
  double num = 0.0;
  bool flag = false;
  std::vector<double> array;
  int line = 0;
};

using Table = std::map<std::string, Value>;

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void fail(const std::string& origin, int line, const std::string& what) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
}

inline double parse_number(const std::string& token, const std::string& origin, int line) {
  const std::string t = strip(token);
  if (t.empty()) fail(origin, line, "expected a number");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    fail(origin, line, "malformed number '" + t + "'");
  return v;
}

}  // namespace detail

inline Table parse(const std::string& text, const std::string& origin = "<config>") {
  Table table;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::strip(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[')
      detail::fail(origin, line_no, "tables are not supported; the configuration is flat");
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      detail::fail(origin, line_no, "expected 'key = value'");
    const std::string key = detail::strip(line.substr(0, eq));
    if (key.empty() || key.find_first_not_of(
                           "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") !=
                           std::string::npos)
      detail::fail(origin, line_no, "malformed key '" + key + "'");
    if (table.count(key)) detail::fail(origin, line_no, "duplicate key '" + key + "'");

    std::string rhs = detail::strip(line.substr(eq + 1));
    if (rhs.empty()) detail::fail(origin, line_no, "missing value for key '" + key + "'");

    Value value;
    value.line = line_no;
    if (rhs[0] == '"') {
      const std::size_t close = rhs.find('"', 1);
      if (close == std::string::npos)
        detail::fail(origin, line_no, "unterminated string for key '" + key + "'");
      const std::string tail = detail::strip(rhs.substr(close + 1));
      if (!tail.empty() && tail[0] != '#')
        detail::fail(origin, line_no, "trailing characters after string value");
      value.kind = Value::Kind::string;
      value.str = rhs.substr(1, close - 1);
    } else {
      // Strip a trailing comment outside of strings.
      const std::size_t hash = rhs.find('#');
      if (hash != std::string::npos) rhs = detail::strip(rhs.substr(0, hash));
      if (rhs == "true" || rhs == "false") {
        value.kind = Value::Kind::boolean;
        value.flag = rhs == "true";
      } else if (!rhs.empty() && rhs[0] == '[') {
        if (rhs.back() != ']')
          detail::fail(origin, line_no, "unterminated array for key '" + key + "'");
        value.kind = Value::Kind::number_array;
        std::string body = rhs.substr(1, rhs.size() - 2);
        std::size_t pos = 0;
        while (pos <= body.size()) {
          std::size_t comma = body.find(',', pos);
          if (comma == std::string::npos) comma = body.size();
          const std::string token = detail::strip(body.substr(pos, comma - pos));
          if (!token.empty())
            value.array.push_back(detail::parse_number(token, origin, line_no));
          pos = comma + 1;
        }
        if (value.array.empty())
          detail::fail(origin, line_no, "empty array for key '" + key + "'");
      } else {
        value.kind = Value::Kind::number;
        value.num = detail::parse_number(rhs, origin, line_no);
      }
    }
    table.emplace(key, std::move(value));
  }
  return table;
}

}  // namespace toml_mini

// ---------------------------------------------------------------------------
// Configuration schema
// ---------------------------------------------------------------------------

/// Raw profile parameters as they appear in a configuration file.
struct ProfileSpec {
  std::string kind = "single_gaussian";
  double length = 1000.0;
  double amplitude = 200.0;
  double center = 500.0;
  double width = 1000.0 / (4.0 * std::numbers::pi);
  double shift = 150.0;
  Parity parity = Parity::even;
  std::string samples_file;
  double flatness_tol = Profile::default_flatness_tol;

  Profile make_profile() const {
    if (kind == "flat") return Profile::flat(length);
    if (kind == "single_gaussian")
      return Profile::single_gaussian(length, amplitude, center, width, flatness_tol);
    if (kind == "double_gaussian")
      return Profile::double_gaussian(length, amplitude, center, width, shift, parity,
                                      flatness_tol);
    if (kind == "tabulated") {
      std::ifstream in(samples_file);
      if (!in)
        throw std::runtime_error("cannot open samples_file '" + samples_file + "'");
      std::vector<double> xs, fs;
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        std::string first;
        if (!(row >> first) || first[0] == '#') continue;
        double x = 0.0, f = 0.0;
        try {
          x = std::stod(first);
        } catch (const std::exception&) {
          throw std::runtime_error(samples_file + ":" + std::to_string(line_no) +
                                   ": malformed sample row");
        }
        if (!(row >> f))
          throw std::runtime_error(samples_file + ":" + std::to_string(line_no) +
                                   ": expected two columns (x f)");
        xs.push_back(x);
        fs.push_back(f);
      }
      return Profile::tabulated(xs, fs, flatness_tol);
    }
    throw std::runtime_error("unknown profile kind '" + kind + "'");
  }
};

/// Parsed and validated run configuration: the scientific sweep setup plus
/// the width-scan block.
struct RunConfig {
  ProfileSpec profile;
  SweepConfig sweep;
  std::vector<double> stretch_factors{0.5, 0.75, 1.0, 1.25, 1.5};
  double e_probe = units::mev_to_hartree(50.0);
  StretchMode stretch_mode = StretchMode::shape;
};

namespace config_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class KeyReader {
 public:
  KeyReader(toml_mini::Table table, std::string origin)
      : table_(std::move(table)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return table_.count(key) != 0; }

  std::optional<std::string> take_string(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (v->kind != toml_mini::Value::Kind::string)
      fail(key, *v, "expected a quoted string");
    return v->str;
  }
  std::optional<double> take_number(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (v->kind != toml_mini::Value::Kind::number) fail(key, *v, "expected a number");
    return v->num;
  }
  std::optional<bool> take_bool(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (v->kind != toml_mini::Value::Kind::boolean) fail(key, *v, "expected true or false");
    return v->flag;
  }
  std::optional<std::vector<double>> take_array(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    if (v->kind != toml_mini::Value::Kind::number_array)
      fail(key, *v, "expected an array of numbers");
    return v->array;
  }

  void reject_leftovers() const {
    if (table_.empty()) return;
    std::string msg = "unknown configuration key(s):";
    for (const auto& [key, value] : table_)
      msg += " '" + key + "' (line " + std::to_string(value.line) + ")";
    throw std::runtime_error(origin_ + ": " + msg);
  }

  [[noreturn]] void fail(const std::string& key, const toml_mini::Value& v,
                         const std::string& what) const {
    throw std::runtime_error(origin_ + ":" + std::to_string(v.line) + ": key '" + key +
                             "': " + what);
  }
  [[noreturn]] void fail_validation(const std::string& key, const std::string& what) const {
    throw std::runtime_error(origin_ + ": field '" + key + "': " + what);
  }

 private:
  std::optional<toml_mini::Value> take(const std::string& key) {
    auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    toml_mini::Value v = std::move(it->second);
    table_.erase(it);
    return v;
  }

  toml_mini::Table table_;
  std::string origin_;
};

}  // namespace config_detail

/// Parse a configuration document. Unknown keys, keys that do not apply to
/// the selected profile, and out-of-range values are rejected with the field
/// name and constraint. Omitted keys take the standard defaults
/// (A = 0.2 L, x0 = 0.5 L, sigma = L/4pi, L = 1000 a0, m0 = 1).
inline RunConfig parse_config_text(const std::string& text,
                                   const std::string& origin = "<config>",
                                   const std::string& base_dir = "") {
  config_detail::KeyReader reader(toml_mini::parse(text, origin), origin);

  RunConfig cfg;
  const auto kind = reader.take_string("profile");
  if (!kind)
    throw std::runtime_error(origin +
                             ": missing required key 'profile' "
                             "(one of \"flat\", \"single_gaussian\", \"double_gaussian\", "
                             "\"tabulated\")");
  cfg.profile.kind = *kind;
  const bool is_flat = cfg.profile.kind == "flat";
  const bool is_single = cfg.profile.kind == "single_gaussian";
  const bool is_double = cfg.profile.kind == "double_gaussian";
  const bool is_tab = cfg.profile.kind == "tabulated";
  if (!is_flat && !is_single && !is_double && !is_tab)
    reader.fail_validation("profile", "unknown profile '" + cfg.profile.kind + "'");

  const auto reject_if_present = [&](const char* key, const char* why) {
    if (reader.has(key))
      reader.fail_validation(key, std::string("does not apply: ") + why);
  };

  if (is_tab) {
    reject_if_present("L", "the tabulated domain comes from the samples");
    reject_if_present("A", "tabulated profiles have no Gaussian parameters");
    reject_if_present("x0", "tabulated profiles have no Gaussian parameters");
    reject_if_present("sigma", "tabulated profiles have no Gaussian parameters");
    const auto samples = reader.take_string("samples_file");
    if (!samples) reader.fail_validation("samples_file", "required for tabulated profiles");
    std::filesystem::path p = *samples;
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    cfg.profile.samples_file = p.string();
  } else {
    reject_if_present("samples_file", "only tabulated profiles read samples");
    if (const auto L = reader.take_number("L")) {
      if (!(*L > 0.0)) reader.fail_validation("L", "must be > 0");
      cfg.profile.length = *L;
    }
    cfg.profile.amplitude = 0.2 * cfg.profile.length;
    cfg.profile.center = 0.5 * cfg.profile.length;
    cfg.profile.width = cfg.profile.length / (4.0 * std::numbers::pi);
    cfg.profile.shift = 0.15 * cfg.profile.length;
  }
  if (is_flat || is_tab) {
    reject_if_present("A", "profile has no Gaussian parameters");
    reject_if_present("x0", "profile has no Gaussian parameters");
    reject_if_present("sigma", "profile has no Gaussian parameters");
  }
  if (!is_double) {
    reject_if_present("s", "only double_gaussian has a dent shift");
    reject_if_present("parity", "only double_gaussian has a parity");
  }
  if (is_single || is_double) {
    if (const auto v = reader.take_number("A")) cfg.profile.amplitude = *v;
    if (const auto v = reader.take_number("x0")) cfg.profile.center = *v;
    if (const auto v = reader.take_number("sigma")) {
      if (!(*v > 0.0)) reader.fail_validation("sigma", "must be > 0");
      cfg.profile.width = *v;
    }
  }
  if (is_double) {
    if (const auto v = reader.take_number("s")) {
      if (!(*v > 0.0)) reader.fail_validation("s", "must be > 0");
      cfg.profile.shift = *v;
    }
    if (const auto v = reader.take_string("parity")) {
      if (*v == "even")
        cfg.profile.parity = Parity::even;
      else if (*v == "odd")
        cfg.profile.parity = Parity::odd;
      else
        reader.fail_validation("parity", "must be \"even\" or \"odd\"");
    }
  }
  if (const auto v = reader.take_number("flatness_tol")) {
    if (!(*v > 0.0)) reader.fail_validation("flatness_tol", "must be > 0");
    cfg.profile.flatness_tol = *v;
  }

  double e_min_mev = 0.5, e_max_mev = 120.0;
  if (const auto v = reader.take_number("e_min_meV")) e_min_mev = *v;
  if (const auto v = reader.take_number("e_max_meV")) e_max_mev = *v;
  if (!(e_min_mev > 0.0)) reader.fail_validation("e_min_meV", "must be > 0");
  if (!(e_max_mev > e_min_mev)) reader.fail_validation("e_max_meV", "must be > e_min_meV");
  cfg.sweep.e_min = units::mev_to_hartree(e_min_mev);
  cfg.sweep.e_max = units::mev_to_hartree(e_max_mev);

  if (const auto v = reader.take_number("n_energies")) {
    if (!(*v >= 2.0) || *v != std::floor(*v))
      reader.fail_validation("n_energies", "must be an integer >= 2");
    cfg.sweep.n_energies = static_cast<int>(*v);
  }
  if (const auto v = reader.take_string("grid")) {
    if (*v == "log")
      cfg.sweep.scale = GridScale::log_spaced;
    else if (*v == "linear")
      cfg.sweep.scale = GridScale::linear;
    else
      reader.fail_validation("grid", "must be \"log\" or \"linear\"");
  }
  if (const auto v = reader.take_number("lattice_constant")) {
    if (!(*v > 0.0)) reader.fail_validation("lattice_constant", "must be > 0");
    cfg.sweep.lattice_constant = *v;
  }
  if (const auto v = reader.take_bool("auto_converge")) cfg.sweep.auto_converge = *v;
  if (const auto v = reader.take_number("dE_rel")) {
    if (!(*v > 0.0)) reader.fail_validation("dE_rel", "must be > 0");
    cfg.sweep.delay_de_rel = *v;
  }
  if (const auto v = reader.take_number("dE_floor_meV")) {
    if (!(*v > 0.0)) reader.fail_validation("dE_floor_meV", "must be > 0");
    cfg.sweep.delay_de_floor = units::mev_to_hartree(*v);
  }
  if (const auto v = reader.take_number("phase_floor_meV")) {
    if (!(*v > 0.0)) reader.fail_validation("phase_floor_meV", "must be > 0");
    cfg.sweep.limits.phase_jump_floor = units::mev_to_hartree(*v);
  }
  if (const auto v = reader.take_number("max_resolution_halvings")) {
    if (!(*v >= 0.0) || *v != std::floor(*v))
      reader.fail_validation("max_resolution_halvings", "must be a non-negative integer");
    cfg.sweep.limits.max_resolution_halvings = static_cast<int>(*v);
  }
  if (const auto v = reader.take_number("max_delay_halvings")) {
    if (!(*v >= 1.0) || *v != std::floor(*v))
      reader.fail_validation("max_delay_halvings", "must be a positive integer");
    cfg.sweep.limits.max_delay_halvings = static_cast<int>(*v);
  }
  if (const auto v = reader.take_number("max_phase_insertions")) {
    if (!(*v >= 0.0) || *v != std::floor(*v))
      reader.fail_validation("max_phase_insertions", "must be a non-negative integer");
    cfg.sweep.limits.max_phase_insertions = static_cast<std::size_t>(*v);
  }
  if (const auto v = reader.take_number("m0")) {
    if (!(*v > 0.0)) reader.fail_validation("m0", "must be > 0");
    cfg.sweep.m0 = *v;
  }
  if (const auto v = reader.take_number("e_probe_meV")) {
    if (!(*v > 0.0)) reader.fail_validation("e_probe_meV", "must be > 0");
    cfg.e_probe = units::mev_to_hartree(*v);
  }
  if (const auto v = reader.take_array("stretch_factors")) {
    for (const double s : *v)
      if (!(s > 0.0)) reader.fail_validation("stretch_factors", "entries must be > 0");
    cfg.stretch_factors = *v;
  }
  if (const auto v = reader.take_string("stretch_mode")) {
    if (*v == "shape")
      cfg.stretch_mode = StretchMode::shape;
    else if (*v == "sigma_only")
      cfg.stretch_mode = StretchMode::width_only;
    else
      reader.fail_validation("stretch_mode", "must be \"shape\" or \"sigma_only\"");
  }

  reader.reject_leftovers();
  cfg.sweep.profile = cfg.profile.make_profile();
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path,
                           std::filesystem::path(path).parent_path().string());
}

/// Canonical echo of a configuration; parsing the result reproduces the
/// same RunConfig.
inline std::string render_config(const RunConfig& cfg) {
  using config_detail::fmt;
  std::string out;
  out += "profile = \"" + cfg.profile.kind + "\"\n";
  const bool is_tab = cfg.profile.kind == "tabulated";
  const bool gaussian =
      cfg.profile.kind == "single_gaussian" || cfg.profile.kind == "double_gaussian";
  if (is_tab) {
    out += "samples_file = \"" + cfg.profile.samples_file + "\"\n";
  } else {
    out += "L = " + fmt(cfg.profile.length) + "\n";
  }
  if (gaussian) {
    out += "A = " + fmt(cfg.profile.amplitude) + "\n";
    out += "x0 = " + fmt(cfg.profile.center) + "\n";
    out += "sigma = " + fmt(cfg.profile.width) + "\n";
  }
  if (cfg.profile.kind == "double_gaussian") {
    out += "s = " + fmt(cfg.profile.shift) + "\n";
    out += std::string("parity = \"") +
           (cfg.profile.parity == Parity::even ? "even" : "odd") + "\"\n";
  }
  out += "flatness_tol = " + fmt(cfg.profile.flatness_tol) + "\n";
  out += "e_min_meV = " + fmt(units::hartree_to_mev(cfg.sweep.e_min)) + "\n";
  out += "e_max_meV = " + fmt(units::hartree_to_mev(cfg.sweep.e_max)) + "\n";
  out += "n_energies = " + std::to_string(cfg.sweep.n_energies) + "\n";
  out += std::string("grid = \"") +
         (cfg.sweep.scale == GridScale::log_spaced ? "log" : "linear") + "\"\n";
  if (cfg.sweep.lattice_constant > 0.0)
    out += "lattice_constant = " + fmt(cfg.sweep.lattice_constant) + "\n";
  out += std::string("auto_converge = ") + (cfg.sweep.auto_converge ? "true" : "false") + "\n";
  out += "dE_rel = " + fmt(cfg.sweep.delay_de_rel) + "\n";
  out += "dE_floor_meV = " + fmt(units::hartree_to_mev(cfg.sweep.delay_de_floor)) + "\n";
  if (cfg.sweep.limits.phase_jump_floor > 0.0)
    out += "phase_floor_meV = " + fmt(units::hartree_to_mev(cfg.sweep.limits.phase_jump_floor)) +
           "\n";
  out += "max_resolution_halvings = " +
         std::to_string(cfg.sweep.limits.max_resolution_halvings) + "\n";
  out += "max_delay_halvings = " + std::to_string(cfg.sweep.limits.max_delay_halvings) + "\n";
  out += "max_phase_insertions = " +
         std::to_string(cfg.sweep.limits.max_phase_insertions) + "\n";
  out += "m0 = " + fmt(cfg.sweep.m0) + "\n";
  out += "e_probe_meV = " + fmt(units::hartree_to_mev(cfg.e_probe)) + "\n";
  out += "stretch_factors = [";
  for (std::size_t i = 0; i < cfg.stretch_factors.size(); ++i)
    out += (i ? ", " : "") + fmt(cfg.stretch_factors[i]);
  out += "]\n";
  out += std::string("stretch_mode = \"") +
         (cfg.stretch_mode == StretchMode::shape ? "shape" : "sigma_only") + "\"\n";
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* spectrum_csv_header =
    "E_meV,T,R,phase_F_rad,tau_W_fs,tau_C_fs,flag";

namespace csv_detail {

inline std::string cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.11e", v);
  return buf;
}

}  // namespace csv_detail

/// One row per energy, 12 significant digits, LF line endings, fixed header.
inline void write_spectrum_csv(const Spectrum& spectrum, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << spectrum_csv_header << "\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    out << csv_detail::cell(units::hartree_to_mev(spectrum.energy[i])) << ','
        << csv_detail::cell(spectrum.transmission[i]) << ','
        << csv_detail::cell(spectrum.reflection[i]) << ','
        << csv_detail::cell(spectrum.friedel[i]) << ','
        << csv_detail::cell(units::atomic_time_to_fs(spectrum.wigner[i])) << ','
        << csv_detail::cell(units::atomic_time_to_fs(spectrum.classical[i])) << ','
        << spectrum.flags[i] << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open spectrum CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != spectrum_csv_header)
    throw std::runtime_error(path + ": unexpected header '" + line + "'");
  Spectrum s;
  s.profile_descriptor = "(restored from " + path + ")";
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double e, t, r, phase, tw, tc;
    int flag;
    if (!(row >> e >> t >> r >> phase >> tw >> tc >> flag))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
    s.energy.push_back(units::mev_to_hartree(e));
    s.transmission.push_back(t);
    s.reflection.push_back(r);
    s.friedel.push_back(phase);
    s.wigner.push_back(units::fs_to_atomic_time(tw));
    s.classical.push_back(units::fs_to_atomic_time(tc));
    s.flags.push_back(flag);
  }
  return s;
}

inline void write_hartman_csv(const HartmanScan& scan, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "stretch,D_a0,tau_W_fs,flag\n";
  for (const auto& row : scan.rows) {
    const int flag = row.skipped ? 2 : (row.delay_converged ? 0 : 1);
    out << csv_detail::cell(row.stretch) << ',' << csv_detail::cell(row.arc_length) << ','
        << csv_detail::cell(units::atomic_time_to_fs(row.tau_w)) << ',' << flag << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

struct RunStats {
  double wall_seconds = 0.0;
  int threads = 1;
  std::string command;
};

inline nlohmann::json manifest_json(const RunConfig& cfg, const Spectrum* spectrum,
                                    const HartmanScan* scan, const RunStats& stats,
                                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["tool"] = {{"name", tool_name}, {"version", tool_version}};
  j["units"] = {{"length", "bohr"},
                {"energy_output", "meV"},
                {"time_output", "fs"},
                {"hartree_in_mev", units::hartree_in_mev},
                {"atomic_time_in_fs", units::atomic_time_in_fs}};
  j["config_text"] = render_config(cfg);
  j["run"] = {{"command", stats.command},
              {"threads", stats.threads},
              {"wall_seconds", stats.wall_seconds}};
  if (spectrum) {
    nlohmann::json flagged = nlohmann::json::array();
    for (std::size_t i = 0; i < spectrum->size(); ++i)
      if (spectrum->flags[i] != flag_ok)
        flagged.push_back({{"index", i},
                           {"E_meV", units::hartree_to_mev(spectrum->energy[i])},
                           {"flag", spectrum->flags[i]}});
    j["spectrum"] = {{"profile", spectrum->profile_descriptor},
                     {"lattice_constant_a0", spectrum->lattice_constant},
                     {"arc_length_a0", spectrum->arc_length},
                     {"n_points", spectrum->size()},
                     {"resolution_converged", spectrum->resolution_converged},
                     {"flagged_points", flagged}};
  }
  if (scan) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : scan->rows)
      rows.push_back({{"stretch", row.stretch},
                      {"D_a0", row.arc_length},
                      {"tau_W_fs", units::atomic_time_to_fs(row.tau_w)},
                      {"skipped", row.skipped},
                      {"note", row.note}});
    j["hartman"] = {{"e_probe_meV", units::hartree_to_mev(scan->e_probe)},
                    {"rows", rows},
                    {"fit_slope_fs_per_a0",
                     units::atomic_time_to_fs(scan->fit_slope)},
                    {"fit_intercept_fs", units::atomic_time_to_fs(scan->fit_intercept)},
                    {"fit_max_residual_fs",
                     units::atomic_time_to_fs(scan->fit_max_residual)},
                    {"fitted_rows", scan->fitted_rows}};
  }
  j["outputs"] = outputs;
  return j;
}

inline void write_manifest(const std::string& path, const RunConfig& cfg,
                           const Spectrum* spectrum, const HartmanScan* scan,
                           const RunStats& stats, const std::vector<std::string>& outputs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << manifest_json(cfg, spectrum, scan, stats, outputs).dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// SVG plot: T on the left axis, Wigner delay (solid) and classical delay
// (dashed) on the right axis.
// ---------------------------------------------------------------------------

namespace svg_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.8g", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;          // data ranges
  double px0, px1, py0, py1;      // pixel corners (py0 is the top)
  double sx(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
  double sy(double y) const { return py1 - (y - y0) / (y1 - y0) * (py1 - py0); }
};

inline std::string polyline_path(const std::vector<double>& xs, const std::vector<double>& ys,
                                 const Frame& fx, const Frame& fy) {
  std::string d;
  bool pen_down = false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(ys[i])) {
      pen_down = false;
      continue;
    }
    d += pen_down ? " L " : " M ";
    d += num(fx.sx(xs[i])) + " " + num(fy.sy(ys[i]));
    pen_down = true;
  }
  return d;
}

}  // namespace svg_detail

inline void emit_plot(const Spectrum& spectrum, const std::string& path,
                      const std::string& title = "") {
  if (spectrum.size() < 2) throw std::invalid_argument("emit_plot: spectrum too small");
  const double w = 960, h = 520, ml = 72, mr = 84, mt = 46, mb = 58;

  std::vector<double> e_mev(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    e_mev[i] = units::hartree_to_mev(spectrum.energy[i]);
  std::vector<double> tw_fs(spectrum.size()), tc_fs(spectrum.size());
  double tau_max = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    tw_fs[i] = units::atomic_time_to_fs(spectrum.wigner[i]);
    tc_fs[i] = units::atomic_time_to_fs(spectrum.classical[i]);
    if (std::isfinite(tw_fs[i])) tau_max = std::max(tau_max, tw_fs[i]);
    tau_max = std::max(tau_max, tc_fs[i]);
  }
  if (tau_max <= 0.0) tau_max = 1.0;

  svg_detail::Frame fx{e_mev.front(), e_mev.back(), 0, 0, ml, w - mr, mt, h - mb};
  svg_detail::Frame fT = fx;
  fT.y0 = 0.0;
  fT.y1 = 1.05;
  svg_detail::Frame fTau = fx;
  fTau.y0 = 0.0;
  fTau.y1 = 1.05 * tau_max;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "  <rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  if (!title.empty())
    out << "  <text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // frame
  out << "  <rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (w - ml - mr)
      << "\" height=\"" << (h - mt - mb)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const int n_ticks = 6;
  for (int i = 0; i < n_ticks; ++i) {
    const double frac = static_cast<double>(i) / (n_ticks - 1);
    const double ex = fx.x0 + frac * (fx.x1 - fx.x0);
    const double px = fx.sx(ex);
    out << "  <line x1=\"" << px << "\" y1=\"" << (h - mb) << "\" x2=\"" << px << "\" y2=\""
        << (h - mb + 5) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << px << "\" y=\"" << (h - mb + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << svg_detail::num(ex) << "</text>\n";
    const double ty = fT.y0 + frac * (fT.y1 - fT.y0);
    const double py = fT.sy(ty);
    out << "  <line x1=\"" << (ml - 5) << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\""
        << py << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << (ml - 9) << "\" y=\"" << (py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << svg_detail::num(ty) << "</text>\n";
    const double uy = fTau.y0 + frac * (fTau.y1 - fTau.y0);
    const double pu = fTau.sy(uy);
    out << "  <line x1=\"" << (w - mr) << "\" y1=\"" << pu << "\" x2=\"" << (w - mr + 5)
        << "\" y2=\"" << pu << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << (w - mr + 9) << "\" y=\"" << (pu + 4)
        << "\" text-anchor=\"start\" font-family=\"sans-serif\" font-size=\"12\">"
        << svg_detail::num(uy) << "</text>\n";
  }
  out << "  <text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << (h - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">E (meV)"
      << "</text>\n";
  out << "  <text x=\"20\" y=\"" << (mt + (h - mt - mb) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
      << "transform=\"rotate(-90 20 " << (mt + (h - mt - mb) / 2) << ")\">T</text>\n";
  out << "  <text x=\"" << (w - 16) << "\" y=\"" << (mt + (h - mt - mb) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
      << "transform=\"rotate(90 " << (w - 16) << " " << (mt + (h - mt - mb) / 2)
      << ")\">tau (fs)</text>\n";

  out << "  <path d=\"" << svg_detail::polyline_path(e_mev, spectrum.transmission, fx, fT)
      << "\" fill=\"none\" stroke=\"#1f4fd8\" stroke-width=\"1.6\"/>\n";
  out << "  <path d=\"" << svg_detail::polyline_path(e_mev, tw_fs, fx, fTau)
      << "\" fill=\"none\" stroke=\"#d82f2f\" stroke-width=\"1.6\"/>\n";
  out << "  <path d=\"" << svg_detail::polyline_path(e_mev, tc_fs, fx, fTau)
      << "\" fill=\"none\" stroke=\"#e08a1e\" stroke-width=\"1.6\" "
      << "stroke-dasharray=\"7 5\"/>\n";

  const double lx = ml + 14;
  const char* labels[3] = {"T (left axis)", "tau_W (right axis)", "tau_C (right axis)"};
  const char* colors[3] = {"#1f4fd8", "#d82f2f", "#e08a1e"};
  for (int i = 0; i < 3; ++i) {
    const double ly = mt + 16 + 18 * i;
    out << "  <line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << (lx + 28) << "\" y2=\""
        << ly << "\" stroke=\"" << colors[i] << "\" stroke-width=\"2\""
        << (i == 2 ? " stroke-dasharray=\"7 5\"" : "") << "/>\n";
    out << "  <text x=\"" << (lx + 34) << "\" y=\"" << (ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << labels[i] << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace curvewire::io
