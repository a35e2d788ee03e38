#pragma once

// Flat key = value run configuration.
//
//   # comment
//   profile.kind = synthetic
//   expansion.lambda = 0.3, 0.2, 0.15
//
// Keys are dotted; every key has a default (see RunConfig) and unknown keys
// are rejected. serialize() writes every key so parse(serialize(c)) == c.

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/funcspace/spectral_profile.hpp"

namespace stochlim::io {

struct ProfileSpec {
  std::string kind = "synthetic";  // synthetic | massless | massive | polynomial
  std::vector<double> coeffs{1.0};  // polynomial factor, powers of the variable
  double width = 1.0;
  double center = 2.0;
  int dimension = 3;
  double mass = 0.5;
  std::vector<double> dispersion{0.0, 1.0, 0.5};
  bool half_line = false;
  double support_min = -std::numeric_limits<double>::infinity();

  bool operator==(const ProfileSpec&) const = default;
};

struct RunConfig {
  ProfileSpec profile{};
  ProfileSpec spinboson_profile{"massless", {1.0}, 0.5, 0.0, 3, 0.5, {0.0, 1.0, 0.5}, false,
                                -std::numeric_limits<double>::infinity()};
  double spinboson_delta = 1.2;

  std::string model_kind = "all";  // linear | rwa_matrix | spin_boson | all
  double omega0 = 2.0;
  std::vector<double> linear_d{0.6, -0.2};  // re, im
  int rwa_dim = 2;
  std::vector<double> rwa_d{0.4, 0.1, 0.2, 0.0, -0.3, 0.2, 0.5, -0.1};  // row-major re, im pairs
  std::vector<double> model_lambda{0.3, 0.2, 0.1};
  std::vector<double> model_t{0.5, 1.0, 2.0};
  double ode_step = 1e-3;
  double ode_t_end = 5.0;

  std::string expansion_theorem = "all";  // fullline | simplex | halfline | all
  int expansion_order = 1;
  std::vector<double> expansion_lambda{0.3, 0.2, 0.15, 0.1, 0.07, 0.05};
  double f_width = 1.0, f_center = 0.3;
  double phi_width = 1.0, phi_center = 0.2;
  double simplex_a = 1.0;
  double simplex_cutoff = 2.0;

  double fock_extent = 8.0;
  int fock_points = 64;
  int fock_levels = 3;
  int fock_draws = 50;
  int fock_seed = 7;

  double tol_quad = 1e-12;
  double tol_gap = 1e-6;
  double tol_series = 1e-15;
  double tol_defect = 1e-10;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) throw Error(ErrorKind::config, key + ": not a number: '" + v + "'");
  return x;
}

inline int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw Error(ErrorKind::config, key + ": not an integer: '" + v + "'");
  return static_cast<int>(x);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true") return true;
  if (t == "false") return false;
  throw Error(ErrorKind::config, key + ": expected true or false");
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw Error(ErrorKind::config, key + ": empty list");
  return out;
}

inline std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);  // shortest round-trip form
}

inline std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s;
}

inline std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  const std::string t = trim(v);
  for (const char* a : allowed)
    if (t == a) return t;
  std::string msg = key + ": unknown value '" + t + "' (expected one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw Error(ErrorKind::config, msg + ")");
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline void add_profile_fields(std::vector<Field>& f, const std::string& p, ProfileSpec RunConfig::*m) {
  f.push_back({p + ".kind",
               [=](RunConfig& c, const std::string& v) {
                 (c.*m).kind = one_of(p + ".kind", v, {"synthetic", "massless", "massive", "polynomial"});
               },
               [=](const RunConfig& c) { return (c.*m).kind; }});
  f.push_back({p + ".coeffs", [=](RunConfig& c, const std::string& v) { (c.*m).coeffs = to_list(p + ".coeffs", v); },
               [=](const RunConfig& c) { return list((c.*m).coeffs); }});
  f.push_back({p + ".width", [=](RunConfig& c, const std::string& v) { (c.*m).width = to_double(p + ".width", v); },
               [=](const RunConfig& c) { return num((c.*m).width); }});
  f.push_back({p + ".center", [=](RunConfig& c, const std::string& v) { (c.*m).center = to_double(p + ".center", v); },
               [=](const RunConfig& c) { return num((c.*m).center); }});
  f.push_back({p + ".dimension",
               [=](RunConfig& c, const std::string& v) { (c.*m).dimension = to_int(p + ".dimension", v); },
               [=](const RunConfig& c) { return std::to_string((c.*m).dimension); }});
  f.push_back({p + ".mass", [=](RunConfig& c, const std::string& v) { (c.*m).mass = to_double(p + ".mass", v); },
               [=](const RunConfig& c) { return num((c.*m).mass); }});
  f.push_back({p + ".dispersion",
               [=](RunConfig& c, const std::string& v) { (c.*m).dispersion = to_list(p + ".dispersion", v); },
               [=](const RunConfig& c) { return list((c.*m).dispersion); }});
  f.push_back({p + ".half_line",
               [=](RunConfig& c, const std::string& v) { (c.*m).half_line = to_bool(p + ".half_line", v); },
               [=](const RunConfig& c) { return std::string((c.*m).half_line ? "true" : "false"); }});
  f.push_back({p + ".support_min",
               [=](RunConfig& c, const std::string& v) { (c.*m).support_min = to_double(p + ".support_min", v); },
               [=](const RunConfig& c) { return num((c.*m).support_min); }});
}

template <class T>
Field scalar(const std::string& key, T RunConfig::*m) {
  if constexpr (std::is_same_v<T, double>) {
    return {key, [=](RunConfig& c, const std::string& v) { c.*m = to_double(key, v); },
            [=](const RunConfig& c) { return num(c.*m); }};
  } else if constexpr (std::is_same_v<T, int>) {
    return {key, [=](RunConfig& c, const std::string& v) { c.*m = to_int(key, v); },
            [=](const RunConfig& c) { return std::to_string(c.*m); }};
  } else {
    return {key, [=](RunConfig& c, const std::string& v) { c.*m = to_list(key, v); },
            [=](const RunConfig& c) { return list(c.*m); }};
  }
}

inline const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    add_profile_fields(v, "profile", &RunConfig::profile);
    add_profile_fields(v, "spinboson.profile", &RunConfig::spinboson_profile);
    v.push_back(scalar("spinboson.delta", &RunConfig::spinboson_delta));
    v.push_back({"model.kind",
                 [](RunConfig& c, const std::string& s) {
                   c.model_kind = one_of("model.kind", s, {"linear", "rwa_matrix", "spin_boson", "all"});
                 },
                 [](const RunConfig& c) { return c.model_kind; }});
    v.push_back(scalar("model.omega0", &RunConfig::omega0));
    v.push_back(scalar("model.linear_d", &RunConfig::linear_d));
    v.push_back(scalar("model.rwa_dim", &RunConfig::rwa_dim));
    v.push_back(scalar("model.rwa_d", &RunConfig::rwa_d));
    v.push_back(scalar("model.lambda", &RunConfig::model_lambda));
    v.push_back(scalar("model.t", &RunConfig::model_t));
    v.push_back(scalar("model.ode_step", &RunConfig::ode_step));
    v.push_back(scalar("model.ode_t_end", &RunConfig::ode_t_end));
    v.push_back({"expansion.theorem",
                 [](RunConfig& c, const std::string& s) {
                   c.expansion_theorem = one_of("expansion.theorem", s, {"fullline", "simplex", "halfline", "all"});
                 },
                 [](const RunConfig& c) { return c.expansion_theorem; }});
    v.push_back(scalar("expansion.order", &RunConfig::expansion_order));
    v.push_back(scalar("expansion.lambda", &RunConfig::expansion_lambda));
    v.push_back(scalar("expansion.f.width", &RunConfig::f_width));
    v.push_back(scalar("expansion.f.center", &RunConfig::f_center));
    v.push_back(scalar("expansion.phi.width", &RunConfig::phi_width));
    v.push_back(scalar("expansion.phi.center", &RunConfig::phi_center));
    v.push_back(scalar("expansion.simplex.a", &RunConfig::simplex_a));
    v.push_back(scalar("expansion.simplex.cutoff", &RunConfig::simplex_cutoff));
    v.push_back(scalar("fock.extent", &RunConfig::fock_extent));
    v.push_back(scalar("fock.points", &RunConfig::fock_points));
    v.push_back(scalar("fock.levels", &RunConfig::fock_levels));
    v.push_back(scalar("fock.draws", &RunConfig::fock_draws));
    v.push_back(scalar("fock.seed", &RunConfig::fock_seed));
    v.push_back(scalar("tol.quad", &RunConfig::tol_quad));
    v.push_back(scalar("tol.gap", &RunConfig::tol_gap));
    v.push_back(scalar("tol.series", &RunConfig::tol_series));
    v.push_back(scalar("tol.defect", &RunConfig::tol_defect));
    return v;
  }();
  return f;
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  auto positive = [](const char* key, double x) {
    if (!(x > 0.0)) throw Error(ErrorKind::config, std::string(key) + ": must be positive");
  };
  positive("tol.quad", c.tol_quad);
  positive("tol.gap", c.tol_gap);
  positive("tol.series", c.tol_series);
  positive("tol.defect", c.tol_defect);
  positive("model.ode_step", c.ode_step);
  positive("fock.extent", c.fock_extent);
  if (c.linear_d.size() != 2) throw Error(ErrorKind::config, "model.linear_d: expected re, im");
  if (c.rwa_dim < 1 || c.rwa_d.size() != static_cast<std::size_t>(2 * c.rwa_dim * c.rwa_dim))
    throw Error(ErrorKind::config, "model.rwa_d: expected 2 * rwa_dim^2 numbers");
  if (c.expansion_order < 0 || c.expansion_order > 2)
    throw Error(ErrorKind::config, "expansion.order: must be 0, 1 or 2");
  if (c.fock_points < 2 || c.fock_points % 2) throw Error(ErrorKind::config, "fock.points: must be even");
  if (c.fock_levels < 2) throw Error(ErrorKind::config, "fock.levels: must be >= 2");
  if (c.fock_draws < 1) throw Error(ErrorKind::config, "fock.draws: must be >= 1");
  for (double t : c.model_t)
    if (t < 0.0) throw Error(ErrorKind::config, "model.t: times must be >= 0");
}

inline RunConfig parse(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::config, fmt::format("line {}: expected key = value", lineno));
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    bool found = false;
    for (const auto& f : detail::fields())
      if (f.key == key) {
        f.set(c, value);
        found = true;
        break;
      }
    if (!found) throw Error(ErrorKind::config, "unknown key: " + key);
  }
  validate(c);
  return c;
}

inline std::string serialize(const RunConfig& c) {
  std::string out;
  for (const auto& f : detail::fields()) out += f.key + " = " + f.get(c) + "\n";
  return out;
}

inline RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline SpectralProfile make_profile(const ProfileSpec& p) {
  std::vector<Complex> q(p.coeffs.begin(), p.coeffs.end());
  if (p.kind == "synthetic")
    return SpectralProfile::synthetic(GaussPoly::from_power(q, p.width, p.center), p.support_min);
  Dispersion d;
  if (p.kind == "massless") {
    d.kind = DispersionKind::massless;
  } else if (p.kind == "massive") {
    d.kind = DispersionKind::massive;
    d.mass = p.mass;
  } else {
    d.kind = DispersionKind::polynomial;
    d.poly_coeffs = p.dispersion;
  }
  return radial_reduce(d, GaussPoly::from_power(q, p.width, p.center), p.dimension, p.half_line);
}

}  // namespace stochlim::io
