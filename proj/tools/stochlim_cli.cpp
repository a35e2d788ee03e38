// stochlim: batch driver for the verification suites.
//
//   stochlim <expansion|coeffs|model|fock|all> [--config FILE] [--out DIR] [--json] [--tol X]
//   stochlim richardson --csv FILE --powers 2,4,6 [--out DIR]
//
// Exit codes: 0 pass, 1 verdict failure, 2 configuration error, 3 numerical accuracy error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "stochlim/stochlim.hpp"

using namespace stochlim;
using io::Json;

namespace {

struct Outcome {
  Json json;
  bool pass = true;
  std::vector<std::pair<std::string, std::string>> csv;  // file name, content
};

struct Session {
  io::RunConfig cfg;
  std::string out_dir;
  bool json = false;
};

GaussPolySum cfg_gauss(double width, double center) { return GaussPoly::gaussian(width, center); }

CoeffOptions coeff_opts(const io::RunConfig& c) {
  CoeffOptions o;
  o.tol = c.tol_quad;
  return o;
}

Json fit_json(const SlopeFit& f) { return Json{{"slope", f.slope}, {"halfwidth", f.halfwidth}, {"points", f.points}}; }

std::string report_csv(const ExpansionReport& r) {
  io::CsvTable t({"lambda", "integral_re", "integral_im", "expansion_re", "expansion_im", "residual"});
  for (std::size_t i = 0; i < r.lambdas.size(); ++i)
    t.add_row({r.lambdas[i], r.integrals[i].real(), r.integrals[i].imag(), r.sums[i].real(), r.sums[i].imag(),
               r.residuals[i]});
  return t.str();
}

// ---------------------------------------------------------------------------

Outcome run_expansion(const io::RunConfig& c) {
  Outcome o;
  const LambdaGrid grid(c.expansion_lambda);
  OscOptions opt;
  opt.tol = c.tol_quad;
  const auto f = cfg_gauss(c.f_width, c.f_center);
  const auto phi = cfg_gauss(c.phi_width, c.phi_center);
  const int N = c.expansion_order;
  Json runs = Json::array();
  auto want = [&](const char* th) { return c.expansion_theorem == "all" || c.expansion_theorem == th; };

  if (want("fullline")) {
    const auto rep = pair_report(f, phi, N, grid, opt);
    const double lo = 2 * N + 1.7, hi = 2 * N + 2.3;
    const bool ok = rep.fit.slope >= lo && rep.fit.slope <= hi;
    o.pass = o.pass && ok;
    runs.push_back(Json{{"theorem", "fullline"}, {"order", N}, {"fit", fit_json(rep.fit)},
                        {"threshold", Json::array({lo, hi})}, {"pass", ok}});
    o.csv.emplace_back("expansion_fullline.csv", report_csv(rep));
  }
  if (want("simplex")) {
    const PiecewiseC1 pw({{phi, c.simplex_cutoff}});
    const auto rep = simplex_report(f, pw, c.simplex_a, grid, opt);
    bool ok;
    double threshold;
    if (c.simplex_a > c.simplex_cutoff) {
      threshold = 1.8;
      bool zeros = true;
      for (auto s : rep.sums) zeros = zeros && s == Complex{};
      ok = zeros && rep.fit.slope >= threshold;
    } else {
      threshold = 2.5;
      ok = rep.fit.slope >= threshold;
    }
    o.pass = o.pass && ok;
    runs.push_back(Json{{"theorem", "simplex"}, {"a", c.simplex_a}, {"cutoff", c.simplex_cutoff},
                        {"fit", fit_json(rep.fit)}, {"threshold", threshold}, {"pass", ok}});
    o.csv.emplace_back("expansion_simplex.csv", report_csv(rep));
  }
  if (want("halfline")) {
    if (c.expansion_theorem == "halfline" && N > 1)
      throw Error(ErrorKind::config, "expansion.order: the half-line expansion supports orders 0 and 1");
    const int Nh = std::min(N, 1);
    const auto rep = halfline_report(f, phi, Nh, grid, opt);
    const double threshold = 2 * Nh + 1.5;
    const bool ok = rep.fit.slope >= threshold;
    o.pass = o.pass && ok;
    runs.push_back(Json{{"theorem", "halfline"}, {"order", Nh}, {"fit", fit_json(rep.fit)},
                        {"threshold", threshold}, {"pass", ok}});
    o.csv.emplace_back("expansion_halfline.csv", report_csv(rep));
  }
  o.json = Json{{"command", "expansion"}, {"runs", runs}, {"pass", o.pass}};
  return o;
}

Outcome run_coeffs(const io::RunConfig& c) {
  Outcome o;
  const auto rho = io::make_profile(c.profile);
  const auto opt = coeff_opts(c);
  Json gaps = Json::array();
  Json causal = Json::object(), full = Json::object();
  for (int n = 0; n <= 1; ++n) {
    const auto r = cross_validate_gamma(rho, c.omega0, n, opt);
    const double rel = r.gap / (1.0 + std::abs(r.route1));
    const bool ok = rel <= c.tol_gap;
    o.pass = o.pass && ok;
    causal["gamma" + std::to_string(n)] = io::to_json(r.route1);
    gaps.push_back(Json{{"n", n}, {"plemelj", io::to_json(r.route1)}, {"damped", io::to_json(r.route2)},
                        {"relative_gap", rel}, {"pass", ok}});
  }
  for (int n = 0; n <= 2; ++n) full["gamma_tilde" + std::to_string(n)] = io::to_json(gamma_full(rho, c.omega0, n));
  o.json = Json{{"command", "coeffs"},  {"omega0", c.omega0},      {"profile", c.profile.kind},
                {"causal", causal},     {"full_line", full},       {"cross_validation", gaps},
                {"tolerance", c.tol_gap}, {"pass", o.pass}};
  return o;
}

Json model_linear(const io::RunConfig& c, Outcome& o) {
  const auto rho = io::make_profile(c.profile);
  const auto m = SystemModel::linear(Complex{c.linear_d[0], c.linear_d[1]}, c.omega0, rho);
  const auto opt = coeff_opts(c);
  const double d2 = std::norm(m.D()(0, 0));
  io::CsvTable t({"lambda", "t", "abc_re", "abc_im", "cumulant_re", "cumulant_im", "truncated_re", "truncated_im",
                  "relative_gap"});
  Json rows = Json::array();
  bool pass = true;
  for (double l : c.model_lambda)
    for (double tt : c.model_t) {
      const auto abc = linear_abc(m, l, tt, opt);
      const Complex cum = cumulant_oracle(m, l, tt);
      const double gap = std::abs(abc.full - cum) / std::abs(cum);
      const bool ok = gap <= c.tol_gap;
      pass = pass && ok;
      const Complex e0 = std::exp(-abc.gamma0 * tt * d2);
      Matrix o0(1, 1), o2(1, 1);
      o0(0, 0) = e0;
      o2(0, 0) = e0 * abc.gamma1 * d2;
      rows.push_back(Json{{"model", "linear"},
                          {"t", tt},
                          {"lambda", l},
                          {"order0", io::matrix_json(o0)},
                          {"order2", io::matrix_json(o2)},
                          {"exact", io::to_json(abc.full)},
                          {"oracle_gap", gap},
                          {"pass", ok}});
      t.add_row({l, tt, abc.full.real(), abc.full.imag(), cum.real(), cum.imag(), abc.truncated.real(),
                 abc.truncated.imag(), gap});
    }
  o.pass = o.pass && pass;
  o.csv.emplace_back("model_linear.csv", t.str());
  return rows;
}

Json model_rwa(const io::RunConfig& c, Outcome& o) {
  const auto rho = io::make_profile(c.profile);
  const int n = c.rwa_dim;
  Matrix D(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const std::size_t idx = static_cast<std::size_t>(2 * (i * n + k));
      D(i, k) = Complex{c.rwa_d[idx], c.rwa_d[idx + 1]};
    }
  const auto m = SystemModel::rwa_matrix(D, c.omega0, rho);
  const auto opt = coeff_opts(c);
  const Complex g0 = gamma_causal(rho, c.omega0, 0, opt), g1 = gamma_causal(rho, c.omega0, 1, opt);
  Matrix d1(1, 1);
  d1(0, 0) = Complex{c.linear_d[0], c.linear_d[1]};
  const double d2 = std::norm(d1(0, 0));
  Json rows = Json::array();
  bool pass = true;
  for (double l : c.model_lambda)
    for (double tt : c.model_t) {
      const auto v = rwa_matrix_vacuum(D, g0, g1, l, tt, c.tol_series);
      const Matrix order0 = u0_vacuum(D, g0, tt).value;
      const Matrix order2 = (v.value - order0) / (l * l);
      // scalar reduction to the truncated linear form
      const Complex scalar = rwa_matrix_vacuum(d1, g0, g1, l, tt, c.tol_series).value(0, 0);
      const Complex expect = std::exp(-g0 * tt * d2) * (1.0 + l * l * g1 * d2);
      const double gap = std::abs(scalar - expect) / std::max(1.0, std::abs(expect));
      const bool ok = gap <= 1e-10;
      pass = pass && ok;
      rows.push_back(Json{{"model", "rwa_matrix"},
                          {"t", tt},
                          {"lambda", l},
                          {"order0", io::matrix_json(order0)},
                          {"order2", io::matrix_json(order2)},
                          {"series_terms", v.terms},
                          {"truncation_bound", v.truncation_bound},
                          {"oracle_gap", gap},
                          {"pass", ok}});
    }
  (void)m;
  o.pass = o.pass && pass;
  return rows;
}

Json model_spinboson(const io::RunConfig& c, Outcome& o) {
  const auto rho = io::make_profile(c.spinboson_profile);
  const auto sb = spinboson_constants(rho, c.spinboson_delta, coeff_opts(c));
  Json rows = Json::array();
  bool pass = true;
  io::CsvTable t({"t", "ode_closed_gap", "closed_form_residual"});
  std::vector<double> times = c.model_t;
  times.push_back(c.ode_t_end);
  for (double tt : times) {
    const Matrix closed = spinboson_correction_closed(sb, tt).value;
    const double ode_gap = (spinboson_correction_ode(sb, tt, c.ode_step).value - closed).cwiseAbs().maxCoeff();
    const double resid =
        (spinboson_correction_closed_derivative(sb, tt) - spinboson_correction_rhs(sb, tt, closed)).cwiseAbs().maxCoeff();
    const bool ok = ode_gap <= 1e-8 && resid <= 1e-12 * (1.0 + closed.cwiseAbs().maxCoeff());
    pass = pass && ok;
    t.add_row({tt, ode_gap, resid});
    for (double l : c.model_lambda) {
      rows.push_back(Json{{"model", "spin_boson"},
                          {"t", tt},
                          {"lambda", l},
                          {"order0", io::matrix_json(spinboson_u0(sb, tt).value)},
                          {"order2", io::matrix_json(closed)},
                          {"vacuum", io::matrix_json(spinboson_vacuum(sb, l, tt).value)},
                          {"oracle_gap", ode_gap},
                          {"residual", resid},
                          {"pass", ok}});
    }
  }
  Json constants = Json::object();
  for (int l = 0; l < 2; ++l) {
    const std::string s = std::to_string(l + 1);
    constants["A" + s] = io::to_json(sb.A[static_cast<std::size_t>(l)]);
    constants["B" + s] = io::to_json(sb.B[static_cast<std::size_t>(l)]);
    constants["C" + s] = io::to_json(sb.C[static_cast<std::size_t>(l)]);
  }
  o.pass = o.pass && pass;
  o.csv.emplace_back("model_spinboson.csv", t.str());
  return Json{{"delta", c.spinboson_delta}, {"constants", constants}, {"rows", rows}};
}

Outcome run_model(const io::RunConfig& c) {
  Outcome o;
  Json j{{"command", "model"}};
  const auto& k = c.model_kind;
  if (k == "linear" || k == "all") j["linear"] = model_linear(c, o);
  if (k == "rwa_matrix" || k == "all") j["rwa_matrix"] = model_rwa(c, o);
  if (k == "spin_boson" || k == "all") j["spin_boson"] = model_spinboson(c, o);
  j["pass"] = o.pass;
  o.json = j;
  return o;
}

Outcome run_fock(const io::RunConfig& c) {
  Outcome o;
  const OneParticleGrid grid(c.fock_extent, c.fock_points);
  auto space = std::make_shared<const FockSpace>(grid, c.fock_levels);
  std::mt19937 rng(static_cast<std::mt19937::result_type>(c.fock_seed));
  std::normal_distribution<double> nd(0.0, 1.0);
  auto vec = [&] {
    std::vector<Complex> a;
    for (int j = 0; j < grid.size(); ++j) {
      const double re = nd(rng);
      a.emplace_back(re, nd(rng));
    }
    return OneParticleVector(grid, a);
  };
  auto fock = [&](int top) {
    FockVector v(space);
    for (int n = 0; n <= top; ++n)
      for (auto& z : v.level(n)) {
        const double re = nd(rng);
        z = Complex{re, nd(rng)};
      }
    return v;
  };
  double ccr = 0.0, adj = 0.0;
  bool eta_ok = true;
  for (int d = 0; d < c.fock_draws; ++d) {
    const auto f = vec();
    const auto g = vec();
    const auto phi = fock(c.fock_levels - 1);
    const auto psi = fock(c.fock_levels - 1);
    eta_ok = eta_ok && eta_apply(eta_apply(f)).amplitudes() == f.amplitudes();
    const double nf = std::sqrt(hilbert_inner(f, f).real()), ng = std::sqrt(hilbert_inner(g, g).real());
    ccr = std::max(ccr, ccr_defect(f, g, phi) / ((std::abs(indefinite_inner(f, g)) + nf * ng) * hilbert_norm(phi)));
    adj = std::max(adj, adjoint_defect(f, phi, psi) / (nf * hilbert_norm(phi) * hilbert_norm(psi)));
  }
  const GaussPolySum u = GaussPoly::gaussian(1.0), v = GaussPoly({0.0, 1.0}, 1.0);
  const auto wp = OneParticleVector::from_time_domain(u + v.scaled(I), grid);
  const auto wm = OneParticleVector::from_time_domain(v + u.scaled(I), grid);
  const Complex plus = indefinite_inner(wp, wp), minus = indefinite_inner(wm, wm);
  const double target = std::sqrt(pi / 2.0);
  const bool wit_ok = std::abs(plus - target) <= 1e-6 && std::abs(minus + target) <= 1e-6;
  o.pass = eta_ok && wit_ok && ccr <= c.tol_defect && adj <= c.tol_defect;
  o.json = Json{{"command", "fock"},
                {"grid", Json{{"extent", c.fock_extent}, {"points", c.fock_points}, {"levels", c.fock_levels}}},
                {"draws", c.fock_draws},
                {"ccr_defect_max", ccr},
                {"adjoint_defect_max", adj},
                {"eta_squared_identity", eta_ok},
                {"witness_plus", io::to_json(plus)},
                {"witness_minus", io::to_json(minus)},
                {"witness_target", target},
                {"tolerance", c.tol_defect},
                {"pass", o.pass}};
  return o;
}

// ---------------------------------------------------------------------------

void emit(const Session& s, const std::string& name, const Outcome& o) {
  if (!s.out_dir.empty()) {
    std::filesystem::create_directories(s.out_dir);
    io::write_file(s.out_dir + "/" + name + ".json", io::dump_json(o.json));
    for (const auto& [file, content] : o.csv) io::write_file(s.out_dir + "/" + file, content);
  }
  if (s.json)
    std::cout << io::dump_json(o.json);
  else
    std::cout << name << ": " << (o.pass ? "PASS" : "FAIL") << "\n";
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::config:
    case ErrorKind::unsupported_input:
    case ErrorKind::capability: return 2;
    default: return 3;
  }
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int richardson_command(const std::string& csv, const std::string& powers_text, const Session& s) {
  std::ifstream in(csv);
  if (!in) throw Error(ErrorKind::config, "cannot read CSV file: " + csv);
  std::string line;
  std::getline(in, line);  // header: lambda,re,im
  std::vector<double> ls;
  std::vector<Complex> vs;
  while (std::getline(in, line)) {
    if (io::detail::trim(line).empty()) continue;
    const auto cols = io::detail::to_list("csv", line);
    if (cols.size() < 2) throw Error(ErrorKind::config, "csv: expected lambda,re[,im] rows");
    ls.push_back(cols[0]);
    vs.emplace_back(cols[1], cols.size() > 2 ? cols[2] : 0.0);
  }
  std::vector<int> powers;
  for (double p : io::detail::to_list("--powers", powers_text)) powers.push_back(static_cast<int>(p));
  const auto fit = oracle::richardson_extract(ls, vs, powers);
  Json coef = Json::array();
  for (std::size_t i = 0; i < powers.size(); ++i)
    coef.push_back(Json{{"power", powers[i]}, {"value", io::to_json(fit.coefficients[i])}});
  Outcome o;
  o.json = Json{{"command", "richardson"},
                {"coefficients", coef},
                {"residual", fit.residual},
                {"condition", fit.condition},
                {"pass", true}};
  emit(s, "richardson", o);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-limit verification driver"};
  app.require_subcommand(1);
  std::string config_path, out_dir, csv_path, powers = "2,4,6";
  bool json = false;
  double tol = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (key = value)");
    sub->add_option("--out", out_dir, "directory for JSON/CSV output");
    sub->add_flag("--json", json, "print JSON to stdout");
    sub->add_option("--tol", tol, "override tol.gap");
  };
  auto* expansion = app.add_subcommand("expansion", "oscillatory-integral expansion rates");
  auto* coeffs = app.add_subcommand("coeffs", "noise coefficients and route cross-validation");
  auto* model = app.add_subcommand("model", "vacuum expectations of the models");
  auto* fock = app.add_subcommand("fock", "indefinite-metric Fock space checks");
  auto* all = app.add_subcommand("all", "every suite");
  for (auto* sub : {expansion, coeffs, model, fock, all}) add_common(sub);
  auto* rich = app.add_subcommand("richardson", "extract power coefficients from lambda,re,im CSV");
  rich->add_option("--csv", csv_path, "input CSV")->required();
  rich->add_option("--powers", powers, "comma-separated powers");
  rich->add_option("--out", out_dir, "directory for JSON output");
  rich->add_flag("--json", json, "print JSON to stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  return guarded([&]() -> int {
    Session s;
    if (!config_path.empty()) s.cfg = io::load(config_path);
    if (tol < 0.0) throw Error(ErrorKind::config, "--tol must be positive");
    if (tol > 0.0) s.cfg.tol_gap = tol;
    s.out_dir = out_dir;
    s.json = json;

    if (rich->parsed()) return richardson_command(csv_path, powers, s);

    bool pass = true;
    auto run = [&](const char* name, Outcome (*fn)(const io::RunConfig&)) {
      const Outcome o = fn(s.cfg);
      emit(s, name, o);
      pass = pass && o.pass;
    };
    if (expansion->parsed()) run("expansion", run_expansion);
    if (coeffs->parsed()) run("coeffs", run_coeffs);
    if (model->parsed()) run("model", run_model);
    if (fock->parsed()) run("fock", run_fock);
    if (all->parsed()) {
      run("expansion", run_expansion);
      run("coeffs", run_coeffs);
      run("model", run_model);
      run("fock", run_fock);
      if (!s.out_dir.empty()) io::write_file(s.out_dir + "/config.cfg", io::serialize(s.cfg));
    }
    return pass ? 0 : 1;
  });
}
