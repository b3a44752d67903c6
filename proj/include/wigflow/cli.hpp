/**
 *  @file   cli.hpp
 *  @brief  Command-line front end: field sweeps, stability reports, orbits
 *          and fluxes.
 *
 *  Exit codes: 0 success, 1 usage error, 2 numeric failure.
 */
#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wigflow/currents.hpp"
#include "wigflow/error.hpp"
#include "wigflow/export.hpp"
#include "wigflow/flux.hpp"
#include "wigflow/hamiltonian.hpp"
#include "wigflow/quantifiers.hpp"
#include "wigflow/stability.hpp"
#include "wigflow/wigner.hpp"

namespace wigflow::cli {

/// Parses `1.5`, `pi`, `-pi`, `2pi`, `pi/2`, `-3*pi/4`.
inline double parse_scalar(std::string s) {
  auto fail = [&] { throw Error(ErrorKind::invalid_param, "cannot parse number '" + s + "'"); };
  std::string t;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  }
  if (t.empty()) fail();
  const auto pos = t.find("pi");
  if (pos == std::string::npos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (...) {
      fail();
    }
    if (used != t.size()) fail();
    return v;
  }
  std::string head = t.substr(0, pos);
  std::string tail = t.substr(pos + 2);
  double sign = 1.0;
  if (!head.empty() && (head[0] == '-' || head[0] == '+')) {
    sign = head[0] == '-' ? -1.0 : 1.0;
    head.erase(0, 1);
  }
  if (!head.empty() && head.back() == '*') head.pop_back();
  double mult = head.empty() ? 1.0 : parse_scalar(head);
  double div = 1.0;
  if (!tail.empty()) {
    if (tail[0] != '/') fail();
    div = parse_scalar(tail.substr(1));
    if (div == 0.0) fail();
  }
  return sign * mult * std::numbers::pi / div;
}

struct Interval {
  double lo = -std::numbers::pi;
  double hi = std::numbers::pi;
};

inline Interval parse_interval(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::invalid_param, "expected a:b, got '" + s + "'");
  return {parse_scalar(s.substr(0, colon)), parse_scalar(s.substr(colon + 1))};
}

inline PhasePoint parse_point(const std::string& s) {
  const Interval iv = parse_interval(s);
  return {iv.lo, iv.hi};
}

struct RunConfig {
  std::string command;

  std::string model = "harper";
  double nu2 = 1.0;
  double gamma = 0.25;
  std::string center = "0:0";
  std::string psi_path;  // wavefunction file; empty = Gaussian ensemble

  std::size_t grid = 256;
  std::string range = "-pi:pi";
  std::string x_range;  // override for x
  std::string k_range;  // override for k

  int eta_max = 20;
  double term_tol = 1e-14;
  bool truncate = false;
  std::string backend = "series";

  std::string quantity = "divw";
  double theta = 0.0;

  std::size_t resolution = 64;

  double epsilon = 1.5;
  std::string start = "auto";
  double dt = 1e-3;
  std::size_t max_steps = 200000;

  std::string kind = "all";
  double beta = 2.0;

  std::string format = "csv";
  std::string out;  // empty = standard output
};

namespace detail {

inline HamiltonianModel build_model(const RunConfig& c) {
  if (c.model == "harper") return HamiltonianModel::harper(c.nu2);
  if (c.model == "ho") return HamiltonianModel::harmonic();
  throw Error(ErrorKind::invalid_param, "unknown model '" + c.model + "'");
}

inline PhaseGrid build_grid(const RunConfig& c) {
  const Interval base = parse_interval(c.range);
  const Interval xr = c.x_range.empty() ? base : parse_interval(c.x_range);
  const Interval kr = c.k_range.empty() ? base : parse_interval(c.k_range);
  return PhaseGrid(xr.lo, xr.hi, kr.lo, kr.hi, c.grid, c.grid);
}

inline WignerState build_state(const RunConfig& c, const PhaseGrid& grid) {
  if (!c.psi_path.empty()) return wigner_transform(load_wavefunction(c.psi_path), grid);
  return GaussianEnsemble(c.gamma, parse_point(c.center));
}

inline SeriesConfig build_series(const RunConfig& c) {
  SeriesConfig s;
  s.eta_max = c.eta_max;
  s.term_tol = c.term_tol;
  s.require_convergence = !c.truncate;
  s.validate();
  return s;
}

inline CurrentBackend build_backend(const RunConfig& c) {
  if (c.backend == "series") return CurrentBackend::series;
  if (c.backend == "closed") return CurrentBackend::closed_form;
  if (c.backend == "classical") return CurrentBackend::classical;
  throw Error(ErrorKind::invalid_param, "unknown backend '" + c.backend + "'");
}

inline Quantity build_quantity(const std::string& q) {
  if (q == "divj") return Quantity::div_j;
  if (q == "divw") return Quantity::div_w;
  if (q == "curl") return Quantity::curl;
  if (q == "sigma") return Quantity::sigma;
  if (q == "inv") return Quantity::inv;
  throw Error(ErrorKind::invalid_param, "unknown quantity '" + q + "'");
}

inline ExportFormat build_format(const std::string& f) {
  if (f == "csv") return ExportFormat::csv;
  if (f == "pgm") return ExportFormat::pgm;
  if (f == "json") return ExportFormat::json;
  throw Error(ErrorKind::invalid_param, "unknown format '" + f + "'");
}

/// Writes through `fallback` when no path is given.
template <class Writer>
void emit(const RunConfig& c, std::ostream& fallback, Writer&& write) {
  if (c.out.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw Error(ErrorKind::io, "cannot open " + c.out + " for writing");
  write(file);
  if (!file) throw Error(ErrorKind::io, "write failed for " + c.out);
}

/// Quantifier field where the velocity comes from the closed form; the
/// Jacobian is then taken by central differences of w.
inline QuantifierField closed_form_field(Quantity q, const PhaseGrid& grid, const HamiltonianModel& model,
                                         const GaussianEnsemble& g, RotationAngle theta) {
  const VelocityField field = rotate_field(closed_velocity_field(model, g), theta);
  QuantifierField f{grid, q, std::vector<double>(grid.size(), 0.0), std::vector<bool>(grid.size(), false)};
  std::vector<char> mask(grid.size(), 0);
  parallel_rows(grid.nk(), [&](std::size_t j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const double x = grid.x(i), k = grid.k(j);
      std::optional<double> v;
      if (q == Quantity::div_j) {
        const double h = jacobian_step;
        v = (current_gaussian_closed(model, g, x + h, k).jx - current_gaussian_closed(model, g, x - h, k).jx +
             current_gaussian_closed(model, g, x, k + h).jk - current_gaussian_closed(model, g, x, k - h).jk) /
            (2.0 * h);
      } else {
        const Jacobian2 jac = jacobian_at(field, {x, k});
        switch (q) {
          case Quantity::div_w: v = jac.trace(); break;
          case Quantity::curl: v = jac.curl(); break;
          case Quantity::sigma: v = sigma_from(jac.curl(), laplacian_h(model, x, k)); break;
          case Quantity::inv: v = jac.invariant(); break;
          case Quantity::div_j: break;
        }
      }
      const std::size_t idx = grid.index(i, j);
      if (v && std::isfinite(*v)) {
        f.values[idx] = *v;
      } else {
        f.values[idx] = std::numeric_limits<double>::quiet_NaN();
        mask[idx] = 1;
      }
    }
  });
  for (std::size_t i = 0; i < mask.size(); ++i) f.mask[i] = mask[i] != 0;
  return f;
}

inline int run_field(const RunConfig& c, std::ostream& out) {
  const HamiltonianModel model = build_model(c);
  const PhaseGrid grid = build_grid(c);
  const WignerState state = build_state(c, grid);
  const Quantity q = build_quantity(c.quantity);
  const ExportFormat format = build_format(c.format);
  const CurrentBackend backend = build_backend(c);
  QuantifierField field = [&] {
    if (backend == CurrentBackend::closed_form) {
      const auto* g = std::get_if<GaussianEnsemble>(&state);
      if (!g) throw Error(ErrorKind::unsupported_model, "closed form needs a Gaussian state");
      return closed_form_field(q, grid, model, *g, {c.theta});
    }
    FieldOptions opt;
    opt.series = build_series(c);
    opt.theta = {c.theta};
    opt.classical = backend == CurrentBackend::classical;
    return evaluate_field(q, grid, model, state, opt);
  }();
  emit(c, out, [&](std::ostream& os) { write_field(os, field, format); });
  return 0;
}

inline int run_stability(const RunConfig& c, std::ostream& out) {
  const HamiltonianModel model = build_model(c);
  const PhaseGrid grid = build_grid(c);
  const WignerState state = build_state(c, grid);
  const VelocityField field = make_velocity_field(build_backend(c), model, state, build_series(c));
  SearchRegion region;
  region.x_min = grid.x_min();
  region.x_max = grid.x_max();
  region.k_min = grid.k_min();
  region.k_max = grid.k_max();
  region.resolution = c.resolution;
  const EquilibriumSearch search = find_equilibria(field, region);
  nlohmann::json reports = nlohmann::json::array();
  for (const PhasePoint& p : search.points) reports.push_back(report_to_json(make_report(p, jacobian_at(field, p))));
  emit(c, out, [&](std::ostream& os) { os << reports.dump(2) << '\n'; });
  return 0;
}

inline PhasePoint orbit_start(const RunConfig& c) {
  if (c.start != "auto") return parse_point(c.start);
  if (c.model == "harper") return harper_orbit_start({c.nu2, c.epsilon});
  if (!(c.epsilon > 0.0)) throw Error(ErrorKind::invalid_param, "ho orbits need epsilon > 0");
  return {std::sqrt(2.0 * c.epsilon), 0.0};
}

inline OrbitOptions orbit_options(const RunConfig& c) {
  OrbitOptions o;
  o.dt = c.dt;
  o.max_steps = c.max_steps;
  return o;
}

inline int run_orbit(const RunConfig& c, std::ostream& out) {
  const HamiltonianModel model = build_model(c);
  const PhasePoint start = orbit_start(c);
  nlohmann::json doc;
  doc["start"] = {start.x, start.k};
  doc["energy"] = model(start.x, start.k);
  if (c.model == "harper") doc["classification"] = to_string(classify_harper_orbit({c.nu2, model(start.x, start.k)}));
  doc["orbit"] = orbit_to_json(integrate_orbit(model, start, orbit_options(c)));
  emit(c, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return 0;
}

inline int run_flux(const RunConfig& c, std::ostream& out) {
  const HamiltonianModel model = build_model(c);
  const PhaseGrid grid = build_grid(c);
  const WignerState state = build_state(c, grid);
  const SeriesConfig series = build_series(c);
  const CurrentBackend backend = build_backend(c);
  const OrbitPath orbit = integrate_orbit(model, orbit_start(c), orbit_options(c));

  static const std::set<std::string> kinds{"all", "probability", "purity", "vn", "renyi"};
  if (!kinds.count(c.kind)) throw Error(ErrorKind::invalid_param, "unknown flux kind '" + c.kind + "'");
  nlohmann::json boundary = nlohmann::json::object();
  auto want = [&](const char* k) { return c.kind == "all" || c.kind == k; };
  if (want("probability")) boundary["probability"] = boundary_flux(orbit, state, model, FluxKind::probability(), series, backend);
  if (want("purity")) boundary["purity"] = boundary_flux(orbit, state, model, FluxKind::purity(), series, backend);
  if (want("vn")) boundary["von_neumann"] = boundary_flux(orbit, state, model, FluxKind::von_neumann(), series, backend);
  if (want("renyi")) boundary["renyi"] = boundary_flux(orbit, state, model, FluxKind::renyi(c.beta), series, backend);
  nlohmann::json doc{{"period", orbit.period},
                     {"boundary", boundary},
                     {"volume", {{"beta", c.beta}, {"value", volume_flux_term(grid, state, model, c.beta, series)}}}};
  emit(c, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return 0;
}

inline void add_state_options(CLI::App* app, RunConfig& c) {
  app->add_option("--model", c.model, "Hamiltonian: harper (cos k + nu2 cos x) or ho (k^2/2 + x^2/2)")
      ->capture_default_str();
  app->add_option("--nu2", c.nu2, "Harper anisotropy nu^2 (dimensionless, > 0)")->capture_default_str();
  app->add_option("--gamma", c.gamma, "Gaussian inverse width (dimensionless, > 0)")->capture_default_str();
  app->add_option("--center", c.center, "Gaussian center x:k (dimensionless)")->capture_default_str();
  app->add_option("--psi", c.psi_path, "wavefunction file `x re im` per line; replaces the Gaussian state");
  app->add_option("--grid", c.grid, "samples per axis (>= 8)")->capture_default_str();
  app->add_option("--range", c.range, "range a:b for both axes (dimensionless, `pi` accepted)")->capture_default_str();
  app->add_option("--xrange", c.x_range, "x range a:b (dimensionless); defaults to --range");
  app->add_option("--krange", c.k_range, "k range a:b (dimensionless); defaults to --range");
  app->add_option("--eta-max", c.eta_max, "maximum series index")->capture_default_str();
  app->add_option("--term-tol", c.term_tol, "series early-stop tolerance (relative)")->capture_default_str();
  app->add_flag("--truncate", c.truncate, "accept the partial sum at eta-max instead of failing");
  app->add_option("--backend", c.backend, "current backend: series, closed or classical")->capture_default_str();
  app->add_option("--out", c.out, "output path; standard output when omitted");
}

inline void add_orbit_options(CLI::App* app, RunConfig& c) {
  app->add_option("--epsilon", c.epsilon, "classical energy of the orbit (dimensionless)")->capture_default_str();
  app->add_option("--start", c.start, "orbit start x:k or `auto` (on the --epsilon shell)")->capture_default_str();
  app->add_option("--dt", c.dt, "RK4 time step (dimensionless time)")->capture_default_str();
  app->add_option("--max-steps", c.max_steps, "step budget before declaring the orbit open")->capture_default_str();
}

/// Lets `--range -pi:pi` through: values for these options may start with '-'.
inline std::vector<std::string> join_signed_values(int argc, const char* const* argv) {
  static const std::set<std::string> valued{"--range", "--xrange", "--krange", "--center", "--start", "--theta",
                                            "--nu2",   "--gamma",  "--epsilon"};
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (valued.count(a) && i + 1 < argc && argv[i + 1][0] == '-') {
      a += "=";
      a += argv[++i];
    }
    args.push_back(a);
  }
  return args;
}

}  // namespace detail

/// Validated run; errors become exit codes with a diagnostic on `err`.
inline int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "field") return detail::run_field(c, out);
    if (c.command == "stability") return detail::run_stability(c, out);
    if (c.command == "orbit") return detail::run_orbit(c, out);
    if (c.command == "flux") return detail::run_flux(c, out);
    err << "wigflow: unknown command '" << c.command << "'\n";
    return 1;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::no_closure) {
      err << "wigflow: open trajectory (" << e.what() << ")\n";
    } else {
      err << "wigflow: " << e.what() << '\n';
    }
    return is_numeric_failure(e.kind()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "wigflow: " << e.what() << '\n';
    return 1;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"wigflow: Wigner-flow quantifiers and hyperbolic stability for separable Hamiltonians.\n"
               "All coordinates, energies and times are dimensionless."};
  app.require_subcommand(1);

  auto* field = app.add_subcommand("field", "sample a quantifier field over a grid");
  detail::add_state_options(field, c);
  field->add_option("--quantity", c.quantity, "divj, divw, curl, sigma or inv")->capture_default_str();
  field->add_option("--theta", c.theta, "rotation angle applied to w (radians)")->capture_default_str();
  field->add_option("--format", c.format, "csv, pgm or json")->capture_default_str();

  auto* stability = app.add_subcommand("stability", "locate and classify equilibria of w");
  detail::add_state_options(stability, c);
  stability->add_option("--resolution", c.resolution, "coarse scan cells per axis (>= 8)")->capture_default_str();

  auto* orbit = app.add_subcommand("orbit", "integrate a closed classical orbit");
  detail::add_state_options(orbit, c);
  detail::add_orbit_options(orbit, c);

  auto* flux = app.add_subcommand("flux", "information fluxes through a classical orbit");
  detail::add_state_options(flux, c);
  detail::add_orbit_options(flux, c);
  flux->add_option("--kind", c.kind, "all, probability, purity, vn or renyi")->capture_default_str();
  flux->add_option("--beta", c.beta, "Renyi index for the renyi kind (> 1) and the volume term")->capture_default_str();

  std::vector<std::string> args = detail::join_signed_values(argc, argv);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "wigflow: " << e.what() << '\n';
    return 1;
  }
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  return execute(c, out, err);
}

}  // namespace wigflow::cli
