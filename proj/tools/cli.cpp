#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "roughldp/approx.hpp"
#include "roughldp/csv.hpp"
#include "roughldp/errors.hpp"
#include "roughldp/kernels.hpp"
#include "roughldp/lift.hpp"
#include "roughldp/mc.hpp"
#include "roughldp/model.hpp"
#include "roughldp/rate.hpp"

namespace roughldp::cli {

namespace {

constexpr std::size_t kDefaultN = 128;
constexpr double kDefaultTol = 1e-8;
constexpr std::size_t kDefaultPaths = 200000;
constexpr std::size_t kDefaultSteps = 500;

struct Options {
  std::string config;
  std::string out;
  std::size_t threads = 1;
  std::uint64_t seed = 1;
  // rate
  double z = 0.0;
  std::size_t n = kDefaultN;
  double tol = kDefaultTol;
  // smile
  double x_min = 0.0, x_max = 0.0;
  std::size_t points = 0;
  // simulate
  std::vector<double> t_list, x_list;
  std::size_t paths = kDefaultPaths, steps = kDefaultSteps;
  // validate
  std::string suite;
};

void print_defaults(std::ostream& out) {
  out << "defaults: n=" << kDefaultN << " tol=1e-8 paths=" << kDefaultPaths << " steps=" << kDefaultSteps
      << '\n';
}

// Writes CSV text to --out when given, else to stdout.
void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InvalidInput("cannot write output file: " + o.out);
  f << text;
}

ModelSpec load_valid_model(const std::string& path) {
  ModelSpec m = load_model(path);
  require_valid(m);
  return m;
}

int cmd_rate(const Options& o, std::ostream& out, std::ostream& err) {
  const ModelSpec m = load_valid_model(o.config);
  print_defaults(out);
  RateResult r;
  try {
    r = solve_rate(m, o.z, RateOptions{o.n, o.tol, 10000});
  } catch (const OptimizationFailure& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  out << "J=" << csv::fmt(r.value) << '\n';
  out << "start=" << r.start_label << " iterations=" << r.iterations << " grad_norm=" << csv::fmt(r.grad_norm)
      << " converged=" << (r.converged ? 1 : 0) << (r.finite_difference ? " gradient=finite_difference" : "")
      << '\n';
  if (!o.out.empty()) {
    std::ostringstream csv;
    csv << "t,g\n";
    for (std::size_t j = 0; j < r.control.size(); ++j)
      csv << csv::fmt((static_cast<double>(j) + 0.5) / static_cast<double>(r.control.size())) << ','
          << csv::fmt(r.control[j]) << '\n';
    emit(o, csv.str(), out);
  }
  if (!r.converged) {
    err << "error: rate solver did not reach tolerance (grad_norm=" << r.grad_norm << ")\n";
    return kSolverFailure;
  }
  return kOk;
}

int cmd_smile(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.points < 2 || !(o.x_max > o.x_min)) {
    err << "error: smile needs points >= 2 and x_max > x_min\n";
    return kConfigError;
  }
  const ModelSpec m = load_valid_model(o.config);
  std::vector<double> grid(o.points);
  for (std::size_t i = 0; i < o.points; ++i)
    grid[i] = o.x_min + (o.x_max - o.x_min) * static_cast<double>(i) / static_cast<double>(o.points - 1);
  // Snap tiny values produced by rounding to an exact zero row.
  for (double& x : grid)
    if (std::abs(x) < 1e-14 * (o.x_max - o.x_min)) x = 0.0;
  LambdaOptions lo;
  lo.rate = RateOptions{o.n, o.tol, 10000};
  SmileTable table;
  try {
    table = smile(m, grid, lo, o.threads);
  } catch (const OptimizationFailure& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  print_defaults(out);
  for (const auto& r : table.rows) {
    if (r.extrapolated) err << "warning: x=0 row filled by two-sided extrapolation\n";
    if (!r.boundary_attained) err << "warning: tail rate at x=" << r.x << " not attained at the boundary\n";
  }
  std::ostringstream csv;
  write_csv(csv, table);
  emit(o, csv.str(), out);
  out << "rows=" << table.rows.size() << " negative_skew=" << (table.negative_skew() ? 1 : 0) << '\n';
  return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.t_list.empty() || o.x_list.empty()) {
    err << "error: simulate needs --t and --x lists\n";
    return kConfigError;
  }
  const ModelSpec m = load_valid_model(o.config);
  MCConfig cfg;
  cfg.n_paths = o.paths;
  cfg.n_steps = o.steps;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.maturities = o.t_list;

  std::vector<std::optional<double>> sigma_asym(o.x_list.size());
  LambdaOptions lo;
  lo.rate = RateOptions{o.n, o.tol, 10000};
  for (std::size_t i = 0; i < o.x_list.size(); ++i) {
    if (o.x_list[i] == 0.0) continue;
    try {
      const LambdaStar ls = lambda_star(m, o.x_list[i], lo);
      sigma_asym[i] = std::abs(o.x_list[i]) / std::sqrt(2.0 * ls.value);
    } catch (const OptimizationFailure& e) {
      err << "error: " << e.what() << '\n';
      return kSolverFailure;
    }
  }

  std::ostringstream csv;
  csv << "t,x,p_hat,ci,rate_stat,price,impvol,gap\n";
  for (double t : o.t_list) {
    const TerminalSample sample = simulate_terminal(m, t, cfg);
    if (sample.excluded) err << "warning: t=" << t << " excluded " << sample.excluded << " non-finite paths\n";
    for (std::size_t i = 0; i < o.x_list.size(); ++i) {
      const double x = o.x_list[i];
      csv << csv::fmt(t) << ',' << csv::fmt(x) << ',';
      if (x == 0.0) {
        csv << ",,,";
      } else {
        const TailEstimate te = tail_from_sample(sample, m, x);
        csv << csv::fmt(te.p_hat) << ',' << csv::fmt(te.ci_halfwidth) << ',';
        if (te.rate_stat)
          csv << csv::fmt(*te.rate_stat);
        else
          err << "warning: zero hits at t=" << t << " x=" << x << "; rate_stat left empty\n";
        csv << ',';
      }
      const OptionSide side = x < 0.0 ? OptionSide::put : OptionSide::call;
      const PriceEstimate pe = price_from_sample(sample, m, x, side);
      csv << csv::fmt(pe.price) << ',';
      std::optional<double> iv;
      if (pe.itm_paths > 0) {
        try {
          iv = implied_vol(pe.price, 1.0, pe.strike, t, side);
        } catch (const InversionError&) {
        }
      }
      if (iv)
        csv << csv::fmt(*iv);
      else
        err << "warning: no implied vol at t=" << t << " x=" << x << " (undersampled)\n";
      csv << ',';
      if (iv && sigma_asym[i]) csv << csv::fmt(std::abs(*iv - *sigma_asym[i]) / *sigma_asym[i]);
      csv << '\n';
    }
  }
  print_defaults(out);
  out << "seed=" << o.seed << " paths=" << o.paths << " steps=" << o.steps << '\n';
  emit(o, csv.str(), out);
  return kOk;
}

// Each validation suite returns the first failing row, or empty on success.
std::string validate_kernel(std::ostream& report) {
  const std::size_t n = 256;
  const std::vector<GridFunction> paths = {
      GridFunction::sample(1.0, n, [](double t) { return t; }),
      GridFunction::sample(1.0, n, [](double t) { return std::pow(t, 0.45); }),
      GridFunction::sample(1.0, n, [](double t) { return std::sin(3.0 * t); }),
      GridFunction::constant(1.0, n, 0.7)};
  const std::vector<double> ladder = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  const KernelSpec rl = KernelSpec::riemann_liouville(0.3);
  const KepsReport r_rl = keps_convergence_report(rl, paths, ladder, rl.gamma());
  report << "kernel,path,eps,distance,envelope\n";
  for (const auto& row : r_rl.rows) {
    report << "riemann_liouville," << row.path << ',' << csv::fmt(row.eps) << ',' << csv::fmt(row.distance) << ','
           << csv::fmt(row.envelope) << '\n';
    if (row.distance >= 1e-12)
      return "riemann_liouville path " + std::to_string(row.path) + " eps " + csv::fmt(row.eps) +
             " distance " + csv::fmt(row.distance);
  }
  const KernelSpec gf = KernelSpec::gamma_fractional(-0.2, -1.0);
  const KepsReport r_gf = keps_convergence_report(gf, {paths[1]}, ladder, gf.gamma());
  for (const auto& row : r_gf.rows)
    report << "gamma_fractional," << row.path << ',' << csv::fmt(row.eps) << ',' << csv::fmt(row.distance) << ','
           << csv::fmt(row.envelope) << '\n';
  if (!r_gf.monotone) return "gamma_fractional distances are not decreasing along the eps ladder";
  return {};
}

std::string validate_chen(std::ostream& report, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::size_t n = 256;
  report << "path,chen_defect,ibp_defect\n";
  for (int p = 0; p < 20; ++p) {
    std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      a[k + 1] = a[k] + normal(rng) / 16.0;
      b[k + 1] = b[k] + normal(rng) / 16.0;
    }
    const YoungLift lift = young_pair(GridFunction(1.0, a), GridFunction(1.0, b));
    const double chen = chen_defect(lift);
    const double ibp = integration_by_parts_defect(lift);
    report << p << ',' << csv::fmt(chen) << ',' << csv::fmt(ibp) << '\n';
    if (!(chen < 1e-10) || !(ibp < 1e-10))
      return "path " + std::to_string(p) + " chen " + csv::fmt(chen) + " ibp " + csv::fmt(ibp);
  }
  return {};
}

std::string validate_gdelta(std::ostream& report) {
  constexpr double pi = 3.14159265358979323846;
  const std::size_t n = 1024;
  const GridFunction a = GridFunction::sample(1.0, n, [](double t) { return std::sin(2.0 * pi * t); });
  const GridFunction x = GridFunction::sample(1.0, n, [](double t) { return t + std::sin(4.0 * pi * t) / 4.0; });
  const std::vector<double> ladder = {0.5, 0.25, 0.1, 0.05, 0.02};
  const GDeltaReport r = gdelta_convergence(a, x, 0.3, ladder, 0.02);
  write_csv(report, r);
  if (!r.monotone) return "distance column not monotone (5% slack)";
  if (!r.below_tolerance)
    return "final distance " + csv::fmt(r.rows.back().holder_dist) + " >= 0.02 * ||x|| = " +
           csv::fmt(0.02 * r.x_norm);
  return {};
}

std::string validate_uet(std::ostream& report, std::ostream& out, std::uint64_t seed, std::size_t threads) {
  MCConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = 64;
  cfg.seed = seed;
  cfg.threads = threads;
  const std::vector<double> eps = {0.5, 0.2, 0.1};
  const std::vector<double> ks = {1.2, 1.4, 1.6, 1.8, 2.0};
  const std::vector<Integrand> fam = {Integrand::sign_switch, Integrand::clipped_brownian};
  const UetReport r = uet_tail_experiment(0.4, eps, ks, fam, cfg);
  write_csv(report, r);
  for (const auto& f : r.fits)
    out << "fit " << to_string(f.integrand) << " slope=" << csv::fmt(f.slope) << " r2=" << csv::fmt(f.r2)
        << " cells=" << f.cells << " domination=" << csv::fmt(f.domination) << '\n';
  for (const auto& f : r.fits)
    if (!f.pass())
      return to_string(f.integrand) + " fit r2=" + csv::fmt(f.r2) + " slope=" + csv::fmt(f.slope);
  return {};
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  std::ostringstream report;
  std::string failure;
  if (o.suite == "kernel")
    failure = validate_kernel(report);
  else if (o.suite == "chen")
    failure = validate_chen(report, o.seed);
  else if (o.suite == "gdelta")
    failure = validate_gdelta(report);
  else if (o.suite == "uet")
    failure = validate_uet(report, out, o.seed, o.threads);
  else {
    err << "error: unknown suite " << o.suite << '\n';
    return kConfigError;
  }
  if (!o.out.empty()) emit(o, report.str(), out);
  if (!failure.empty()) {
    out << "FAIL " << o.suite << '\n';
    err << "failing row: " << failure << '\n';
    return kValidationFailure;
  }
  out << "PASS " << o.suite << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Short-maturity rate functions and smiles for rough volatility models", "roughldp"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--seed", o.seed, "64-bit RNG seed")->capture_default_str();
  app.add_option("--out", o.out, "Output CSV path");

  auto* rate = app.add_subcommand("rate", "Solve the short-time rate function at z");
  rate->add_option("--config", o.config, "Model JSON")->required();
  rate->add_option("--z", o.z, "Target value")->required();
  rate->add_option("--n", o.n, "Control cells")->capture_default_str();
  rate->add_option("--tol", o.tol, "Gradient sup-norm tolerance")->capture_default_str();

  auto* sm = app.add_subcommand("smile", "Asymptotic implied-volatility smile");
  sm->add_option("--config", o.config, "Model JSON")->required();
  sm->add_option("--x-min", o.x_min, "Smallest log-moneyness")->required();
  sm->add_option("--x-max", o.x_max, "Largest log-moneyness")->required();
  sm->add_option("--points", o.points, "Grid points")->required();
  sm->add_option("--n", o.n, "Control cells")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Monte Carlo tails, prices and implied vols");
  sim->add_option("--config", o.config, "Model JSON")->required();
  sim->add_option("--t", o.t_list, "Maturities")->required()->delimiter(',');
  sim->add_option("--x", o.x_list, "Scaled log-moneyness values")->required()->delimiter(',');
  sim->add_option("--paths", o.paths, "Monte Carlo paths")->capture_default_str();
  sim->add_option("--steps", o.steps, "Time steps")->capture_default_str();
  sim->add_option("--n", o.n, "Control cells for the asymptotic smile")->capture_default_str();

  auto* val = app.add_subcommand("validate", "Run a built-in validation suite");
  val->add_option("suite", o.suite, "kernel | chen | gdelta | uet")
      ->required()
      ->check(CLI::IsMember({"kernel", "chen", "gdelta", "uet"}));

  for (auto* sub : {rate, sm, sim, val}) {
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    sub->add_option("--seed", o.seed, "64-bit RNG seed");
    sub->add_option("--out", o.out, "Output CSV path");
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    if (*rate) return cmd_rate(o, out, err);
    if (*sm) return cmd_smile(o, out, err);
    if (*sim) return cmd_simulate(o, out, err);
    if (*val) return cmd_validate(o, out, err);
  } catch (const InvalidInput& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const LookupError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const FamilyError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kConfigError;
}

}  // namespace roughldp::cli
