// Acceptance runner: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion-number ...]; with no arguments every criterion runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "roughldp/approx.hpp"
#include "roughldp/csv.hpp"
#include "roughldp/kernels.hpp"
#include "roughldp/lift.hpp"
#include "roughldp/mc.hpp"
#include "roughldp/rate.hpp"
#include "support.hpp"

using namespace roughldp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed sub-checks into the detail text.
class Verdict {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failed_.empty()) failed_ += "; ";
      failed_ += what;
    }
  }
  void note(const std::string& text) {
    if (!notes_.empty()) notes_ += "; ";
    notes_ += text;
  }
  Outcome finish() const {
    std::string d = notes_;
    if (!failed_.empty()) d += (d.empty() ? "" : " | ") + std::string("failed: ") + failed_;
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::string failed_, notes_;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr std::uint64_t kSeed = 20240601;
constexpr double kPi = 3.14159265358979323846;

Outcome flat_smile() {
  Verdict v;
  ModelSpec bs = preset("black_scholes");
  double worst = 0.0;
  for (double rho : {-0.7, 0.0, 0.7}) {
    bs.rho = rho;
    for (double z : {-0.4, -0.2, -0.1, -0.05, 0.05, 0.1, 0.2, 0.4}) {
      const RateResult r = solve_rate(bs, z, {128, 1e-8, 10000});
      const double exact = z * z / (2.0 * 0.09);
      worst = std::max(worst, std::abs(r.value - exact) / exact);
    }
  }
  v.require(worst < 1e-4, "rate relative error " + num(worst));
  v.note("max rate rel err " + num(worst));

  std::vector<double> xs;
  for (int i = -8; i <= 8; ++i) xs.push_back(0.05 * i);
  double dev = 0.0;
  for (double rho : {-0.7, 0.0, 0.7}) {
    bs.rho = rho;
    for (const auto& row : smile(bs, xs).rows) dev = std::max(dev, std::abs(row.sigma_asym - 0.3));
  }
  v.require(dev < 1e-3, "smile deviation " + num(dev));
  v.note("max |sigma_asym - 0.3| " + num(dev));
  return v.finish();
}

Outcome zero_cost() {
  Verdict v;
  for (const auto& name : preset_names()) {
    const ModelSpec m = preset(name);
    const double j0 = solve_rate(m, 0.0).value;
    const double l0 = lambda_star(m, 0.0).value;
    v.require(j0 == 0.0, name + " J(0)=" + num(j0));
    v.require(l0 == 0.0, name + " Lambda*(0)=" + num(l0));
  }
  v.note("J(0) and Lambda*(0) are exactly 0 on every preset");
  return v.finish();
}

Outcome gradient_fidelity() {
  Verdict v;
  testing::Draw d(kSeed);
  std::vector<std::pair<std::string, ModelSpec>> models;
  for (const auto& name : preset_names()) models.emplace_back(name, preset(name));
  ModelSpec kinked = preset("black_scholes");
  kinked.f = FunctionFamily::sqrt_plus(0.04);
  kinked.psi = FunctionFamily::shift_psi(0.04);
  kinked.rho = -0.5;
  models.emplace_back("sqrt_plus at its kink", kinked);

  double worst = 0.0;
  bool fallback_seen = false;
  for (const auto& [name, m] : models) {
    for (int probe = 0; probe < 10; ++probe) {
      std::vector<double> g = d.normals(64, 0.5);
      if (name == "sqrt_plus at its kink") std::fill(g.begin(), g.begin() + 8, 0.0);
      const double z = d.uniform(-0.3, 0.3);
      const Gradient gr = gradient(m, z, g);
      fallback_seen = fallback_seen || gr.finite_difference;
      double diff = 0.0, scale = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double h = 1e-6 * (1.0 + std::abs(g[j])), keep = g[j];
        g[j] = keep + h;
        const double up = objective(m, z, g);
        g[j] = keep - h;
        const double down = objective(m, z, g);
        g[j] = keep;
        const double fd = (up - down) / (2.0 * h);
        diff = std::max(diff, std::abs(gr.values[j] - fd));
        scale = std::max(scale, std::abs(fd));
      }
      worst = std::max(worst, diff / scale);
    }
  }
  v.require(worst < 1e-5, "relative error " + num(worst));
  v.require(fallback_seen, "finite-difference fallback never exercised");
  v.note("max rel err " + num(worst) + ", fallback exercised " + (fallback_seen ? "yes" : "no"));
  return v.finish();
}

Outcome kernel_trend() {
  Verdict v;
  const std::size_t n = 512;
  const std::vector<double> ladder = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  testing::Draw d(kSeed);
  const GridFunction root = GridFunction::sample(1.0, n, [](double t) { return std::pow(t, 0.45); });

  const KernelSpec rl = KernelSpec::riemann_liouville(0.3);
  const KepsReport r = keps_convergence_report(rl, {root, d.walk(n)}, ladder, rl.gamma());
  double rl_worst = 0.0;
  for (const auto& row : r.rows) rl_worst = std::max(rl_worst, row.distance);
  v.require(rl_worst < 1e-12, "RL distance " + num(rl_worst));

  const KernelSpec gf = KernelSpec::gamma_fractional(-0.2, -1.0);
  const KepsReport g = keps_convergence_report(gf, {root}, ladder, gf.gamma());
  std::string ratios;
  for (std::size_t k = 1; k < g.rows.size(); ++k) {
    const double ratio = g.rows[k - 1].distance / g.rows[k].distance;
    ratios += (k > 1 ? "," : "") + num(ratio, 3);
    v.require(ratio >= 1.8, "ratio " + num(ratio, 3) + " at eps " + num(g.rows[k].eps));
  }
  v.note("RL max distance " + num(rl_worst) + ", gamma_fractional halving ratios " + ratios);
  return v.finish();
}

Outcome chen_identities() {
  Verdict v;
  testing::Draw d(kSeed);
  double chen = 0.0, ibp = 0.0;
  for (int p = 0; p < 100; ++p) {
    const YoungLift l = young_pair(d.walk(256), d.walk(256));
    chen = std::max(chen, chen_defect(l));
    ibp = std::max(ibp, integration_by_parts_defect(l));
  }
  v.require(chen < 1e-10, "chen defect " + num(chen));
  v.require(ibp < 1e-10, "integration-by-parts defect " + num(ibp));
  v.note("max chen " + num(chen) + ", max ibp " + num(ibp));
  return v.finish();
}

Outcome gdelta() {
  Verdict v;
  const std::size_t n = 1024;
  const GridFunction a = GridFunction::sample(1.0, n, [](double t) { return std::sin(2.0 * kPi * t); });
  const GridFunction x = GridFunction::sample(1.0, n, [](double t) { return t + std::sin(4.0 * kPi * t) / 4.0; });
  const std::vector<double> ladder = {0.5, 0.25, 0.1, 0.05, 0.02};
  const GDeltaReport r = gdelta_convergence(a, x, 0.3, ladder, 0.02);
  std::string dists;
  for (const auto& row : r.rows) dists += (dists.empty() ? "" : ",") + num(row.holder_dist, 3);
  v.require(r.monotone, "distances not monotone");
  v.require(r.below_tolerance, "final distance above 0.02 ||x||");
  v.note("distances " + dists + ", 0.02 ||x|| = " + num(0.02 * r.x_norm, 3));
  return v.finish();
}

double normal_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

Outcome reduced_model(std::ostream* csv, std::size_t threads) {
  Verdict v;
  const ModelSpec bs = preset("black_scholes");
  const double t = 0.05, c = 0.3;
  MCConfig cfg;
  cfg.n_paths = 200000;
  cfg.n_steps = 500;
  cfg.seed = kSeed;
  cfg.threads = threads;
  const TerminalSample s = simulate_terminal(bs, t, cfg);
  const double n = static_cast<double>(s.y.size());
  const double mean = pairwise_sum(s.y) / n;
  std::vector<double> sq(s.y.size());
  for (std::size_t i = 0; i < s.y.size(); ++i) sq[i] = (s.y[i] - mean) * (s.y[i] - mean);
  const double var = pairwise_sum(sq) / (n - 1.0);
  const double exact_mean = -c * c * t / 2.0, exact_var = c * c * t;
  const double z_mean = (mean - exact_mean) / std::sqrt(exact_var / n);
  const double z_var = (var - exact_var) / (exact_var * std::sqrt(2.0 / (n - 1.0)));
  v.require(std::abs(z_mean) < 4.0, "mean off by " + num(z_mean) + " se");
  v.require(std::abs(z_var) < 4.0, "variance off by " + num(z_var) + " se");
  if (csv) *csv << "stat,value,exact,z\nmean," << csv::fmt(mean) << ',' << csv::fmt(exact_mean) << ',' << csv::fmt(z_mean)
                << "\nvariance," << csv::fmt(var) << ',' << csv::fmt(exact_var) << ',' << csv::fmt(z_var) << '\n';

  double worst_tail = 0.0;
  for (double x : {-0.2, 0.1, 0.2}) {
    const TailEstimate e = tail_from_sample(s, bs, x);
    const double z = (x * std::pow(t, 0.2) + c * c * t / 2.0) / (c * std::sqrt(t));
    const double p = x > 0.0 ? normal_tail(z) : 1.0 - normal_tail(z);
    const double zt = (e.p_hat - p) / std::sqrt(p * (1.0 - p) / n);
    worst_tail = std::max(worst_tail, std::abs(zt));
    v.require(std::abs(zt) < 4.0, "tail x=" + num(x) + " off by " + num(zt) + " se");
    if (csv) *csv << "tail " << csv::fmt(x) << ',' << csv::fmt(e.p_hat) << ',' << csv::fmt(p) << ',' << csv::fmt(zt) << '\n';
  }
  const PriceEstimate put = price_from_sample(s, bs, -0.1, OptionSide::put);
  const double exact_put = bs_price(1.0, put.strike, c * std::sqrt(t), OptionSide::put);
  const double z_put = (put.price - exact_put) / put.std_error;
  v.require(std::abs(z_put) < 4.0, "put off by " + num(z_put) + " se");
  if (csv) *csv << "put," << csv::fmt(put.price) << ',' << csv::fmt(exact_put) << ',' << csv::fmt(z_put) << '\n';
  v.note("z-scores mean " + num(z_mean, 3) + ", var " + num(z_var, 3) + ", worst tail " + num(worst_tail, 3) +
         ", put " + num(z_put, 3));
  return v.finish();
}

const std::vector<double> kMaturities = {0.1, 0.05, 0.02, 0.01};

MCConfig rough_config(std::size_t threads) {
  MCConfig cfg;
  cfg.n_paths = 400000;
  cfg.n_steps = 500;
  cfg.seed = kSeed;
  cfg.threads = threads;
  cfg.maturities = kMaturities;
  return cfg;
}

Outcome ldp_trend(std::ostream* csv, std::size_t threads) {
  Verdict v;
  const ModelSpec rb = preset("rough_bergomi");
  const MCConfig cfg = rough_config(threads);
  const std::vector<double> xs = {-0.1, 0.1};
  std::vector<double> target;
  for (double x : xs) target.push_back(lambda_star(rb, x).value);
  std::vector<std::vector<std::optional<double>>> stat(xs.size());
  if (csv) *csv << "t,x,p_hat,ci,hits,rate_stat,lambda_star\n";
  for (double t : cfg.maturities) {
    const TerminalSample s = simulate_terminal(rb, t, cfg);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const TailEstimate e = tail_from_sample(s, rb, xs[i]);
      stat[i].push_back(e.undersampled ? std::nullopt : e.rate_stat);
      if (csv)
        *csv << csv::fmt(t) << ',' << csv::fmt(xs[i]) << ',' << csv::fmt(e.p_hat) << ',' << csv::fmt(e.ci_halfwidth)
             << ',' << e.hits << ',' << (e.rate_stat ? csv::fmt(*e.rate_stat) : "") << ',' << csv::fmt(target[i]) << '\n';
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::optional<double> prev_gap, last_gap;
    std::string trail;
    bool monotone = true;
    for (const auto& r : stat[i]) {
      if (!r) continue;
      const double gap = std::abs(*r - target[i]) / target[i];
      if (prev_gap && gap > *prev_gap) monotone = false;
      prev_gap = last_gap = gap;
      trail += (trail.empty() ? "" : ",") + num(*r, 3);
    }
    const std::string label = "x=" + num(xs[i]);
    v.require(monotone, label + " rate_stat not monotone toward Lambda*");
    v.require(last_gap && *last_gap < 0.20, label + " final gap " + (last_gap ? num(*last_gap, 3) : "n/a"));
    v.note(label + " Lambda*=" + num(target[i], 4) + " rate_stat " + trail);
  }
  return v.finish();
}

Outcome smile_trend(std::ostream* csv, std::size_t threads) {
  Verdict v;
  const ModelSpec rb = preset("rough_bergomi");
  const MCConfig cfg = rough_config(threads);
  const std::vector<double> xs = {-0.2, -0.1};
  const SmileGapReport r = smile_convergence_report(rb, xs, cfg.maturities, cfg);
  if (csv) *csv << "t,x,price,ci,implied,implied_ci,sigma_asym,gap\n";
  for (const auto& row : r.rows)
    if (csv)
      *csv << csv::fmt(row.t) << ',' << csv::fmt(row.x) << ',' << csv::fmt(row.price.price) << ','
           << csv::fmt(row.price.ci_halfwidth) << ',' << (row.implied ? csv::fmt(*row.implied) : "") << ','
           << csv::fmt(row.implied_ci) << ',' << csv::fmt(row.sigma_asym) << ',' << (row.gap ? csv::fmt(*row.gap) : "")
           << '\n';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::string label = "x=" + num(xs[i]);
    std::optional<double> last;
    std::string trail;
    for (const auto& row : r.rows)
      if (row.x == xs[i] && row.gap) {
        last = row.gap;
        trail += (trail.empty() ? "" : ",") + num(*row.gap * 100.0, 2) + "%";
      }
    v.require(r.trend_ok[i], label + " gap rises beyond the MC interval as t shrinks");
    v.require(last && *last < 0.15, label + " final gap " + (last ? num(*last, 3) : "n/a"));
    v.note(label + " gaps " + trail);
  }
  return v.finish();
}

Outcome uet(std::ostream* csv, std::size_t threads) {
  Verdict v;
  MCConfig cfg;
  cfg.n_paths = 50000;
  cfg.n_steps = 64;
  cfg.seed = kSeed;
  cfg.threads = threads;
  const std::vector<double> eps = {0.5, 0.2, 0.1};
  const std::vector<double> ks = {1.2, 1.4, 1.6, 1.8, 2.0};
  const std::vector<Integrand> fam = {Integrand::sign_switch, Integrand::clipped_brownian};
  const UetReport r = uet_tail_experiment(0.4, eps, ks, fam, cfg);
  if (csv) write_csv(*csv, r);
  for (const auto& f : r.fits) {
    if (f.integrand == Integrand::constant) continue;
    v.require(f.r2 >= 0.9, to_string(f.integrand) + " r2 " + num(f.r2, 3));
    v.require(f.slope < 0.0, to_string(f.integrand) + " slope " + num(f.slope, 3));
    v.note(to_string(f.integrand) + " r2=" + num(f.r2, 3) + " slope=" + num(f.slope, 3));
  }
  return v.finish();
}

Outcome determinism() {
  Verdict v;
  using Runner = std::function<Outcome(std::ostream*, std::size_t)>;
  const std::vector<std::pair<std::string, Runner>> runs = {
      {"criterion 7", reduced_model}, {"criterion 8", ldp_trend}, {"criterion 9", smile_trend}, {"criterion 10", uet}};
  for (const auto& [name, run] : runs) {
    std::ostringstream a, b;
    run(&a, 1);
    run(&b, 2);
    const bool same = !a.str().empty() && a.str() == b.str();
    v.require(same, name + " CSV differs between reruns");
    v.note(name + (same ? " identical" : " differs") + " (" + std::to_string(a.str().size()) + " bytes)");
  }
  return v.finish();
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "flat-smile oracle", 10.0, flat_smile},
      {2, "zero-cost point", 60.0, zero_cost},
      {3, "gradient fidelity", 1.0, gradient_fidelity},
      {4, "kernel scale invariance and eps trend", 30.0, kernel_trend},
      {5, "Chen and integration-by-parts identities", 5.0, chen_identities},
      {6, "G_delta convergence", 5.0, gdelta},
      {7, "reduced-model MC exactness", 60.0, [] { return reduced_model(nullptr, 1); }},
      {8, "LDP rate trend", 600.0, [] { return ldp_trend(nullptr, 1); }},
      {9, "smile limit trend", 600.0, [] { return smile_trend(nullptr, 1); }},
      {10, "alpha-UET tail shape", 300.0, [] { return uet(nullptr, 1); }},
      {11, "MC determinism", 1800.0, determinism},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = elapsed(t0);
    if (secs > c.budget_seconds) {
      o.pass = false;
      o.detail += " | over time budget " + num(c.budget_seconds) + " s";
    }
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " [" << c.name << "] " << o.detail
              << " (" << num(secs, 3) << " s)" << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
