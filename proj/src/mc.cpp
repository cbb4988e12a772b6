#include "roughldp/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <Eigen/Dense>

#include "roughldp/csv.hpp"
#include "roughldp/errors.hpp"
#include "roughldp/grid_path.hpp"
#include "roughldp/kernels.hpp"
#include "roughldp/parallel.hpp"

namespace roughldp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::size_t kBatch = 256;
constexpr double kMaxExcludedFraction = 1e-3;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

CounterRng::result_type CounterRng::operator()() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

std::uint64_t CounterRng::stream_key(std::uint64_t seed, std::uint64_t path, std::uint64_t salt) noexcept {
  return mix64(mix64(seed ^ mix64(salt + kGolden)) + path * kGolden);
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 64) {
    double s = 0.0;
    for (double e : v) s += e;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

TerminalSample simulate_terminal(const ModelSpec& m, double t, const MCConfig& cfg) {
  require_valid(m);
  if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("maturity must lie in (0,1]");
  if (cfg.n_steps < 1 || cfg.n_paths < 1) throw InvalidInput("simulation needs paths and steps");
  const std::size_t n = cfg.n_steps;
  const std::size_t paths = cfg.n_paths;
  const double ds = t / static_cast<double>(n);
  const double sqrt_ds = std::sqrt(ds);
  const double perp = std::sqrt(1.0 - m.rho * m.rho);
  const bool needs_volterra = m.f.tag != FamilyTag::constant;

  // KA = dA * weights^T / ds, one row per path.
  RowMatrix weights_t;
  if (needs_volterra) {
    const ConvWeights w(m.kernel, n, Targets::nodes, 1.0, t);
    weights_t = RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n + 1));
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < i; ++j) weights_t(j, i) = w(i, j) / ds;
  }
  std::vector<double> time(n);
  for (std::size_t k = 0; k < n; ++k) time[k] = t * static_cast<double>(k) / static_cast<double>(n);

  std::vector<double> terminal(paths);
  std::vector<unsigned char> bad(paths, 0);
  const std::size_t batches = (paths + kBatch - 1) / kBatch;

  parallel_for(batches, cfg.threads, [&](std::size_t b) {
    const std::size_t first = b * kBatch;
    const std::size_t count = std::min(kBatch, paths - first);
    RowMatrix dx(count, n), da(count, n), ka;
    for (std::size_t p = 0; p < count; ++p) {
      const std::size_t path = first + p;
      const std::uint64_t stream = cfg.antithetic ? path / 2 : path;
      const double sign = cfg.antithetic && (path % 2 == 1) ? -1.0 : 1.0;
      CounterRng rng(CounterRng::stream_key(cfg.seed, stream));
      std::normal_distribution<double> normal;
      double a = m.a0;
      for (std::size_t k = 0; k < n; ++k) {
        const double z1 = sign * normal(rng), z2 = sign * normal(rng);
        const double w = sqrt_ds * z1;
        dx(p, k) = m.rho * w + perp * sqrt_ds * z2;
        const double step = family_value(m.b, a) * ds + family_value(m.a, a) * w;
        da(p, k) = step;
        a += step;
      }
    }
    if (needs_volterra) ka.noalias() = da * weights_t;
    for (std::size_t p = 0; p < count; ++p) {
      double y = m.y0;
      for (std::size_t k = 0; k < n; ++k) {
        const double v = needs_volterra ? family_value(m.psi, ka(p, k)) : 0.0;
        const double fv = family_value(m.f, v, time[k]);
        const double sv = family_value(m.sigma, y);
        const double vol = sv * fv;
        y += vol * dx(p, k) - 0.5 * vol * vol * ds;
      }
      terminal[first + p] = y;
      if (!std::isfinite(y)) bad[first + p] = 1;
    }
  });

  TerminalSample s;
  s.t = t;
  s.y.reserve(paths);
  for (std::size_t p = 0; p < paths; ++p) {
    if (bad[p])
      ++s.excluded;
    else
      s.y.push_back(terminal[p]);
  }
  if (static_cast<double>(s.excluded) > kMaxExcludedFraction * static_cast<double>(paths))
    throw EstimatorError("more than 0.1% of paths became non-finite (" + std::to_string(s.excluded) + ")");
  return s;
}

TailEstimate tail_from_sample(const TerminalSample& s, const ModelSpec& m, double x) {
  if (x == 0.0) throw InvalidInput("tail level x must be nonzero");
  const double mu = m.kernel.mu();
  const double scale = std::pow(s.t, mu);
  TailEstimate e;
  e.t = s.t;
  e.x = x;
  e.paths = s.y.size();
  for (double y : s.y) {
    const double scaled = scale * (y - m.y0);
    if (x > 0.0 ? scaled >= x : scaled <= x) ++e.hits;
  }
  const double n = static_cast<double>(e.paths);
  e.p_hat = e.paths ? static_cast<double>(e.hits) / n : 0.0;
  e.ci_halfwidth = e.paths ? 1.96 * std::sqrt(e.p_hat * (1.0 - e.p_hat) / n) : 0.0;
  e.zero_hits = e.hits == 0;
  e.undersampled = e.hits < 10;
  if (e.hits > 0) e.rate_stat = -std::pow(s.t, 2.0 * mu + 1.0) * std::log(e.p_hat);
  return e;
}

TailEstimate tail_prob(const ModelSpec& m, double t, double x, const MCConfig& cfg) {
  if (x == 0.0) throw InvalidInput("tail level x must be nonzero");
  return tail_from_sample(simulate_terminal(m, t, cfg), m, x);
}

std::string to_string(OptionSide side) { return side == OptionSide::put ? "put" : "call"; }

PriceEstimate price_at_strike(const TerminalSample& s, double strike, OptionSide side) {
  PriceEstimate e;
  e.strike = strike;
  std::vector<double> payoff(s.y.size());
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const double spot = std::exp(s.y[i]);
    payoff[i] = side == OptionSide::put ? std::max(strike - spot, 0.0) : std::max(spot - strike, 0.0);
    if (payoff[i] > 0.0) ++e.itm_paths;
  }
  const double n = static_cast<double>(payoff.size());
  if (payoff.empty()) return e;
  e.price = pairwise_sum(payoff) / n;
  std::vector<double> sq(payoff.size());
  for (std::size_t i = 0; i < payoff.size(); ++i) sq[i] = (payoff[i] - e.price) * (payoff[i] - e.price);
  const double var = payoff.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
  e.std_error = std::sqrt(var / n);
  e.ci_halfwidth = 1.96 * e.std_error;
  return e;
}

PriceEstimate price_from_sample(const TerminalSample& s, const ModelSpec& m, double x, OptionSide side) {
  if (side == OptionSide::put && x > 0.0) throw InvalidInput("OTM put needs x <= 0");
  if (side == OptionSide::call && x < 0.0) throw InvalidInput("OTM call needs x >= 0");
  return price_at_strike(s, std::exp(x * std::pow(s.t, -m.kernel.mu())), side);
}

PriceEstimate option_price(const ModelSpec& m, double t, double x, OptionSide side, const MCConfig& cfg) {
  if (side == OptionSide::put && x > 0.0) throw InvalidInput("OTM put needs x <= 0");
  if (side == OptionSide::call && x < 0.0) throw InvalidInput("OTM call needs x >= 0");
  return price_from_sample(simulate_terminal(m, t, cfg), m, x, side);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_price(double spot, double strike, double vol_sqrt_t, OptionSide side) {
  if (!(spot > 0.0 && strike > 0.0) || !(vol_sqrt_t >= 0.0))
    throw InvalidInput("Black-Scholes needs positive spot, strike and nonnegative volatility");
  if (vol_sqrt_t == 0.0)
    return side == OptionSide::call ? std::max(spot - strike, 0.0) : std::max(strike - spot, 0.0);
  const double d1 = std::log(spot / strike) / vol_sqrt_t + 0.5 * vol_sqrt_t;
  const double d2 = d1 - vol_sqrt_t;
  if (side == OptionSide::call) return spot * normal_cdf(d1) - strike * normal_cdf(d2);
  return strike * normal_cdf(-d2) - spot * normal_cdf(-d1);
}

double implied_vol(double price, double spot, double strike, double t, OptionSide side) {
  if (!(t > 0.0)) throw InvalidInput("implied_vol needs t > 0");
  const double intrinsic = side == OptionSide::call ? std::max(spot - strike, 0.0) : std::max(strike - spot, 0.0);
  const double upper = side == OptionSide::call ? spot : strike;
  const double slack = 1e-14 * upper;
  if (!(price >= intrinsic - slack) || !(price < upper))
    throw InversionError("option price outside no-arbitrage bounds");
  if (price <= intrinsic + slack) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (bs_price(spot, strike, hi, side) < price) {
    hi *= 2.0;
    if (hi > 1e3) throw InversionError("implied total volatility above bracket");
  }
  const double sqrt_t = std::sqrt(t);
  for (int it = 0; it < 200 && (hi - lo) / sqrt_t > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bs_price(spot, strike, mid, side) < price)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi) / sqrt_t;
}

namespace {

double implied_halfwidth(const PriceEstimate& p, double t, OptionSide side, double implied) {
  const auto invert = [&](double price) {
    try {
      return implied_vol(price, 1.0, p.strike, t, side);
    } catch (const InversionError&) {
      return implied;
    }
  };
  const double up = invert(p.price + p.ci_halfwidth);
  const double down = invert(std::max(p.price - p.ci_halfwidth, 0.0));
  return 0.5 * (up - down);
}

}  // namespace

SmileGapReport smile_convergence_report(const ModelSpec& m, std::span<const double> x_grid,
                                        std::span<const double> maturities, const MCConfig& cfg,
                                        const LambdaOptions& lambda_opts) {
  std::vector<double> sigma_asym(x_grid.size(), 0.0);
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (x_grid[i] == 0.0) throw InvalidInput("smile report needs x != 0");
    const LambdaStar ls = lambda_star(m, x_grid[i], lambda_opts);
    sigma_asym[i] = std::abs(x_grid[i]) / std::sqrt(2.0 * ls.value);
  }
  std::vector<double> ts(maturities.begin(), maturities.end());
  std::sort(ts.begin(), ts.end(), std::greater<>());
  SmileGapReport report;
  for (double t : ts) {
    const TerminalSample sample = simulate_terminal(m, t, cfg);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      SmileGapRow row;
      row.t = t;
      row.x = x_grid[i];
      row.side = row.x < 0.0 ? OptionSide::put : OptionSide::call;
      row.moment_caveat = row.side == OptionSide::call;
      row.sigma_asym = sigma_asym[i];
      row.price = price_from_sample(sample, m, row.x, row.side);
      row.undersampled = row.price.itm_paths == 0;
      if (!row.undersampled) {
        try {
          row.implied = implied_vol(row.price.price, 1.0, row.price.strike, t, row.side);
          row.gap = std::abs(*row.implied - row.sigma_asym) / row.sigma_asym;
          row.implied_ci = implied_halfwidth(row.price, t, row.side, *row.implied);
        } catch (const InversionError&) {
          row.undersampled = true;
        }
      }
      report.rows.push_back(row);
    }
  }
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    // A rise counts only when it exceeds the combined statistical half-widths.
    bool ok = true;
    const SmileGapRow* previous = nullptr;
    for (const auto& r : report.rows) {
      if (r.x != x_grid[i] || !r.gap) continue;
      if (previous && *r.gap > *previous->gap + (r.implied_ci + previous->implied_ci) / r.sigma_asym) ok = false;
      previous = &r;
    }
    report.trend_ok.push_back(ok);
  }
  return report;
}

std::string to_string(Integrand u) {
  switch (u) {
    case Integrand::constant: return "constant";
    case Integrand::sign_switch: return "sign_switch";
    case Integrand::clipped_brownian: return "clipped_brownian";
  }
  return "unknown";
}

bool UetReport::ok() const noexcept {
  return !fits.empty() && std::all_of(fits.begin(), fits.end(), [](const UetFit& f) { return f.pass(); });
}

UetReport uet_tail_experiment(double alpha, std::span<const double> eps_ladder, std::span<const double> k_ladder,
                              std::span<const Integrand> integrands, const MCConfig& cfg) {
  if (!(alpha >= 1.0 / 3.0 && alpha < 0.5)) throw InvalidInput("UET experiment needs alpha in [1/3, 1/2)");
  if (eps_ladder.empty() || k_ladder.empty()) throw InvalidInput("UET experiment needs eps and K ladders");
  for (double e : eps_ladder)
    if (!(e > 0.0)) throw InvalidInput("eps must be positive");
  std::vector<Integrand> families{Integrand::constant};
  for (Integrand u : integrands)
    if (u != Integrand::constant) families.push_back(u);

  const std::size_t n = cfg.n_steps;
  const double sqrt_dt = std::sqrt(1.0 / static_cast<double>(n));
  UetReport report;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const Integrand u = families[fi];
    for (std::size_t ei = 0; ei < eps_ladder.size(); ++ei) {
      const double eps = eps_ladder[ei];
      const double sqrt_eps = std::sqrt(eps);
      std::vector<double> norms(cfg.n_paths);
      const std::uint64_t salt = 1 + 1000 * static_cast<std::uint64_t>(u) + ei;
      const std::size_t batches = (cfg.n_paths + kBatch - 1) / kBatch;
      parallel_for(batches, cfg.threads, [&](std::size_t b) {
        std::vector<double> integral(n + 1);
        const std::size_t end = std::min(cfg.n_paths, (b + 1) * kBatch);
        for (std::size_t path = b * kBatch; path < end; ++path) {
          CounterRng rng(CounterRng::stream_key(cfg.seed, path, salt));
          std::normal_distribution<double> normal;
          double brownian = 0.0;
          integral[0] = 0.0;
          for (std::size_t k = 0; k < n; ++k) {
            double weight = 1.0;
            if (u == Integrand::sign_switch) weight = brownian >= 0.0 ? 1.0 : -1.0;
            if (u == Integrand::clipped_brownian) weight = std::clamp(brownian, -1.0, 1.0);
            const double db = sqrt_dt * normal(rng);
            integral[k + 1] = integral[k] + weight * sqrt_eps * db;
            brownian += db;
          }
          norms[path] = holder_norm(GridFunction(1.0, integral), alpha);
        }
      });
      for (double k : k_ladder) {
        UetCell c{u, eps, k, 0.0, 0};
        c.hits = static_cast<std::size_t>(std::count_if(norms.begin(), norms.end(), [k](double v) { return v >= k; }));
        c.p_hat = static_cast<double>(c.hits) / static_cast<double>(cfg.n_paths);
        report.cells.push_back(c);
      }
    }
    // Least squares of log p on K^2/eps over cells with hits.
    UetFit fit;
    fit.integrand = u;
    std::vector<double> xs, ys;
    for (const auto& c : report.cells)
      if (c.integrand == u && c.hits > 0) {
        xs.push_back(c.k * c.k / c.eps);
        ys.push_back(std::log(c.p_hat));
      }
    fit.cells = xs.size();
    if (xs.size() >= 2) {
      const double nn = static_cast<double>(xs.size());
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
      mx /= nn;
      my /= nn;
      double sxx = 0.0, sxy = 0.0, syy = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
      }
      fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
      fit.intercept = my - fit.slope * mx;
      fit.r2 = (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 0.0;
    }
    report.fits.push_back(fit);
  }
  // Domination by the U = 1 envelope exp(a + b K^2/eps).
  const UetFit& base = report.fits.front();
  for (auto& fit : report.fits) {
    for (const auto& c : report.cells) {
      if (c.integrand != fit.integrand || c.hits == 0) continue;
      const double envelope = std::exp(base.intercept + base.slope * c.k * c.k / c.eps);
      fit.domination = std::max(fit.domination, c.p_hat / envelope);
    }
  }
  return report;
}

void write_csv(std::ostream& os, const UetReport& report) {
  os << "integrand,eps,K,p_hat,hits\n";
  for (const auto& c : report.cells)
    os << to_string(c.integrand) << ',' << csv::fmt(c.eps) << ',' << csv::fmt(c.k) << ',' << csv::fmt(c.p_hat)
       << ',' << c.hits << '\n';
}

}  // namespace roughldp
