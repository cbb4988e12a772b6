#include "roughldp/rate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>

#include "roughldp/csv.hpp"
#include "roughldp/errors.hpp"
#include "roughldp/parallel.hpp"

namespace roughldp {

RateFunctional::RateFunctional(const ModelSpec& m, std::size_t n)
    : model_(m),
      n_(n),
      dt_(1.0 / static_cast<double>(n)),
      sigma0_(family_value(m.sigma, m.y0)),
      a_scale_(family_value(m.a, m.a0)),
      weights_(KernelSpec::pure_power(m.kernel.mu(), m.kernel.alpha()), n, Targets::midpoints) {
  require_valid(m);
  if (n < 2) throw InvalidInput("rate functional needs n >= 2");
}

double RateFunctional::spot_f() const { return family_value(model_.f, family_value(model_.psi, 0.0)); }

std::vector<double> RateFunctional::volatility_state(std::span<const double> g) const {
  std::vector<double> v = weights_.apply(g);
  for (double& e : v) e = family_value(model_.psi, a_scale_ * e);
  return v;
}

double RateFunctional::value(double z, std::span<const double> g) const {
  if (g.size() != n_) throw ShapeError("control must have n cell values");
  const std::vector<double> v = volatility_state(g);
  double energy = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    const double fk = family_value(model_.f, v[k]);
    energy += g[k] * g[k];
    s1 += fk * g[k];
    s2 += fk * fk;
  }
  energy *= 0.5 * dt_;
  s1 *= dt_;
  s2 *= dt_;
  if (!(s2 > 0.0)) throw DegenerateError("f vanishes on every midpoint: rate denominator is zero");
  const double rho = model_.rho;
  const double num = z - rho * sigma0_ * s1;
  return energy + num * num / (2.0 * (1.0 - rho * rho) * sigma0_ * sigma0_ * s2);
}

bool RateFunctional::analytic_gradient(double z, std::span<const double> g,
                                       std::vector<double>& grad) const {
  if (g.size() != n_) throw ShapeError("control must have n cell values");
  const std::vector<double> u = [&] {
    std::vector<double> w = weights_.apply(g);
    for (double& e : w) e *= a_scale_;
    return w;
  }();
  std::vector<double> f(n_), fprime(n_), psi_prime(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const double v = family_value(model_.psi, u[k]);
    f[k] = family_value(model_.f, v);
    const auto d = eval_family(model_.f, v, 0.0, Want::dv);
    if (!d) return false;
    fprime[k] = *d;
    psi_prime[k] = *eval_family(model_.psi, u[k], 0.0, Want::dv);
  }
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    s1 += f[k] * g[k];
    s2 += f[k] * f[k];
  }
  s1 *= dt_;
  s2 *= dt_;
  if (!(s2 > 0.0)) throw DegenerateError("f vanishes on every midpoint: rate denominator is zero");
  const double rho = model_.rho;
  const double num = z - rho * sigma0_ * s1;
  const double denom_scale = 2.0 * (1.0 - rho * rho) * sigma0_ * sigma0_;
  const double denom = denom_scale * s2;
  // dJ/dS1 and dJ/dS2 of the penalty N^2 / D.
  const double c1 = -2.0 * num * rho * sigma0_ / denom;
  const double c2 = -num * num * denom_scale / (denom * denom);
  std::vector<double> h(n_);
  for (std::size_t k = 0; k < n_; ++k)
    h[k] = psi_prime[k] * fprime[k] * (c1 * g[k] + 2.0 * c2 * f[k]);
  const std::vector<double> back = weights_.apply_transpose(h);
  grad.resize(n_);
  for (std::size_t m = 0; m < n_; ++m)
    grad[m] = dt_ * (g[m] + c1 * f[m] + a_scale_ * back[m]);
  return true;
}

std::vector<double> RateFunctional::fd_gradient(double z, std::span<const double> g) const {
  std::vector<double> work(g.begin(), g.end());
  std::vector<double> grad(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(g[j]));
    work[j] = g[j] + h;
    const double up = value(z, work);
    work[j] = g[j] - h;
    const double down = value(z, work);
    work[j] = g[j];
    grad[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

double objective(const ModelSpec& m, double z, std::span<const double> g) {
  return RateFunctional(m, g.size()).value(z, g);
}

Gradient gradient(const ModelSpec& m, double z, std::span<const double> g) {
  const RateFunctional functional(m, g.size());
  Gradient out;
  if (!functional.analytic_gradient(z, g, out.values)) {
    out.values = functional.fd_gradient(z, g);
    out.finite_difference = true;
  }
  return out;
}

namespace {

double sup_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s = std::max(s, std::abs(e));
  return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct Outcome {
  std::vector<double> control;
  double value = std::numeric_limits<double>::infinity();
  double grad_norm = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
  bool finite_difference = false;
  bool finite = false;
};

// Limited-memory BFGS with Armijo backtracking; every accepted step strictly
// decreases the objective.
Outcome minimize(const RateFunctional& fn, double z, std::vector<double> g, const RateOptions& opts) {
  constexpr std::size_t kMemory = 8;
  constexpr double kArmijo = 1e-4;
  Outcome out;
  const double dt = fn.step();
  auto grad_at = [&](const std::vector<double>& x, std::vector<double>& gr) {
    if (!fn.analytic_gradient(z, x, gr)) {
      gr = fn.fd_gradient(z, x);
      out.finite_difference = true;
    }
  };

  double value = fn.value(z, g);
  if (!std::isfinite(value)) return out;
  std::vector<double> grad;
  grad_at(g, grad);
  out.finite = true;

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> memory;
  const std::size_t n = g.size();
  std::vector<double> dir(n), trial(n), trial_grad;
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (sup_norm(grad) < opts.tol) {
      out.converged = true;
      break;
    }
    // Two-loop recursion; the initial metric is the L2 one (1/dt) until
    // curvature pairs are available.
    dir = grad;
    std::vector<double> alphas(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      alphas[k] = memory[k].rho * dot(memory[k].s, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alphas[k] * memory[k].y[i];
    }
    const double scale = memory.empty()
                             ? 1.0 / dt
                             : dot(memory.back().s, memory.back().y) / dot(memory.back().y, memory.back().y);
    for (double& d : dir) d *= scale;
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * dot(memory[k].y, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alphas[k] - beta) * memory[k].s[i];
    }
    for (double& d : dir) d = -d;
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      memory.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i] / dt;
      slope = dot(grad, dir);
    }

    double step = 1.0;
    bool accepted = false;
    double trial_value = value;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = g[i] + step * dir[i];
      trial_value = fn.value(z, trial);
      if (std::isfinite(trial_value) && trial_value <= value + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      break;  // no descent possible at working precision
    }
    grad_at(trial, trial_grad);
    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = trial[i] - g[i];
      p.y[i] = trial_grad[i] - grad[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-300) {
      p.rho = 1.0 / sy;
      memory.push_back(std::move(p));
      if (memory.size() > kMemory) memory.pop_front();
    }
    g.swap(trial);
    grad.swap(trial_grad);
    value = trial_value;
  }
  out.control = std::move(g);
  out.value = value;
  out.grad_norm = sup_norm(grad);
  out.iterations = it;
  return out;
}

}  // namespace

RateResult solve_rate(const RateFunctional& fn, double z, const RateOptions& opts) {
  if (opts.n != fn.cells()) throw InvalidInput("rate options n does not match the functional grid");
  if (!(opts.tol > 0.0)) throw InvalidInput("rate tolerance must be positive");
  if (!std::isfinite(z)) throw InvalidInput("rate target must be finite");
  const std::size_t n = fn.cells();
  RateResult result;
  result.z = z;
  if (z == 0.0) {
    // The zero control attains the global minimum 0.
    result.control.assign(n, 0.0);
    result.start_label = "zero";
    result.converged = true;
    return result;
  }

  const double s0 = fn.spot_sigma();
  const double f0 = fn.spot_f();
  const double rho_start = fn.model().rho * z / (s0 * f0);
  const std::vector<std::pair<std::string, double>> starts = {
      {"zero", 0.0}, {"rho", rho_start}, {"plus", std::abs(z)}, {"minus", -std::abs(z)}};

  Outcome best;
  std::string best_label;
  bool any_finite = false;
  for (const auto& [label, level] : starts) {
    if (!std::isfinite(level)) continue;
    Outcome o = minimize(fn, z, std::vector<double>(n, level), opts);
    if (!o.finite) continue;
    any_finite = true;
    const bool better = !best.finite || (o.converged && !best.converged) ||
                        (o.converged == best.converged && o.value < best.value);
    if (better) {
      best = std::move(o);
      best_label = label;
    }
  }
  if (!any_finite) throw OptimizationFailure("all starts produced a non-finite objective");
  result.value = best.value;
  result.control = std::move(best.control);
  result.grad_norm = best.grad_norm;
  result.iterations = best.iterations;
  result.start_label = best_label;
  result.converged = best.converged;
  result.finite_difference = best.finite_difference;
  return result;
}

RateResult solve_rate(const ModelSpec& m, double z, const RateOptions& opts) {
  if (opts.n < 16) throw InvalidInput("solve_rate needs n >= 16");
  return solve_rate(RateFunctional(m, opts.n), z, opts);
}

LambdaStar lambda_star(const RateFunctional& fn, double x, const LambdaOptions& opts) {
  if (opts.points < 2) throw InvalidInput("lambda_star needs at least 2 scan points");
  if (opts.span < 0.0) throw InvalidInput("lambda_star span must be positive");
  LambdaStar out;
  out.x = x;
  if (x == 0.0) return out;
  const double span = opts.span > 0.0 ? opts.span : std::max(0.5 * std::abs(x), 0.05);
  const double sign = x > 0.0 ? 1.0 : -1.0;
  out.value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= opts.points; ++k) {
    const double y = x + sign * span * static_cast<double>(k) / static_cast<double>(opts.points);
    const RateResult r = solve_rate(fn, y, opts.rate);
    if (!r.converged)
      throw OptimizationFailure("rate solver did not converge at y = " + csv::fmt(y));
    if (r.value < out.value) {
      out.value = r.value;
      out.argmin = y;
      out.boundary_attained = k == 0;
    }
  }
  return out;
}

LambdaStar lambda_star(const ModelSpec& m, double x, const LambdaOptions& opts) {
  if (opts.rate.n < 16) throw InvalidInput("lambda_star needs n >= 16");
  return lambda_star(RateFunctional(m, opts.rate.n), x, opts);
}

bool SmileTable::negative_skew() const {
  const SmileRow* left = nullptr;
  const SmileRow* right = nullptr;
  for (const auto& r : rows) {
    if (r.x < 0.0 && (!left || r.x > left->x)) left = &r;
    if (r.x > 0.0 && (!right || r.x < right->x)) right = &r;
  }
  return left && right && left->sigma_asym > right->sigma_asym;
}

SmileTable smile(const ModelSpec& m, std::span<const double> x_grid, const LambdaOptions& opts,
                 std::size_t threads) {
  if (x_grid.empty()) throw InvalidInput("smile needs a nonempty x grid");
  if (opts.rate.n < 16) throw InvalidInput("smile needs n >= 16");
  const RateFunctional fn(m, opts.rate.n);
  double scale = 0.0;
  for (double x : x_grid) scale = std::max(scale, std::abs(x));
  const double h = scale > 0.0 ? 0.01 * scale : 1e-3;

  auto sigma_at = [&](double x, bool& boundary) {
    const LambdaStar ls = lambda_star(fn, x, opts);
    boundary = ls.boundary_attained;
    return std::abs(x) / std::sqrt(2.0 * ls.value);
  };

  SmileTable table;
  table.rows.resize(x_grid.size());
  parallel_for(x_grid.size(), threads, [&](std::size_t i) {
    SmileRow& row = table.rows[i];
    row.x = x_grid[i];
    if (row.x == 0.0) {
      bool b1 = true, b2 = true;
      row.sigma_asym = 0.5 * (sigma_at(h, b1) + sigma_at(-h, b2));
      row.lambda_star = 0.0;
      row.extrapolated = true;
      row.boundary_attained = b1 && b2;
      return;
    }
    const LambdaStar ls = lambda_star(fn, row.x, opts);
    row.lambda_star = ls.value;
    row.boundary_attained = ls.boundary_attained;
    row.sigma_asym = std::abs(row.x) / std::sqrt(2.0 * ls.value);
  });
  return table;
}

void write_csv(std::ostream& os, const SmileTable& table) {
  os << "x,lambda_star,sigma_asym\n";
  for (const auto& r : table.rows)
    os << csv::fmt(r.x) << ',' << csv::fmt(r.lambda_star) << ',' << csv::fmt(r.sigma_asym) << '\n';
}

}  // namespace roughldp
