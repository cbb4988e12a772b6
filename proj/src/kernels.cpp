#include "roughldp/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "roughldp/errors.hpp"

namespace roughldp {

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::riemann_liouville: return "riemann_liouville";
    case KernelFamily::gamma_fractional: return "gamma_fractional";
    case KernelFamily::power_law: return "power_law";
  }
  return "unknown";
}

KernelSpec::KernelSpec(KernelFamily f, double mu, double c, double beta, double alpha)
    : family_(f), mu_(mu), c_(c), beta_(beta), alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("kernel alpha must lie in (0,1)");
  if (!(mu > -1.0 && mu < 1.0)) throw InvalidInput("kernel exponent mu must lie in (-1,1)");
}

KernelSpec KernelSpec::riemann_liouville(double hurst, double alpha) {
  if (!(hurst > 0.0 && hurst < 0.5))
    throw InvalidInput("riemann_liouville kernel needs H in (0, 1/2)");
  return KernelSpec(KernelFamily::riemann_liouville, hurst - 0.5, 0.0, 0.0, alpha);
}

KernelSpec KernelSpec::gamma_fractional(double mu, double c, double alpha) {
  if (!(c < 0.0)) throw InvalidInput("gamma_fractional kernel needs c < 0");
  return KernelSpec(KernelFamily::gamma_fractional, mu, c, 0.0, alpha);
}

KernelSpec KernelSpec::power_law(double mu, double beta, double alpha) {
  if (!(beta < -1.0)) throw InvalidInput("power_law kernel needs beta < -1");
  return KernelSpec(KernelFamily::power_law, mu, 0.0, beta, alpha);
}

KernelSpec KernelSpec::pure_power(double mu, double alpha) {
  return KernelSpec(KernelFamily::riemann_liouville, mu, 0.0, 0.0, alpha);
}

double KernelSpec::gamma() const noexcept { return std::clamp(alpha_ + mu_, 0.01, 0.99); }

double KernelSpec::smooth_factor(double t) const noexcept {
  switch (family_) {
    case KernelFamily::riemann_liouville: return 1.0;
    case KernelFamily::gamma_fractional: return std::exp(c_ * t);
    case KernelFamily::power_law: return std::pow(1.0 + t, beta_ - mu_);
  }
  return 1.0;
}

double KernelSpec::smooth_defect(double eps, double horizon, std::size_t n) const {
  double worst = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = horizon * static_cast<double>(i) / static_cast<double>(n);
    worst = std::max(worst, std::abs(smooth_factor(eps * t) - 1.0));
  }
  return worst;
}

double kernel_eval(const KernelSpec& k, double t) {
  if (!(t > 0.0)) throw DomainError("kernel is singular at t <= 0");
  return k.smooth_factor(t) * std::pow(t, k.mu());
}

namespace {

// (hi^p - lo^p) / p for 0 <= lo < hi, p > 0, without cancellation.
double power_cell(double lo, double hi, double p) {
  if (lo == 0.0) return std::pow(hi, p) / p;
  return -std::pow(hi, p) * std::expm1(p * std::log1p((lo - hi) / hi)) / p;
}

}  // namespace

ConvWeights::ConvWeights(const KernelSpec& k, std::size_t n, Targets targets, double eps,
                         double horizon)
    : n_(n), targets_(targets), horizon_(horizon) {
  if (n < 1) throw InvalidInput("convolution weights need n >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("kernel scale eps must lie in (0,1]");
  if (!(horizon > 0.0)) throw InvalidInput("horizon must be positive");
  const double p = k.mu() + 1.0;
  const double dt = horizon / static_cast<double>(n);
  const double scale = std::pow(dt, p);
  lag_.resize(n);
  // eps^{-mu} * kappa(eps u) = L(eps u) u^mu, so eps enters only through L.
  if (targets == Targets::nodes) {
    for (std::size_t l = 1; l <= n; ++l) {
      const double lo = static_cast<double>(l - 1), hi = static_cast<double>(l);
      lag_[l - 1] = scale * power_cell(lo, hi, p) * k.smooth_factor(eps * (lo + 0.5) * dt);
    }
  } else {
    lag_[0] = scale * power_cell(0.0, 0.5, p) * k.smooth_factor(eps * 0.25 * dt);
    for (std::size_t l = 1; l < n; ++l) {
      const double lo = static_cast<double>(l) - 0.5, hi = static_cast<double>(l) + 0.5;
      lag_[l] = scale * power_cell(lo, hi, p) * k.smooth_factor(eps * static_cast<double>(l) * dt);
    }
  }
}

double ConvWeights::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

std::vector<double> ConvWeights::apply(std::span<const double> cell_values) const {
  if (cell_values.size() != n_) throw ShapeError("convolution input must have n cell values");
  std::vector<double> out(rows(), 0.0);
  for (std::size_t i = 0; i < rows(); ++i) {
    const std::size_t jend = targets_ == Targets::nodes ? i : i + 1;
    double s = 0.0;
    for (std::size_t j = 0; j < jend; ++j) s += (*this)(i, j) * cell_values[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> ConvWeights::apply_transpose(std::span<const double> target_values) const {
  if (target_values.size() != rows()) throw ShapeError("transpose input must have one value per target");
  std::vector<double> out(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t ibeg = targets_ == Targets::nodes ? j + 1 : j;
    double s = 0.0;
    for (std::size_t i = ibeg; i < rows(); ++i) s += (*this)(i, j) * target_values[i];
    out[j] = s;
  }
  return out;
}

std::vector<double> ConvWeights::dense() const {
  std::vector<double> d(rows() * n_, 0.0);
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < n_; ++j) d[i * n_ + j] = (*this)(i, j);
  return d;
}

GridFunction apply_k0(const KernelSpec& k, std::span<const double> cell_values, double horizon) {
  if (k.family() != KernelFamily::riemann_liouville)
    throw FamilyError("K_0 is defined for the riemann_liouville kernel only");
  const ConvWeights w(k, cell_values.size(), Targets::nodes, 1.0, horizon);
  return GridFunction(horizon, w.apply(cell_values));
}

GridFunction apply_k_eps(const KernelSpec& k, const GridFunction& path, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("kernel scale eps must lie in (0,1]");
  const ConvWeights w(k, path.cells(), Targets::nodes, eps, path.horizon());
  std::vector<double> slopes(path.cells());
  for (std::size_t j = 0; j < slopes.size(); ++j) slopes[j] = path.slope(j);
  return GridFunction(path.horizon(), w.apply(slopes));
}

GridFunction apply_k_path(const KernelSpec& k, const GridFunction& path) {
  return apply_k_eps(k, path, 1.0);
}

bool KepsReport::ok() const noexcept {
  return monotone && std::none_of(rows.begin(), rows.end(), [](const KepsRow& r) { return r.violation; });
}

KepsReport keps_convergence_report(const KernelSpec& k, const std::vector<GridFunction>& paths,
                                   const std::vector<double>& eps_ladder, double gamma) {
  if (eps_ladder.empty()) throw InvalidInput("eps ladder must not be empty");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0 && eps_ladder[i] <= 1.0))
      throw InvalidInput("eps ladder entries must lie in (0,1]");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
      throw InvalidInput("eps ladder must be strictly decreasing");
  }
  const KernelSpec reference = KernelSpec::pure_power(k.mu(), k.alpha());
  KepsReport report;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const GridFunction& path = paths[p];
    const GridFunction limit = apply_k_path(reference, path);
    const double path_norm = holder_norm(path, k.alpha());
    double constant = 0.0;
    double previous = 0.0;
    for (std::size_t e = 0; e < eps_ladder.size(); ++e) {
      const double eps = eps_ladder[e];
      KepsRow row;
      row.path = p;
      row.eps = eps;
      row.distance = holder_dist(apply_k_eps(k, path, eps), limit, gamma);
      const double factor = (eps + k.smooth_defect(eps, path.horizon())) * path_norm;
      if (e == 0) constant = factor > 0.0 ? row.distance / factor : 0.0;
      row.envelope = constant * factor;
      row.violation = row.distance > row.envelope * (1.0 + 1e-9) + 1e-13;
      if (e > 0 && row.distance > previous * (1.0 + 1e-9) + 1e-13) report.monotone = false;
      previous = row.distance;
      report.rows.push_back(row);
    }
    report.fitted_constant.push_back(constant);
  }
  return report;
}

}  // namespace roughldp
