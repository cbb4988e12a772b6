#include "roughldp/lift.hpp"

#include <algorithm>
#include <cmath>

#include "roughldp/errors.hpp"
#include "roughldp/kernels.hpp"

namespace roughldp {

YoungLift::YoungLift(GridFunction z1, GridFunction z2, std::array<std::vector<double>, 4> anchored)
    : z1_(std::move(z1)), z2_(std::move(z2)), second_(std::move(anchored)) {
  require_same_grid(z1_, z2_, "YoungLift");
  for (const auto& s : second_)
    if (s.size() != z1_.size()) throw ShapeError("YoungLift: second level must have one value per node");
}

double YoungLift::second(std::size_t i, std::size_t j, std::size_t s, std::size_t t) const noexcept {
  const GridFunction& zi = component(i);
  const GridFunction& zj = component(j);
  return anchored(i, j, t) - anchored(i, j, s) - (zi[s] - zi[0]) * (zj[t] - zj[s]);
}

namespace {

// int over cell k of (z^i - z^i_base) dz^j for the linear interpolant.
inline double cell_area(const GridFunction& zi, const GridFunction& zj, std::size_t k, double base) {
  return (0.5 * (zi[k] + zi[k + 1]) - base) * zj.increment(k);
}

double direct_entry(const YoungLift& lift, std::size_t i, std::size_t j, std::size_t s, std::size_t t) {
  const GridFunction& zi = lift.component(i);
  if (i == 0 && j == 0) {
    const double d = zi[t] - zi[s];
    return 0.5 * d * d;
  }
  return direct_second(zi, lift.component(j), s, t);
}

}  // namespace

double direct_second(const GridFunction& zi, const GridFunction& zj, std::size_t s, std::size_t t) {
  require_same_grid(zi, zj, "direct_second");
  double acc = 0.0;
  for (std::size_t k = s; k < t; ++k) acc += cell_area(zi, zj, k, zi[s]);
  return acc;
}

YoungLift young_pair(const GridFunction& z1, const GridFunction& z2) {
  require_same_grid(z1, z2, "young_pair");
  const std::size_t n = z1.cells();
  const GridFunction* comp[2] = {&z1, &z2};
  std::array<std::vector<double>, 4> anchored;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<double>& a = anchored[2 * i + j];
      a.assign(n + 1, 0.0);
      const GridFunction& zi = *comp[i];
      if (i == 0 && j == 0) {
        for (std::size_t k = 0; k <= n; ++k) a[k] = 0.5 * (zi[k] - zi[0]) * (zi[k] - zi[0]);
        continue;
      }
      for (std::size_t k = 0; k < n; ++k) a[k + 1] = a[k] + cell_area(zi, *comp[j], k, zi[0]);
    }
  }
  return YoungLift(z1, z2, std::move(anchored));
}

double chen_defect(const YoungLift& lift) {
  const std::size_t n = lift.cells();
  double worst = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const GridFunction& zi = lift.component(i);
      const GridFunction& zj = lift.component(j);
      // Triples (0, u, t): stored anchors against direct increments over [u, t].
      for (std::size_t u = 1; u < n; ++u) {
        double running = 0.0;
        for (std::size_t t = u + 1; t <= n; ++t) {
          running += cell_area(zi, zj, t - 1, zi[u]);
          const double local = (i == 0 && j == 0) ? 0.5 * (zi[t] - zi[u]) * (zi[t] - zi[u]) : running;
          const double d = lift.anchored(i, j, t) - lift.anchored(i, j, u) - local -
                           (zi[u] - zi[0]) * (zj[t] - zj[u]);
          worst = std::max(worst, std::abs(d));
        }
      }
      // Strided interior triples, all increments by direct quadrature.
      const std::size_t stride = std::max<std::size_t>(1, n / 16);
      for (std::size_t s = stride; s < n; s += stride)
        for (std::size_t u = s + stride; u < n; u += stride)
          for (std::size_t t = u + stride; t <= n; t += stride) {
            const double d = direct_entry(lift, i, j, s, t) - direct_entry(lift, i, j, s, u) -
                             direct_entry(lift, i, j, u, t) - (zi[u] - zi[s]) * (zj[t] - zj[u]);
            worst = std::max(worst, std::abs(d));
          }
    }
  }
  return worst;
}

double integration_by_parts_defect(const YoungLift& lift) {
  const std::size_t n = lift.cells();
  const GridFunction& z1 = lift.component(0);
  const GridFunction& z2 = lift.component(1);
  double worst = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t <= n; ++t) {
      const double d = lift.second(0, 1, s, t) + lift.second(1, 0, s, t) - (z1[t] - z1[s]) * (z2[t] - z2[s]);
      worst = std::max(worst, std::abs(d));
    }
  return worst;
}

YoungBoundReport young_bound_check(const YoungLift& lift, double alpha1, double alpha2) {
  if (!(alpha1 + alpha2 > 1.0)) throw InvalidInput("Young estimate needs alpha1 + alpha2 > 1");
  YoungBoundReport r;
  r.young_constant = 1.0 / (1.0 - std::pow(2.0, 1.0 - alpha1 - alpha2));
  const double norms = holder_norm(lift.component(0), alpha1) * holder_norm(lift.component(1), alpha2);
  if (norms == 0.0) return r;
  const std::size_t n = lift.cells();
  const double dt = lift.component(0).step();
  std::vector<double> scale(n + 1);
  for (std::size_t l = 1; l <= n; ++l) scale[l] = std::pow(static_cast<double>(l) * dt, alpha1 + alpha2);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t <= n; ++t)
      r.ratio = std::max(r.ratio, std::abs(lift.second(0, 1, s, t)) / (norms * scale[t - s]));
  r.within_bound = r.ratio <= r.young_constant;
  return r;
}

SkeletonResult skeleton_solve(const FunctionFamily& sigma1, const FunctionFamily& sigma2,
                              const GridFunction& a, const GridFunction& atilde, const GridFunction& x,
                              double y0, std::size_t substeps, double hoelder_alpha) {
  require_same_grid(a, x, "skeleton_solve");
  require_same_grid(atilde, x, "skeleton_solve");
  if (substeps < 1) throw InvalidInput("skeleton_solve needs at least one substep");
  const std::size_t n = x.cells();
  const double dt = x.step();
  const double h = dt / static_cast<double>(substeps);
  std::vector<double> y(n + 1, 0.0);
  double state = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t0 = x.time(k);
    const double slope = x.slope(k);
    const double da = a.increment(k) / dt, dat = atilde.increment(k) / dt;
    auto rhs = [&](double tau, double yy) {
      const double t = t0 + tau;
      return family_value(sigma1, y0 + yy, t) * (a[k] + da * tau) * slope +
             family_value(sigma2, y0 + yy, t) * (atilde[k] + dat * tau);
    };
    for (std::size_t m = 0; m < substeps; ++m) {
      const double tau = static_cast<double>(m) * h;
      const double k1 = rhs(tau, state);
      const double k2 = rhs(tau + 0.5 * h, state + 0.5 * h * k1);
      const double k3 = rhs(tau + 0.5 * h, state + 0.5 * h * k2);
      const double k4 = rhs(tau + h, state + h * k3);
      state += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!std::isfinite(state)) throw BlowUpError("skeleton ODE state became non-finite");
    y[k + 1] = state;
  }
  return SkeletonResult{GridFunction(x.horizon(), std::move(y)),
                        {holder_norm(a, hoelder_alpha), holder_norm(atilde, hoelder_alpha),
                         holder_norm(x, hoelder_alpha)}};
}

GridFunction short_time_skeleton(const ModelSpec& m, const GridFunction& w, const GridFunction& wperp) {
  require_valid(m);
  require_same_grid(w, wperp, "short_time_skeleton");
  const std::size_t n = w.cells();
  std::vector<double> slopes(n);
  for (std::size_t j = 0; j < n; ++j) slopes[j] = w.slope(j);
  const GridFunction kw = apply_k0(KernelSpec::pure_power(m.kernel.mu(), m.kernel.alpha()), slopes, w.horizon());
  const double sigma0 = family_value(m.sigma, m.y0);
  const double a_scale = family_value(m.a, m.a0);
  const double perp = std::sqrt(1.0 - m.rho * m.rho);
  std::vector<double> integrand(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    integrand[k] = family_value(m.f, family_value(m.psi, a_scale * kw[k]), 0.0);
  std::vector<double> y(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = m.rho * w.increment(k) + perp * wperp.increment(k);
    y[k + 1] = y[k] + sigma0 * 0.5 * (integrand[k] + integrand[k + 1]) * dx;
  }
  return GridFunction(w.horizon(), std::move(y));
}

}  // namespace roughldp
