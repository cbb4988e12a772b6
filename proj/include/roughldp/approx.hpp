#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "roughldp/grid_path.hpp"

namespace roughldp {

/// Grid indices of the stopping times tau_0 = 0 < tau_1 < ... ending at n.
struct StoppingPartition {
  double delta = 0.0;
  std::vector<std::size_t> nodes;
  std::vector<double> times;
};

/// Greedy scan: tau_k is the first node after tau_{k-1} with
/// |a - a(tau_{k-1})| > delta, else the final node.
StoppingPartition stopping_times(const GridFunction& a, double delta);

/// Piecewise-constant integrand: a(tau_{k-1}) on [tau_{k-1}, tau_k).
GridFunction frozen_integrand(const GridFunction& a, double delta);

/// sum_k a(tau_{k-1}) (x(t ^ tau_k) - x(t ^ tau_{k-1})) at every node.
GridFunction g_delta(const GridFunction& a, const GridFunction& x, double delta);

/// Left-point Riemann-Stieltjes sum int_0^t a dx at every node.
GridFunction riemann_stieltjes(const GridFunction& a, const GridFunction& x);

struct GDeltaRow {
  double delta = 0.0;
  double holder_dist = 0.0;
};

struct GDeltaReport {
  std::vector<GDeltaRow> rows;
  double x_norm = 0.0;       // ||x||_beta
  bool monotone = true;      // nonincreasing up to 5% slack
  bool below_tolerance = true;
  bool ok() const noexcept { return monotone && below_tolerance; }
};

/// Distances of g_delta(a, x, delta) to the left-point integral along a
/// decreasing ladder; the final distance must be below tolerance * ||x||_beta.
GDeltaReport gdelta_convergence(const GridFunction& a, const GridFunction& x, double beta,
                                std::span<const double> delta_ladder, double tolerance);

/// Header `delta,holder_dist`.
void write_csv(std::ostream& os, const GDeltaReport& report);

}  // namespace roughldp
