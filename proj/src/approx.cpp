#include "roughldp/approx.hpp"

#include <cmath>
#include <ostream>

#include "roughldp/csv.hpp"
#include "roughldp/errors.hpp"

namespace roughldp {

StoppingPartition stopping_times(const GridFunction& a, double delta) {
  if (!(delta > 0.0)) throw InvalidInput("stopping threshold delta must be positive");
  StoppingPartition p;
  p.delta = delta;
  p.nodes.push_back(0);
  const std::size_t n = a.cells();
  std::size_t anchor = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (std::abs(a[i] - a[anchor]) > delta) {
      p.nodes.push_back(i);
      anchor = i;
    }
  }
  if (p.nodes.back() != n) p.nodes.push_back(n);
  for (std::size_t k : p.nodes) p.times.push_back(a.time(k));
  return p;
}

GridFunction frozen_integrand(const GridFunction& a, double delta) {
  const StoppingPartition p = stopping_times(a, delta);
  std::vector<double> v(a.size());
  for (std::size_t k = 1; k < p.nodes.size(); ++k)
    for (std::size_t i = p.nodes[k - 1]; i < p.nodes[k]; ++i) v[i] = a[p.nodes[k - 1]];
  v.back() = a.back();
  return GridFunction(a.horizon(), std::move(v));
}

GridFunction g_delta(const GridFunction& a, const GridFunction& x, double delta) {
  require_same_grid(a, x, "g_delta");
  const StoppingPartition p = stopping_times(a, delta);
  std::vector<double> g(x.size(), 0.0);
  // Node values of the displayed sum: the running anchor times the x increment.
  for (std::size_t k = 1; k < p.nodes.size(); ++k) {
    const std::size_t lo = p.nodes[k - 1], hi = p.nodes[k];
    const double anchor = a[lo];
    for (std::size_t i = lo + 1; i <= hi; ++i) g[i] = g[lo] + anchor * (x[i] - x[lo]);
  }
  return GridFunction(x.horizon(), std::move(g));
}

GridFunction riemann_stieltjes(const GridFunction& a, const GridFunction& x) {
  require_same_grid(a, x, "riemann_stieltjes");
  std::vector<double> s(x.size(), 0.0);
  for (std::size_t k = 0; k < x.cells(); ++k) s[k + 1] = s[k] + a[k] * x.increment(k);
  return GridFunction(x.horizon(), std::move(s));
}

GDeltaReport gdelta_convergence(const GridFunction& a, const GridFunction& x, double beta,
                                std::span<const double> delta_ladder, double tolerance) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidInput("beta must lie in (0,1)");
  for (std::size_t i = 1; i < delta_ladder.size(); ++i)
    if (!(delta_ladder[i] < delta_ladder[i - 1])) throw InvalidInput("delta ladder must decrease");
  GDeltaReport r;
  const GridFunction reference = riemann_stieltjes(a, x);
  r.x_norm = holder_norm(x, beta);
  for (double delta : delta_ladder) {
    const double d = holder_dist(g_delta(a, x, delta), reference, beta);
    if (!r.rows.empty() && d > 1.05 * r.rows.back().holder_dist) r.monotone = false;
    r.rows.push_back({delta, d});
  }
  if (!r.rows.empty()) r.below_tolerance = r.rows.back().holder_dist < tolerance * r.x_norm;
  return r;
}

void write_csv(std::ostream& os, const GDeltaReport& report) {
  os << "delta,holder_dist\n";
  for (const auto& row : report.rows) os << csv::fmt(row.delta) << ',' << csv::fmt(row.holder_dist) << '\n';
}

}  // namespace roughldp
