#include "roughldp/grid_path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "roughldp/csv.hpp"
#include "roughldp/errors.hpp"

namespace roughldp {

GridFunction::GridFunction(double horizon, std::vector<double> values)
    : horizon_(horizon), values_(std::move(values)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
    throw InvalidInput("grid horizon must be positive and finite");
  if (values_.size() < 2) throw InvalidInput("grid function needs at least one cell");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidInput("grid function values must be finite");
}

GridFunction GridFunction::sample(double horizon, std::size_t n,
                                  const std::function<double(double)>& f) {
  if (n < 1) throw InvalidInput("grid needs n >= 1");
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    v[i] = f(horizon * static_cast<double>(i) / static_cast<double>(n));
  return GridFunction(horizon, std::move(v));
}

GridFunction GridFunction::constant(double horizon, std::size_t n, double c) {
  if (n < 1) throw InvalidInput("grid needs n >= 1");
  return GridFunction(horizon, std::vector<double>(n + 1, c));
}

bool same_grid(const GridFunction& x, const GridFunction& y) noexcept {
  return x.cells() == y.cells() && x.horizon() == y.horizon();
}

void require_same_grid(const GridFunction& x, const GridFunction& y, const char* what) {
  if (!same_grid(x, y)) throw ShapeError(std::string(what) + ": grid mismatch");
}

namespace {

template <class Op>
GridFunction combine(const GridFunction& x, const GridFunction& y, Op op) {
  require_same_grid(x, y, "grid arithmetic");
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(x[i], y[i]);
  return GridFunction(x.horizon(), std::move(v));
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("Hoelder exponent must lie in (0,1]");
}

// Increment part of the Hoelder norm restricted to lags 1..max_lag.
double increment_sup(const GridFunction& x, double alpha, std::size_t max_lag) {
  const std::size_t n = x.cells();
  if (n > kMaxNormCells) throw InvalidInput("grid too fine for O(n^2) Hoelder norm (n > 4096)");
  max_lag = std::min(max_lag, n);
  std::vector<double> inv_scale(max_lag + 1);
  for (std::size_t l = 1; l <= max_lag; ++l)
    inv_scale[l] = 1.0 / std::pow(static_cast<double>(l) * x.step(), alpha);
  const auto v = x.values();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t jmax = std::min(n, i + max_lag);
    for (std::size_t j = i + 1; j <= jmax; ++j)
      best = std::max(best, std::abs(v[j] - v[i]) * inv_scale[j - i]);
  }
  return best;
}

}  // namespace

GridFunction operator+(const GridFunction& x, const GridFunction& y) {
  return combine(x, y, [](double a, double b) { return a + b; });
}

GridFunction operator-(const GridFunction& x, const GridFunction& y) {
  return combine(x, y, [](double a, double b) { return a - b; });
}

GridFunction operator*(double c, const GridFunction& x) {
  std::vector<double> v(x.values().begin(), x.values().end());
  for (double& e : v) e *= c;
  return GridFunction(x.horizon(), std::move(v));
}

double holder_norm(const GridFunction& x, double alpha) {
  check_alpha(alpha);
  return std::abs(x.front()) + increment_sup(x, alpha, x.cells());
}

double holder_dist(const GridFunction& x, const GridFunction& y, double alpha) {
  require_same_grid(x, y, "holder_dist");
  return holder_norm(x - y, alpha);
}

double modulus(const GridFunction& x, double alpha, double delta) {
  check_alpha(alpha);
  if (!(delta > 0.0)) throw InvalidInput("modulus window must be positive");
  // Relative slack so that delta = k*dt admits lag k despite rounding.
  const double lags = delta / x.step() * (1.0 + 1e-12);
  if (lags < 1.0) return 0.0;
  const auto max_lag = static_cast<std::size_t>(std::min(lags, static_cast<double>(x.cells())));
  return increment_sup(x, alpha, max_lag);
}

GridFunction resample(const GridFunction& x, std::size_t m) {
  if (m < 1) throw InvalidInput("resample needs m >= 1");
  const std::size_t n = x.cells();
  std::vector<double> v(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    // Position in units of source cells; exact integer arithmetic when m | n or n | m.
    const double pos = static_cast<double>(k * n) / static_cast<double>(m);
    const auto j = std::min(static_cast<std::size_t>(pos), n - 1);
    const double frac = pos - static_cast<double>(j);
    v[k] = frac == 0.0 ? x[j] : x[j] + frac * (x[j + 1] - x[j]);
  }
  v[m] = x.back();
  return GridFunction(x.horizon(), std::move(v));
}

void write_csv(std::ostream& os, const GridFunction& x) {
  os << "t,value\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    os << csv::fmt(x.time(i)) << ',' << csv::fmt(x[i]) << '\n';
}

GridFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,value", 0) != 0)
    throw InvalidInput("grid CSV must start with header 't,value'");
  std::vector<double> ts, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput("grid CSV row without ',': " + line);
    try {
      ts.push_back(std::stod(line.substr(0, comma)));
      vs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw InvalidInput("grid CSV row is not numeric: " + line);
    }
  }
  if (ts.size() < 2) throw InvalidInput("grid CSV needs at least two rows");
  const double horizon = ts.back();
  const double n = static_cast<double>(ts.size() - 1);
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (std::abs(ts[i] - horizon * static_cast<double>(i) / n) > 1e-12 * std::max(1.0, horizon))
      throw InvalidInput("grid CSV times are not a uniform grid starting at 0");
  return GridFunction(horizon, std::move(vs));
}

}  // namespace roughldp
