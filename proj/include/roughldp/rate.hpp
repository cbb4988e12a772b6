#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "roughldp/kernels.hpp"
#include "roughldp/model.hpp"

namespace roughldp {

/// Discretization of the short-time rate functional
///
///   J(g) = 1/2 int g^2 + (z - rho s0 int f(v,0) g)^2 / (2 (1-rho^2) s0^2 int f(v,0)^2)
///
/// with s0 = sigma(Y0) and v = psi(a(A0) K_0 g), on n cells of [0,1]. The
/// control g is piecewise constant; all integrals use the midpoint rule and
/// v is evaluated at cell midpoints. K_0 is the pure-power operator with the
/// model kernel's exponent.
class RateFunctional {
 public:
  RateFunctional(const ModelSpec& m, std::size_t n);

  std::size_t cells() const noexcept { return n_; }
  double step() const noexcept { return dt_; }

  double value(double z, std::span<const double> g) const;

  /// Analytic gradient; returns false (leaving `grad` untouched) when some
  /// f derivative is unavailable at the current state.
  bool analytic_gradient(double z, std::span<const double> g, std::vector<double>& grad) const;

  /// Central differences with step 1e-6 (1 + |g_j|).
  std::vector<double> fd_gradient(double z, std::span<const double> g) const;

  /// psi(a(A0) K_0 g) at the cell midpoints.
  std::vector<double> volatility_state(std::span<const double> g) const;

  /// Value of f(psi(0), 0): the spot volatility factor.
  double spot_f() const;
  double spot_sigma() const noexcept { return sigma0_; }
  const ModelSpec& model() const noexcept { return model_; }

 private:
  ModelSpec model_;
  std::size_t n_;
  double dt_;
  double sigma0_;
  double a_scale_;
  ConvWeights weights_;
};

double objective(const ModelSpec& m, double z, std::span<const double> g);

struct Gradient {
  std::vector<double> values;
  bool finite_difference = false;  // analytic derivative unavailable somewhere
};

Gradient gradient(const ModelSpec& m, double z, std::span<const double> g);

struct RateResult {
  double z = 0.0;
  double value = 0.0;
  std::vector<double> control;
  double grad_norm = 0.0;  // sup norm of the discrete gradient
  std::size_t iterations = 0;
  std::string start_label;
  bool converged = false;
  bool finite_difference = false;  // some iterate used the fallback gradient
};

struct RateOptions {
  std::size_t n = 128;
  double tol = 1e-8;
  std::size_t max_iterations = 10000;
};

/// Multi-start minimization of the discretized rate functional. Starts:
/// "zero" (g = 0), "rho" (g = rho z / (s0 f0)), "plus" (g = |z|),
/// "minus" (g = -|z|). Returns the best converged start.
RateResult solve_rate(const ModelSpec& m, double z, const RateOptions& opts = {});
RateResult solve_rate(const RateFunctional& functional, double z, const RateOptions& opts = {});

struct LambdaStar {
  double x = 0.0;
  double value = 0.0;
  double argmin = 0.0;             // scan point attaining the minimum
  bool boundary_attained = true;   // minimum sits at y = x
};

struct LambdaOptions {
  RateOptions rate;
  double span = 0.0;       // 0 selects max(0.5 |x|, 0.05)
  std::size_t points = 8;
};

/// inf_{y > x} J(y) for x >= 0 (mirrored for x <= 0), scanned over
/// y = x +- k span / points, k = 0..points.
LambdaStar lambda_star(const ModelSpec& m, double x, const LambdaOptions& opts = {});
LambdaStar lambda_star(const RateFunctional& functional, double x, const LambdaOptions& opts = {});

struct SmileRow {
  double x = 0.0;
  double lambda_star = 0.0;
  double sigma_asym = 0.0;
  bool extrapolated = false;       // x == 0: two-sided limit
  bool boundary_attained = true;
};

struct SmileTable {
  std::vector<SmileRow> rows;
  /// sigma_asym decreasing across the rows straddling x = 0.
  bool negative_skew() const;
};

/// Rows (x, Lambda*(x), |x| / sqrt(2 Lambda*(x))), computed in parallel over x.
SmileTable smile(const ModelSpec& m, std::span<const double> x_grid, const LambdaOptions& opts = {},
                 std::size_t threads = 1);

/// Header `x,lambda_star,sigma_asym`.
void write_csv(std::ostream& os, const SmileTable& table);

}  // namespace roughldp
