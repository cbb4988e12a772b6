#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "roughldp/grid_path.hpp"

namespace roughldp {

enum class KernelFamily { riemann_liouville, gamma_fractional, power_law };

std::string to_string(KernelFamily f);

/// Singular kernel kappa(t) = L(t) * t^mu with a smooth factor L, L(0) = 1.
///
///   riemann_liouville(H):   mu = H - 1/2,  L = 1
///   gamma_fractional(mu,c): L(t) = exp(c t),            c < 0
///   power_law(mu,beta):     L(t) = (1+t)^(beta - mu),   beta < -1
///
/// `alpha` is the Hoelder regularity assumed for input paths; the output
/// regularity is gamma = alpha + mu, clamped into (0,1).
class KernelSpec {
 public:
  static KernelSpec riemann_liouville(double hurst, double alpha = kDefaultAlpha);
  static KernelSpec gamma_fractional(double mu, double c, double alpha = kDefaultAlpha);
  static KernelSpec power_law(double mu, double beta, double alpha = kDefaultAlpha);

  /// t^mu with L = 1 for any mu in (-1,1). Tagged riemann_liouville; this is
  /// the comparison operator K_0 for kernels whose exponent lies outside the
  /// Riemann-Liouville range H in (0,1/2).
  static KernelSpec pure_power(double mu, double alpha = kDefaultAlpha);

  KernelFamily family() const noexcept { return family_; }
  double mu() const noexcept { return mu_; }
  double hurst() const noexcept { return mu_ + 0.5; }
  double c() const noexcept { return c_; }
  double beta() const noexcept { return beta_; }
  double alpha() const noexcept { return alpha_; }
  double gamma() const noexcept;

  /// Smooth factor L(t), t >= 0.
  double smooth_factor(double t) const noexcept;

  /// sup_{t in [0,T]} |L(eps t) - 1|, sampled on n cells.
  double smooth_defect(double eps, double horizon = 1.0, std::size_t n = 1024) const;

  static constexpr double kDefaultAlpha = 0.45;

 private:
  KernelSpec(KernelFamily f, double mu, double c, double beta, double alpha);
  KernelFamily family_;
  double mu_;
  double c_ = 0.0;
  double beta_ = 0.0;
  double alpha_;
};

/// kappa(t) = L(t) t^mu; throws DomainError for t <= 0.
double kernel_eval(const KernelSpec& k, double t);

enum class Targets { nodes, midpoints };

/// Cell-integrated convolution weights
///
///   w[i][j] = eps^{-mu} * int_{cell j, r < s_i} kappa(eps (s_i - r)) dr
///
/// with the t^mu part integrated in closed form and L frozen at the middle
/// of the integration interval. Targets are the n+1 nodes or the n cell
/// midpoints of an n-cell grid on [0, T]. For midpoint targets the cell
/// containing the target contributes its partial integral up to the target.
/// On a uniform grid the table is Toeplitz, so only one weight per lag is
/// stored.
class ConvWeights {
 public:
  ConvWeights(const KernelSpec& k, std::size_t n, Targets targets, double eps = 1.0,
              double horizon = 1.0);

  std::size_t cells() const noexcept { return n_; }
  std::size_t rows() const noexcept { return targets_ == Targets::nodes ? n_ + 1 : n_; }
  Targets targets() const noexcept { return targets_; }
  double horizon() const noexcept { return horizon_; }

  /// Weight of cell j for target i (zero for cells after the target).
  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (targets_ == Targets::nodes) return j < i ? lag_[i - j - 1] : 0.0;
    return j <= i ? lag_[i - j] : 0.0;
  }

  /// Weight per lag. Nodes: lag l = i - j >= 1 stored at l-1. Midpoints:
  /// lag l = i - j >= 0 stored at l (l = 0 is the partial cell).
  std::span<const double> lag_weights() const noexcept { return lag_; }

  double row_sum(std::size_t i) const;

  /// out_i = sum_j w[i][j] * cell_values[j].
  std::vector<double> apply(std::span<const double> cell_values) const;
  /// out_j = sum_i w[i][j] * target_values[i].
  std::vector<double> apply_transpose(std::span<const double> target_values) const;

  /// Row-major rows() x cells() dense copy.
  std::vector<double> dense() const;

 private:
  std::size_t n_;
  Targets targets_;
  double horizon_;
  std::vector<double> lag_;
};

/// (K_0 g)(t_i) = int_0^{t_i} kappa_H(t_i - r) g_r dr for piecewise-constant g
/// given by its n cell values. Requires a riemann_liouville kernel.
GridFunction apply_k0(const KernelSpec& k, std::span<const double> cell_values,
                      double horizon = 1.0);

/// (K A)(t_i) = int_0^{t_i} kappa(t_i - r) dA_r for the piecewise-linear A.
GridFunction apply_k_path(const KernelSpec& k, const GridFunction& path);

/// Scaled operator K^eps A = eps^{-mu} int kappa(eps (t - r)) dA_r, eps in (0,1].
GridFunction apply_k_eps(const KernelSpec& k, const GridFunction& path, double eps);

struct KepsRow {
  std::size_t path = 0;
  double eps = 0.0;
  double distance = 0.0;   // gamma-Hoelder distance to the pure-power operator
  double envelope = 0.0;   // C * (eps + sup|L(eps t) - 1|) * ||path||_alpha
  bool violation = false;  // distance exceeds the fitted envelope
};

struct KepsReport {
  std::vector<KepsRow> rows;
  std::vector<double> fitted_constant;  // one C per path, fit on the largest eps
  bool monotone = true;                 // distances nonincreasing along the ladder
  bool ok() const noexcept;
};

/// Distances between K^eps A and K_0 A (pure-power kernel with the same mu)
/// along a strictly decreasing eps ladder, with an envelope fitted on the
/// first rung.
KepsReport keps_convergence_report(const KernelSpec& k, const std::vector<GridFunction>& paths,
                                   const std::vector<double>& eps_ladder, double gamma);

}  // namespace roughldp
