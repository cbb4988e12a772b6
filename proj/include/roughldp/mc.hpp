#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roughldp/model.hpp"
#include "roughldp/rate.hpp"

namespace roughldp {

struct MCConfig {
  std::size_t n_paths = 200000;
  std::size_t n_steps = 500;
  std::vector<double> maturities;
  std::uint64_t seed = 1;
  bool antithetic = false;
  std::size_t threads = 1;  // 0 = hardware concurrency
};

/// Counter-based generator: the k-th output of stream `key` is the SplitMix64
/// finalizer applied to key + (k+1) * golden_gamma. Path p of a run with seed
/// s uses key = mix(s, p, salt), so every path has its own substream and
/// results do not depend on how paths are scheduled across threads.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  explicit CounterRng(std::uint64_t key) noexcept : state_(key) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  static std::uint64_t stream_key(std::uint64_t seed, std::uint64_t path, std::uint64_t salt = 0) noexcept;

 private:
  std::uint64_t state_;
};

/// Sum with pairwise (cascade) reduction.
double pairwise_sum(std::span<const double> v);

struct TerminalSample {
  double t = 0.0;
  std::vector<double> y;      // finite terminal values Y_t, in path order
  std::size_t excluded = 0;   // paths with a non-finite state
};

/// Euler scheme for the full model on n_steps cells of [0,t]: Euler for A,
/// cell-integrated kernel weights for K A at the nodes (shared with the rate
/// solver), V = psi(K A), explicit Ito steps for Y. Throws EstimatorError if
/// more than 0.1% of paths are excluded.
TerminalSample simulate_terminal(const ModelSpec& m, double t, const MCConfig& cfg);

struct TailEstimate {
  double t = 0.0;
  double x = 0.0;
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;           // 95% normal approximation
  std::optional<double> rate_stat;     // -t^{2mu+1} log p_hat, when p_hat > 0
  std::size_t hits = 0;
  std::size_t paths = 0;
  bool zero_hits = false;
  bool undersampled = false;           // fewer than 10 hits
};

/// P(t^mu (Y_t - Y0) >= x) for x > 0, P(... <= x) for x < 0.
TailEstimate tail_prob(const ModelSpec& m, double t, double x, const MCConfig& cfg);
TailEstimate tail_from_sample(const TerminalSample& s, const ModelSpec& m, double x);

enum class OptionSide { put, call };
std::string to_string(OptionSide side);

struct PriceEstimate {
  double strike = 0.0;
  double price = 0.0;
  double std_error = 0.0;
  double ci_halfwidth = 0.0;   // 1.96 standard errors
  std::size_t itm_paths = 0;
};

/// OTM option on S_t = exp(Y_t) with strike exp(x t^{-mu}); put needs x <= 0,
/// call needs x >= 0.
PriceEstimate option_price(const ModelSpec& m, double t, double x, OptionSide side, const MCConfig& cfg);
PriceEstimate price_from_sample(const TerminalSample& s, const ModelSpec& m, double x, OptionSide side);
/// Price for an explicit strike (no moneyness restriction).
PriceEstimate price_at_strike(const TerminalSample& s, double strike, OptionSide side);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Zero-rate Black-Scholes price with total volatility vol_sqrt_t.
double bs_price(double spot, double strike, double vol_sqrt_t, OptionSide side);

/// Annualized implied volatility by bisection on total volatility.
double implied_vol(double price, double spot, double strike, double t, OptionSide side);

struct SmileGapRow {
  double t = 0.0;
  double x = 0.0;
  OptionSide side = OptionSide::put;
  PriceEstimate price;
  std::optional<double> implied;     // empty when undersampled or not invertible
  double sigma_asym = 0.0;
  double implied_ci = 0.0;           // implied vol half-width from the price interval
  std::optional<double> gap;         // |implied - sigma_asym| / sigma_asym
  bool undersampled = false;
  bool moment_caveat = false;        // call side: moment condition assumed
};

struct SmileGapReport {
  std::vector<SmileGapRow> rows;
  /// Per x (in x_grid order): gaps nonincreasing as t decreases.
  std::vector<bool> trend_ok;  // per x: gap nonincreasing as t shrinks, up to the CI
};

SmileGapReport smile_convergence_report(const ModelSpec& m, std::span<const double> x_grid,
                                        std::span<const double> maturities, const MCConfig& cfg,
                                        const LambdaOptions& lambda_opts = {});

enum class Integrand { constant, sign_switch, clipped_brownian };
std::string to_string(Integrand u);

struct UetCell {
  Integrand integrand = Integrand::constant;
  double eps = 0.0;
  double k = 0.0;
  double p_hat = 0.0;
  std::size_t hits = 0;
};

struct UetFit {
  Integrand integrand = Integrand::constant;
  double slope = 0.0;      // coefficient of K^2/eps in log p = a + slope K^2/eps
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t cells = 0;   // cells with hits
  double domination = 0.0; // max p / (U = 1 envelope) over cells with hits
  bool pass() const noexcept { return cells >= 3 && r2 >= 0.9 && slope < 0.0; }
};

struct UetReport {
  std::vector<UetCell> cells;
  std::vector<UetFit> fits;  // baseline U = 1 first, then the requested families
  bool ok() const noexcept;
};

/// Tail probabilities P(||U . B^eps||_alpha >= K) of Ito integrals against
/// B^eps = sqrt(eps) B on n_steps cells of [0,1], with the log-tail fitted
/// linearly in K^2/eps. The U = 1 baseline is always included.
UetReport uet_tail_experiment(double alpha, std::span<const double> eps_ladder, std::span<const double> k_ladder,
                              std::span<const Integrand> integrands, const MCConfig& cfg);

void write_csv(std::ostream& os, const UetReport& report);

}  // namespace roughldp
