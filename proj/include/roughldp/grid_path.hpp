#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace roughldp {

/// Real-valued function sampled at the n+1 nodes t_i = i*T/n of a uniform
/// grid on [0, T]. Values are immutable after construction.
class GridFunction {
 public:
  GridFunction(double horizon, std::vector<double> values);

  /// Samples `f` at the nodes of an n-cell grid on [0, horizon].
  static GridFunction sample(double horizon, std::size_t n,
                             const std::function<double(double)>& f);
  static GridFunction constant(double horizon, std::size_t n, double c);

  double horizon() const noexcept { return horizon_; }
  std::size_t cells() const noexcept { return values_.size() - 1; }
  std::size_t size() const noexcept { return values_.size(); }
  double step() const noexcept { return horizon_ / static_cast<double>(cells()); }
  double time(std::size_t i) const noexcept {
    return horizon_ * static_cast<double>(i) / static_cast<double>(cells());
  }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double front() const noexcept { return values_.front(); }
  double back() const noexcept { return values_.back(); }
  std::span<const double> values() const noexcept { return values_; }

  /// Increment over cell j: x_{j+1} - x_j.
  double increment(std::size_t j) const noexcept { return values_[j + 1] - values_[j]; }
  /// Slope over cell j.
  double slope(std::size_t j) const noexcept { return increment(j) / step(); }

 private:
  double horizon_;
  std::vector<double> values_;
};

bool same_grid(const GridFunction& x, const GridFunction& y) noexcept;

/// Throws ShapeError unless `x` and `y` live on the same grid.
void require_same_grid(const GridFunction& x, const GridFunction& y, const char* what);

GridFunction operator+(const GridFunction& x, const GridFunction& y);
GridFunction operator-(const GridFunction& x, const GridFunction& y);
GridFunction operator*(double c, const GridFunction& x);

/// Largest grid size accepted by the O(n^2) norm computations.
inline constexpr std::size_t kMaxNormCells = 4096;

/// |x_0| + max_{i<j} |x_j - x_i| / (t_j - t_i)^alpha over all grid pairs.
double holder_norm(const GridFunction& x, double alpha);

/// holder_norm(x - y, alpha).
double holder_dist(const GridFunction& x, const GridFunction& y, double alpha);

/// max |x_j - x_i| / (t_j - t_i)^alpha over grid pairs with t_j - t_i <= delta.
double modulus(const GridFunction& x, double alpha, double delta);

/// Piecewise-linear interpolation onto an m-cell grid on the same horizon.
GridFunction resample(const GridFunction& x, std::size_t m);

/// Two columns `t,value` with a header row, 17 significant digits.
void write_csv(std::ostream& os, const GridFunction& x);
GridFunction read_csv(std::istream& is);

}  // namespace roughldp
