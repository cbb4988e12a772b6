#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "roughldp/grid_path.hpp"
#include "roughldp/model.hpp"

namespace roughldp {

/// Two-component grid path with its second level. Second-level values are
/// anchored at 0, area(i,j)[k] = z^{(ij)}_{0,t_k}; increments over any grid
/// pair follow from Chen's relation. Component indices are 0 and 1.
class YoungLift {
 public:
  YoungLift(GridFunction z1, GridFunction z2, std::array<std::vector<double>, 4> anchored);

  const GridFunction& component(std::size_t i) const noexcept { return i == 0 ? z1_ : z2_; }
  std::size_t cells() const noexcept { return z1_.cells(); }

  /// Stored z^{(ij)}_{0,t_k}.
  double anchored(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return second_[2 * i + j][k];
  }
  /// z^{(ij)}_{t_s,t_t} reconstructed from the anchors via Chen's relation.
  double second(std::size_t i, std::size_t j, std::size_t s, std::size_t t) const noexcept;

  /// Overwrites one anchored value (fault injection for the Chen check).
  void perturb(std::size_t i, std::size_t j, std::size_t k, double delta) { second_[2 * i + j][k] += delta; }

 private:
  GridFunction z1_, z2_;
  std::array<std::vector<double>, 4> second_;
};

/// Young pairing of the piecewise-linear interpolants: on each cell,
/// int (z^i - z^i_s) dz^j = (cell average of z^i - z^i_s) * dz^j exactly;
/// z^{(11)} uses the closed square formula.
YoungLift young_pair(const GridFunction& z1, const GridFunction& z2);

/// Direct quadrature of z^{(ij)}_{t_s,t_t} from the first level.
double direct_second(const GridFunction& zi, const GridFunction& zj, std::size_t s, std::size_t t);

/// max |z_st - z_su - z_ut - z_su (x) z_ut| (entrywise) over a deterministic
/// sample of grid triples s < u < t. Increments starting at 0 are the stored
/// anchors; all others come from direct quadrature of the first level.
double chen_defect(const YoungLift& lift);

/// max |z^{12}_{st} + z^{21}_{st} - z^1_{st} z^2_{st}| over grid pairs.
double integration_by_parts_defect(const YoungLift& lift);

struct YoungBoundReport {
  double ratio = 0.0;           // max |z^{12}_st| / (|z1| |z2| |t-s|^{a1+a2})
  double young_constant = 0.0;  // 1 / (1 - 2^{1 - a1 - a2})
  bool within_bound = true;
};

YoungBoundReport young_bound_check(const YoungLift& lift, double alpha1, double alpha2);

struct SkeletonResult {
  GridFunction y;                 // Ybar with Ybar(0) = 0
  std::array<double, 3> driver_norms{};  // Hoelder norms of a, atilde, x
};

/// y' = s1(y0 + y) a(t) x'(t) + s2(y0 + y) atilde(t), y(0) = 0, with x' the
/// cell slope of x and a, atilde linear on each cell. Classical RK4 with
/// `substeps` steps per cell.
SkeletonResult skeleton_solve(const FunctionFamily& sigma1, const FunctionFamily& sigma2,
                              const GridFunction& a, const GridFunction& atilde, const GridFunction& x,
                              double y0, std::size_t substeps = 4, double hoelder_alpha = 0.45);

/// ytilde = sigma(Y0) int_0^. f(psi(a(A0) K_0 w')_r, 0) dx_r with
/// x = rho w + sqrt(1 - rho^2) w_perp, trapezoid rule on the grid.
GridFunction short_time_skeleton(const ModelSpec& m, const GridFunction& w, const GridFunction& wperp);

}  // namespace roughldp
