#include <doctest.h>

#include <cmath>

#include "roughldp/errors.hpp"
#include "roughldp/kernels.hpp"
#include "support.hpp"

using namespace roughldp;

TEST_CASE("kernel_eval formulas") {
  CHECK(kernel_eval(KernelSpec::riemann_liouville(0.3), 1.0) == doctest::Approx(1.0));
  CHECK(kernel_eval(KernelSpec::gamma_fractional(-0.2, -1.0), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(kernel_eval(KernelSpec::power_law(-0.2, -2.0), 0.5) ==
        doctest::Approx(std::pow(0.5, -0.2) * std::pow(1.5, -1.8)).epsilon(1e-14));
  CHECK(kernel_eval(KernelSpec::power_law(-0.2, -2.0), 0.5) == doctest::Approx(0.55361).epsilon(1e-4));
  CHECK_THROWS_AS(kernel_eval(KernelSpec::riemann_liouville(0.3), 0.0), DomainError);
  CHECK_THROWS_AS(kernel_eval(KernelSpec::riemann_liouville(0.3), -0.1), DomainError);
}

TEST_CASE("kernel parameter ranges") {
  CHECK_THROWS_AS(KernelSpec::riemann_liouville(0.5), InvalidInput);
  CHECK_THROWS_AS(KernelSpec::riemann_liouville(0.0), InvalidInput);
  CHECK_THROWS_AS(KernelSpec::gamma_fractional(-0.2, 0.5), InvalidInput);
  CHECK_THROWS_AS(KernelSpec::power_law(-0.2, -0.5), InvalidInput);
  CHECK_THROWS_AS(KernelSpec::power_law(1.2, -2.0), InvalidInput);
  const KernelSpec k = KernelSpec::riemann_liouville(0.3);
  CHECK(k.mu() == doctest::Approx(-0.2));
  CHECK(k.gamma() == doctest::Approx(0.25));
  CHECK(KernelSpec::gamma_fractional(-0.2, -1.0).smooth_factor(0.0) == 1.0);
  CHECK(KernelSpec::power_law(-0.2, -2.0).smooth_factor(0.0) == 1.0);
}

TEST_CASE("conv_weights single cell and row sums") {
  const KernelSpec rl = KernelSpec::riemann_liouville(0.3);
  const ConvWeights one(rl, 1, Targets::nodes);
  CHECK(one(1, 0) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(one(0, 0) == 0.0);

  const ConvWeights w(rl, 200, Targets::nodes);
  for (std::size_t i = 0; i <= 200; ++i) {
    const double t = static_cast<double>(i) / 200.0;
    const double exact = std::pow(t, 0.8) / 0.8;
    CHECK(w.row_sum(i) == doctest::Approx(exact).epsilon(1e-14));
  }
  for (std::size_t i = 0; i <= 200; i += 17)
    for (std::size_t j = i; j < 200; ++j) CHECK(w(i, j) == 0.0);
}

TEST_CASE("conv_weights for RL do not depend on eps") {
  const KernelSpec rl = KernelSpec::riemann_liouville(0.2);
  const ConvWeights base(rl, 64, Targets::midpoints);
  for (double eps : {0.5, 0.1, 0.003}) {
    const ConvWeights scaled(rl, 64, Targets::midpoints, eps);
    for (std::size_t k = 0; k < 64; ++k)
      CHECK(std::abs(scaled.lag_weights()[k] - base.lag_weights()[k]) <= 1e-14 * std::abs(base.lag_weights()[k]));
  }
}

TEST_CASE("midpoint weights integrate up to the target") {
  const KernelSpec rl = KernelSpec::riemann_liouville(0.3);
  const ConvWeights w(rl, 50, Targets::midpoints);
  for (std::size_t i = 0; i < 50; ++i) {
    const double s = (static_cast<double>(i) + 0.5) / 50.0;
    CHECK(w.row_sum(i) == doctest::Approx(std::pow(s, 0.8) / 0.8).epsilon(1e-13));
  }
}

TEST_CASE("apply_k0") {
  const KernelSpec rl = KernelSpec::riemann_liouville(0.3);
  const std::vector<double> ones(128, 1.0);
  const GridFunction y = apply_k0(rl, ones);
  CHECK(y.back() == doctest::Approx(1.25).epsilon(1e-14));
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(std::pow(y.time(i), 0.8) / 0.8).epsilon(1e-13));

  const GridFunction zero = apply_k0(rl, std::vector<double>(16, 0.0));
  for (double v : zero.values()) CHECK(v == 0.0);

  testing::Draw d(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = d.normals(96), h = d.normals(96);
    const double a = d.uniform(-2, 2), b = d.uniform(-2, 2);
    std::vector<double> comb(96);
    for (std::size_t j = 0; j < 96; ++j) comb[j] = a * g[j] + b * h[j];
    const GridFunction lhs = apply_k0(rl, comb);
    const GridFunction kg = apply_k0(rl, g), kh = apply_k0(rl, h);
    for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(std::abs(lhs[i] - (a * kg[i] + b * kh[i])) < 1e-12);
  }

  CHECK_THROWS_AS(apply_k0(KernelSpec::gamma_fractional(-0.2, -1.0), ones), FamilyError);
}

TEST_CASE("apply_k_path on linear and constant paths") {
  const KernelSpec rl = KernelSpec::riemann_liouville(0.3);
  const GridFunction a = GridFunction::sample(1.0, 256, [](double t) { return 2.5 * t + 1.0; });
  const GridFunction ka = apply_k_path(rl, a);
  for (std::size_t i = 0; i < ka.size(); ++i)
    CHECK(ka[i] == doctest::Approx(2.5 * std::pow(ka.time(i), 0.8) / 0.8).epsilon(1e-13));
  const GridFunction kc = apply_k_path(rl, GridFunction::constant(1.0, 64, 4.0));
  for (double v : kc.values()) CHECK(v == 0.0);
}

// Independent oracle: kappa(t)(A(t)-A(0)) + int_0^t (A(s)-A(t)) kappa'(t-s) ds for A(s) = s^2,
// kappa(u) = u^mu. With u = t - s, A(s) - A(t) = u^2 - 2tu, so the integral is closed form.
TEST_CASE("apply_k_path agrees with the direct two-term formula") {
  const double mu = -0.2;
  const KernelSpec rl = KernelSpec::riemann_liouville(mu + 0.5);
  const GridFunction a = GridFunction::sample(1.0, 512, [](double t) { return t * t; });
  const GridFunction ka = apply_k_path(rl, a);
  for (std::size_t i = 64; i <= 512; i += 64) {
    const double t = ka.time(i);
    const double direct = std::pow(t, mu) * t * t + mu * (std::pow(t, mu + 2) / (mu + 2) - 2 * t * std::pow(t, mu + 1) / (mu + 1));
    CHECK(testing::rel_err(ka[i], direct) < 1e-3);
  }
}

TEST_CASE("apply_k_eps") {
  const KernelSpec rl = KernelSpec::riemann_liouville(0.3);
  testing::Draw d(2);
  const GridFunction a = d.walk(256);
  const GridFunction base = apply_k_path(rl, a);
  for (double eps : {1.0, 0.5, 0.01, 1e-4}) {
    const GridFunction scaled = apply_k_eps(rl, a, eps);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(scaled[i] - base[i]) < 1e-12);
  }
  const KernelSpec gf = KernelSpec::gamma_fractional(-0.2, -1.0);
  const GridFunction e1 = apply_k_eps(gf, a, 1.0), p1 = apply_k_path(gf, a);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(e1[i] == p1[i]);
  CHECK_THROWS_AS(apply_k_eps(rl, a, 0.0), InvalidInput);
  CHECK_THROWS_AS(apply_k_eps(rl, a, 1.5), InvalidInput);
}

TEST_CASE("gamma_fractional approaches the pure-power operator") {
  const KernelSpec gf = KernelSpec::gamma_fractional(-0.2, -1.0);
  const KernelSpec pp = KernelSpec::pure_power(-0.2);
  const GridFunction a = GridFunction::sample(1.0, 256, [](double t) { return t; });
  const GridFunction limit = apply_k_path(pp, a);
  const GridFunction near = apply_k_eps(gf, a, 0.01);
  double sup = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, std::abs(near[i] - limit[i]));
  const double bound = 0.01 + gf.smooth_defect(0.01);
  CHECK(sup > 0.0);
  CHECK(sup < 2.0 * bound * 1.25);
}

TEST_CASE("keps_convergence_report") {
  const std::vector<double> ladder = {1.0, 0.5, 0.25, 0.125};
  const GridFunction root = GridFunction::sample(1.0, 256, [](double t) { return std::pow(t, 0.45); });

  const KernelSpec rl = KernelSpec::riemann_liouville(0.3);
  const KepsReport r = keps_convergence_report(rl, {root, GridFunction::sample(1.0, 256, [](double t) { return t; })},
                                               ladder, rl.gamma());
  REQUIRE(r.rows.size() == 8);
  for (const auto& row : r.rows) CHECK(row.distance < 1e-12);

  const KernelSpec gf = KernelSpec::gamma_fractional(-0.2, -1.0);
  const KepsReport c = keps_convergence_report(gf, {GridFunction::constant(1.0, 128, 2.0)}, ladder, gf.gamma());
  for (const auto& row : c.rows) CHECK(row.distance == 0.0);

  const std::vector<double> fine = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  const KepsReport g = keps_convergence_report(gf, {root}, fine, gf.gamma());
  CHECK(g.monotone);
  for (std::size_t k = 3; k < g.rows.size(); ++k) {
    const double ratio = g.rows[k - 1].distance / g.rows[k].distance;
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
  }

  CHECK_THROWS_AS(keps_convergence_report(gf, {root}, {}, 0.25), InvalidInput);
  CHECK_THROWS_AS(keps_convergence_report(gf, {root}, {0.5, 1.0}, 0.25), InvalidInput);
}

TEST_CASE("regularity transfer stays bounded under refinement") {
  const KernelSpec rl = KernelSpec::riemann_liouville(0.3);
  testing::Draw d(8);
  const GridFunction coarse = d.walk(512);
  std::vector<double> ratios;
  for (std::size_t n : {128, 256, 512}) {
    const GridFunction a = resample(coarse, n);
    ratios.push_back(holder_norm(apply_k_path(rl, a), rl.gamma()) / holder_norm(a, rl.alpha()));
  }
  for (double r : ratios) {
    CHECK(std::isfinite(r));
    CHECK(r < 10.0);
  }
  CHECK(ratios.back() < 2.0 * ratios.front());
}
