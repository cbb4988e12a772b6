#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roughldp/kernels.hpp"

namespace roughldp {

enum class FamilyTag {
  constant,      // c
  linear,        // m v + c
  tanh_bounded,  // scale * (1 + tanh(v - center) / 2), values in [scale/2, 3 scale/2]
  bergomi_f,     // sqrt(xi) * exp(eta v / 2 - eta^2 t^{2H} / 4)
  sqrt_plus,     // sqrt(max(v, floor)), kink at v = floor
  exp_psi,       // exp(u)
  identity_psi,  // u
  shift_psi,     // u + c
  softplus_psi,  // log(1 + exp(k u)) / k
};

/// One of the enumerated parametric coefficient functions of the model.
struct FunctionFamily {
  FamilyTag tag = FamilyTag::constant;
  std::vector<double> params;

  static FunctionFamily constant(double c) { return {FamilyTag::constant, {c}}; }
  static FunctionFamily linear(double m, double c) { return {FamilyTag::linear, {m, c}}; }
  static FunctionFamily tanh_bounded(double scale, double center) {
    return {FamilyTag::tanh_bounded, {scale, center}};
  }
  static FunctionFamily bergomi_f(double xi, double eta, double hurst) {
    return {FamilyTag::bergomi_f, {xi, eta, hurst}};
  }
  static FunctionFamily sqrt_plus(double floor) { return {FamilyTag::sqrt_plus, {floor}}; }
  static FunctionFamily exp_psi() { return {FamilyTag::exp_psi, {}}; }
  static FunctionFamily identity_psi() { return {FamilyTag::identity_psi, {}}; }
  static FunctionFamily shift_psi(double c) { return {FamilyTag::shift_psi, {c}}; }
  static FunctionFamily softplus_psi(double k) { return {FamilyTag::softplus_psi, {k}}; }

  bool depends_on_time() const noexcept { return tag == FamilyTag::bergomi_f; }
};

std::string to_string(FamilyTag tag);

enum class Want { value, dv };

/// f(v,t) or df/dv(v,t). Returns nullopt only when the derivative is requested
/// at a kink (sqrt_plus at v == floor); callers then fall back to finite
/// differences.
std::optional<double> eval_family(const FunctionFamily& ff, double v, double t, Want want);

inline double family_value(const FunctionFamily& ff, double v, double t = 0.0) {
  return *eval_family(ff, v, t, Want::value);
}

/// dY = sigma(Y) f(V,t) dX - sigma(Y)^2 f(V,t)^2 / 2 dt,  V = psi(K A),
/// dA = b(A) dt + a(A) dW,  X = rho W + sqrt(1 - rho^2) W_perp.
struct ModelSpec {
  FunctionFamily sigma = FunctionFamily::constant(1.0);
  FunctionFamily f = FunctionFamily::constant(0.2);
  FunctionFamily psi = FunctionFamily::identity_psi();
  FunctionFamily a = FunctionFamily::constant(1.0);
  FunctionFamily b = FunctionFamily::constant(0.0);
  double rho = 0.0;
  double y0 = 0.0;
  double a0 = 0.0;
  KernelSpec kernel = KernelSpec::riemann_liouville(0.3);
};

struct Diagnostics {
  std::vector<std::string> violations;
  std::vector<std::string> notes;  // admitted deviations, e.g. linear a or b
  bool ok() const noexcept { return violations.empty(); }
  std::string summary() const;
};

Diagnostics validate(const ModelSpec& m);

/// Throws InvalidInput with the diagnostics summary unless validate(m) is ok.
void require_valid(const ModelSpec& m);

/// rough_bergomi, rough_heston_like, black_scholes.
ModelSpec preset(std::string_view name);
std::vector<std::string> preset_names();

FunctionFamily family_from_json(const nlohmann::json& j);
nlohmann::json family_to_json(const FunctionFamily& ff);
KernelSpec kernel_from_json(const nlohmann::json& j);
nlohmann::json kernel_to_json(const KernelSpec& k);
ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& m);
ModelSpec load_model(const std::string& path);

}  // namespace roughldp
