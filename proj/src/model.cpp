#include "roughldp/model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "roughldp/errors.hpp"

namespace roughldp {

using nlohmann::json;

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::constant: return "constant";
    case FamilyTag::linear: return "linear";
    case FamilyTag::tanh_bounded: return "tanh_bounded";
    case FamilyTag::bergomi_f: return "bergomi_f";
    case FamilyTag::sqrt_plus: return "sqrt_plus";
    case FamilyTag::exp_psi: return "exp";
    case FamilyTag::identity_psi: return "identity";
    case FamilyTag::shift_psi: return "shift";
    case FamilyTag::softplus_psi: return "softplus";
  }
  return "unknown";
}

namespace {

std::size_t arity(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::constant: return 1;
    case FamilyTag::linear: return 2;
    case FamilyTag::tanh_bounded: return 2;
    case FamilyTag::bergomi_f: return 3;
    case FamilyTag::sqrt_plus: return 1;
    case FamilyTag::exp_psi: return 0;
    case FamilyTag::identity_psi: return 0;
    case FamilyTag::shift_psi: return 1;
    case FamilyTag::softplus_psi: return 1;
  }
  return 0;
}

bool is_psi(FamilyTag t) {
  return t == FamilyTag::exp_psi || t == FamilyTag::identity_psi || t == FamilyTag::shift_psi ||
         t == FamilyTag::softplus_psi;
}

bool is_bounded_smooth(FamilyTag t) {
  return t == FamilyTag::constant || t == FamilyTag::tanh_bounded;
}

// Numerically stable log(1 + exp(x)).
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::optional<double> eval_family(const FunctionFamily& ff, double v, double t, Want want) {
  const auto& p = ff.params;
  if (p.size() != arity(ff.tag))
    throw InvalidInput("family " + to_string(ff.tag) + " has wrong parameter count");
  const bool dv = want == Want::dv;
  switch (ff.tag) {
    case FamilyTag::constant: return dv ? 0.0 : p[0];
    case FamilyTag::linear: return dv ? p[0] : p[0] * v + p[1];
    case FamilyTag::tanh_bounded: {
      const double th = std::tanh(v - p[1]);
      return dv ? 0.5 * p[0] * (1.0 - th * th) : p[0] * (1.0 + 0.5 * th);
    }
    case FamilyTag::bergomi_f: {
      const double xi = p[0], eta = p[1], hurst = p[2];
      const double value =
          std::sqrt(xi) * std::exp(0.5 * eta * v - 0.25 * eta * eta * std::pow(t, 2.0 * hurst));
      return dv ? 0.5 * eta * value : value;
    }
    case FamilyTag::sqrt_plus: {
      const double floor = p[0];
      if (!dv) return std::sqrt(std::max(v, floor));
      if (v > floor) return 0.5 / std::sqrt(v);
      if (v < floor) return 0.0;
      return std::nullopt;
    }
    case FamilyTag::exp_psi: return std::exp(v);
    case FamilyTag::identity_psi: return dv ? 1.0 : v;
    case FamilyTag::shift_psi: return dv ? 1.0 : v + p[0];
    case FamilyTag::softplus_psi: {
      const double k = p[0];
      return dv ? sigmoid(k * v) : softplus(k * v) / k;
    }
  }
  return std::nullopt;
}

std::string Diagnostics::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) os << (i ? "; " : "") << violations[i];
  return os.str();
}

Diagnostics validate(const ModelSpec& m) {
  Diagnostics d;
  auto check_arity = [&](const FunctionFamily& ff, const char* role) {
    if (ff.params.size() != arity(ff.tag)) {
      d.violations.push_back(std::string(role) + ": wrong parameter count for " + to_string(ff.tag));
      return false;
    }
    for (double x : ff.params)
      if (!std::isfinite(x)) {
        d.violations.push_back(std::string(role) + ": non-finite parameter");
        return false;
      }
    return true;
  };

  if (!(std::abs(m.rho) < 1.0)) d.violations.push_back("correlation degenerate: |rho| must be < 1");
  if (!(m.kernel.mu() < 0.0)) d.violations.push_back("mu must be negative for short-time asymptotics");
  if (!std::isfinite(m.y0) || !std::isfinite(m.a0)) d.violations.push_back("initial values must be finite");

  if (check_arity(m.sigma, "sigma") && !is_bounded_smooth(m.sigma.tag))
    d.violations.push_back("sigma must be constant or tanh_bounded (bounded with bounded derivatives)");

  for (const auto& [ff, role] : {std::pair{&m.a, "a"}, std::pair{&m.b, "b"}}) {
    if (!check_arity(*ff, role)) continue;
    if (ff->tag == FamilyTag::linear)
      d.notes.push_back(std::string(role) + " is linear: unbounded coefficient admitted as a deviation");
    else if (!is_bounded_smooth(ff->tag))
      d.violations.push_back(std::string(role) + " must be constant, tanh_bounded or linear");
  }

  if (check_arity(m.psi, "psi") && !is_psi(m.psi.tag))
    d.violations.push_back("psi must be one of identity, exp, shift, softplus");
  if (m.psi.tag == FamilyTag::softplus_psi && m.psi.params.size() == 1 && !(m.psi.params[0] > 0.0))
    d.violations.push_back("softplus psi needs k > 0");

  if (check_arity(m.f, "f")) {
    if (is_psi(m.f.tag)) {
      d.violations.push_back("f must not be a psi family");
    } else {
      if (m.f.tag == FamilyTag::bergomi_f && !(m.f.params[0] > 0.0))
        d.violations.push_back("bergomi_f needs xi > 0");
      if (m.f.tag == FamilyTag::sqrt_plus && !(m.f.params[0] >= 0.0))
        d.violations.push_back("sqrt_plus needs floor >= 0");
      bool negative = false;
      for (int i = 0; i <= 200 && !negative; ++i) {
        const double v = -10.0 + 0.1 * i;
        for (int k = 0; k <= 10; ++k)
          if (family_value(m.f, v, 0.1 * k) < 0.0) negative = true;
      }
      if (negative) d.violations.push_back("f must be nonnegative");
    }
  }
  return d;
}

void require_valid(const ModelSpec& m) {
  const Diagnostics d = validate(m);
  if (!d.ok()) throw InvalidInput("invalid model: " + d.summary());
}

ModelSpec preset(std::string_view name) {
  ModelSpec m;
  if (name == "rough_bergomi") {
    m.sigma = FunctionFamily::constant(1.0);
    m.f = FunctionFamily::bergomi_f(0.04, 1.5, 0.3);
    m.psi = FunctionFamily::identity_psi();
    m.a = FunctionFamily::constant(1.0);
    m.b = FunctionFamily::constant(0.0);
    m.rho = -0.7;
    m.kernel = KernelSpec::riemann_liouville(0.3);
  } else if (name == "rough_heston_like") {
    m.sigma = FunctionFamily::constant(1.0);
    m.f = FunctionFamily::sqrt_plus(1e-6);
    // psi(0) = 0.04, i.e. spot variance 0.04.
    m.psi = FunctionFamily::softplus_psi(std::numbers::ln2 / 0.04);
    m.a = FunctionFamily::tanh_bounded(0.1, 0.0);
    m.b = FunctionFamily::constant(0.0);
    m.rho = -0.7;
    m.kernel = KernelSpec::riemann_liouville(0.1);
  } else if (name == "black_scholes") {
    m.sigma = FunctionFamily::constant(1.0);
    m.f = FunctionFamily::constant(0.3);
    m.psi = FunctionFamily::identity_psi();
    m.a = FunctionFamily::constant(1.0);
    m.b = FunctionFamily::constant(0.0);
    m.rho = 0.0;
    m.kernel = KernelSpec::riemann_liouville(0.3);
  } else {
    throw LookupError("unknown preset: " + std::string(name));
  }
  return m;
}

std::vector<std::string> preset_names() { return {"rough_bergomi", "rough_heston_like", "black_scholes"}; }

namespace {

struct FamilyInfo {
  FamilyTag tag;
  std::vector<const char*> keys;
};

FamilyInfo family_info(std::string_view name) {
  if (name == "constant") return {FamilyTag::constant, {"c"}};
  if (name == "linear") return {FamilyTag::linear, {"m", "c"}};
  if (name == "tanh_bounded") return {FamilyTag::tanh_bounded, {"scale", "center"}};
  if (name == "bergomi_f") return {FamilyTag::bergomi_f, {"xi", "eta", "H"}};
  if (name == "sqrt_plus") return {FamilyTag::sqrt_plus, {"floor"}};
  if (name == "exp" || name == "exp_psi") return {FamilyTag::exp_psi, {}};
  if (name == "identity" || name == "identity_psi") return {FamilyTag::identity_psi, {}};
  if (name == "shift" || name == "shift_psi") return {FamilyTag::shift_psi, {"c"}};
  if (name == "softplus" || name == "softplus_psi") return {FamilyTag::softplus_psi, {"k"}};
  throw LookupError("unknown function family: " + std::string(name));
}

double number_at(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw InvalidInput(ctx + ": missing numeric key '" + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

FunctionFamily family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw InvalidInput("function family must be an object with a 'family' string");
  const std::string name = j.at("family").get<std::string>();
  const FamilyInfo info = family_info(name);
  FunctionFamily ff{info.tag, {}};
  for (const char* key : info.keys) ff.params.push_back(number_at(j, key, name));
  return ff;
}

json family_to_json(const FunctionFamily& ff) {
  json j;
  j["family"] = to_string(ff.tag);
  const FamilyInfo info = family_info(to_string(ff.tag));
  for (std::size_t i = 0; i < info.keys.size() && i < ff.params.size(); ++i) j[info.keys[i]] = ff.params[i];
  return j;
}

KernelSpec kernel_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw InvalidInput("kernel must be an object with a 'family' string");
  const std::string name = j.at("family").get<std::string>();
  const double alpha = j.contains("alpha") ? number_at(j, "alpha", name) : KernelSpec::kDefaultAlpha;
  if (name == "riemann_liouville") return KernelSpec::riemann_liouville(number_at(j, "H", name), alpha);
  if (name == "gamma_fractional")
    return KernelSpec::gamma_fractional(number_at(j, "mu", name), number_at(j, "c", name), alpha);
  if (name == "power_law")
    return KernelSpec::power_law(number_at(j, "mu", name), number_at(j, "beta", name), alpha);
  throw LookupError("unknown kernel family: " + name);
}

json kernel_to_json(const KernelSpec& k) {
  json j;
  j["family"] = to_string(k.family());
  switch (k.family()) {
    case KernelFamily::riemann_liouville: j["H"] = k.hurst(); break;
    case KernelFamily::gamma_fractional: j["mu"] = k.mu(); j["c"] = k.c(); break;
    case KernelFamily::power_law: j["mu"] = k.mu(); j["beta"] = k.beta(); break;
  }
  if (k.alpha() != KernelSpec::kDefaultAlpha) j["alpha"] = k.alpha();
  return j;
}

ModelSpec model_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("model config must be a JSON object");
  for (const char* key : {"sigma", "f", "psi", "a", "b", "kernel"})
    if (!j.contains(key)) throw InvalidInput(std::string("model config: missing key '") + key + "'");
  ModelSpec m;
  m.sigma = family_from_json(j.at("sigma"));
  m.f = family_from_json(j.at("f"));
  m.psi = family_from_json(j.at("psi"));
  m.a = family_from_json(j.at("a"));
  m.b = family_from_json(j.at("b"));
  m.rho = number_at(j, "rho", "model config");
  m.y0 = j.contains("y0") ? number_at(j, "y0", "model config") : 0.0;
  m.a0 = j.contains("a0") ? number_at(j, "a0", "model config") : 0.0;
  m.kernel = kernel_from_json(j.at("kernel"));
  return m;
}

json model_to_json(const ModelSpec& m) {
  json j;
  j["sigma"] = family_to_json(m.sigma);
  j["f"] = family_to_json(m.f);
  j["psi"] = family_to_json(m.psi);
  j["a"] = family_to_json(m.a);
  j["b"] = family_to_json(m.b);
  j["rho"] = m.rho;
  j["y0"] = m.y0;
  j["a0"] = m.a0;
  j["kernel"] = kernel_to_json(m.kernel);
  return j;
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("config is not valid JSON: " + std::string(e.what()));
  }
  return model_from_json(j);
}

}  // namespace roughldp
