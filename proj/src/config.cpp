// SPDX-License-Identifier: Apache-2.0
#include "kgpml/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "kgpml/errors.hpp"

namespace kgpml {

namespace {

constexpr std::string_view kSweepKeys[] = {"sigma0", "delta", "r", "epsilon", "bermudez_order", "alpha"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_plain_number(std::string_view s, std::string_view key) {
  s = trim(s);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, s));
  return value;
}

double parse_number(std::string_view s, std::string_view key) {
  s = trim(s);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_plain_number(s, key);
  const double num = parse_plain_number(s.substr(0, slash), key);
  const double den = parse_plain_number(s.substr(slash + 1), key);
  if (den == 0.0) throw ConfigError(fmt::format("{}: division by zero in '{}'", key, s));
  return num / den;
}

long parse_integer(std::string_view s, std::string_view key) {
  const double v = parse_number(s, key);
  if (v != std::floor(v) || std::abs(v) > 1e15) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, s));
  return static_cast<long>(v);
}

bool parse_bool(std::string_view s, std::string_view key) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, s));
}

template <class Enum, std::size_t M>
Enum parse_enum(std::string_view s, std::string_view key, const std::pair<std::string_view, Enum> (&table)[M]) {
  s = trim(s);
  for (const auto& [name, value] : table)
    if (name == s) return value;
  std::string allowed;
  for (const auto& [name, value] : table) allowed += (allowed.empty() ? "" : "|") + std::string(name);
  throw ConfigError(fmt::format("{}: '{}' is not one of {}", key, s, allowed));
}

constexpr std::pair<std::string_view, Formulation> kFormulations[] = {{"pml1", Formulation::pml1},
                                                                      {"pml2", Formulation::pml2}};
constexpr std::pair<std::string_view, Scaling> kScalings[] = {{"classical", Scaling::classical},
                                                              {"nonrel", Scaling::nonrel}};
constexpr std::pair<std::string_view, RPolicy> kRPolicies[] = {
    {"fixed", RPolicy::fixed}, {"inverse_eps", RPolicy::inverse_eps}, {"inverse_eps2", RPolicy::inverse_eps2}};
constexpr std::pair<std::string_view, InitialPreset> kPresets[] = {
    {"gaussian_sech", InitialPreset::gaussian_sech},
    {"gaussian_sech_eps", InitialPreset::gaussian_sech_eps},
    {"vortex4", InitialPreset::vortex4}};
constexpr std::pair<std::string_view, ReferenceScheme> kReferenceSchemes[] = {{"ewi", ReferenceScheme::ewi},
                                                                              {"fdfp", ReferenceScheme::fdfp}};
constexpr std::pair<std::string_view, ProfileKind> kProfiles[] = {{"polynomial", ProfileKind::polynomial},
                                                                  {"bermudez", ProfileKind::bermudez}};

template <class Enum, std::size_t M>
std::string_view enum_name(Enum v, const std::pair<std::string_view, Enum> (&table)[M]) {
  for (const auto& [name, value] : table)
    if (value == v) return name;
  return "?";
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

struct Pending {
  std::optional<double> h;
  bool has_n = false;
};

using Setter = std::function<void(SolverConfig&, Pending&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"formulation", [](SolverConfig& c, Pending&, std::string_view v) { c.formulation = parse_enum(v, "formulation", kFormulations); }},
      {"dimension", [](SolverConfig& c, Pending&, std::string_view v) { c.dimension = static_cast<int>(parse_integer(v, "dimension")); }},
      {"scaling", [](SolverConfig& c, Pending&, std::string_view v) { c.scaling = parse_enum(v, "scaling", kScalings); }},
      {"epsilon", [](SolverConfig& c, Pending&, std::string_view v) { c.eps = parse_number(v, "epsilon"); }},
      {"profile", [](SolverConfig& c, Pending&, std::string_view v) { c.profile = parse_enum(v, "profile", kProfiles); }},
      {"bermudez_order", [](SolverConfig& c, Pending&, std::string_view v) { c.bermudez_order = static_cast<int>(parse_integer(v, "bermudez_order")); }},
      {"sigma0", [](SolverConfig& c, Pending&, std::string_view v) { c.sigma0 = parse_number(v, "sigma0"); }},
      {"delta", [](SolverConfig& c, Pending&, std::string_view v) { c.delta = parse_number(v, "delta"); }},
      {"r_policy", [](SolverConfig& c, Pending&, std::string_view v) { c.r_policy = parse_enum(v, "r_policy", kRPolicies); }},
      {"r", [](SolverConfig& c, Pending&, std::string_view v) { c.r = parse_number(v, "r"); }},
      {"r_phase_pi", [](SolverConfig& c, Pending&, std::string_view v) { c.r_phase_pi = parse_number(v, "r_phase_pi"); }},
      {"alpha", [](SolverConfig& c, Pending&, std::string_view v) { c.alpha = parse_number(v, "alpha"); }},
      {"lambda", [](SolverConfig& c, Pending&, std::string_view v) { c.lambda = parse_number(v, "lambda"); }},
      {"L", [](SolverConfig& c, Pending&, std::string_view v) { c.L = parse_number(v, "L"); }},
      {"N", [](SolverConfig& c, Pending& p, std::string_view v) {
         const long n = parse_integer(v, "N");
         if (n < 0) throw ConfigError("N must be positive");
         c.N = static_cast<std::size_t>(n);
         p.has_n = true;
       }},
      {"h", [](SolverConfig&, Pending& p, std::string_view v) { p.h = parse_number(v, "h"); }},
      {"tau", [](SolverConfig& c, Pending&, std::string_view v) { c.tau = parse_number(v, "tau"); }},
      {"T_final", [](SolverConfig& c, Pending&, std::string_view v) { c.t_final = parse_number(v, "T_final"); }},
      {"initial_data", [](SolverConfig& c, Pending&, std::string_view v) { c.initial_data = parse_enum(v, "initial_data", kPresets); }},
      {"c0", [](SolverConfig& c, Pending&, std::string_view v) { c.c0 = parse_number(v, "c0"); }},
      {"omega", [](SolverConfig& c, Pending&, std::string_view v) { c.omega = parse_number(v, "omega"); }},
      {"reference", [](SolverConfig& c, Pending&, std::string_view v) { c.reference = parse_bool(v, "reference"); }},
      {"reference_enlargement", [](SolverConfig& c, Pending&, std::string_view v) { c.reference_enlargement = parse_number(v, "reference_enlargement"); }},
      {"reference_scheme", [](SolverConfig& c, Pending&, std::string_view v) { c.reference_scheme = parse_enum(v, "reference_scheme", kReferenceSchemes); }},
      {"ref_tau", [](SolverConfig& c, Pending&, std::string_view v) { c.ref_tau = parse_number(v, "ref_tau"); }},
      {"ref_N", [](SolverConfig& c, Pending&, std::string_view v) {
         const long n = parse_integer(v, "ref_N");
         if (n < 0) throw ConfigError("ref_N must be positive");
         c.ref_N = static_cast<std::size_t>(n);
       }},
      {"gmres_tol", [](SolverConfig& c, Pending&, std::string_view v) { c.gmres_tol = parse_number(v, "gmres_tol"); }},
      {"gmres_max_iter", [](SolverConfig& c, Pending&, std::string_view v) { c.gmres_max_iter = static_cast<int>(parse_integer(v, "gmres_max_iter")); }},
      {"preconditioner", [](SolverConfig& c, Pending&, std::string_view v) { c.preconditioner = parse_bool(v, "preconditioner"); }},
      {"increment_form", [](SolverConfig& c, Pending&, std::string_view v) { c.increment_form = parse_bool(v, "increment_form"); }},
      {"snapshot_stride", [](SolverConfig& c, Pending&, std::string_view v) { c.snapshot_stride = parse_integer(v, "snapshot_stride"); }},
      {"output", [](SolverConfig& c, Pending&, std::string_view v) { c.output = std::string(trim(v)); }},
      {"demo_stability", [](SolverConfig& c, Pending&, std::string_view v) { c.demo_stability = parse_bool(v, "demo_stability"); }},
  };
  return table;
}

}  // namespace

// ---------------------------------------------------------------------------

double SolverConfig::lambda_value() const noexcept {
  if (lambda) return *lambda;
  switch (initial_data) {
    case InitialPreset::gaussian_sech: return 1.0;
    case InitialPreset::gaussian_sech_eps: return 0.5;
    case InitialPreset::vortex4: return 3.0;
  }
  return 1.0;
}

Complex SolverConfig::shift() const {
  const double e = eps_value();
  double magnitude = r;
  if (r_policy == RPolicy::inverse_eps) magnitude /= e;
  if (r_policy == RPolicy::inverse_eps2) magnitude /= e * e;
  if (r_phase_pi == 0.0) return {magnitude, 0.0};
  return std::polar(magnitude, M_PI * r_phase_pi);
}

ProfileSpec SolverConfig::profile_spec() const {
  ProfileSpec s = profile == ProfileKind::polynomial ? polynomial_profile(sigma0, delta, L)
                                                     : bermudez_profile(bermudez_order, sigma0, delta, L);
  s.shift = formulation == Formulation::pml2 ? shift() : Complex(1.0);
  return s;
}

InitialData SolverConfig::initial() const {
  switch (initial_data) {
    case InitialPreset::gaussian_sech:
    case InitialPreset::gaussian_sech_eps: return gaussian_sech();
    case InitialPreset::vortex4: return vortex4(c0, omega);
  }
  throw ContractViolation("unknown initial data preset");
}

Grid1D SolverConfig::grid1d() const { return Grid1D(total_half_width(), N); }
Grid2D SolverConfig::grid2d() const { return {grid1d(), grid1d()}; }

std::size_t nodes_for_mesh(double total_half_width, double h) {
  if (!(h > 0.0)) throw ConfigError("h must be positive");
  const double n = 2.0 * total_half_width / h;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9 * n || static_cast<long>(rounded) % 2 != 0)
    throw ConfigError(fmt::format("h = {} does not divide 2(L + delta) = {} into an even number of cells", h,
                                  2.0 * total_half_width));
  return static_cast<std::size_t>(rounded);
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& rule) { throw ConfigError(rule); };
  if (dimension != 1 && dimension != 2) fail("dimension must be 1 or 2");
  if (formulation == Formulation::pml1 && profile != ProfileKind::polynomial)
    fail("pml1 requires profile = polynomial (the Bermudez pole is incompatible with the first-order system)");
  if (formulation == Formulation::pml1 && dimension != 1) fail("pml1 is implemented in one dimension only");
  if (scaling == Scaling::nonrel && !(eps > 0.0 && eps < 1.0)) fail("scaling = nonrel requires 0 < epsilon < 1");
  if (scaling == Scaling::classical && eps != 1.0) fail("epsilon != 1 requires scaling = nonrel");
  if (dimension == 2 && initial_data != InitialPreset::vortex4) fail("dimension = 2 requires initial_data = vortex4");
  if (dimension == 1 && initial_data == InitialPreset::vortex4) fail("initial_data = vortex4 requires dimension = 2");
  if (dimension == 2 && scaling != Scaling::classical) fail("dimension = 2 supports the classical scaling only");
  if (!(sigma0 > 0.0)) fail("sigma0 must be positive");
  if (!(delta > 0.0)) fail("delta must be positive");
  if (!(L > 0.0)) fail("L must be positive");
  if (profile == ProfileKind::bermudez && bermudez_order < -1) fail("bermudez_order must be >= -1");
  if (!(r > 0.0)) fail("r must be positive");
  if (r_phase_pi != 0.0 && !demo_stability) fail("a complex R (r_phase_pi != 0) requires demo_stability");
  if (demo_stability && (formulation != Formulation::pml2 || dimension != 1))
    fail("demo_stability applies to one-dimensional pml2 runs");
  if (!(alpha >= 0.0)) fail("alpha must be nonnegative");
  if (!(lambda_value() >= 0.0)) fail("lambda must be nonnegative");
  if (N < 4 || N % 2 != 0) fail("N must be even and at least 4");
  if (!(tau > 0.0)) fail("tau must be positive");
  if (!(t_final >= 0.0)) fail("T_final must be nonnegative");
  if (!(reference_enlargement >= 2.0)) fail("reference_enlargement must be >= 2");
  if (ref_tau && !(*ref_tau > 0.0)) fail("ref_tau must be positive");
  if (ref_N && (*ref_N < 4 || *ref_N % 2 != 0)) fail("ref_N must be even and at least 4");
  if (!(gmres_tol > 0.0 && gmres_tol < 1.0)) fail("gmres_tol must lie in (0, 1)");
  if (gmres_max_iter < 0) fail("gmres_max_iter must be nonnegative");
  if (snapshot_stride < 1) fail("snapshot_stride must be >= 1");
  if (output.empty() || output.find_first_of(" \t#/\\") != std::string::npos)
    fail("output must be a plain file stem");
  for (const auto& axis : sweep) {
    if (axis.values.empty()) fail(fmt::format("sweep axis '{}' has no values", axis.key));
    if (std::find(std::begin(kSweepKeys), std::end(kSweepKeys), axis.key) == std::end(kSweepKeys))
      fail(fmt::format("'{}' cannot be swept", axis.key));
  }
}

// ---------------------------------------------------------------------------

SolverConfig parse_config(std::string_view text) {
  SolverConfig cfg;
  Pending pending;
  std::set<std::string, std::less<>> seen;
  bool in_sweep = false;
  std::size_t line_no = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line != "[sweep]") throw ConfigError(fmt::format("line {}: unknown section {}", line_no, line));
      in_sweep = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(fmt::format("line {}: '{}' has no value", line_no, key));

    if (in_sweep) {
      if (std::find(std::begin(kSweepKeys), std::end(kSweepKeys), key) == std::end(kSweepKeys))
        throw ConfigError(fmt::format("line {}: '{}' cannot be swept", line_no, key));
      SweepAxis axis{key, {}};
      std::string_view rest = value;
      while (true) {
        const auto comma = rest.find(',');
        axis.values.push_back(parse_number(rest.substr(0, comma), key));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      const bool dup = std::any_of(cfg.sweep.begin(), cfg.sweep.end(), [&](const SweepAxis& a) { return a.key == key; });
      if (dup) throw ConfigError(fmt::format("line {}: sweep axis '{}' given twice", line_no, key));
      cfg.sweep.push_back(std::move(axis));
      continue;
    }

    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    if (!seen.insert(key).second) throw ConfigError(fmt::format("line {}: '{}' given twice", line_no, key));
    it->second(cfg, pending, value);
  }

  if (pending.h) {
    const std::size_t n = nodes_for_mesh(cfg.total_half_width(), *pending.h);
    if (pending.has_n && n != cfg.N) throw ConfigError("N and h are both given and disagree");
    cfg.N = n;
  }
  cfg.validate();
  return cfg;
}

SolverConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const SolverConfig& c) {
  std::string out;
  auto put = [&out](std::string_view key, std::string_view value) { out += fmt::format("{} = {}\n", key, value); };
  put("formulation", to_string(c.formulation));
  put("dimension", std::to_string(c.dimension));
  put("scaling", to_string(c.scaling));
  put("epsilon", num(c.eps));
  put("profile", to_string(c.profile));
  put("bermudez_order", std::to_string(c.bermudez_order));
  put("sigma0", num(c.sigma0));
  put("delta", num(c.delta));
  put("r_policy", to_string(c.r_policy));
  put("r", num(c.r));
  put("r_phase_pi", num(c.r_phase_pi));
  put("alpha", num(c.alpha));
  if (c.lambda) put("lambda", num(*c.lambda));
  put("L", num(c.L));
  put("N", std::to_string(c.N));
  put("tau", num(c.tau));
  put("T_final", num(c.t_final));
  put("initial_data", to_string(c.initial_data));
  put("c0", num(c.c0));
  put("omega", num(c.omega));
  put("reference", c.reference ? "true" : "false");
  put("reference_enlargement", num(c.reference_enlargement));
  put("reference_scheme", to_string(c.reference_scheme));
  if (c.ref_tau) put("ref_tau", num(*c.ref_tau));
  if (c.ref_N) put("ref_N", std::to_string(*c.ref_N));
  put("gmres_tol", num(c.gmres_tol));
  put("gmres_max_iter", std::to_string(c.gmres_max_iter));
  put("preconditioner", c.preconditioner ? "true" : "false");
  put("increment_form", c.increment_form ? "true" : "false");
  put("snapshot_stride", std::to_string(c.snapshot_stride));
  put("output", c.output);
  put("demo_stability", c.demo_stability ? "true" : "false");
  if (!c.sweep.empty()) {
    out += "\n[sweep]\n";
    for (const auto& axis : c.sweep) {
      std::string values;
      for (double v : axis.values) values += (values.empty() ? "" : ", ") + num(v);
      put(axis.key, values);
    }
  }
  return out;
}

SolverConfig with_value(SolverConfig cfg, std::string_view key, double value) {
  if (key == "sigma0") {
    cfg.sigma0 = value;
  } else if (key == "delta") {
    // Keep the mesh fixed when the layer grows.
    const double h = cfg.mesh();
    cfg.delta = value;
    cfg.N = nodes_for_mesh(cfg.total_half_width(), h);
  } else if (key == "r") {
    cfg.r = value;
  } else if (key == "epsilon") {
    cfg.eps = value;
    cfg.scaling = value == 1.0 ? Scaling::classical : Scaling::nonrel;
  } else if (key == "bermudez_order") {
    if (value != std::floor(value)) throw ConfigError("bermudez_order must be an integer");
    cfg.bermudez_order = static_cast<int>(value);
  } else if (key == "alpha") {
    cfg.alpha = value;
  } else {
    throw ConfigError(fmt::format("'{}' cannot be swept", key));
  }
  return cfg;
}

std::string_view to_string(Formulation f) { return enum_name(f, kFormulations); }
std::string_view to_string(Scaling s) { return enum_name(s, kScalings); }
std::string_view to_string(RPolicy r) { return enum_name(r, kRPolicies); }
std::string_view to_string(InitialPreset p) { return enum_name(p, kPresets); }
std::string_view to_string(ProfileKind k) { return enum_name(k, kProfiles); }
std::string_view to_string(ReferenceScheme s) { return enum_name(s, kReferenceSchemes); }

}  // namespace kgpml
