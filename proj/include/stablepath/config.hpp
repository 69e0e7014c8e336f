#pragma once

// Strict JSON configuration loading for the command line tool. Every block
// is validated on load: wrong types and out-of-range values raise
// InvalidParameter naming the offending field, and unknown fields are
// rejected by name rather than silently ignored.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bivariate.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "seminorm.hpp"
#include "spectral.hpp"

namespace stablepath {
namespace cfg {

using nlohmann::json;

inline json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidParameter(std::string("config is not valid JSON: ") + e.what());
  }
}

inline void check_fields(const json& obj, const std::string& ctx,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw InvalidParameter("unknown field \"" + key + "\" in " + ctx);
  }
}

inline const json& need(const json& obj, const std::string& ctx,
                        const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw InvalidParameter("missing field \"" + std::string(key) + "\" in " +
                           ctx);
  return *it;
}

inline double get_number(const json& obj, const std::string& ctx,
                         const char* key) {
  const json& v = need(obj, ctx, key);
  if (!v.is_number())
    throw InvalidParameter(ctx + "." + key + " must be a number");
  return v.get<double>();
}

inline double get_number_or(const json& obj, const std::string& ctx,
                            const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj, ctx, key);
}

inline long long get_integer(const json& obj, const std::string& ctx,
                             const char* key) {
  const json& v = need(obj, ctx, key);
  if (!v.is_number_integer())
    throw InvalidParameter(ctx + "." + key + " must be an integer");
  return v.get<long long>();
}

inline long long get_integer_or(const json& obj, const std::string& ctx,
                                const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  return get_integer(obj, ctx, key);
}

inline std::string get_string(const json& obj, const std::string& ctx,
                              const char* key) {
  const json& v = need(obj, ctx, key);
  if (!v.is_string())
    throw InvalidParameter(ctx + "." + key + " must be a string");
  return v.get<std::string>();
}

inline std::vector<double> get_number_array(const json& obj,
                                            const std::string& ctx,
                                            const char* key) {
  const json& v = need(obj, ctx, key);
  if (!v.is_array())
    throw InvalidParameter(ctx + "." + key + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number())
      throw InvalidParameter(ctx + "." + key + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline CoefficientSequence sequence_from_config(const json& comp,
                                                const std::string& ctx) {
  std::string kind = get_string(comp, ctx, "kind");
  if (kind == "ar1") {
    check_fields(comp, ctx, {"kind", "rho", "pi", "beta"});
    return CoefficientSequence::ar1(get_number(comp, ctx, "rho"));
  }
  if (kind == "ar2") {
    check_fields(comp, ctx, {"kind", "l1", "l2", "pi", "beta"});
    return CoefficientSequence::ar2(get_number(comp, ctx, "l1"),
                                    get_number(comp, ctx, "l2"));
  }
  if (kind == "frac_int") {
    check_fields(comp, ctx, {"kind", "d", "pi", "beta"});
    return CoefficientSequence::frac_int(get_number(comp, ctx, "d"));
  }
  if (kind == "arma") {
    check_fields(comp, ctx, {"kind", "psi", "phi", "theta", "eta", "pi", "beta"});
    return CoefficientSequence::arma(get_number_array(comp, ctx, "psi"),
                                     get_number_array(comp, ctx, "phi"),
                                     get_number_array(comp, ctx, "theta"),
                                     get_number_array(comp, ctx, "eta"));
  }
  if (kind == "strophoid") {
    check_fields(comp, ctx, {"kind", "a", "b", "seed", "pi", "beta"});
    return CoefficientSequence::strophoid(
        get_number(comp, ctx, "a"), get_number(comp, ctx, "b"),
        static_cast<std::uint64_t>(get_integer(comp, ctx, "seed")));
  }
  if (kind == "explicit") {
    check_fields(comp, ctx, {"kind", "coeffs", "pi", "beta"});
    const json& co = need(comp, ctx, "coeffs");
    if (!co.is_object() || co.empty())
      throw InvalidParameter(ctx + ".coeffs must be a non-empty object "
                             "mapping integer offsets to values");
    std::map<long long, double> coeffs;
    for (const auto& [key, value] : co.items()) {
      long long k;
      try {
        std::size_t pos = 0;
        k = std::stoll(key, &pos);
        if (pos != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw InvalidParameter(ctx + ".coeffs key \"" + key +
                               "\" is not an integer offset");
      }
      if (!value.is_number())
        throw InvalidParameter(ctx + ".coeffs values must be numbers");
      coeffs[k] = value.get<double>();
    }
    return CoefficientSequence::explicit_seq(std::move(coeffs));
  }
  throw InvalidParameter(ctx + ".kind \"" + kind +
                         "\" is not a known coefficient family (ar1, ar2, "
                         "frac_int, arma, strophoid, explicit)");
}

inline Aggregate aggregate_from_config(const json& root) {
  const json& model = need(root, "config", "model");
  if (!model.is_object())
    throw InvalidParameter("model must be an object");
  check_fields(model, "model", {"alpha", "components"});
  double alpha = get_number(model, "model", "alpha");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw InvalidParameter("model.alpha must lie in the open interval (0, 2)");
  const json& comps = need(model, "model", "components");
  if (!comps.is_array() || comps.empty())
    throw InvalidParameter("model.components must be a non-empty array");
  std::vector<Component> components;
  components.reserve(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::string ctx = "model.components[" + std::to_string(i) + "]";
    const json& c = comps[i];
    if (!c.is_object()) throw InvalidParameter(ctx + " must be an object");
    CoefficientSequence seq = sequence_from_config(c, ctx);
    double pi = get_number(c, ctx, "pi");
    double beta = get_number(c, ctx, "beta");
    if (!(pi > 0.0))
      throw InvalidParameter(ctx + ".pi must be positive");
    if (!(std::abs(beta) <= 1.0))
      throw InvalidParameter(ctx + ".beta must lie in [-1, 1]");
    components.push_back(Component{pi, std::move(seq), beta});
  }
  return Aggregate(alpha, std::move(components));
}

struct WindowSpec {
  int m;
  int h;
  double p;
};

inline WindowSpec window_from_config(const json& root) {
  const json& sem = need(root, "config", "seminorm");
  if (!sem.is_object())
    throw InvalidParameter("seminorm must be an object");
  check_fields(sem, "seminorm", {"m", "h", "p"});
  long long m = get_integer(sem, "seminorm", "m");
  long long h = get_integer(sem, "seminorm", "h");
  double p = get_number_or(sem, "seminorm", "p", 2.0);
  if (m < 0)
    throw InvalidParameter("seminorm.m must be a non-negative integer");
  if (h < 1)
    throw InvalidParameter("seminorm.h must be a positive integer");
  if (!(p >= 1.0))
    throw InvalidParameter("seminorm.p must be at least 1");
  return WindowSpec{static_cast<int>(m), static_cast<int>(h), p};
}

inline TruncationPolicy truncation_from_run(const json& run,
                                            const std::string& ctx) {
  TruncationPolicy pol;
  pol.tol = get_number_or(run, ctx, "tol", pol.tol);
  if (!(pol.tol > 0.0))
    throw InvalidParameter(ctx + ".tol must be positive");
  if (run.contains("max_terms")) {
    long long mt = get_integer(run, ctx, "max_terms");
    if (mt < 1) throw InvalidParameter(ctx + ".max_terms must be positive");
    pol.max_terms = mt;
  }
  return pol;
}

struct AtomLabel {
  int theta;
  int j;
  long long k;
};

inline std::vector<AtomLabel> labels_from_config(const json& run,
                                                 const std::string& ctx,
                                                 const char* key) {
  const json& arr = need(run, ctx, key);
  if (!arr.is_array() || arr.empty())
    throw InvalidParameter(ctx + "." + key +
                           " must be a non-empty array of atom labels");
  std::vector<AtomLabel> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string lctx = ctx + "." + key + "[" + std::to_string(i) + "]";
    const json& l = arr[i];
    if (!l.is_object()) throw InvalidParameter(lctx + " must be an object");
    check_fields(l, lctx, {"theta", "j", "k"});
    long long theta = get_integer(l, lctx, "theta");
    if (theta != 1 && theta != -1)
      throw InvalidParameter(lctx + ".theta must be +1 or -1");
    out.push_back(AtomLabel{static_cast<int>(theta),
                            static_cast<int>(get_integer(l, lctx, "j")),
                            get_integer(l, lctx, "k")});
  }
  return out;
}

inline Arc arc_from_config(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw InvalidParameter(ctx + " must be an object");
  check_fields(obj, ctx, {"center", "half_width"});
  Arc arc;
  arc.center = get_number(obj, ctx, "center");
  arc.half_width = get_number(obj, ctx, "half_width");
  if (!(arc.half_width >= 0.0))
    throw InvalidParameter(ctx + ".half_width must be non-negative");
  return arc;
}

inline double bound_from_config(const json& v, const std::string& ctx,
                                bool upper) {
  if (v.is_null())
    return upper ? std::numeric_limits<double>::infinity()
                 : -std::numeric_limits<double>::infinity();
  if (!v.is_number())
    throw InvalidParameter(ctx + " entries must be numbers or null");
  return v.get<double>();
}

struct NamedRegion {
  std::string name;
  Region region;
};

struct BivarConfig {
  double alpha;
  double rho1;
  double rho2;
  DiscreteSpectralMeasure gamma2;
  Arc v0;
  std::vector<NamedRegion> regions;
};

inline BivarConfig bivariate_from_config(const json& root) {
  const json& b = need(root, "config", "bivariate");
  if (!b.is_object())
    throw InvalidParameter("bivariate must be an object");
  check_fields(b, "bivariate",
               {"alpha", "rho1", "rho2", "gamma2", "v0", "regions"});
  double alpha = get_number(b, "bivariate", "alpha");
  double rho1 = get_number(b, "bivariate", "rho1");
  double rho2 = get_number(b, "bivariate", "rho2");

  const json& g2 = need(b, "bivariate", "gamma2");
  if (!g2.is_array() || g2.empty())
    throw InvalidParameter(
        "bivariate.gamma2 must be a non-empty array of {angle, weight} atoms");
  // each listed direction contributes a symmetric pair of atoms
  std::vector<Atom> atoms;
  atoms.reserve(2 * g2.size());
  for (std::size_t i = 0; i < g2.size(); ++i) {
    std::string ctx = "bivariate.gamma2[" + std::to_string(i) + "]";
    const json& a = g2[i];
    if (!a.is_object()) throw InvalidParameter(ctx + " must be an object");
    check_fields(a, ctx, {"angle", "weight"});
    double ang = get_number(a, ctx, "angle");
    double w = get_number(a, ctx, "weight");
    if (!(w > 0.0)) throw InvalidParameter(ctx + ".weight must be positive");
    atoms.push_back(Atom{{std::cos(ang), std::sin(ang)}, w, 1, 1,
                         static_cast<long long>(i)});
    atoms.push_back(Atom{{-std::cos(ang), -std::sin(ang)}, w, -1, 1,
                         static_cast<long long>(i)});
  }
  DiscreteSpectralMeasure gamma2(2, SupportKind::EuclideanSphere, {}, alpha,
                                 std::move(atoms));

  Arc v0 = arc_from_config(need(b, "bivariate", "v0"), "bivariate.v0");

  const json& regs = need(b, "bivariate", "regions");
  if (!regs.is_array())
    throw InvalidParameter("bivariate.regions must be an array");
  std::vector<NamedRegion> regions;
  regions.reserve(regs.size());
  for (std::size_t i = 0; i < regs.size(); ++i) {
    std::string ctx = "bivariate.regions[" + std::to_string(i) + "]";
    const json& r = regs[i];
    if (!r.is_object()) throw InvalidParameter(ctx + " must be an object");
    check_fields(r, ctx, {"name", "v", "rects"});
    NamedRegion nr;
    nr.name = get_string(r, ctx, "name");
    nr.region.v = arc_from_config(need(r, ctx, "v"), ctx + ".v");
    const json& rects = need(r, ctx, "rects");
    if (!rects.is_array() || rects.empty())
      throw InvalidParameter(ctx + ".rects must be a non-empty array");
    for (std::size_t ri = 0; ri < rects.size(); ++ri) {
      std::string rctx = ctx + ".rects[" + std::to_string(ri) + "]";
      const json& rc = rects[ri];
      if (!rc.is_object()) throw InvalidParameter(rctx + " must be an object");
      check_fields(rc, rctx, {"x", "y"});
      const json& xs = need(rc, rctx, "x");
      const json& ys = need(rc, rctx, "y");
      if (!xs.is_array() || xs.size() != 2 || !ys.is_array() || ys.size() != 2)
        throw InvalidParameter(rctx +
                               ".x and .y must be [low, high] pairs "
                               "(null for an unbounded side)");
      Rect rect;
      rect.x_lo = bound_from_config(xs[0], rctx + ".x", false);
      rect.x_hi = bound_from_config(xs[1], rctx + ".x", true);
      rect.y_lo = bound_from_config(ys[0], rctx + ".y", false);
      rect.y_hi = bound_from_config(ys[1], rctx + ".y", true);
      if (!(rect.x_lo <= rect.x_hi) || !(rect.y_lo <= rect.y_hi))
        throw InvalidParameter(rctx + " bounds must satisfy low <= high");
      nr.region.P.rects.push_back(rect);
    }
    regions.push_back(std::move(nr));
  }
  return BivarConfig{alpha, rho1, rho2, std::move(gamma2), v0,
                     std::move(regions)};
}

}  // namespace cfg
}  // namespace stablepath
