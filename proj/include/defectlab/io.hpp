#pragma once

// Spec files, report serialisation and the text renderer.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "defectlab/classify.hpp"
#include "defectlab/kahler.hpp"
#include "defectlab/kummer.hpp"

namespace defectlab {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Input

inline Rational json_rational(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw parse_error("expected a rational (string or integer), got " + j.dump());
}

inline Slot parse_slot_json(const json& j) {
  if (j.is_string()) return parse_group_name(j.get<std::string>()).slots().at(0);
  if (!j.is_object()) throw parse_error("slot must be an object or a name, got " + j.dump());
  if (j.contains("divisible_by") && j["divisible_by"].is_string()) {
    if (j["divisible_by"].get<std::string>() != "all") throw parse_error("divisible_by must be a list of primes or \"all\"");
    return Slot::rationals();
  }
  std::vector<Rational> gens;
  if (j.contains("generators"))
    for (const auto& g : j["generators"]) gens.push_back(json_rational(g));
  std::vector<unsigned> primes;
  if (j.contains("divisible_by"))
    for (const auto& q : j["divisible_by"]) {
      if (!q.is_number_unsigned() || !is_prime_number(q.get<unsigned>())) throw parse_error("divisible_by entries must be primes, got " + q.dump());
      primes.push_back(q.get<unsigned>());
    }
  if (gens.empty()) throw parse_error("slot needs at least one generator");
  return Slot::localized(std::move(gens), std::move(primes));
}

/// `"Q"`, `"QxZ"`, or a list of slot objects, coarsest first.
inline OrderedGroup parse_group_json(const json& j) {
  if (j.is_string()) return parse_group_name(j.get<std::string>());
  if (!j.is_array()) throw parse_error("group must be a name or a list of slots, got " + j.dump());
  std::vector<Slot> slots;
  for (const auto& s : j) slots.push_back(parse_slot_json(s));
  return OrderedGroup(std::move(slots));
}

inline GroupElement parse_element(std::string_view text, const OrderedGroup& g) {
  GroupElement x{detail::parse_point(detail::strip(text))};
  if (x.rank() != g.rank()) throw parse_error("element " + std::string(text) + " has rank " + std::to_string(x.rank()) + ", group " + g.name() + " has rank " + std::to_string(g.rank()));
  g.require_member(x);
  return x;
}

/// "p^-10" or a positive rational.
inline Rational parse_precision(std::string_view text, unsigned p) {
  std::string s(detail::strip(text));
  if (s.rfind("p^", 0) == 0) {
    std::string e = s.substr(2);
    if (!e.empty() && e.front() == '(' && e.back() == ')') e = e.substr(1, e.size() - 2);
    Rational ex = parse_rational(e);
    if (den(ex) != 1) throw parse_error("precision exponent must be an integer: " + s);
    long long n = static_cast<long long>(num(ex));
    if (n >= 0) throw parse_error("precision must be a negative power of p: " + s);
    return Rational(1) / rpow(Rational(p), static_cast<unsigned>(-n));
  }
  Rational r = parse_rational(s);
  if (r <= 0) throw parse_error("precision must be positive: " + s);
  return r;
}

inline BaseFieldSpec parse_base_json(const json& j, unsigned p) {
  std::string kind = j.is_string() ? j.get<std::string>() : j.value("kind", std::string("perfect_hull_rational_function"));
  if (kind == "perfect_hull_rational_function") return BaseFieldSpec::perfect_hull_rational_function(p);
  if (kind == "perfect_hull_laurent") return BaseFieldSpec::perfect_hull_laurent(p);
  if (kind == "truncated_hahn") {
    if (!j.is_object() || !j.contains("group")) throw parse_error("truncated_hahn base needs a \"group\"");
    return BaseFieldSpec::truncated_hahn(p, parse_group_json(j["group"]));
  }
  throw parse_error("unknown base field kind '" + kind + "'");
}

/// Field spec: X^p - X = as_rhs over `base`.
struct FieldSpec {
  std::string name;
  ExtensionRef ext;
  std::optional<Rational> precision;
};

/// Injected ramification jump over a given group.
struct SyntheticSpec {
  std::string name;
  unsigned p;
  FinalSegment sigma_e;
};

struct KummerSpec {
  std::string name;
  KummerValueData data;
};

using AnySpec = std::variant<FieldSpec, SyntheticSpec, KummerSpec>;

/// Default working precision: coefficients known below t^2.
inline constexpr long long default_series_cap = 2;

inline unsigned json_prime(const json& j) {
  if (!j.contains("p") || !j["p"].is_number_unsigned()) throw parse_error("spec needs an unsigned integer \"p\"");
  unsigned p = j["p"].get<unsigned>();
  if (!is_prime_number(p)) throw parse_error("p = " + std::to_string(p) + " is not prime");
  return p;
}

inline AnySpec parse_spec(const json& j) {
  if (!j.is_object()) throw parse_error("spec must be a JSON object");
  unsigned p = json_prime(j);
  std::string name = j.value("name", std::string());
  if (j.contains("vp")) {
    auto g = make_group(parse_group_json(j.value("group", json("Q"))));
    GroupElement vp = parse_element(j["vp"].is_string() ? j["vp"].get<std::string>() : j["vp"].dump(), *g);
    if (j.contains("distance"))
      return KummerSpec{name, KummerValueData(p, g, vp, parse_initial_segment(j["distance"].get<std::string>(), g))};
    if (j.contains("residual"))
      return KummerSpec{name, KummerValueData::from_residual(p, g, vp, parse_initial_segment(j["residual"].get<std::string>(), g))};
    throw parse_error("Kummer value data needs \"distance\" or \"residual\"");
  }
  if (j.contains("sigma_e")) {
    auto g = make_group(parse_group_json(j.value("group", json("Q"))));
    return SyntheticSpec{name, p, parse_final_segment(j["sigma_e"].get<std::string>(), g)};
  }
  if (j.contains("as_rhs")) {
    BaseFieldSpec base = parse_base_json(j.value("base", json("perfect_hull_rational_function")), p);
    HahnSeries a = parse_series(j["as_rhs"].get<std::string>(), p);
    if (a.is_exact()) a = a.truncated(Rational(default_series_cap));
    std::optional<Rational> prec;
    if (j.contains("precision")) prec = parse_precision(j["precision"].get<std::string>(), p);
    return FieldSpec{name, make_extension(p, base, a), prec};
  }
  throw parse_error("spec needs \"as_rhs\", \"sigma_e\" or \"vp\"");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(error_kind::invalid_argument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw parse_error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Output

inline json opt_subgroup(const OrderedGroup& g, const std::optional<ConvexSubgroup>& h) {
  return h ? json(g.subgroup_name(*h)) : json(nullptr);
}

inline json thm14_json(const OrderedGroup& g, const Thm14Report& t) {
  json j;
  for (const char* k : {"b", "c", "d", "e", "f", "g"}) j[k] = nullptr;
  for (const auto& [k, v] : t.evaluated()) j[k] = v;
  j["h"] = opt_subgroup(g, t.h);
  j["d_literal"] = t.d_literal ? json(*t.d_literal) : json(nullptr);
  j["d_samples"] = t.d_samples;
  j["d_solver_witnesses"] = t.d_solver_witnesses;
  j["coherent"] = t.coherent();
  return j;
}

inline json omega_json(const PresentedModule& m) {
  return json{{"u_segment", m.u.str()}, {"v_segment", m.v.str()}, {"uv_segment", m.uv.str()}, {"is_zero", is_zero(m)}};
}

inline json report_json(const DefectReport& r) {
  const OrderedGroup& g = *r.group;
  json j;
  j["kind"] = r.kind;
  j["p"] = r.p;
  j["group"] = g.name();
  if (r.spec) {
    j["base"] = r.spec->base.kind_name();
    j["as_rhs"] = r.spec->a.str();
  }
  j["verdict"] = to_string(r.verdict);
  j["h_e"] = opt_subgroup(g, r.h_e);
  j["sigma_e"] = r.sigma_e ? json(r.sigma_e->str()) : json(nullptr);
  j["distance"] = r.distance ? json(r.distance->str()) : json(nullptr);
  j["ideal"] = r.ideal ? json(r.ideal->str()) : json(nullptr);
  j["omega"] = r.omega ? omega_json(*r.omega) : json(nullptr);
  j["trace_ideal"] = r.trace_ideal ? json(r.trace_ideal->str()) : json(nullptr);
  if (r.verdict != Verdict::inconclusive) {
    const Equivalences& e = r.equivalences;
    j["equivalences"] = json{{"lemma_sd", e.lemma_sd}, {"prime_shape", e.prime_shape}, {"idempotent", e.idempotent},
                             {"omega_zero", e.omega_zero}, {"trace_shape", e.trace_shape}, {"coherent", e.coherent()}};
  }
  j["thm14"] = r.thm14 ? thm14_json(g, *r.thm14) : json(nullptr);
  if (r.solver) {
    json steps = json::array();
    for (const auto& s : r.solver->steps)
      steps.push_back(json{{"c", s.c.str()}, {"residual_value", to_string(s.residual_value)}, {"distance", to_string(s.distance)}});
    j["solver"] = json{{"target", to_string(r.solver->target)}, {"precision_exhausted", r.solver->precision_exhausted}, {"steps", steps}};
  }
  if (r.cut) {
    const LimitEstimate& est = r.cut->estimate;
    j["cut"] = json{{"status", r.cut->status == CutStatus::converged ? "converged" : "inconclusive"},
                    {"limit", est.limit ? json(to_string(*est.limit)) : json(nullptr)},
                    {"bracket", json::array({to_string(est.lower), to_string(est.upper)})}};
  }
  if (r.ramification) {
    const RamificationSample& s = *r.ramification;
    json chain = json::array();
    for (const auto& v : s.chain_values) chain.push_back(to_string(v));
    json ram{{"attempts", s.attempts}, {"values", s.values.size()}, {"in_sigma_e", r.ramification_in_sigma},
             {"skipped_base", s.skipped_base}, {"skipped_unresolved", s.skipped_unresolved}};
    if (!s.values.empty()) {
      ram["min"] = to_string(*std::min_element(s.values.begin(), s.values.end()));
      ram["max"] = to_string(*std::max_element(s.values.begin(), s.values.end()));
    }
    ram["chain_values"] = chain;
    ram["chain_monotone"] = r.chain_values_monotone;
    j["ramification"] = ram;
  }
  if (r.trace)
    j["trace_samples"] = json{{"tested", r.trace->tested}, {"passed", r.trace->passed}, {"skipped", r.trace->skipped},
                              {"witnesses", r.trace->witnesses.size()}, {"witnesses_ok", r.trace->witnesses_ok()}};
  if (r.chain) {
    const FiniteChainReport& c = *r.chain;
    std::size_t rule_ok = 0;
    for (const auto& ck : c.checks) rule_ok += ck.ok();
    std::size_t poly_ok = 0;
    for (const auto& pl : c.polynomials) poly_ok += pl.consistent();
    j["chain"] = json{{"length", c.chain.entries.size()}, {"transitions", c.chain.transitions.size()}, {"transitions_consistent", c.chain.consistent()},
                      {"polynomials_consistent", poly_ok}, {"chain_rule_checks", c.checks.size()}, {"chain_rule_ok", rule_ok},
                      {"u_segment", c.u_segment.str()}, {"v_segment", c.v_segment.str()}};
  }
  j["notes"] = r.notes;
  j["coherent"] = r.coherent();
  return j;
}

inline json kummer_json(const KummerValueData& d, const KummerReport& k) {
  const OrderedGroup& g = *d.group;
  json j;
  j["kind"] = "kummer";
  j["p"] = d.p;
  j["group"] = g.name();
  j["vp"] = d.vp.str();
  j["chi"] = chi_value(d.p, d.vp).str();
  j["distance"] = d.distance.str();
  j["residual"] = d.residual().str();
  j["sigma_e"] = k.sigma_e.str();
  j["verdict"] = k.independent ? "independent" : "dependent";
  j["h_e"] = opt_subgroup(g, k.h_e);
  IdealDesc ie(k.sigma_e);
  j["omega"] = omega_json(omega_presentation(ie, d.p));
  j["trace_ideal"] = trace_ideal(k.sigma_e, d.p).str();
  j["thm14"] = thm14_json(g, k.conditions);
  j["bound_in_group"] = k.bound_in_group;
  j["vp_in_h_e"] = k.vp_in_h_e;
  j["flags"] = k.flags;
  j["consistent"] = k.consistent();
  return j;
}

/// "key: value" lines, nested objects indented.
inline void render_text(std::ostream& os, const json& j, int indent = 0) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    os << std::string(indent, ' ') << it.key() << ":";
    const json& v = it.value();
    if (v.is_object()) {
      os << "\n";
      render_text(os, v, indent + 2);
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      os << "\n";
      for (const auto& e : v) {
        os << std::string(indent + 2, ' ') << "-\n";
        render_text(os, e, indent + 4);
      }
    } else if (v.is_string()) {
      os << " " << v.get<std::string>() << "\n";
    } else {
      os << " " << v.dump() << "\n";
    }
  }
}

}  // namespace defectlab
