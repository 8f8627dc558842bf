#pragma once

// A small command language over segcalc/ogroup:
//   upclose 1 2 5 [over G]        scale_up 2 ">=1" over Z       negate ">0"
//   shift 1/2 ">0"                lemma_sd Q ">0" 2             is_prime ">H1" over QxZ
//   is_idempotent ">0" 2          power ">=1" 3                 component (0,3) over QxZ

#include <string>
#include <string_view>
#include <vector>

#include "defectlab/ogroup.hpp"
#include "defectlab/segcalc.hpp"

namespace defectlab {

namespace detail {

inline bool looks_like_group(std::string_view s) {
  if (s.empty()) return false;
  if (s.front() == '>' || s.front() == '<' || s == "empty" || s == "all") return false;
  try {
    parse_group_name(s);
    return true;
  } catch (const error&) {
    return false;
  }
}

inline unsigned parse_count(const std::string& s) {
  Rational r = parse_rational(s);
  if (den(r) != 1 || r < 1) throw parse_error("expected a positive integer, got '" + s + "'");
  return static_cast<unsigned>(num(r));
}

inline bool is_initial_literal(std::string_view s) { return !s.empty() && s.front() == '<'; }

}  // namespace detail

/// Evaluates one command and returns the canonical result literal.
inline std::string run_group_calc(std::vector<std::string> args) {
  if (args.empty()) throw parse_error("empty group expression");
  std::string op = args.front();
  args.erase(args.begin());
  GroupRef g;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "over") {
      g = make_group(parse_group_name(args[i + 1]));
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
  if (!g && !args.empty() && detail::looks_like_group(args.front()) && op != "upclose" && op != "shift" && op != "component") {
    g = make_group(parse_group_name(args.front()));
    args.erase(args.begin());
  }
  if (!g) g = make_group(OrderedGroup::rationals());
  auto need = [&](std::size_t n) {
    if (args.size() != n) throw parse_error(op + " expects " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()));
  };
  auto element = [&](const std::string& s) {
    GroupElement x{detail::parse_point(detail::strip(s))};
    if (x.rank() != g->rank()) throw parse_error("element " + s + " does not have rank " + std::to_string(g->rank()));
    return x;
  };

  if (op == "upclose") {
    std::vector<GroupElement> pts;
    for (const auto& a : args) pts.push_back(element(a));
    return upward_closure(g, pts).str();
  }
  if (op == "scale_up" || op == "scale") {
    need(2);
    return scale_up(detail::parse_count(args[0]), parse_final_segment(args[1], g)).str();
  }
  if (op == "negate") {
    need(1);
    if (detail::is_initial_literal(args[0])) return negate(parse_initial_segment(args[0], g)).str();
    return negate(parse_final_segment(args[0], g)).str();
  }
  if (op == "shift") {
    need(2);
    GroupElement x = element(args[0]);
    if (detail::is_initial_literal(args[1])) return shift(x, parse_initial_segment(args[1], g)).str();
    return shift(x, parse_final_segment(args[1], g)).str();
  }
  if (op == "lemma_sd") {
    need(2);
    LemmaSdVerdict v = lemma_sd_classify(parse_final_segment(args[0], g), detail::parse_count(args[1]));
    if (!v.matches) return "fails";
    return "matches Δ=" + g->subgroup_name(*v.delta);
  }
  if (op == "is_prime") {
    need(1);
    auto h = is_prime(IdealDesc(parse_final_segment(args[0], g)));
    return h ? "H=" + g->subgroup_name(*h) : "none";
  }
  if (op == "is_idempotent") {
    need(2);
    return is_idempotent(IdealDesc(parse_final_segment(args[0], g)), detail::parse_count(args[1])) ? "true" : "false";
  }
  if (op == "power") {
    need(2);
    return ideal_power(IdealDesc(parse_final_segment(args[0], g)), detail::parse_count(args[1])).str();
  }
  if (op == "strongly_convex") {
    need(1);
    return is_strongly_convex(*g, ConvexSubgroup{detail::parse_count(args[0])}) ? "true" : "false";
  }
  if (op == "component") {
    need(1);
    ArchimedeanComponent c = archimedean_component(*g, element(args[0]));
    return "C=" + g->subgroup_name(c.smallest_containing) + " C+=" + g->subgroup_name(c.largest_not_containing) + " slot=" + c.component.name();
  }
  throw parse_error("unknown group operation '" + op + "'");
}

}  // namespace defectlab
