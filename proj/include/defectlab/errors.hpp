#pragma once

#include <stdexcept>
#include <string>

namespace defectlab {

enum class error_kind {
  parse,
  malformed_element,
  not_proper,
  undefined_component,
  group_mismatch,
  empty_segment,
  unit_ideal,
  precision_loss,
  insufficient_steps,
  invalid_distance,
  bound_violation,
  invalid_characteristic_data,
  valuation_unresolved,
  no_defect,
  not_immediate,
  invalid_argument,
};

inline const char* to_string(error_kind k) {
  switch (k) {
    case error_kind::parse: return "parse-error";
    case error_kind::malformed_element: return "malformed-element";
    case error_kind::not_proper: return "not-proper";
    case error_kind::undefined_component: return "undefined-component";
    case error_kind::group_mismatch: return "group-mismatch";
    case error_kind::empty_segment: return "empty-segment";
    case error_kind::unit_ideal: return "unit-ideal";
    case error_kind::precision_loss: return "precision-loss";
    case error_kind::insufficient_steps: return "insufficient-steps";
    case error_kind::invalid_distance: return "invalid-distance";
    case error_kind::bound_violation: return "bound-violation";
    case error_kind::invalid_characteristic_data: return "invalid-characteristic-data";
    case error_kind::valuation_unresolved: return "valuation-unresolved";
    case error_kind::no_defect: return "no-defect";
    case error_kind::not_immediate: return "not-immediate";
    case error_kind::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

/// Base exception for every precondition or representation failure in the library.
class error : public std::runtime_error {
 public:
  error(error_kind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  error_kind kind() const noexcept { return kind_; }

 private:
  error_kind kind_;
};

class parse_error : public error {
 public:
  explicit parse_error(const std::string& what) : error(error_kind::parse, what) {}
};

}  // namespace defectlab
