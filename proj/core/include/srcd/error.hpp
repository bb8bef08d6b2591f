#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace srcd {

enum class Errc {
  dimension_mismatch,
  unknown_example,
  bad_param,
  not_positive_definite,
  not_orthonormal_frame,
  zero_curvature,
  not_step_two,
  not_normalized,
  unbounded_constant,
  not_vertical,
  bad_dimension,
  constraint_violated,
  requires_parallel_vertical_metric,
  requires_parallel_metric,
  non_positive_rho20,
  non_positive_kappa,
  unsupported_algebra,
  jmax_too_small,
  no_realization,
  parse_error,
  schema_error,
  validation_error,
  // verification outcomes
  numerical_blowup,
  insufficient_paths,
  // internal consistency
  torsion_mismatch,
  asymmetric_ricci,
  trace_mismatch,
  internal,
};

// input errors map to CLI exit code 2, verification errors to 1, internal to 3
enum class ErrorClass { input, verification, internal };

ErrorClass error_class(Errc code);
std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace srcd
