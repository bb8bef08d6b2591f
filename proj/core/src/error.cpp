#include "srcd/error.hpp"

namespace srcd {

ErrorClass error_class(Errc code) {
  switch (code) {
    case Errc::numerical_blowup:
    case Errc::insufficient_paths:
      return ErrorClass::verification;
    case Errc::torsion_mismatch:
    case Errc::asymmetric_ricci:
    case Errc::trace_mismatch:
    case Errc::internal:
      return ErrorClass::internal;
    default:
      return ErrorClass::input;
  }
}

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::unknown_example: return "UnknownExample";
    case Errc::bad_param: return "BadParam";
    case Errc::not_positive_definite: return "NotPositiveDefinite";
    case Errc::not_orthonormal_frame: return "NotOrthonormalFrame";
    case Errc::zero_curvature: return "ZeroCurvature";
    case Errc::not_step_two: return "NotStepTwo";
    case Errc::not_normalized: return "NotNormalized";
    case Errc::unbounded_constant: return "UnboundedConstant";
    case Errc::not_vertical: return "NotVertical";
    case Errc::bad_dimension: return "BadDimension";
    case Errc::constraint_violated: return "ConstraintViolated";
    case Errc::requires_parallel_vertical_metric: return "RequiresParallelVerticalMetric";
    case Errc::requires_parallel_metric: return "RequiresParallelMetric";
    case Errc::non_positive_rho20: return "NonPositiveRho20";
    case Errc::non_positive_kappa: return "NonPositiveKappa";
    case Errc::unsupported_algebra: return "UnsupportedAlgebra";
    case Errc::jmax_too_small: return "JmaxTooSmall";
    case Errc::no_realization: return "NoRealization";
    case Errc::parse_error: return "ParseError";
    case Errc::schema_error: return "SchemaError";
    case Errc::validation_error: return "ValidationError";
    case Errc::numerical_blowup: return "NumericalBlowup";
    case Errc::insufficient_paths: return "InsufficientPaths";
    case Errc::torsion_mismatch: return "TorsionMismatch";
    case Errc::asymmetric_ricci: return "AsymmetricRicci";
    case Errc::trace_mismatch: return "TraceMismatch";
    case Errc::internal: return "InternalError";
  }
  return "UnknownError";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace srcd
