#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "srcd/connection.hpp"
#include "srcd/invariants.hpp"

namespace srcd {

// Coefficients of the generalized curvature-dimension inequality
//   G2^{h*+l v*}(f) >= (1/n)(Lf)^2 + (rho1 - 1/l) G^{h*}(f) + (rho20 + rho21 l) G^{v*}(f).
// n_dim and c may be +infinity.
struct CDParams {
  double n_dim = 0.0;
  double rho1 = 0.0;
  double rho20 = 0.0;
  double rho21 = 0.0;
  double c = 0.0;
};

struct CDCoefficients {
  double ell = 0.0;
  double lf = 0.0;       // 1/n
  double gamma_h = 0.0;  // rho1 - 1/ell
  double gamma_v = 0.0;  // rho20 + rho21 ell
};

CDCoefficients coefficients_at(const CDParams& params, double ell);

// Treated as zero when deciding whether c = infinity is admissible.
inline constexpr double kZeroConstant = 1e-12;

CDParams cd_parameters(const CDConstants& k, double c, std::optional<double> n_dim = std::nullopt);

// L = Delta' + Z for a vertical Z (full frame components, horizontal part zero).
CDParams drifted_cd_parameters(const CDConstants& k, const ConnectionData& conn, const Eigen::VectorXd& Z, double c,
                               double n_dim);

// df and the horizontal rows of the Bott Hessian: H(i, j) = (nabla_{A_i} df)(e_j), i < n.
struct Jet2 {
  Eigen::VectorXd p;
  Eigen::MatrixXd H;
};

// H(i,j) - H(j,i) - sum_s p_{n+s} R(i,j,s), max over i, j < n
double constraint_residual(const Jet2& jet, const ConnectionData& conn);

// Jet with the given df, symmetric part of the horizontal block and vertical
// columns; the antisymmetric part is fixed by the constraint.
Jet2 make_jet(const ConnectionData& conn, const Eigen::VectorXd& p, const Eigen::MatrixXd& sym_hh,
              const Eigen::MatrixXd& hv);

Jet2 sample_jet(const ConnectionData& conn, std::uint64_t seed, std::uint64_t index = 0);

struct Gamma2Forms {
  double gamma_h = 0.0;
  double gamma_v = 0.0;
  double Lf = 0.0;
  double gamma2 = 0.0;  // G2^{h* + l v*}
  std::optional<double> gamma2_v;
  std::array<double, 7> terms{};  // the seven summands, ell already applied
};

Gamma2Forms gamma2_forms(const Jet2& jet, const ConnectionData& conn, const CDConstants& k, double ell);

struct CDMargin {
  double margin = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double scale() const;
  bool holds(double tol = 1e-9) const { return margin >= -tol * scale(); }
};

CDMargin verify_cd(const Jet2& jet, const CDParams& params, const ConnectionData& conn, const CDConstants& k,
                   double ell);

struct DoubleGammaMargins {
  double margin1 = 0.0;
  double margin2 = 0.0;
  double scale1 = 1.0;
  double scale2 = 1.0;
  bool holds(double tol = 1e-9) const { return margin1 >= -tol * scale1 && margin2 >= -tol * scale2; }
};

DoubleGammaMargins verify_double_gamma(const Jet2& jet, const ConnectionData& conn, const CDConstants& k, double c,
                                       double ell);

// G^{h*}(f, G^{v*}(f)) - G^{v*}(f, G^{h*}(f)) assembled from the jet, using the
// torsion to swap the mixed Hessian entries.
double condition_b_residual(const Jet2& jet, const ConnectionData& conn);

// Exact check of (CD*) for fixed (params, ell): the margin is a quadratic form
// on the constrained jets, so its smallest eigenvalue decides the inequality.
struct CDCertificate {
  double min_eigenvalue = 0.0;
  double max_abs_eigenvalue = 0.0;
  Jet2 worst_jet;
  bool holds(double tol = 1e-9) const { return min_eigenvalue >= -tol * (1.0 + max_abs_eigenvalue); }
};

CDCertificate certify_cd(const ConnectionData& conn, const CDConstants& k, const CDParams& params, double ell);

struct CDCase {
  CDParams params;
  double ell = 1.0;
};

struct VerificationSummary {
  CDCase cd_case;
  std::size_t samples = 0;
  double tol = 1e-9;
  double min_relative_margin = 0.0;  // min over jets of margin / scale
  std::size_t worst_index = 0;
  bool passed = true;
  std::optional<double> min_relative_double_gamma;  // min over both margins
};

struct VerificationOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  bool double_gamma = false;
  std::size_t threads = 0;
};

struct VerificationRun {
  std::vector<VerificationSummary> cases;
  std::optional<double> max_condition_b;  // when the vertical metric is parallel
  bool passed = true;
};

VerificationRun run_verification(const ConnectionData& conn, const CDConstants& k, const std::vector<CDCase>& cases,
                                 const VerificationOptions& opts);

struct COptimum {
  double c = 0.0;  // may be +infinity
  double value = 0.0;
};

// Maximizes objective(c) over log10 c in [-6, 6] (coarse scan, then golden
// section with 200 iterations; ties go to larger c). Non-finite objective
// values mark infeasible c. With allow_infinite the objective is evaluated at
// c = infinity only.
std::optional<COptimum> optimize_c(const std::function<double(double)>& objective, bool allow_infinite);

}  // namespace srcd
