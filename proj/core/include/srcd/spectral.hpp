#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "srcd/cdcore.hpp"
#include "srcd/connection.hpp"
#include "srcd/invariants.hpp"
#include "srcd/liealg.hpp"

namespace srcd {

enum class GapSource { prop41, kappa_corollary, step2_privileged };

std::string_view gap_source_name(GapSource s);

// Lower bound for -lambda over the nonzero eigenvalues lambda of the sub-Laplacian.
struct GapBound {
  double bound = 0.0;
  double k2 = 0.0;                 // max(0, -rho21)
  double c_opt = 0.0;              // c used; may be +infinity
  std::optional<double> kappa;     // kappa corollary only
  std::optional<double> b;         // step-2 privileged only
  GapSource source = GapSource::prop41;
};

// n rho20 / (n + rho20 (n-1)) * (rho1 - k2/rho20); throws NonPositiveRho20.
GapBound gap_bound_prop41(const CDParams& params);

// Same bound maximized over c with optimize_c; c = infinity when
// M_HV + M_nabla_v vanishes.
GapBound gap_bound_prop41(const CDConstants& k, std::optional<double> n_dim = std::nullopt);

// kappa = rho_H m_R^2 / 2 - M_HV^2 and
// bound = (2 kappa / (2 M_HV + m_R sqrt(2 rho_H + 2 kappa (n-1)/n)))^2.
GapBound gap_bound_kappa(const CDConstants& k, std::optional<double> n_dim = std::nullopt);

// n / (n (2b^2 + 1) - 1) * rho_H for the privileged vertical metric of a
// step-2 structure.
GapBound gap_bound_step2(const LieSRStructure& s);

struct IrrepBlock {
  int two_j1 = 0;
  int two_j2 = -1;  // -1 for a single su(2) factor
  std::vector<double> eigenvalues;  // real parts, sorted descending
};

struct OracleResult {
  int factors = 1;
  int two_jmax = 0;
  std::vector<IrrepBlock> blocks;
  std::vector<double> eigenvalues;  // all nonzero eigenvalues, sorted by magnitude
  double gap = 0.0;
};

// Recognized compact algebras: su(2) (complex 2x2 realization) and
// su(2) + su(2) (complex 4x4, block diagonal). Throws UnsupportedAlgebra.
int su2_factor_count(const LieSRStructure& s);

// 11/2 for su(2), 5/2 per factor for products (as 2j).
int default_two_jmax(const LieSRStructure& s);

// Spectrum of sum_i dPi(E_i)^2 + sum_j drift[j] dPi(E_j) on every irrep with
// spins up to jmax per factor. s must be in its orthonormal frame.
OracleResult irrep_spectrum_oracle(const LieSRStructure& s, const ConnectionData& conn, int two_jmax);

// Hermitian spin matrices J_x, J_y, J_z of spin two_j / 2.
std::vector<Eigen::MatrixXcd> spin_matrices(int two_j);

}  // namespace srcd
