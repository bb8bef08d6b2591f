#pragma once

#include <Eigen/Dense>

#include "srcd/liealg.hpp"
#include "srcd/tensor.hpp"

namespace srcd {

// All covariant derivatives below act on constant-component tensors of a
// left-invariant frame: only the connection coefficients contribute, the
// directional-derivative term of the components is zero. This is NOT valid
// for tensors whose frame components vary.

struct EhresmannCurvature {
  Tensor3 R;     // R[i][j][s]: vertical components of [pr_H e_i, pr_H e_j], N x N x nu
  Tensor3 Rbar;  // Rbar[i][j][a]: horizontal components of [pr_V e_i, pr_V e_j], N x N x n
};

struct BottCurvature {
  Tensor3 torsion;  // torsion[i][j][k]
  Tensor4 curv;     // curv[i][j][k][l] = <R(e_i, e_j) e_k, e_l>
};

struct CovariantDerivatives {
  Tensor4 nablaR;               // nablaR[m][i][j][s] = (nabla_m R)(e_i, e_j)_s
  Tensor3 nabla_vstar;          // nabla_vstar[m][a][b] = (nabla_m v*)^{ab}
  Eigen::MatrixXd delta_vstar;  // horizontal trace of the second covariant derivative of v*
};

struct SubLaplacianData {
  Eigen::VectorXd drift;  // Delta' = sum_i E_i^2 + sum_j drift[j] E_j, j < n
  Eigen::VectorXd N;      // mean-curvature defect, horizontal components
};

struct ConnectionData {
  int n = 0;
  int nu = 0;
  Tensor3 c;
  Tensor3 lc;
  Tensor3 bott;
  Tensor3 torsion;
  Tensor4 curv;
  Tensor3 R;
  Tensor3 Rbar;
  Tensor4 nablaR;
  Tensor3 nabla_vstar;
  Eigen::MatrixXd delta_vstar;
  Eigen::VectorXd drift;
  Eigen::VectorXd N;

  int dim() const { return n + nu; }
};

Tensor3 levi_civita(const LieSRStructure& s);
Tensor3 bott_connection(const LieSRStructure& s, const Tensor3& lc);
EhresmannCurvature ehresmann_curvature(const LieSRStructure& s);
BottCurvature bott_curvature(const LieSRStructure& s, const Tensor3& bott);
CovariantDerivatives covariant_derivatives(const LieSRStructure& s, const Tensor3& bott, const Tensor3& R);
SubLaplacianData sublaplacian_data(const LieSRStructure& s, const Tensor3& lc);

// Full pipeline; s must be in an adapted orthonormal frame.
ConnectionData compute_connection(const LieSRStructure& s);

// (nabla_m h*)^{ab}; identically zero iff the complement is metric-preserving.
Tensor3 nabla_hstar(const Tensor3& bott, int n);
bool metric_preserving(const ConnectionData& conn, double tol = 1e-12);
bool vertical_integrable(const ConnectionData& conn, double tol = 1e-12);
bool parallel_vertical_metric(const ConnectionData& conn, double tol = 1e-12);

// Frame-slot trace of Rbar(v, R(v, .)) for a frame vector v.
double co_curvature_trace(const ConnectionData& conn, const Eigen::VectorXd& v);

}  // namespace srcd
