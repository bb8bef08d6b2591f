#include "srcd/connection.hpp"

#include <cmath>

#include "srcd/error.hpp"

namespace srcd {

namespace {

void require_orthonormal(const LieSRStructure& s) {
  if (!is_orthonormal(s, 1e-12))
    throw Error(Errc::not_orthonormal_frame, "structure '" + s.name() + "' is not in an orthonormal frame");
}

}  // namespace

Tensor3 levi_civita(const LieSRStructure& s) {
  require_orthonormal(s);
  const int N = s.dim();
  const Tensor3& c = s.constants();
  Tensor3 lc({N, N, N}, {Slot::co, Slot::co, Slot::contra});
  // Koszul: 2<nabla_i e_j, e_k> = c_ijk - c_jki + c_kij
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) lc(i, j, k) = 0.5 * (c(i, j, k) - c(j, k, i) + c(k, i, j));
  return lc;
}

Tensor3 bott_connection(const LieSRStructure& s, const Tensor3& lc) {
  const int N = s.dim();
  const Tensor3& c = s.constants();
  Tensor3 bott({N, N, N}, {Slot::co, Slot::co, Slot::contra});
  for (int i = 0; i < N; ++i) {
    const bool hi = s.horizontal(i);
    for (int j = 0; j < N; ++j) {
      const bool hj = s.horizontal(j);
      for (int k = 0; k < N; ++k) {
        if (hj != s.horizontal(k)) continue;
        if (hi == hj)
          bott(i, j, k) = lc(i, j, k);  // pr_H nabla_{pr_H} on H, pr_V nabla_{pr_V} on V
        else
          bott(i, j, k) = c(i, j, k);   // pr_H [pr_V X, pr_H Y] and pr_V [pr_H X, pr_V Y]
      }
    }
  }
  return bott;
}

EhresmannCurvature ehresmann_curvature(const LieSRStructure& s) {
  const int n = s.n(), nu = s.nu(), N = s.dim();
  const Tensor3& c = s.constants();
  EhresmannCurvature out{Tensor3({N, N, nu}), Tensor3({N, N, n})};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < nu; ++t) out.R(i, j, t) = c(i, j, n + t);
  for (int i = n; i < N; ++i)
    for (int j = n; j < N; ++j)
      for (int a = 0; a < n; ++a) out.Rbar(i, j, a) = c(i, j, a);
  return out;
}

BottCurvature bott_curvature(const LieSRStructure& s, const Tensor3& bott) {
  const int n = s.n(), N = s.dim();
  const Tensor3& c = s.constants();
  BottCurvature out{Tensor3({N, N, N}), Tensor4({N, N, N, N})};
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) out.torsion(i, j, k) = bott(i, j, k) - bott(j, i, k) - c(i, j, k);

  const EhresmannCurvature eh = ehresmann_curvature(s);
  double mismatch = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const double expected = k < n ? -eh.Rbar(i, j, k) : -eh.R(i, j, k - n);
        mismatch = std::max(mismatch, std::abs(out.torsion(i, j, k) - expected));
      }
  if (mismatch > 1e-10)
    throw Error(Errc::torsion_mismatch, "torsion differs from -(R + Rbar) by " + std::to_string(mismatch));

  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          double v = 0.0;
          for (int m = 0; m < N; ++m)
            v += bott(j, k, m) * bott(i, m, l) - bott(i, k, m) * bott(j, m, l) - c(i, j, m) * bott(m, k, l);
          out.curv(i, j, k, l) = v;
        }
  double asym = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) asym = std::max(asym, std::abs(out.curv(i, j, k, l) + out.curv(j, i, k, l)));
  if (asym > 1e-10) throw Error(Errc::internal, "Bott curvature not antisymmetric in its first two slots");
  return out;
}

CovariantDerivatives covariant_derivatives(const LieSRStructure& s, const Tensor3& bott, const Tensor3& R) {
  const int n = s.n(), nu = s.nu(), N = s.dim();
  CovariantDerivatives out{Tensor4({N, N, N, nu}), Tensor3({N, N, N}), Eigen::MatrixXd::Zero(N, N)};

  for (int m = 0; m < N; ++m)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int t = 0; t < nu; ++t) {
          double v = 0.0;
          for (int u = 0; u < nu; ++u) v += R(i, j, u) * bott(m, n + u, n + t);
          for (int k = 0; k < N; ++k) v -= bott(m, i, k) * R(k, j, t) + bott(m, j, k) * R(i, k, t);
          out.nablaR(m, i, j, t) = v;
        }

  // v* has components diag(0,...,0,1,...,1) on covectors
  auto S = [n](int a, int b) { return (a == b && a >= n) ? 1.0 : 0.0; };
  Tensor3& D = out.nabla_vstar;
  for (int m = 0; m < N; ++m)
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        double v = 0.0;
        for (int k = 0; k < N; ++k) v += bott(m, k, a) * S(k, b) + bott(m, k, b) * S(a, k);
        D(m, a, b) = v;
      }

  // sum_{i<n} nabla_i (nabla_i v*) - nabla_{nabla_i e_i} v*
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      double v = 0.0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < N; ++k)
          v += bott(i, k, a) * D(i, k, b) + bott(i, k, b) * D(i, a, k) - bott(i, i, k) * D(k, a, b);
      out.delta_vstar(a, b) = v;
    }
  out.delta_vstar = 0.5 * (out.delta_vstar + out.delta_vstar.transpose()).eval();
  return out;
}

SubLaplacianData sublaplacian_data(const LieSRStructure& s, const Tensor3& lc) {
  require_orthonormal(s);
  const int n = s.n(), N = s.dim();
  const Tensor3& c = s.constants();
  SubLaplacianData out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out.drift[j] += lc(i, j, i);
  // g(A, N) = -1/2 tr_V (L_A g), with (L_A g)(f, f) = -2 c(A, f, f)
  for (int a = 0; a < n; ++a)
    for (int t = n; t < N; ++t) out.N[a] += c(a, t, t);
  return out;
}

ConnectionData compute_connection(const LieSRStructure& s) {
  require_orthonormal(s);
  ConnectionData d;
  d.n = s.n();
  d.nu = s.nu();
  d.c = s.constants();
  d.lc = levi_civita(s);
  d.bott = bott_connection(s, d.lc);
  BottCurvature bc = bott_curvature(s, d.bott);
  d.torsion = std::move(bc.torsion);
  d.curv = std::move(bc.curv);
  EhresmannCurvature eh = ehresmann_curvature(s);
  d.R = std::move(eh.R);
  d.Rbar = std::move(eh.Rbar);
  CovariantDerivatives cov = covariant_derivatives(s, d.bott, d.R);
  d.nablaR = std::move(cov.nablaR);
  d.nabla_vstar = std::move(cov.nabla_vstar);
  d.delta_vstar = std::move(cov.delta_vstar);
  SubLaplacianData sl = sublaplacian_data(s, d.lc);
  d.drift = std::move(sl.drift);
  d.N = std::move(sl.N);
  return d;
}

Tensor3 nabla_hstar(const Tensor3& bott, int n) {
  const int N = bott.dim(0);
  Tensor3 D({N, N, N});
  for (int m = 0; m < N; ++m)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) D(m, a, b) = bott(m, b, a) + bott(m, a, b);
  return D;
}

bool metric_preserving(const ConnectionData& conn, double tol) {
  return nabla_hstar(conn.bott, conn.n).max_abs() <= tol;
}

bool vertical_integrable(const ConnectionData& conn, double tol) { return conn.Rbar.max_abs() <= tol; }

bool parallel_vertical_metric(const ConnectionData& conn, double tol) { return conn.nabla_vstar.max_abs() <= tol; }

double co_curvature_trace(const ConnectionData& conn, const Eigen::VectorXd& v) {
  const int n = conn.n, nu = conn.nu;
  double tr = 0.0;
  for (int k = 0; k < n; ++k)
    for (int s = 0; s < nu; ++s) {
      double r = 0.0;  // R(v, e_k)_s
      for (int a = 0; a < n; ++a) r += v[a] * conn.R(a, k, s);
      if (r == 0.0) continue;
      double rb = 0.0;  // <Rbar(v, f_s), e_k>
      for (int t = 0; t < nu; ++t) rb += v[n + t] * conn.Rbar(n + t, n + s, k);
      tr += r * rb;
    }
  return tr;
}

}  // namespace srcd
