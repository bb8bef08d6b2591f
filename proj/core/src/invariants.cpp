#include "srcd/invariants.hpp"

#include <cmath>

#include "srcd/error.hpp"

namespace srcd {

namespace {

Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

RicciHorizontal ricci_horizontal(const ConnectionData& conn) {
  const int n = conn.n, N = conn.dim();
  RicciHorizontal out{Eigen::MatrixXd::Zero(N, N), 0.0};
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += conn.curv(i, j, k, i);
      out.ric_h(k, j) = v;
    }
  const double asym = (out.ric_h - out.ric_h.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw Error(Errc::asymmetric_ricci, "Ric_H asymmetry " + std::to_string(asym));
  out.ric_h = 0.5 * (out.ric_h + out.ric_h.transpose()).eval();
  out.rho_H = sym_eigenvalues(out.ric_h.topLeftCorner(n, n)).minCoeff();
  return out;
}

RicciHV ricci_hv(const ConnectionData& conn) {
  const int n = conn.n, nu = conn.nu, N = conn.dim();
  // t(k, j) = <e_j, sum_m (nabla_m R)(e_m, e_k)>; R only has vertical components
  Eigen::MatrixXd t_full = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd t_hor = Eigen::MatrixXd::Zero(N, N);
  for (int k = 0; k < N; ++k)
    for (int s = 0; s < nu; ++s) {
      double full = 0.0, hor = 0.0;
      for (int m = 0; m < N; ++m) {
        full += conn.nablaR(m, m, k, s);
        if (m < n) hor += conn.nablaR(m, m, k, s);
      }
      t_full(k, n + s) = full;
      t_hor(k, n + s) = hor;
    }
  const double dev = (t_full - t_hor).cwiseAbs().maxCoeff();
  if (dev > 1e-10)
    throw Error(Errc::trace_mismatch, "full-frame and horizontal traces of nabla R differ by " + std::to_string(dev));

  RicciHV out{0.5 * (t_full + t_full.transpose()), std::nullopt};
  const Eigen::VectorXd hh = sym_eigenvalues(out.ric_hv.topLeftCorner(n, n));
  const Eigen::VectorXd vv = sym_eigenvalues(out.ric_hv.bottomRightCorner(nu, nu));
  const bool psd = (hh.size() == 0 || hh.minCoeff() >= -1e-10) && (vv.size() == 0 || vv.minCoeff() >= -1e-10);
  if (psd) {
    const Eigen::MatrixXd hv = out.ric_hv.bottomLeftCorner(nu, n);
    out.M_HV = hv.size() ? Eigen::JacobiSVD<Eigen::MatrixXd>(hv).singularValues()(0) : 0.0;
  }
  return out;
}

CurvatureConstants curvature_constants(const ConnectionData& conn) {
  const int n = conn.n, nu = conn.nu;
  if (nu == 0) return {};
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int j = 0; j < n; ++j)
        for (int s = 0; s < nu; ++s) Q(a, b) += conn.R(a, j, s) * conn.R(b, j, s);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nu, nu);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int s = 0; s < nu; ++s)
        for (int t = 0; t < nu; ++t) G(s, t) += conn.R(i, j, s) * conn.R(i, j, t);
  CurvatureConstants out;
  out.M_R = std::sqrt(std::max(0.0, sym_eigenvalues(Q).maxCoeff()));
  out.m_R = std::sqrt(std::max(0.0, sym_eigenvalues(G).minCoeff()));
  return out;
}

NablaVConstants nabla_v_constants(const ConnectionData& conn) {
  const int n = conn.n, nu = conn.nu;
  NablaVConstants out;
  out.M_nabla_v = conn.nabla_vstar.frobenius();
  const Eigen::MatrixXd& Q = conn.delta_vstar;
  const Eigen::MatrixXd A = Q.topLeftCorner(n, n);
  const Eigen::MatrixXd B = Q.topRightCorner(n, nu);
  const Eigen::MatrixXd C = Q.bottomRightCorner(nu, nu);
  if (nu == 0) {
    out.rho_delta_v = 0.0;
    return out;
  }
  // minimize Q(p) over p_H for fixed unit p_V: Schur complement of A
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
  const Eigen::VectorXd lam = es.eigenvalues();
  if (lam.size() && lam.minCoeff() < -1e-10) return out;  // unbounded below on horizontal covectors
  const double scale = 1.0 + Q.cwiseAbs().maxCoeff();
  Eigen::MatrixXd Apinv = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < lam.size(); ++i) {
    const Eigen::VectorXd u = es.eigenvectors().col(i);
    if (lam[i] > 1e-10 * scale) {
      Apinv += u * u.transpose() / lam[i];
    } else if ((u.transpose() * B).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      return out;  // linear term along a null direction of A
    }
  }
  const Eigen::MatrixXd schur = C - B.transpose() * Apinv * B;
  out.rho_delta_v = sym_eigenvalues(schur).minCoeff();
  return out;
}

CDConstants cd_constants(const ConnectionData& conn) {
  CDConstants k;
  k.n = conn.n;
  k.nu = conn.nu;
  const auto rh = ricci_horizontal(conn);
  const auto rhv = ricci_hv(conn);
  const auto cc = curvature_constants(conn);
  const auto nv = nabla_v_constants(conn);
  k.M_R = cc.M_R;
  k.m_R = cc.m_R;
  k.rho_H = rh.rho_H;
  k.M_HV = rhv.M_HV;
  k.M_nabla_v = nv.M_nabla_v;
  k.rho_delta_v = nv.rho_delta_v;
  k.ric_h = rh.ric_h;
  k.ric_hv = rhv.ric_hv;
  return k;
}

double curvature_norm_squared(const ConnectionData& conn) {
  double s = 0.0;
  for (int i = 0; i < conn.n; ++i)
    for (int j = i + 1; j < conn.n; ++j)
      for (int t = 0; t < conn.nu; ++t) s += conn.R(i, j, t) * conn.R(i, j, t);
  return s;
}

LieSRStructure normalize_vertical(const LieSRStructure& s, const ConnectionData& conn) {
  const double M_R = curvature_constants(conn).M_R;
  if (!(M_R > 1e-12)) throw Error(Errc::zero_curvature, "M_R = 0: the horizontal distribution is integrable");
  return s.with_gram_v(s.gram_v() / (M_R * M_R));
}

LieSRStructure normalize_vertical(const LieSRStructure& s) {
  return normalize_vertical(s, compute_connection(adapted_orthonormal_frame(s)));
}

PrivilegedMetric privileged_step2(const LieSRStructure& s) {
  const GrowthFlag flag = growth_flag(s);
  if (!flag.step || *flag.step != 2) throw Error(Errc::not_step_two, "privileged metric needs a step-2 distribution");
  const int n = s.n(), nu = s.nu();
  const Eigen::MatrixXd TH = inverse_sqrt_spd(s.gram_h(), "gram_h");
  // columns: vertical coordinates of pr_V [e'_a, e'_b], a < b, e' h-orthonormal
  Eigen::MatrixXd P(nu, n * (n - 1) / 2);
  int col = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b, ++col)
      for (int t = 0; t < nu; ++t) {
        double v = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) v += TH(i, a) * TH(j, b) * s.c(i, j, n + t);
        P(t, col) = v;
      }
  const Eigen::MatrixXd PPt = P * P.transpose();
  Eigen::MatrixXd psi = PPt.inverse();
  psi = 0.5 * (psi + psi.transpose()).eval();

  const LieSRStructure with_psi = s.with_gram_v(psi);
  const double b = curvature_constants(compute_connection(adapted_orthonormal_frame(with_psi))).M_R;
  const double b2 = b * b;
  if (b2 < 2.0 * nu / n - 1e-9 || b2 > 2.0 * nu + 1e-9)
    throw Error(Errc::internal, "privileged constant b^2 = " + std::to_string(b2) + " outside [2nu/n, 2nu]");
  return PrivilegedMetric{b, psi, s.with_gram_v(psi / b2)};
}

}  // namespace srcd
