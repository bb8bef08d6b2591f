#include "srcd/cdcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srcd/error.hpp"
#include "srcd/parallel.hpp"
#include "srcd/rng.hpp"

namespace srcd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// c * M^2 with the convention inf * 0 = 0
double c_times(double c, double m2) { return m2 == 0.0 ? 0.0 : c * m2; }

void check_jet_shape(const Jet2& jet, const ConnectionData& conn) {
  if (jet.p.size() != conn.dim() || jet.H.rows() != conn.n || jet.H.cols() != conn.dim())
    throw Error(Errc::dimension_mismatch, "jet shape does not match the structure");
}

void check_constraint(const Jet2& jet, const ConnectionData& conn) {
  const double scale = 1.0 + jet.H.cwiseAbs().maxCoeff() + jet.p.cwiseAbs().maxCoeff();
  const double r = constraint_residual(jet, conn);
  if (r > 1e-10 * scale) throw Error(Errc::constraint_violated, "Hessian commutation residual " + std::to_string(r));
}

struct JetQuantities {
  double gamma_h, gamma_v, Lf;
  double g2_const;  // ell-independent part of G2
  double g2_ell;    // coefficient of ell
  double hp_h;      // sum_i (sum_{j<n} H_ij p_j)^2
  double hp_v;      // sum_i (sum_s H_{i,n+s} p_{n+s})^2
  double hv_norm2;  // sum_i ||H_i||_{v*}^2
};

JetQuantities jet_quantities(const Gamma2Forms& g, const Jet2& jet, int n) {
  JetQuantities q{};
  q.gamma_h = g.gamma_h;
  q.gamma_v = g.gamma_v;
  q.Lf = g.Lf;
  q.g2_const = g.terms[0] + g.terms[1] + g.terms[2] + g.terms[3];
  q.g2_ell = g.terms[4] + g.terms[5] + g.terms[6];
  const int N = static_cast<int>(jet.p.size());
  for (int i = 0; i < n; ++i) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < n; ++j) a += jet.H(i, j) * jet.p[j];
    for (int t = n; t < N; ++t) {
      b += jet.H(i, t) * jet.p[t];
      q.hv_norm2 += jet.H(i, t) * jet.H(i, t);
    }
    q.hp_h += a * a;
    q.hp_v += b * b;
  }
  return q;
}

CDMargin margin_from(const JetQuantities& q, const CDParams& params, double ell) {
  const CDCoefficients co = coefficients_at(params, ell);
  CDMargin m;
  m.lhs = q.g2_const + ell * q.g2_ell;
  m.rhs = co.lf * q.Lf * q.Lf + co.gamma_h * q.gamma_h + co.gamma_v * q.gamma_v;
  m.margin = m.lhs - m.rhs;
  return m;
}

DoubleGammaMargins double_gamma_from(const JetQuantities& q, double rho_H, double M_HV, double c, double ell) {
  const double varrho1 = rho_H - 1.0 / c;
  const double varrho2 = -c_times(c, M_HV * M_HV);
  const double g2 = q.g2_const + ell * q.g2_ell;
  DoubleGammaMargins d;
  const double inner = g2 - (varrho1 - 1.0 / ell) * q.gamma_h - varrho2 * q.gamma_v;
  d.margin1 = q.gamma_h * inner - q.hp_h;
  d.scale1 = 1.0 + q.gamma_h * (std::abs(g2) + std::abs((varrho1 - 1.0 / ell) * q.gamma_h) +
                                std::abs(varrho2 * q.gamma_v)) + q.hp_h;
  d.margin2 = q.gamma_v * q.hv_norm2 - q.hp_v;
  d.scale2 = 1.0 + q.gamma_v * q.hv_norm2 + q.hp_v;
  return d;
}

const CDParams& check_params(const CDParams& p) {
  if (!(p.n_dim > 0.0)) throw Error(Errc::bad_param, "n_dim must be positive");
  return p;
}

}  // namespace

CDCoefficients coefficients_at(const CDParams& params, double ell) {
  if (!(ell > 0.0)) throw Error(Errc::bad_param, "ell must be positive");
  CDCoefficients co;
  co.ell = ell;
  co.lf = 1.0 / params.n_dim;
  co.gamma_h = params.rho1 - 1.0 / ell;
  co.gamma_v = params.rho20 + params.rho21 * ell;
  return co;
}

CDParams cd_parameters(const CDConstants& k, double c, std::optional<double> n_dim) {
  if (!k.M_HV) throw Error(Errc::unbounded_constant, "M_HV is unbounded");
  if (!k.rho_delta_v) throw Error(Errc::unbounded_constant, "rho_delta_v is -infinity");
  if (std::abs(k.M_R - 1.0) > 1e-9)
    throw Error(Errc::not_normalized, "vertical metric not normalized (M_R = " + std::to_string(k.M_R) + ")");
  if (!(c > 0.0)) throw Error(Errc::bad_param, "c must be positive");
  const double m = *k.M_HV + k.M_nabla_v;
  if (std::isinf(c) && m > kZeroConstant)
    throw Error(Errc::bad_param, "c = infinity needs M_HV = M_nabla_v = 0");
  CDParams p;
  p.n_dim = n_dim.value_or(static_cast<double>(k.n));
  if (!(p.n_dim >= k.n)) throw Error(Errc::bad_dimension, "n_dim must be at least rank H");
  p.c = c;
  p.rho1 = k.rho_H - 1.0 / c;
  p.rho20 = 0.5 * k.m_R * k.m_R - (m <= kZeroConstant ? 0.0 : c * m * m);
  p.rho21 = 0.5 * *k.rho_delta_v - k.M_nabla_v * k.M_nabla_v;
  return p;
}

CDParams drifted_cd_parameters(const CDConstants& k, const ConnectionData& conn, const Eigen::VectorXd& Z, double c,
                               double n_dim) {
  const int n = conn.n, nu = conn.nu, N = conn.dim();
  if (Z.size() != N) throw Error(Errc::dimension_mismatch, "Z needs one component per frame vector");
  if (Z.head(n).cwiseAbs().maxCoeff() > 0.0) throw Error(Errc::not_vertical, "Z has horizontal components");
  if (nu == 0 || Z.tail(nu).cwiseAbs().maxCoeff() == 0.0) throw Error(Errc::not_vertical, "Z must be non-zero");
  if (!(n_dim > n)) throw Error(Errc::bad_dimension, "n_dim must exceed rank H");

  // Ric^Z_HV(A1, A2) = Ric_HV + 1/2 h(pr_H A1, nabla_{pr_H A2} Z) + 1/2 v(pr_V A1, R(Z, A2)) + sym.
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(N, N);
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2) {
      double v = 0.0;  // h(e_a1, nabla_{e_a2} Z)
      for (int u = 0; u < nu; ++u) v += Z[n + u] * conn.bott(a2, n + u, a1);
      corr(a1, a2) += 0.5 * v;
    }
  for (int s = 0; s < nu; ++s)
    for (int j = 0; j < N; ++j) {
      double v = 0.0;  // v(f_s, R(Z, e_j)); R vanishes on vertical arguments
      for (int a = 0; a < n; ++a) v += Z[a] * conn.R(a, j, s);
      corr(n + s, j) += 0.5 * v;
    }
  const Eigen::MatrixXd ric_z = k.ric_hv + corr + corr.transpose();
  std::optional<double> M_HVZ;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hh(ric_z.topLeftCorner(n, n), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> vv(ric_z.bottomRightCorner(nu, nu), Eigen::EigenvaluesOnly);
    if (hh.eigenvalues().minCoeff() >= -1e-10 && vv.eigenvalues().minCoeff() >= -1e-10)
      M_HVZ = Eigen::JacobiSVD<Eigen::MatrixXd>(ric_z.bottomLeftCorner(nu, n)).singularValues()(0);
  }
  if (!M_HVZ) throw Error(Errc::unbounded_constant, "M^Z_HV is unbounded");

  // v(W, nabla_W Z) >= -Ncal^2 |W|^2 for vertical W
  Eigen::MatrixXd K(nu, nu);
  for (int s = 0; s < nu; ++s)
    for (int t = 0; t < nu; ++t) {
      double v = 0.0;
      for (int u = 0; u < nu; ++u) v += Z[n + u] * conn.bott(n + t, n + u, n + s);
      K(s, t) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ks(0.5 * (K + K.transpose()), Eigen::EigenvaluesOnly);
  const double ncal2 = std::max(0.0, -ks.eigenvalues().minCoeff());

  CDConstants kz = k;
  kz.M_HV = *M_HVZ;
  CDParams p = cd_parameters(kz, c, n_dim);
  const double z2 = Z.tail(nu).squaredNorm();
  if (std::isfinite(n_dim)) p.rho20 -= z2 / (n_dim - n);
  p.rho21 -= ncal2;
  return p;
}

double constraint_residual(const Jet2& jet, const ConnectionData& conn) {
  check_jet_shape(jet, conn);
  const int n = conn.n;
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double expected = 0.0;
      for (int s = 0; s < conn.nu; ++s) expected += jet.p[n + s] * conn.R(i, j, s);
      r = std::max(r, std::abs(jet.H(i, j) - jet.H(j, i) - expected));
    }
  return r;
}

Jet2 make_jet(const ConnectionData& conn, const Eigen::VectorXd& p, const Eigen::MatrixXd& sym_hh,
              const Eigen::MatrixXd& hv) {
  const int n = conn.n, nu = conn.nu, N = conn.dim();
  if (p.size() != N || sym_hh.rows() != n || sym_hh.cols() != n || hv.rows() != n || hv.cols() != nu)
    throw Error(Errc::dimension_mismatch, "jet blocks do not match the structure");
  Jet2 jet{p, Eigen::MatrixXd::Zero(n, N)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double a = 0.0;
      for (int s = 0; s < nu; ++s) a += p[n + s] * conn.R(i, j, s);
      jet.H(i, j) = 0.5 * (sym_hh(i, j) + sym_hh(j, i)) + 0.5 * a;
    }
  jet.H.rightCols(nu) = hv;
  return jet;
}

Jet2 sample_jet(const ConnectionData& conn, std::uint64_t seed, std::uint64_t index) {
  const int n = conn.n, nu = conn.nu, N = conn.dim();
  const CounterRng rng(seed);
  std::uint64_t ctr = 0;
  Eigen::VectorXd p(N);
  for (int a = 0; a < N; ++a) p[a] = rng.normal(index, ctr++);
  Eigen::MatrixXd sym(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) sym(i, j) = sym(j, i) = rng.normal(index, ctr++);
  Eigen::MatrixXd hv(n, nu);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < nu; ++s) hv(i, s) = rng.normal(index, ctr++);
  return make_jet(conn, p, sym, hv);
}

Gamma2Forms gamma2_forms(const Jet2& jet, const ConnectionData& conn, const CDConstants& k, double ell) {
  check_jet_shape(jet, conn);
  check_constraint(jet, conn);
  const int n = conn.n, nu = conn.nu, N = conn.dim();
  const Eigen::VectorXd& p = jet.p;
  const Eigen::MatrixXd& H = jet.H;
  Gamma2Forms g;
  g.gamma_h = p.head(n).squaredNorm();
  g.gamma_v = p.tail(nu).squaredNorm();
  g.Lf = H.leftCols(n).trace();

  Eigen::VectorXd pH = Eigen::VectorXd::Zero(N);
  pH.head(n) = p.head(n);
  auto& T = g.terms;
  T[0] = H.leftCols(n).squaredNorm();
  T[1] = pH.dot(k.ric_h * pH);
  T[2] = p.dot(k.ric_hv * p);
  double t3 = 0.0, t5 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < nu; ++s) {
      double r = 0.0;  // R(A_i, #p)_s
      for (int a = 0; a < n; ++a) r += conn.R(i, a, s) * p[a];
      t3 += H(i, n + s) * r;
    }
  T[3] = 2.0 * t3;
  T[4] = ell * H.rightCols(nu).squaredNorm();
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < N; ++a) {
      if (p[a] == 0.0) continue;
      for (int b = 0; b < N; ++b) t5 += conn.nabla_vstar(i, a, b) * p[a] * H(i, b);
    }
  T[5] = 2.0 * ell * t5;
  T[6] = 0.5 * ell * p.dot(conn.delta_vstar * p);
  g.gamma2 = 0.0;
  for (double t : T) g.gamma2 += t;
  if (parallel_vertical_metric(conn)) g.gamma2_v = H.rightCols(nu).squaredNorm();
  return g;
}

double CDMargin::scale() const { return 1.0 + std::abs(lhs) + std::abs(rhs); }

CDMargin verify_cd(const Jet2& jet, const CDParams& params, const ConnectionData& conn, const CDConstants& k,
                   double ell) {
  check_params(params);
  const Gamma2Forms g = gamma2_forms(jet, conn, k, 1.0);
  return margin_from(jet_quantities(g, jet, conn.n), params, ell);
}

DoubleGammaMargins verify_double_gamma(const Jet2& jet, const ConnectionData& conn, const CDConstants& k, double c,
                                       double ell) {
  if (!parallel_vertical_metric(conn))
    throw Error(Errc::requires_parallel_vertical_metric, "double-gamma bounds need a parallel vertical metric");
  if (!k.M_HV) throw Error(Errc::unbounded_constant, "M_HV is unbounded");
  if (!(c > 0.0) || !(ell > 0.0)) throw Error(Errc::bad_param, "c and ell must be positive");
  const Gamma2Forms g = gamma2_forms(jet, conn, k, 1.0);
  return double_gamma_from(jet_quantities(g, jet, conn.n), k.rho_H, *k.M_HV, c, ell);
}

double condition_b_residual(const Jet2& jet, const ConnectionData& conn) {
  if (!parallel_vertical_metric(conn))
    throw Error(Errc::requires_parallel_vertical_metric, "condition (B) check needs a parallel vertical metric");
  check_jet_shape(jet, conn);
  const int n = conn.n, nu = conn.nu, N = conn.dim();
  const Eigen::VectorXd& p = jet.p;
  // G^{h*}(f, G^{v*} f) = 2 sum_i p_i sum_s p_s (A_i V_s f)
  double lhs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < nu; ++s) {
      double avf = jet.H(i, n + s);
      for (int t = 0; t < nu; ++t) avf += conn.bott(i, n + s, n + t) * p[n + t];
      lhs += p[i] * p[n + s] * avf;
    }
  // G^{v*}(f, G^{h*} f) = 2 sum_s p_s sum_j p_j (V_s A_j f), swapping the
  // mixed Hessian through the torsion
  double rhs = 0.0;
  for (int s = 0; s < nu; ++s)
    for (int j = 0; j < n; ++j) {
      double vaf = jet.H(j, n + s);
      for (int k = 0; k < N; ++k) vaf += (conn.bott(n + s, j, k) - conn.torsion(n + s, j, k)) * p[k];
      rhs += p[n + s] * p[j] * vaf;
    }
  return 2.0 * (lhs - rhs);
}

CDCertificate certify_cd(const ConnectionData& conn, const CDConstants& k, const CDParams& params, double ell) {
  const int n = conn.n, nu = conn.nu, N = conn.dim();
  const int nsym = n * (n + 1) / 2;
  const int P = N + nsym + n * nu;
  auto jet_of = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(n, n);
    int idx = N;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j, ++idx) sym(i, j) = sym(j, i) = x[idx];
    Eigen::MatrixXd hv(n, nu);
    for (int i = 0; i < n; ++i)
      for (int s = 0; s < nu; ++s) hv(i, s) = x[idx++];
    return make_jet(conn, x.head(N), sym, hv);
  };
  auto q = [&](const Eigen::VectorXd& x) { return verify_cd(jet_of(x), params, conn, k, ell).margin; };

  Eigen::VectorXd diag(P);
  for (int a = 0; a < P; ++a) diag[a] = q(Eigen::VectorXd::Unit(P, a));
  Eigen::MatrixXd M(P, P);
  for (int a = 0; a < P; ++a) {
    M(a, a) = diag[a];
    for (int b = a + 1; b < P; ++b) {
      const double v = 0.5 * (q(Eigen::VectorXd::Unit(P, a) + Eigen::VectorXd::Unit(P, b)) - diag[a] - diag[b]);
      M(a, b) = M(b, a) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  CDCertificate cert;
  cert.min_eigenvalue = es.eigenvalues()(0);
  cert.max_abs_eigenvalue = es.eigenvalues().cwiseAbs().maxCoeff();
  cert.worst_jet = jet_of(es.eigenvectors().col(0));
  return cert;
}

VerificationRun run_verification(const ConnectionData& conn, const CDConstants& k, const std::vector<CDCase>& cases,
                                 const VerificationOptions& opts) {
  for (const auto& cs : cases) {
    check_params(cs.params);
    if (!(cs.ell > 0.0)) throw Error(Errc::bad_param, "ell must be positive");
  }
  const bool parallel_v = parallel_vertical_metric(conn);
  const bool dg = opts.double_gamma && parallel_v && k.M_HV.has_value();
  const std::size_t S = opts.samples, C = cases.size();
  std::vector<double> rel(S * C), rel_dg(dg ? S * C : 0), cond_b(parallel_v ? S : 0);

  parallel_for(
      S,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const Jet2 jet = sample_jet(conn, opts.seed, i);
          const Gamma2Forms g = gamma2_forms(jet, conn, k, 1.0);
          const JetQuantities q = jet_quantities(g, jet, conn.n);
          for (std::size_t c = 0; c < C; ++c) {
            const CDMargin m = margin_from(q, cases[c].params, cases[c].ell);
            rel[c * S + i] = m.margin / m.scale();
            if (dg) {
              const auto d = double_gamma_from(q, k.rho_H, *k.M_HV, cases[c].params.c, cases[c].ell);
              rel_dg[c * S + i] = std::min(d.margin1 / d.scale1, d.margin2 / d.scale2);
            }
          }
          if (parallel_v) cond_b[i] = std::abs(condition_b_residual(jet, conn));
        }
      },
      opts.threads);

  VerificationRun run;
  for (std::size_t c = 0; c < C; ++c) {
    VerificationSummary sm;
    sm.cd_case = cases[c];
    sm.samples = S;
    sm.tol = opts.tol;
    sm.min_relative_margin = S ? kInf : 0.0;
    for (std::size_t i = 0; i < S; ++i)
      if (rel[c * S + i] < sm.min_relative_margin) {
        sm.min_relative_margin = rel[c * S + i];
        sm.worst_index = i;
      }
    sm.passed = sm.min_relative_margin >= -opts.tol;
    if (dg) {
      double mn = kInf;
      for (std::size_t i = 0; i < S; ++i) mn = std::min(mn, rel_dg[c * S + i]);
      sm.min_relative_double_gamma = S ? mn : 0.0;
      sm.passed = sm.passed && mn >= -opts.tol;
    }
    run.passed = run.passed && sm.passed;
    run.cases.push_back(sm);
  }
  if (parallel_v) {
    double mx = 0.0;
    for (double v : cond_b) mx = std::max(mx, v);
    run.max_condition_b = mx;
    run.passed = run.passed && mx <= 1e-12;
  }
  return run;
}

std::optional<COptimum> optimize_c(const std::function<double(double)>& objective, bool allow_infinite) {
  auto f = [&](double x) {
    const double v = objective(std::pow(10.0, x));
    return std::isfinite(v) ? v : -kInf;
  };
  if (allow_infinite) {
    const double v = objective(kInf);
    if (!std::isfinite(v)) return std::nullopt;
    return COptimum{kInf, v};
  }
  constexpr int kGrid = 241;
  constexpr double lo = -6.0, hi = 6.0, h = (hi - lo) / (kGrid - 1);
  int best_i = -1;
  double best = -kInf;
  for (int i = 0; i < kGrid; ++i) {
    const double v = f(lo + h * i);
    if (v > -kInf && v >= best) {
      best = v;
      best_i = i;
    }
  }
  if (best_i < 0) return std::nullopt;
  double a = lo + h * std::max(best_i - 1, 0), b = lo + h * std::min(best_i + 1, kGrid - 1);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  const double vm = f(xm);
  if (vm >= best) return COptimum{std::pow(10.0, xm), vm};
  return COptimum{std::pow(10.0, lo + h * best_i), best};
}

}  // namespace srcd
