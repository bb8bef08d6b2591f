#include "srcd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "srcd/error.hpp"

namespace srcd {

namespace {

using cd = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

double prop41_value(double n, double rho1, double rho20, double k2) {
  const double factor = std::isinf(n) ? rho20 / (1.0 + rho20) : n * rho20 / (n + rho20 * (n - 1.0));
  return factor * (rho1 - k2 / rho20);
}

Eigen::Matrix2cd block(const MatrixRealization& r, int k, int offset) {
  Eigen::Matrix2cd m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = cd(r.re[k](offset + a, offset + b), r.im[k](offset + a, offset + b));
  return m;
}

// su(2) coordinates x with X = sum_a x_a (-i sigma_a / 2): x_a = i tr(X sigma_a)
Eigen::Vector3d su2_coords(const Eigen::Matrix2cd& X) {
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, cd(0, -1), cd(0, 1), 0;
  sz << 1, 0, 0, -1;
  const cd i(0, 1);
  const cd x0 = i * (X * sx).trace(), x1 = i * (X * sy).trace(), x2 = i * (X * sz).trace();
  return Eigen::Vector3d(x0.real(), x1.real(), x2.real());
}

bool is_su2_block(const Eigen::Matrix2cd& X, double scale) {
  const double tol = 1e-10 * (1.0 + scale);
  return (X + X.adjoint()).cwiseAbs().maxCoeff() <= tol && std::abs(X.trace()) <= tol;
}

// su(2) coordinates of every generator, one 3 x N matrix per factor
std::vector<Eigen::MatrixXd> su2_coordinates(const LieSRStructure& s) {
  const auto unsupported = [&](const std::string& why) {
    return Error(Errc::unsupported_algebra, "'" + s.name() + "': " + why);
  };
  if (!s.realization()) throw unsupported("no matrix realization");
  const MatrixRealization& r = *s.realization();
  const int N = s.dim();
  if (r.field != Field::complex) throw unsupported("oracle needs a complex (unitary) realization");
  int factors = 0;
  if (r.dim == 2 && N == 3)
    factors = 1;
  else if (r.dim == 4 && N == 6)
    factors = 2;
  else
    throw unsupported("only su(2) and su(2)+su(2) are recognized");
  std::vector<Eigen::MatrixXd> coords(factors, Eigen::MatrixXd::Zero(3, N));
  for (int k = 0; k < N; ++k) {
    const double scale = std::max(r.re[k].cwiseAbs().maxCoeff(), r.im[k].cwiseAbs().maxCoeff());
    if (factors == 2) {
      const double off = std::max({r.re[k].topRightCorner(2, 2).cwiseAbs().maxCoeff(),
                                   r.im[k].topRightCorner(2, 2).cwiseAbs().maxCoeff(),
                                   r.re[k].bottomLeftCorner(2, 2).cwiseAbs().maxCoeff(),
                                   r.im[k].bottomLeftCorner(2, 2).cwiseAbs().maxCoeff()});
      if (off > 1e-10 * (1.0 + scale)) throw unsupported("realization is not block diagonal");
    }
    for (int f = 0; f < factors; ++f) {
      const Eigen::Matrix2cd X = block(r, k, 2 * f);
      if (!is_su2_block(X, scale)) throw unsupported("generator is not in su(2)");
      coords[f].col(k) = su2_coords(X);
    }
  }
  Eigen::MatrixXd all(3 * factors, N);
  for (int f = 0; f < factors; ++f) all.middleRows(3 * f, 3) = coords[f];
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(all).rank() != N)
    throw unsupported("realization is not faithful");
  return coords;
}

Eigen::MatrixXcd rep_of(const Eigen::Vector3d& x, const std::vector<Eigen::MatrixXcd>& J) {
  const cd mi(0, -1);
  return mi * (x[0] * J[0] + x[1] * J[1] + x[2] * J[2]);
}

std::vector<cd> block_spectrum(const std::vector<Eigen::MatrixXcd>& gens, const LieSRStructure& s,
                               const ConnectionData& conn) {
  const int n = s.n();
  const int d = static_cast<int>(gens[0].rows());
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < n; ++i) op += gens[i] * gens[i];
  const bool drift = conn.drift.size() && conn.drift.cwiseAbs().maxCoeff() > 0.0;
  for (int j = 0; j < n && drift; ++j) op += conn.drift[j] * gens[j];
  std::vector<cd> ev;
  if (!drift) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (op + op.adjoint()), Eigen::EigenvaluesOnly);
    for (int k = 0; k < d; ++k) ev.emplace_back(es.eigenvalues()[k], 0.0);
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op, false);
    for (int k = 0; k < d; ++k) ev.push_back(es.eigenvalues()[k]);
  }
  return ev;
}

}  // namespace

std::string_view gap_source_name(GapSource s) {
  switch (s) {
    case GapSource::prop41: return "prop41";
    case GapSource::kappa_corollary: return "kappa_corollary";
    case GapSource::step2_privileged: return "step2_privileged";
  }
  return "unknown";
}

GapBound gap_bound_prop41(const CDParams& params) {
  if (!(params.rho20 > 0.0))
    throw Error(Errc::non_positive_rho20, "rho20 = " + std::to_string(params.rho20) + " must be positive");
  GapBound g;
  g.source = GapSource::prop41;
  g.k2 = std::max(0.0, -params.rho21);
  g.c_opt = params.c;
  g.bound = prop41_value(params.n_dim, params.rho1, params.rho20, g.k2);
  return g;
}

GapBound gap_bound_prop41(const CDConstants& k, std::optional<double> n_dim) {
  if (!k.M_HV) throw Error(Errc::unbounded_constant, "M_HV is unbounded");
  const bool allow_infinite = *k.M_HV + k.M_nabla_v <= kZeroConstant;
  auto objective = [&](double c) {
    const CDParams p = cd_parameters(k, c, n_dim);
    if (!(p.rho20 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return prop41_value(p.n_dim, p.rho1, p.rho20, std::max(0.0, -p.rho21));
  };
  const auto best = optimize_c(objective, allow_infinite);
  if (!best) throw Error(Errc::non_positive_rho20, "rho20 <= 0 for every c");
  return gap_bound_prop41(cd_parameters(k, best->c, n_dim));
}

GapBound gap_bound_kappa(const CDConstants& k, std::optional<double> n_dim) {
  if (k.M_nabla_v > kZeroConstant)
    throw Error(Errc::requires_parallel_metric, "kappa bound needs a parallel vertical metric");
  if (!k.M_HV) throw Error(Errc::unbounded_constant, "M_HV is unbounded");
  const double n = n_dim.value_or(static_cast<double>(k.n));
  const double M = *k.M_HV;
  const double kappa = 0.5 * k.rho_H * k.m_R * k.m_R - M * M;
  if (!(kappa > 0.0)) throw Error(Errc::non_positive_kappa, "kappa = " + std::to_string(kappa));
  const double ratio = std::isinf(n) ? 1.0 : (n - 1.0) / n;
  const double denom = 2.0 * M + k.m_R * std::sqrt(2.0 * k.rho_H + 2.0 * kappa * ratio);
  GapBound g;
  g.source = GapSource::kappa_corollary;
  g.kappa = kappa;
  // the c at which the (CD) coefficients with rho21 = 0 attain the bound
  if (M > kZeroConstant) {
    auto objective = [&](double c) {
      const double rho20 = 0.5 * k.m_R * k.m_R - c * M * M;
      if (!(rho20 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      return prop41_value(n, k.rho_H - 1.0 / c, rho20, 0.0);
    };
    g.c_opt = optimize_c(objective, false).value_or(COptimum{kInf, 0.0}).c;
  } else {
    g.c_opt = kInf;
  }
  g.bound = std::pow(2.0 * kappa / denom, 2);
  return g;
}

GapBound gap_bound_step2(const LieSRStructure& s) {
  const PrivilegedMetric pm = privileged_step2(s);
  const CDConstants k = cd_constants(compute_connection(adapted_orthonormal_frame(pm.structure)));
  if (!k.M_HV || *k.M_HV > kZeroConstant || k.M_nabla_v > kZeroConstant)
    throw Error(Errc::requires_parallel_metric, "step-2 bound needs Ric_HV = 0 and a parallel vertical metric");
  if (!(k.rho_H > 0.0)) throw Error(Errc::non_positive_rho20, "step-2 bound needs rho_H > 0");
  const double n = k.n, b2 = pm.b * pm.b;
  GapBound g;
  g.source = GapSource::step2_privileged;
  g.b = pm.b;
  g.c_opt = kInf;
  g.bound = n / (n * (2.0 * b2 + 1.0) - 1.0) * k.rho_H;
  return g;
}

std::vector<Eigen::MatrixXcd> spin_matrices(int two_j) {
  if (two_j < 0) throw Error(Errc::bad_param, "negative spin");
  const int d = two_j + 1;
  const double j = 0.5 * two_j;
  Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(d, d), jz = Eigen::MatrixXcd::Zero(d, d);
  // basis index k has m = j - k
  for (int k = 0; k < d; ++k) {
    const double m = j - k;
    jz(k, k) = m;
    if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const Eigen::MatrixXcd jm = jp.adjoint();
  const cd two_i(0, 2);
  return {0.5 * (jp + jm), (jp - jm) / two_i, jz};
}

int su2_factor_count(const LieSRStructure& s) { return static_cast<int>(su2_coordinates(s).size()); }

int default_two_jmax(const LieSRStructure& s) { return su2_factor_count(s) == 1 ? 11 : 5; }

OracleResult irrep_spectrum_oracle(const LieSRStructure& s, const ConnectionData& conn, int two_jmax) {
  if (!is_orthonormal(s, 1e-12))
    throw Error(Errc::not_orthonormal_frame, "oracle needs the structure in its orthonormal frame");
  if (two_jmax < 1) throw Error(Errc::jmax_too_small, "j_max must be at least 1/2");
  if (two_jmax > 25) throw Error(Errc::bad_param, "j_max must not exceed 25/2");
  const auto coords = su2_coordinates(s);
  const int N = s.dim();
  OracleResult out;
  out.factors = static_cast<int>(coords.size());
  out.two_jmax = two_jmax;

  std::vector<std::vector<Eigen::MatrixXcd>> spins;
  for (int tj = 0; tj <= two_jmax; ++tj) spins.push_back(spin_matrices(tj));

  std::vector<cd> all;
  auto record = [&](IrrepBlock blk, const std::vector<cd>& ev) {
    for (const cd& z : ev) {
      blk.eigenvalues.push_back(z.real());
      if (std::abs(z) > 1e-9) all.push_back(z);
    }
    std::sort(blk.eigenvalues.begin(), blk.eigenvalues.end(), std::greater<>());
    out.blocks.push_back(std::move(blk));
  };

  if (out.factors == 1) {
    for (int tj = 0; tj <= two_jmax; ++tj) {
      std::vector<Eigen::MatrixXcd> gens;
      for (int k = 0; k < N; ++k) gens.push_back(rep_of(coords[0].col(k), spins[tj]));
      record(IrrepBlock{tj, -1, {}}, block_spectrum(gens, s, conn));
    }
  } else {
    for (int t1 = 0; t1 <= two_jmax; ++t1)
      for (int t2 = 0; t2 <= two_jmax; ++t2) {
        const int d1 = t1 + 1, d2 = t2 + 1;
        const Eigen::MatrixXcd I2 = Eigen::MatrixXcd::Identity(d2, d2);
        std::vector<Eigen::MatrixXcd> gens;
        for (int k = 0; k < N; ++k) {
          const Eigen::MatrixXcd a = rep_of(coords[0].col(k), spins[t1]);
          const Eigen::MatrixXcd b = rep_of(coords[1].col(k), spins[t2]);
          Eigen::MatrixXcd g(d1 * d2, d1 * d2);
          // Kronecker sum a (x) I + I (x) b
          for (int r1 = 0; r1 < d1; ++r1)
            for (int c1 = 0; c1 < d1; ++c1)
              g.block(r1 * d2, c1 * d2, d2, d2) = a(r1, c1) * I2 + (r1 == c1 ? b : Eigen::MatrixXcd::Zero(d2, d2));
          gens.push_back(std::move(g));
        }
        record(IrrepBlock{t1, t2, {}}, block_spectrum(gens, s, conn));
      }
  }
  if (all.empty()) throw Error(Errc::jmax_too_small, "no nonzero eigenvalue up to the requested j_max");
  std::sort(all.begin(), all.end(), [](const cd& a, const cd& b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const cd& z : all) out.eigenvalues.push_back(z.real());
  out.gap = std::abs(all.front());
  return out;
}

}  // namespace srcd
