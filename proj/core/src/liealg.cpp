#include "srcd/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "srcd/error.hpp"

namespace srcd {

Eigen::MatrixXd MatrixRealization::realified(int k) const {
  if (field == Field::real) return re[k];
  const int d = dim;
  Eigen::MatrixXd m(2 * d, 2 * d);
  m.topLeftCorner(d, d) = re[k];
  m.topRightCorner(d, d) = -im[k];
  m.bottomLeftCorner(d, d) = im[k];
  m.bottomRightCorner(d, d) = re[k];
  return m;
}

std::vector<Eigen::MatrixXd> MatrixRealization::realified() const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(re.size());
  for (int k = 0; k < static_cast<int>(re.size()); ++k) out.push_back(realified(k));
  return out;
}

MatrixRealization MatrixRealization::transformed(const Eigen::MatrixXd& T) const {
  MatrixRealization out;
  out.dim = dim;
  out.field = field;
  const int N = static_cast<int>(T.cols());
  for (int i = 0; i < N; ++i) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < N; ++a) {
      if (T(a, i) == 0.0) continue;
      r += T(a, i) * re[a];
      if (field == Field::complex) m += T(a, i) * im[a];
    }
    out.re.push_back(r);
    if (field == Field::complex) out.im.push_back(m);
  }
  return out;
}

LieSRStructure::LieSRStructure(std::string name, int n, int nu, Tensor3 c, Eigen::MatrixXd gram_h,
                               Eigen::MatrixXd gram_v, std::optional<MatrixRealization> realization,
                               std::optional<FrameChange> frame_change)
    : name_(std::move(name)),
      n_(n),
      nu_(nu),
      c_(std::move(c)),
      gram_h_(std::move(gram_h)),
      gram_v_(std::move(gram_v)),
      realization_(std::move(realization)),
      frame_change_(std::move(frame_change)) {
  const int N = n_ + nu_;
  if (n_ < 1 || nu_ < 0) throw Error(Errc::dimension_mismatch, "need n >= 1 and nu >= 0");
  if (c_.dims() != std::array<int, 3>{N, N, N})
    throw Error(Errc::dimension_mismatch, "structure constants must be (n+nu)^3");
  if (gram_h_.rows() != n_ || gram_h_.cols() != n_)
    throw Error(Errc::dimension_mismatch, "gram_h must be n x n");
  if (gram_v_.rows() != nu_ || gram_v_.cols() != nu_)
    throw Error(Errc::dimension_mismatch, "gram_v must be nu x nu");
  if (realization_) {
    const auto& r = *realization_;
    if (r.dim < 1 || static_cast<int>(r.re.size()) != N)
      throw Error(Errc::dimension_mismatch, "realization needs one matrix per basis element");
    if (r.field == Field::complex && r.im.size() != r.re.size())
      throw Error(Errc::dimension_mismatch, "complex realization needs imaginary parts");
    for (int k = 0; k < N; ++k) {
      if (r.re[k].rows() != r.dim || r.re[k].cols() != r.dim ||
          (r.field == Field::complex && (r.im[k].rows() != r.dim || r.im[k].cols() != r.dim)))
        throw Error(Errc::dimension_mismatch, "realization matrices must be dim x dim");
    }
  }
  if (frame_change_ && (frame_change_->to_new.rows() != N || frame_change_->to_new.cols() != N))
    throw Error(Errc::dimension_mismatch, "frame change must be (n+nu) x (n+nu)");
}

Eigen::MatrixXd LieSRStructure::gram() const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim(), dim());
  g.topLeftCorner(n_, n_) = gram_h_;
  g.bottomRightCorner(nu_, nu_) = gram_v_;
  return g;
}

Eigen::VectorXd LieSRStructure::bracket(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  const int N = dim();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < N; ++i) {
    if (u[i] == 0.0) continue;
    for (int j = 0; j < N; ++j) {
      const double uv = u[i] * v[j];
      if (uv == 0.0) continue;
      for (int k = 0; k < N; ++k) w[k] += uv * c_(i, j, k);
    }
  }
  return w;
}

LieSRStructure LieSRStructure::with_gram_v(Eigen::MatrixXd gram_v) const {
  return LieSRStructure(name_, n_, nu_, c_, gram_h_, std::move(gram_v), realization_, frame_change_);
}

LieSRStructure LieSRStructure::with_name(std::string name) const {
  return LieSRStructure(std::move(name), n_, nu_, c_, gram_h_, gram_v_, realization_, frame_change_);
}

Tensor3 transform_constants(const Tensor3& c, const Eigen::MatrixXd& T) {
  const int N = c.dim(0);
  const Eigen::MatrixXd Ti = T.inverse();
  // c'_{ijl} = sum T_ai T_bj c_abk Ti_lk, contracted one slot at a time
  Tensor3 t1({N, N, N}), t2({N, N, N}), out({N, N, N});
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int l = 0; l < N; ++l) {
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += c(a, b, k) * Ti(l, k);
        t1(a, b, l) = s;
      }
  for (int a = 0; a < N; ++a)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        double s = 0.0;
        for (int b = 0; b < N; ++b) s += T(b, j) * t1(a, b, l);
        t2(a, j, l) = s;
      }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        double s = 0.0;
        for (int a = 0; a < N; ++a) s += T(a, i) * t2(a, j, l);
        out(i, j, l) = s;
      }
  return out;
}

LieSRStructure change_basis(const LieSRStructure& s, const Eigen::MatrixXd& T) {
  const int n = s.n(), nu = s.nu(), N = s.dim();
  if (T.rows() != N || T.cols() != N) throw Error(Errc::dimension_mismatch, "basis change must be N x N");
  const double off = std::max(nu > 0 ? T.topRightCorner(n, nu).cwiseAbs().maxCoeff() : 0.0,
                              nu > 0 ? T.bottomLeftCorner(nu, n).cwiseAbs().maxCoeff() : 0.0);
  if (off != 0.0) throw Error(Errc::bad_param, "basis change must preserve the splitting");
  const Eigen::MatrixXd TH = T.topLeftCorner(n, n);
  const Eigen::MatrixXd TV = T.bottomRightCorner(nu, nu);
  Eigen::MatrixXd gh = TH.transpose() * s.gram_h() * TH;
  Eigen::MatrixXd gv = TV.transpose() * s.gram_v() * TV;
  gh = 0.5 * (gh + gh.transpose());
  gv = 0.5 * (gv + gv.transpose());
  std::optional<MatrixRealization> real;
  if (s.realization()) real = s.realization()->transformed(T);
  FrameChange fc;
  if (s.frame_change()) {
    fc.to_new = s.frame_change()->to_new * T;
    fc.to_old = T.inverse() * s.frame_change()->to_old;
  } else {
    fc.to_new = T;
    fc.to_old = T.inverse();
  }
  return LieSRStructure(s.name(), n, nu, transform_constants(s.constants(), T), gh, gv, real, fc);
}

namespace {

int column_rank(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return 0;
  const double scale = m.colwise().norm().maxCoeff();
  if (scale == 0.0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m / scale);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

// orthonormal basis of the column span
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& m) {
  const double scale = m.cols() ? m.colwise().norm().maxCoeff() : 0.0;
  if (scale == 0.0) return Eigen::MatrixXd(m.rows(), 0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m / scale);
  qr.setThreshold(1e-10);
  const int r = static_cast<int>(qr.rank());
  Eigen::MatrixXd q = qr.householderQ();
  return q.leftCols(r);
}

struct SpdCheck {
  bool symmetric;
  bool positive;
  double min_eig;
};

SpdCheck check_spd(const Eigen::MatrixXd& g) {
  SpdCheck out{true, true, 0.0};
  if (g.rows() == 0) return out;
  const double scale = 1.0 + g.cwiseAbs().maxCoeff();
  out.symmetric = (g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  out.min_eig = es.eigenvalues().minCoeff();
  out.positive = out.min_eig > 1e-12 * g.trace() && g.trace() > 0.0;
  return out;
}

}  // namespace

GrowthFlag growth_flag(const LieSRStructure& s) {
  const int n = s.n(), N = s.dim();
  GrowthFlag flag;
  Eigen::MatrixXd basis = span_basis(Eigen::MatrixXd::Identity(N, N).leftCols(n));
  flag.dims.push_back(static_cast<int>(basis.cols()));
  for (int level = 1; level <= N; ++level) {
    if (basis.cols() == N) break;
    Eigen::MatrixXd cand(N, basis.cols() + n * basis.cols());
    cand.leftCols(basis.cols()) = basis;
    int col = static_cast<int>(basis.cols());
    for (int a = 0; a < n; ++a) {
      const Eigen::VectorXd ea = Eigen::VectorXd::Unit(N, a);
      for (int k = 0; k < basis.cols(); ++k) cand.col(col++) = s.bracket(ea, basis.col(k));
    }
    if (column_rank(cand) == basis.cols()) break;
    basis = span_basis(cand);
    flag.dims.push_back(static_cast<int>(basis.cols()));
  }
  flag.bracket_generating = flag.dims.back() == N;
  if (flag.bracket_generating) flag.step = static_cast<int>(flag.dims.size());
  return flag;
}

bool ValidationReport::ok() const { return first_failure() == nullptr; }

const ValidationCheck* ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

ValidationReport validate_structure(const LieSRStructure& s) {
  const int N = s.dim();
  const Tensor3& c = s.constants();
  ValidationReport rep;
  const double cmax = c.max_abs();

  {
    ValidationCheck chk{"antisymmetry"};
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) chk.residual = std::max(chk.residual, std::abs(c(i, j, k) + c(j, i, k)));
    chk.passed = chk.residual <= 1e-12 * (1.0 + cmax);
    if (!chk.passed) chk.detail = "c[i][j][k] != -c[j][i][k]";
    rep.checks.push_back(chk);
  }
  {
    ValidationCheck chk{"jacobi"};
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) {
            double sum = 0.0;
            for (int m = 0; m < N; ++m)
              sum += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
            chk.residual = std::max(chk.residual, std::abs(sum));
          }
    chk.passed = chk.residual <= 1e-10 * (1.0 + cmax) * (1.0 + cmax);
    if (!chk.passed) chk.detail = "Jacobi identity violated";
    rep.checks.push_back(chk);
  }
  for (const auto& [label, g] : {std::pair{"gram_h", &s.gram_h()}, std::pair{"gram_v", &s.gram_v()}}) {
    const SpdCheck spd = check_spd(*g);
    ValidationCheck chk{std::string(label) + "_positive_definite"};
    chk.passed = spd.symmetric && spd.positive;
    chk.residual = spd.min_eig;
    if (!spd.symmetric) chk.detail = "not symmetric";
    else if (!spd.positive) chk.detail = "not positive definite";
    rep.checks.push_back(chk);
  }
  if (s.realization()) {
    ValidationCheck chk{"realization_commutators"};
    const auto E = s.realization()->realified();
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        Eigen::MatrixXd d = E[i] * E[j] - E[j] * E[i];
        for (int k = 0; k < N; ++k) d -= c(i, j, k) * E[k];
        chk.residual = std::max(chk.residual, d.cwiseAbs().maxCoeff());
      }
    chk.passed = chk.residual <= 1e-9;
    if (!chk.passed) chk.detail = "matrix commutators do not reproduce the structure constants";
    rep.checks.push_back(chk);
  }
  rep.growth = growth_flag(s);
  return rep;
}

bool is_orthonormal(const LieSRStructure& s, double tol) {
  const double dh = (s.gram_h() - Eigen::MatrixXd::Identity(s.n(), s.n())).cwiseAbs().maxCoeff();
  const double dv = s.nu() ? (s.gram_v() - Eigen::MatrixXd::Identity(s.nu(), s.nu())).cwiseAbs().maxCoeff() : 0.0;
  return dh <= tol && dv <= tol;
}

Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& g, std::string_view what) {
  if (g.rows() == 0) return g;
  const SpdCheck spd = check_spd(g);
  if (!spd.symmetric || !spd.positive)
    throw Error(Errc::not_positive_definite, std::string(what) + " is not symmetric positive definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

LieSRStructure adapted_orthonormal_frame(const LieSRStructure& s) {
  const int n = s.n(), nu = s.nu(), N = s.dim();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(N, N);
  T.topLeftCorner(n, n) = inverse_sqrt_spd(s.gram_h(), "gram_h");
  if (nu > 0) T.bottomRightCorner(nu, nu) = inverse_sqrt_spd(s.gram_v(), "gram_v");
  LieSRStructure out = change_basis(s, T);
  // the congruence is exact up to rounding; store exact identities
  return LieSRStructure(out.name(), n, nu, out.constants(), Eigen::MatrixXd::Identity(n, n),
                        Eigen::MatrixXd::Identity(nu, nu), out.realization(), out.frame_change());
}

Tensor3 constants_from_realization(const MatrixRealization& r) {
  const auto E = r.realified();
  const int N = static_cast<int>(E.size());
  const int d = r.realified_dim();
  Eigen::MatrixXd M(d * d, N);
  for (int k = 0; k < N; ++k) M.col(k) = Eigen::Map<const Eigen::VectorXd>(E[k].data(), d * d);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(1e-10);
  if (qr.rank() != N) throw Error(Errc::bad_param, "realization matrices are linearly dependent");
  Tensor3 c({N, N, N});
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const Eigen::MatrixXd br = E[i] * E[j] - E[j] * E[i];
      const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(br.data(), d * d);
      const Eigen::VectorXd x = qr.solve(rhs);
      if ((M * x - rhs).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + rhs.cwiseAbs().maxCoeff()))
        throw Error(Errc::bad_param, "realization span is not closed under commutators");
      for (int k = 0; k < N; ++k) {
        const double v = std::abs(x[k]) < 1e-14 ? 0.0 : x[k];
        c(i, j, k) = v;
        c(j, i, k) = -v;
      }
    }
  return c;
}

}  // namespace srcd
