#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "srcd/error.hpp"

namespace srcd {
namespace {

using test::analyze;
using test::catalog;

class CatalogTest : public ::testing::TestWithParam<std::string> {};

INSTANTIATE_TEST_SUITE_P(Catalog, CatalogTest, ::testing::ValuesIn(catalog()),
                         [](const auto& info) { return test::label(info.param); });

// ---------------------------------------------------------------- liealg

TEST(LieAlg, GrowthFlagsOfCatalog) {
  struct Row {
    const char* spec;
    std::vector<int> dims;
  };
  const std::vector<Row> rows = {{"heisenberg", {2, 3}},      {"free-step2:n=2", {2, 3}}, {"free-step2:n=3", {3, 6}},
                                 {"free-step2:n=4", {4, 10}}, {"su2-hopf", {2, 3}},       {"sl2c", {4, 6}},
                                 {"su2-double-v1", {3, 6}},   {"su2-double-v2", {3, 6}}};
  for (const auto& row : rows) {
    const auto s = build_example(row.spec);
    const auto rep = validate_structure(s);
    EXPECT_TRUE(rep.ok()) << row.spec;
    EXPECT_EQ(rep.growth.dims, row.dims) << row.spec;
    EXPECT_TRUE(rep.growth.bracket_generating) << row.spec;
    ASSERT_TRUE(rep.growth.step.has_value());
    EXPECT_EQ(*rep.growth.step, 2) << row.spec;
  }
}

TEST(LieAlg, ExampleNameErrors) {
  try {
    build_example("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_example);
  }
  for (const char* bad : {"free-step2:n=1", "free-step2:n=2.5", "su2-hopf:rho=-1", "heisenberg:rho=1",
                          "su2-double-v2:rho=1,rho=2"}) {
    try {
      build_example(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::bad_param) << bad;
    }
  }
}

TEST(LieAlg, HopfBrackets) {
  // X_i = sqrt(2 rho) A_i gives [X1, X2] = +-sqrt(2 rho) X3
  const auto s = build_example("su2-hopf");
  EXPECT_NEAR(std::abs(s.c(0, 1, 2)), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s.c(0, 1, 0), 0.0, 1e-14);
  EXPECT_NEAR(s.c(0, 1, 1), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(build_example("su2-hopf:rho=2").c(0, 1, 2)), 2.0, 1e-12);
  // with unit vertical vector the Ehresmann curvature of the orthonormal pair is 1
  EXPECT_NEAR(std::abs(analyze("su2-hopf").s.c(0, 1, 2)), 1.0, 1e-12);
}

TEST(LieAlg, HeisenbergConstantsFromRealization) {
  const auto s = build_example("heisenberg");
  EXPECT_DOUBLE_EQ(s.c(0, 1, 2), 1.0);
  EXPECT_DOUBLE_EQ(s.c(1, 0, 2), -1.0);
  double rest = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (!((i == 0 && j == 1) || (i == 1 && j == 0)) || k != 2) rest += std::abs(s.c(i, j, k));
  EXPECT_EQ(rest, 0.0);
}

TEST_P(CatalogTest, JacobiAndAntisymmetry) {
  const auto s = build_example(GetParam());
  const int N = s.dim();
  double worst = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        worst = std::max(worst, std::abs(s.c(i, j, k) + s.c(j, i, k)));
        for (int l = 0; l < N; ++l) {
          double jac = 0.0;
          for (int m = 0; m < N; ++m)
            jac += s.c(i, j, m) * s.c(m, k, l) + s.c(j, k, m) * s.c(m, i, l) + s.c(k, i, m) * s.c(m, j, l);
          worst = std::max(worst, std::abs(jac));
        }
      }
  EXPECT_LT(worst, 1e-12);
}

TEST_P(CatalogTest, ChangeBasisRoundTrip) {
  const auto s = build_example(GetParam());
  const CounterRng rng(7);
  const int n = s.n(), nu = s.nu();
  Eigen::MatrixXd Th = Eigen::MatrixXd::Identity(n, n), Tv = Eigen::MatrixXd::Identity(nu, nu);
  for (int i = 0; i < n * n; ++i) Th(i / n, i % n) += 0.3 * rng.normal(1, i);
  for (int i = 0; i < nu * nu; ++i) Tv(i / nu, i % nu) += 0.3 * rng.normal(2, i);
  const Eigen::MatrixXd T = test::block_diag(Th, Tv);
  const auto back = change_basis(change_basis(s, T), T.inverse());
  EXPECT_LT(max_abs_diff(back.constants(), s.constants()), 1e-10);
  EXPECT_LT((back.gram_h() - s.gram_h()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((back.gram_v() - s.gram_v()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LieAlg, ChangeBasisRejectsMixingBlocks) {
  const auto s = build_example("heisenberg");
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(3, 3);
  T(0, 2) = 1.0;
  EXPECT_THROW(change_basis(s, T), Error);
}

TEST(LieAlg, ValidationFlagsBrokenJacobi) {
  Tensor3 c({3, 3, 3});
  c(0, 1, 2) = 1.0;
  c(1, 0, 2) = -1.0;
  c(1, 2, 0) = 1.0;
  c(2, 1, 0) = -1.0;
  c(0, 2, 0) = 1.0;
  c(2, 0, 0) = -1.0;
  const LieSRStructure s("broken", 2, 1, c, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(1, 1));
  const auto rep = validate_structure(s);
  EXPECT_FALSE(rep.ok());
  ASSERT_NE(rep.first_failure(), nullptr);
}

TEST(LieAlg, OrthonormalFrame) {
  const auto raw = build_example("su2-double-v2");
  EXPECT_FALSE(is_orthonormal(raw));
  const auto s = adapted_orthonormal_frame(raw);
  EXPECT_TRUE(is_orthonormal(s));
  EXPECT_THROW(inverse_sqrt_spd(-Eigen::MatrixXd::Identity(2, 2), "g"), Error);
}

// ---------------------------------------------------------------- connection

TEST_P(CatalogTest, LeviCivitaIsMetricAndTorsionFree) {
  const auto a = analyze(GetParam());
  const int N = a.s.dim();
  double worst = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        worst = std::max(worst, std::abs(a.conn.lc(i, j, k) + a.conn.lc(i, k, j)));
        worst = std::max(worst, std::abs(a.conn.lc(i, j, k) - a.conn.lc(j, i, k) - a.conn.c(i, j, k)));
      }
  EXPECT_LT(worst, 1e-12);
}

TEST_P(CatalogTest, BottPreservesSplittingAndMetrics) {
  const auto a = analyze(GetParam());
  const int N = a.s.dim(), n = a.s.n();
  double mixed = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        if ((j < n) != (k < n)) mixed = std::max(mixed, std::abs(a.conn.bott(i, j, k)));
  EXPECT_LT(mixed, 1e-12);
}

TEST_P(CatalogTest, TorsionIsMinusCurvatures) {
  const auto a = analyze(GetParam());
  const int N = a.s.dim(), n = a.s.n();
  double worst = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const double expected = k >= n ? -a.conn.R(i, j, k - n) : -a.conn.Rbar(i, j, k);
        worst = std::max(worst, std::abs(a.conn.torsion(i, j, k) - expected));
      }
  EXPECT_LT(worst, 1e-12);
}

TEST_P(CatalogTest, EhresmannCurvatureIsProjectedBracket) {
  const auto a = analyze(GetParam());
  const int n = a.s.n(), nu = a.s.nu();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int s = 0; s < nu; ++s) worst = std::max(worst, std::abs(a.conn.R(i, j, s) - a.s.c(i, j, n + s)));
  for (int s = 0; s < nu; ++s)
    for (int t = 0; t < nu; ++t)
      for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(a.conn.Rbar(n + s, n + t, k) - a.s.c(n + s, n + t, k)));
  EXPECT_LT(worst, 1e-12);
}

// curvature of a constant-coefficient connection from its matrices (Gamma_i)_{lk} = bott(i,k,l):
// R(e_i, e_j) = [Gamma_i, Gamma_j] - sum_m c_ijm Gamma_m
TEST_P(CatalogTest, CurvatureMatchesMatrixOracle) {
  const auto a = analyze(GetParam());
  const int N = a.s.dim();
  std::vector<Eigen::MatrixXd> G(N, Eigen::MatrixXd::Zero(N, N));
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k)
      for (int l = 0; l < N; ++l) G[i](l, k) = a.conn.bott(i, k, l);
  double worst = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Eigen::MatrixXd Rij = G[i] * G[j] - G[j] * G[i];
      for (int m = 0; m < N; ++m) Rij -= a.s.c(i, j, m) * G[m];
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) worst = std::max(worst, std::abs(a.conn.curv(i, j, k, l) - Rij(l, k)));
    }
  EXPECT_LT(worst, 1e-12);
}

TEST_P(CatalogTest, CurvatureIdentities) {
  const auto a = analyze(GetParam());
  const int N = a.s.dim(), n = a.s.n();
  const auto& R = a.conn.curv;
  double anti = 0.0, lemma_a = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          anti = std::max(anti, std::abs(R(i, j, k, l) + R(j, i, k, l)));
          // <R(Z1,Z2)A, A> = 0 for horizontal A, polarized
          if (k < n && l < n) lemma_a = std::max(lemma_a, std::abs(R(i, j, k, l) + R(i, j, l, k)));
        }
  EXPECT_LT(anti, 1e-12);
  EXPECT_LT(lemma_a, 1e-12);

  if (!(metric_preserving(a.conn) && vertical_integrable(a.conn))) GTEST_SKIP() << "identity (b) needs a Riemannian foliation";
  // <R(A,Z1)Z2, A> = <R(A,Z2)Z1, A>, polarized in A
  double lemma_b = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int z1 = 0; z1 < N; ++z1)
        for (int z2 = 0; z2 < N; ++z2) {
          const double lhs = R(p, z1, z2, q) + R(q, z1, z2, p);
          const double rhs = R(p, z2, z1, q) + R(q, z2, z1, p);
          lemma_b = std::max(lemma_b, std::abs(lhs - rhs));
        }
  EXPECT_LT(lemma_b, 1e-12);
}

TEST_P(CatalogTest, MetricPreservingHasParallelHorizontalMetric) {
  const auto a = analyze(GetParam());
  if (!metric_preserving(a.conn)) GTEST_SKIP();
  EXPECT_LT(nabla_hstar(a.conn.bott, a.conn.n).max_abs(), 1e-12);
}

TEST(Connection, StructuralFlags) {
  for (const char* name : {"heisenberg", "free-step2:n=3", "su2-hopf", "su2-double-v2"}) {
    const auto a = analyze(name);
    EXPECT_TRUE(metric_preserving(a.conn)) << name;
    EXPECT_TRUE(vertical_integrable(a.conn)) << name;
    EXPECT_TRUE(parallel_vertical_metric(a.conn)) << name;
    EXPECT_LT(a.conn.drift.cwiseAbs().maxCoeff(), 1e-12) << name;
  }
  const auto sl = analyze("sl2c");
  EXPECT_FALSE(vertical_integrable(sl.conn));
}

TEST(Connection, Sl2cTraceCondition) {
  const auto a = analyze("sl2c");
  const CounterRng rng(3);
  const int N = a.s.dim();
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd v(N);
    for (int i = 0; i < N; ++i) v[i] = rng.normal(trial, i);
    EXPECT_LE(std::abs(co_curvature_trace(a.conn, v)), 1e-10 * v.squaredNorm());
  }
}

// ---------------------------------------------------------------- invariants

TEST(Invariants, FreeStep2Constants) {
  for (int n : {2, 3, 4}) {
    const auto a = analyze("free-step2:n=" + std::to_string(n));
    EXPECT_NEAR(a.k.M_R, 1.0, 1e-10) << n;
    EXPECT_NEAR(a.k.m_R, 1.0 / std::sqrt(n - 1.0), 1e-10) << n;
    EXPECT_NEAR(a.k.rho_H, 0.0, 1e-10) << n;
    ASSERT_TRUE(a.k.M_HV.has_value());
    EXPECT_NEAR(*a.k.M_HV, 0.0, 1e-10) << n;
    EXPECT_LT(a.conn.nabla_vstar.max_abs(), 1e-10) << n;
  }
}

TEST(Invariants, DoubleV2Constants) {
  const auto a = analyze("su2-double-v2:rho=1");
  EXPECT_NEAR(a.k.M_R, 1.0, 1e-10);
  EXPECT_NEAR(a.k.m_R, 1.0 / std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(a.k.rho_H, 4.0, 1e-10);
  EXPECT_NEAR(*a.k.M_HV, 0.0, 1e-10);
}

TEST(Invariants, DoubleV1CurvatureMatchesV2) {
  // same Ehresmann curvature up to sign in orthonormal frames, hence same m_R
  const auto v1 = analyze("su2-double-v1:rho=1");
  const auto v2 = analyze("su2-double-v2:rho=1");
  EXPECT_NEAR(v1.k.m_R, v2.k.m_R, 1e-12);
  EXPECT_NEAR(v1.k.rho_H, 1.0, 1e-10);
  ASSERT_TRUE(v1.k.M_HV.has_value());
  EXPECT_NEAR(*v1.k.M_HV, 1.5, 1e-10);
}

TEST(Invariants, MhvRandomSearch) {
  // sup over unit X in H, Y in V of |Ric_HV(X, Y)| by sampling the sphere pair
  const auto a = analyze("su2-double-v1");
  const int n = a.s.n(), nu = a.s.nu();
  const Eigen::MatrixXd hv = a.k.ric_hv.bottomLeftCorner(nu, n);
  const CounterRng rng(5);
  double best = 0.0;
  for (std::uint64_t t = 0; t < 20000; ++t) {
    Eigen::VectorXd x(n), y(nu);
    for (int i = 0; i < n; ++i) x[i] = rng.normal(t, i);
    for (int i = 0; i < nu; ++i) y[i] = rng.normal(t, n + i);
    best = std::max(best, std::abs(y.normalized().dot(hv * x.normalized())));
  }
  ASSERT_TRUE(a.k.M_HV.has_value());
  EXPECT_LE(best, *a.k.M_HV + 1e-12);
  EXPECT_GT(best, 0.98 * *a.k.M_HV);
}

TEST(Invariants, Sl2cRicciAndCurvature) {
  const auto a = analyze("sl2c");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.k.ric_h.topLeftCorner(4, 4));
  const Eigen::Vector4d expected(-2.5, -2.5, -2.0, 0.5);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(es.eigenvalues()[i], expected[i], 1e-10);
  EXPECT_LT(a.k.ric_hv.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(a.k.M_R, 1.0, 1e-10);
  EXPECT_NEAR(a.k.rho_H, -2.5, 1e-10);
  // R(iA,iC) and R(iB,iC) are the only nonzero pairs (norm 1 each)
  EXPECT_NEAR(a.k.m_R, 1.0 / std::sqrt(2.0), 1e-10);
}

TEST(Invariants, HopfAndHeisenberg) {
  const auto hopf = analyze("su2-hopf");
  EXPECT_NEAR(hopf.k.M_R, 1.0, 1e-12);
  EXPECT_NEAR(hopf.k.m_R, 1.0, 1e-12);
  EXPECT_NEAR(hopf.k.rho_H, 2.0, 1e-12);
  const auto heis = analyze("heisenberg");
  EXPECT_NEAR(heis.k.m_R, 1.0, 1e-12);
  EXPECT_NEAR(heis.k.rho_H, 0.0, 1e-12);
}

TEST(Invariants, RicciHVUnboundedSentinel) {
  // a pure block that is not PSD means M_HV is reported as unbounded
  const auto a = analyze("sl2c");
  EXPECT_TRUE(a.k.M_HV.has_value());
  const auto rhv = ricci_hv(a.conn);
  EXPECT_LT((rhv.ric_hv - rhv.ric_hv.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_P(CatalogTest, NormalizationScaling) {
  const auto raw = build_example(GetParam());
  const auto once = analyze(raw);
  EXPECT_NEAR(once.k.M_R, 1.0, 1e-12);
  // rescaling gram_v before normalizing does not change the normalized constants
  const auto scaled = analyze(raw.with_gram_v(raw.gram_v() * 7.5));
  EXPECT_NEAR(scaled.k.m_R, once.k.m_R, 1e-10);
  EXPECT_NEAR(scaled.k.rho_H, once.k.rho_H, 1e-10);
  // M_R scales like |gram_v|^(1/2); horizontal Ricci does not depend on gram_v
  const auto plain = analyze(raw, false);
  const auto plain4 = analyze(raw.with_gram_v(raw.gram_v() * 4.0), false);
  EXPECT_NEAR(plain4.k.M_R, 2.0 * plain.k.M_R, 1e-10);
}

TEST_P(CatalogTest, FrameRotationInvariance) {
  const auto base = analyze(GetParam());
  const int n = base.s.n(), nu = base.s.nu();
  const CounterRng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd T = test::block_diag(test::random_orthogonal(n, rng, 2 * trial),
                                               test::random_orthogonal(nu, rng, 2 * trial + 1));
    const auto rotated = change_basis(base.s, T);
    ASSERT_TRUE(is_orthonormal(rotated, 1e-10));
    const auto conn = compute_connection(rotated);
    const auto k = cd_constants(conn);
    EXPECT_NEAR(k.M_R, base.k.M_R, 1e-10);
    EXPECT_NEAR(k.m_R, base.k.m_R, 1e-10);
    EXPECT_NEAR(k.rho_H, base.k.rho_H, 1e-10);
    EXPECT_EQ(k.M_HV.has_value(), base.k.M_HV.has_value());
    if (k.M_HV && base.k.M_HV) {
      EXPECT_NEAR(*k.M_HV, *base.k.M_HV, 1e-10);
    }
    EXPECT_NEAR(k.M_nabla_v, base.k.M_nabla_v, 1e-10);
    EXPECT_EQ(k.rho_delta_v.has_value(), base.k.rho_delta_v.has_value());
    if (k.rho_delta_v && base.k.rho_delta_v) {
      EXPECT_NEAR(*k.rho_delta_v, *base.k.rho_delta_v, 1e-10);
    }
    // Ric_H transforms as a bilinear form
    const Eigen::MatrixXd back = T * k.ric_h * T.transpose();
    EXPECT_LT((back - base.k.ric_h).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Invariants, RhoDeltaIsLowerBoundOnAnisotropicMetric) {
  Eigen::MatrixXd gv = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  const auto raw = build_example("su2-double-v2");
  const auto a = analyze(raw.with_gram_v(gv / 4.0), false);
  EXPECT_GT(a.k.M_nabla_v, 1e-6);
  ASSERT_TRUE(a.k.rho_delta_v.has_value());
  const double rho = *a.k.rho_delta_v;
  const Eigen::MatrixXd& Q = a.conn.delta_vstar;
  const int n = a.s.n(), N = a.s.dim();
  const CounterRng rng(5);
  double best = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20000; ++trial) {
    Eigen::VectorXd p(N);
    for (int i = 0; i < N; ++i) p[i] = rng.normal(trial, i);
    const double v2 = p.tail(N - n).squaredNorm();
    const double q = p.dot(Q * p);
    EXPECT_GE(q, rho * v2 - 1e-9 * (1.0 + p.squaredNorm()));
    best = std::min(best, q / v2);
  }
  // attained: the sampled infimum is not far above the bound
  EXPECT_LT(best, rho + 0.5 * (1.0 + std::abs(rho)));
}

TEST(Invariants, PrivilegedMetricStep2) {
  for (int n : {2, 3, 4}) {
    const auto s = build_example("free-step2:n=" + std::to_string(n));
    const auto pm = privileged_step2(s);
    EXPECT_NEAR(pm.b * pm.b, n - 1.0, 1e-10) << n;
    const auto a = analyze(pm.structure, false);
    EXPECT_NEAR(a.k.m_R, 1.0 / pm.b, 1e-10) << n;
    const double nu = n * (n - 1) / 2.0;
    EXPECT_GE(pm.b * pm.b, 2.0 * nu / n - 1e-10);
    EXPECT_LE(pm.b * pm.b, 2.0 * nu + 1e-10);
  }
  try {
    privileged_step2(build_example("sl2c").with_name("x"));
  } catch (const Error& e) {
    ADD_FAILURE() << "sl2c is step 2: " << e.what();
  }
}

TEST(Invariants, ZeroCurvatureCannotNormalize) {
  Tensor3 c({3, 3, 3});
  const LieSRStructure flat("abelian", 2, 1, c, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(1, 1));
  try {
    normalize_vertical(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_curvature);
  }
}

}  // namespace
}  // namespace srcd
