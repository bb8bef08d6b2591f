#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "common.hpp"
#include "srcd/error.hpp"
#include "srcd/spectral.hpp"

namespace srcd {
namespace {

using test::analyze;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no srcd::Error thrown";
  return Errc::internal;
}

Jet2 zero_jet(const ConnectionData& conn) {
  return {Eigen::VectorXd::Zero(conn.dim()), Eigen::MatrixXd::Zero(conn.n, conn.dim())};
}

// ---------------------------------------------------------------- parameters

TEST(CDParameters, DoubleV2AtInfiniteC) {
  const auto a = analyze("su2-double-v2:rho=1");
  const auto p = cd_parameters(a.k, kInf);
  EXPECT_EQ(p.n_dim, 3.0);
  EXPECT_NEAR(p.rho1, 4.0, 1e-12);
  EXPECT_NEAR(p.rho20, 0.25, 1e-12);
  EXPECT_NEAR(p.rho21, 0.0, 1e-12);
  EXPECT_TRUE(std::isinf(p.c));
}

TEST(CDParameters, FreeStep2VerticalCoefficient) {
  for (int n : {2, 3, 4}) {
    const auto a = analyze("free-step2:n=" + std::to_string(n));
    const auto p = cd_parameters(a.k, kInf);
    EXPECT_EQ(p.n_dim, n);
    EXPECT_NEAR(p.rho1, 0.0, 1e-12);
    EXPECT_NEAR(p.rho20, 1.0 / (2.0 * (n - 1)), 1e-12);
    EXPECT_NEAR(p.rho21, 0.0, 1e-12);
  }
}

TEST(CDParameters, DoubleV1FormulaShape) {
  // rho1 = rho_H - 1/c and rho20 = m_R^2/2 - c M_HV^2 with the computed constants
  const auto a = analyze("su2-double-v1:rho=1");
  for (double c : {0.1, 16.0 / 9.0, 5.0}) {
    const auto p = cd_parameters(a.k, c);
    EXPECT_NEAR(p.rho1, 1.0 - 1.0 / c, 1e-12);
    EXPECT_NEAR(p.rho20, 0.25 - 2.25 * c, 1e-12);
  }
  EXPECT_EQ(error_of([&] { cd_parameters(a.k, kInf); }), Errc::bad_param);
}

TEST(CDParameters, Sl2cComputedVerticalCoefficient) {
  const auto a = analyze("sl2c");
  const auto p = cd_parameters(a.k, kInf);
  EXPECT_NEAR(p.rho1, -2.5, 1e-12);
  EXPECT_NEAR(p.rho20, 0.25, 1e-12);
}

TEST(CDParameters, MonotoneInC) {
  const auto a = analyze("su2-double-v1");
  CDParams prev = cd_parameters(a.k, 1e-3);
  for (double c = 2e-3; c < 1e3; c *= 2.0) {
    const auto p = cd_parameters(a.k, c);
    EXPECT_GT(p.rho1, prev.rho1);
    EXPECT_LT(p.rho20, prev.rho20);
    prev = p;
  }
}

TEST(CDParameters, Errors) {
  const auto v2 = build_example("su2-double-v2");
  const auto raw = analyze(v2.with_gram_v(2.0 * v2.gram_v()), false);
  EXPECT_EQ(error_of([&] { cd_parameters(raw.k, 1.0); }), Errc::not_normalized);
  auto k = analyze("su2-double-v2").k;
  EXPECT_EQ(error_of([&] { cd_parameters(k, 0.0); }), Errc::bad_param);
  EXPECT_EQ(error_of([&] { cd_parameters(k, 1.0, 2.0); }), Errc::bad_dimension);
  k.M_HV.reset();
  EXPECT_EQ(error_of([&] { cd_parameters(k, 1.0); }), Errc::unbounded_constant);
  k = analyze("su2-double-v2").k;
  k.rho_delta_v.reset();
  EXPECT_EQ(error_of([&] { cd_parameters(k, 1.0); }), Errc::unbounded_constant);
}

TEST(CDParameters, DriftedHeisenberg) {
  const auto a = analyze("heisenberg");
  for (double z : {1.0, 0.5, 2.0}) {
    const Eigen::Vector3d Z(0.0, 0.0, z);
    const auto p = drifted_cd_parameters(a.k, a.conn, Z, kInf, 3.0);
    EXPECT_NEAR(p.rho20, 0.5 - z * z, 1e-12);
    EXPECT_NEAR(p.rho21, 0.0, 1e-12);
    EXPECT_NEAR(p.rho1, 0.0, 1e-12);
  }
  EXPECT_EQ(error_of([&] { drifted_cd_parameters(a.k, a.conn, Eigen::Vector3d::Zero(), 1.0, 3.0); }),
            Errc::not_vertical);
  EXPECT_EQ(error_of([&] { drifted_cd_parameters(a.k, a.conn, Eigen::Vector3d(1, 0, 1), 1.0, 3.0); }),
            Errc::not_vertical);
  EXPECT_EQ(error_of([&] { drifted_cd_parameters(a.k, a.conn, Eigen::Vector3d(0, 0, 1), 1.0, 2.0); }),
            Errc::bad_dimension);
  EXPECT_EQ(error_of([&] { drifted_cd_parameters(a.k, a.conn, Eigen::Vector2d(0, 1), 1.0, 3.0); }),
            Errc::dimension_mismatch);
}

TEST(CDParameters, DriftedDoubleV2) {
  const auto a = analyze("su2-double-v2");
  Eigen::VectorXd Z = Eigen::VectorXd::Zero(6);
  Z[3] = 1.0;
  const auto p = drifted_cd_parameters(a.k, a.conn, Z, kInf, 4.0);
  EXPECT_TRUE(std::isfinite(p.rho20));
  EXPECT_TRUE(std::isfinite(p.rho21));
  EXPECT_LT(p.rho20, 0.25);
}

// ---------------------------------------------------------------- jets and Gamma2

TEST(Jets, SamplingIsDeterministicAndConstrained) {
  for (const auto& name : test::catalog()) {
    const auto a = analyze(name);
    for (std::uint64_t i = 0; i < 50; ++i) {
      const Jet2 j1 = sample_jet(a.conn, 0, i), j2 = sample_jet(a.conn, 0, i);
      EXPECT_EQ(j1.p, j2.p);
      EXPECT_EQ(j1.H, j2.H);
      EXPECT_LE(constraint_residual(j1, a.conn), 1e-14 * (1.0 + j1.p.cwiseAbs().maxCoeff()));
    }
    EXPECT_NE(sample_jet(a.conn, 0, 0).p, sample_jet(a.conn, 1, 0).p);
  }
}

TEST(Jets, HeisenbergSymmetricWithoutVerticalCovector) {
  const auto a = analyze("heisenberg");
  Jet2 jet = sample_jet(a.conn, 0);
  jet.p[2] = 0.0;
  Eigen::MatrixXd sym = jet.H.leftCols(2);
  sym = 0.5 * (sym + sym.transpose()).eval();
  const Jet2 j = make_jet(a.conn, jet.p, sym, jet.H.rightCols(1));
  EXPECT_EQ(j.H(0, 1), j.H(1, 0));
}

TEST(Jets, ConstraintViolationIsRejected) {
  const auto a = analyze("heisenberg");
  Jet2 jet = zero_jet(a.conn);
  jet.p[2] = 1.0;
  EXPECT_EQ(error_of([&] { gamma2_forms(jet, a.conn, a.k, 1.0); }), Errc::constraint_violated);
  Jet2 bad{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 3)};
  EXPECT_EQ(error_of([&] { gamma2_forms(bad, a.conn, a.k, 1.0); }), Errc::dimension_mismatch);
}

TEST(Gamma2, ZeroJet) {
  const auto a = analyze("sl2c");
  const auto g = gamma2_forms(zero_jet(a.conn), a.conn, a.k, 3.0);
  EXPECT_EQ(g.gamma_h, 0.0);
  EXPECT_EQ(g.gamma_v, 0.0);
  EXPECT_EQ(g.Lf, 0.0);
  EXPECT_EQ(g.gamma2, 0.0);
  const auto m = verify_cd(zero_jet(a.conn), cd_parameters(a.k, kInf), a.conn, a.k, 3.0);
  EXPECT_EQ(m.margin, 0.0);
}

TEST(Gamma2, HeisenbergPureVerticalCovector) {
  const auto a = analyze("heisenberg");
  Jet2 jet = zero_jet(a.conn);
  jet.p[2] = 1.0;
  jet.H(0, 1) = 0.5;
  jet.H(1, 0) = -0.5;
  for (double ell : {0.1, 1.0, 10.0}) {
    const auto g = gamma2_forms(jet, a.conn, a.k, ell);
    EXPECT_EQ(g.gamma_h, 0.0);
    EXPECT_EQ(g.gamma_v, 1.0);
    EXPECT_EQ(g.Lf, 0.0);
    EXPECT_NEAR(g.gamma2, 0.5, 1e-15);
    ASSERT_TRUE(g.gamma2_v.has_value());
    EXPECT_EQ(*g.gamma2_v, 0.0);
  }
}

// second, index-by-index evaluation of the seven-term expression; R is read
// from the structure constants, Ricci forms from their matrices
double gamma2_brute(const Jet2& jet, const test::Analyzed& a, double ell) {
  const int n = a.s.n(), nu = a.s.nu(), N = a.s.dim();
  double t[7] = {0, 0, 0, 0, 0, 0, 0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t[0] += jet.H(i, j) * jet.H(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t[1] += a.k.ric_h(i, j) * jet.p[i] * jet.p[j];
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) t[2] += a.k.ric_hv(i, j) * jet.p[i] * jet.p[j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int s = 0; s < nu; ++s) t[3] += 2.0 * jet.H(i, n + s) * a.s.c(i, j, n + s) * jet.p[j];
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < nu; ++s) t[4] += ell * jet.H(i, n + s) * jet.H(i, n + s);
  for (int i = 0; i < n; ++i)
    for (int x = 0; x < N; ++x)
      for (int y = 0; y < N; ++y) t[5] += 2.0 * ell * a.conn.nabla_vstar(i, x, y) * jet.p[x] * jet.H(i, y);
  for (int x = 0; x < N; ++x)
    for (int y = 0; y < N; ++y) t[6] += 0.5 * ell * a.conn.delta_vstar(x, y) * jet.p[x] * jet.p[y];
  return t[0] + t[1] + t[2] + t[3] + t[4] + t[5] + t[6];
}

TEST(Gamma2, MatchesIndexByIndexEvaluation) {
  for (const char* name : {"sl2c", "su2-double-v1"}) {
    const auto a = analyze(name);
    for (std::uint64_t i = 0; i < 10000; ++i) {
      const Jet2 jet = sample_jet(a.conn, 17, i);
      const double ref = gamma2_brute(jet, a, 2.0);
      const double got = gamma2_forms(jet, a.conn, a.k, 2.0).gamma2;
      ASSERT_NEAR(got, ref, 1e-10 * (1.0 + std::abs(ref))) << name << " jet " << i;
    }
  }
}

TEST(Gamma2, AnisotropicMetricUsesCovariantTerms) {
  Eigen::MatrixXd gv = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  const auto a = analyze(build_example("su2-double-v2").with_gram_v(gv / 4.0));
  EXPECT_FALSE(parallel_vertical_metric(a.conn));
  for (std::uint64_t i = 0; i < 200; ++i) {
    const Jet2 jet = sample_jet(a.conn, 3, i);
    const auto g = gamma2_forms(jet, a.conn, a.k, 0.7);
    EXPECT_FALSE(g.gamma2_v.has_value());
    EXPECT_NEAR(g.gamma2, gamma2_brute(jet, a, 0.7), 1e-10 * (1.0 + std::abs(g.gamma2)));
  }
}

// ---------------------------------------------------------------- inequality checks

TEST(VerifyCD, MarginScalesQuadratically) {
  const auto a = analyze("su2-double-v1");
  const auto params = cd_parameters(a.k, 0.1);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Jet2 jet = sample_jet(a.conn, 2, i);
    const double lam = 3.7;
    const Jet2 scaled{lam * jet.p, lam * jet.H};
    const double m1 = verify_cd(jet, params, a.conn, a.k, 1.0).margin;
    const double m2 = verify_cd(scaled, params, a.conn, a.k, 1.0).margin;
    EXPECT_NEAR(m2, lam * lam * m1, 1e-10 * (1.0 + std::abs(m2)));
  }
}

TEST(VerifyCD, LargeEllLimitIsVerticalInequality) {
  for (const char* name : {"su2-double-v2", "heisenberg", "sl2c"}) {
    const auto a = analyze(name);
    const auto params = cd_parameters(a.k, kInf);
    const double ell = 1e6;
    for (std::uint64_t i = 0; i < 200; ++i) {
      const Jet2 jet = sample_jet(a.conn, 4, i);
      const auto g = gamma2_forms(jet, a.conn, a.k, 1.0);
      const auto m = verify_cd(jet, params, a.conn, a.k, ell);
      const double limit = *g.gamma2_v - params.rho21 * g.gamma_v;
      EXPECT_NEAR(m.margin / ell, limit, 1e-3 * (1.0 + std::abs(limit))) << name;
      EXPECT_GE(limit, -1e-9 * (1.0 + std::abs(*g.gamma2_v)));
    }
  }
}

TEST(VerifyCD, CatalogGrid) {
  // 5 x 5 log grid in (ell, c), reduced sample count
  for (const auto& name : test::catalog()) {
    const auto a = analyze(name);
    const bool c_inf = a.k.M_HV && *a.k.M_HV + a.k.M_nabla_v <= kZeroConstant;
    std::vector<CDCase> cases;
    for (double c : {0.01, 0.1, 1.0, 10.0, 100.0})
      for (double ell : {0.01, 0.1, 1.0, 10.0, 100.0}) cases.push_back({cd_parameters(a.k, c), ell});
    if (c_inf) cases.push_back({cd_parameters(a.k, kInf), 1.0});
    VerificationOptions opts;
    opts.samples = 2000;
    opts.double_gamma = true;
    const auto run = run_verification(a.conn, a.k, cases, opts);
    EXPECT_TRUE(run.passed) << name;
    for (const auto& cs : run.cases) EXPECT_GE(cs.min_relative_margin, -1e-9) << name;
    if (run.max_condition_b) {
      EXPECT_LE(*run.max_condition_b, 1e-12) << name;
    }
  }
}

TEST(VerifyCD, RunIsIndependentOfThreadCount) {
  const auto a = analyze("sl2c");
  const std::vector<CDCase> cases{{cd_parameters(a.k, 1.0), 1.0}};
  VerificationOptions o1, o4;
  o1.samples = o4.samples = 3000;
  o1.threads = 1;
  o4.threads = 4;
  const auto r1 = run_verification(a.conn, a.k, cases, o1);
  const auto r4 = run_verification(a.conn, a.k, cases, o4);
  EXPECT_EQ(r1.cases[0].min_relative_margin, r4.cases[0].min_relative_margin);
  EXPECT_EQ(r1.cases[0].worst_index, r4.cases[0].worst_index);
}

TEST(DoubleGamma, CauchySchwarzEqualityCase) {
  const auto a = analyze("su2-double-v2");
  const int n = a.s.n(), nu = a.s.nu();
  const CounterRng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd p(n + nu);
    for (int i = 0; i < n + nu; ++i) p[i] = rng.normal(trial, i);
    Eigen::MatrixXd hv(n, nu);
    for (int i = 0; i < n; ++i) hv.row(i) = rng.normal(trial, 100 + i) * p.tail(nu).transpose();
    const Jet2 jet = make_jet(a.conn, p, Eigen::MatrixXd::Zero(n, n), hv);
    const auto d = verify_double_gamma(jet, a.conn, a.k, 1.0, 1.0);
    EXPECT_NEAR(d.margin2, 0.0, 1e-12 * d.scale2);
  }
  const auto z = verify_double_gamma(zero_jet(a.conn), a.conn, a.k, 1.0, 1.0);
  EXPECT_EQ(z.margin1, 0.0);
  EXPECT_EQ(z.margin2, 0.0);
}

TEST(DoubleGamma, RefusesNonParallelMetric) {
  Eigen::MatrixXd gv = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  const auto a = analyze(build_example("su2-double-v2").with_gram_v(gv / 4.0));
  const Jet2 jet = zero_jet(a.conn);
  EXPECT_EQ(error_of([&] { verify_double_gamma(jet, a.conn, a.k, 1.0, 1.0); }),
            Errc::requires_parallel_vertical_metric);
  EXPECT_EQ(error_of([&] { condition_b_residual(jet, a.conn); }), Errc::requires_parallel_vertical_metric);
}

TEST(ConditionB, VanishesOnParallelStructures) {
  for (const char* name : {"heisenberg", "sl2c", "su2-double-v2", "su2-hopf", "free-step2:n=3"}) {
    const auto a = analyze(name);
    EXPECT_EQ(condition_b_residual(zero_jet(a.conn), a.conn), 0.0);
    for (std::uint64_t i = 0; i < 500; ++i) {
      const Jet2 jet = sample_jet(a.conn, 6, i);
      const double scale = 1.0 + jet.p.squaredNorm() * (1.0 + jet.H.cwiseAbs().maxCoeff());
      EXPECT_LE(std::abs(condition_b_residual(jet, a.conn)), 1e-12 * scale) << name;
    }
  }
}

// ---------------------------------------------------------------- exact certificates

TEST(Certificate, ComputedConstantsAreSharp) {
  for (const char* name : {"su2-double-v1", "sl2c", "su2-double-v2", "heisenberg"}) {
    const auto a = analyze(name);
    const bool c_inf = *a.k.M_HV <= kZeroConstant;
    for (double ell : {0.1, 1.0, 10.0}) {
      const auto cert = certify_cd(a.conn, a.k, cd_parameters(a.k, c_inf ? kInf : 1.0), ell);
      EXPECT_TRUE(cert.holds()) << name << " ell=" << ell << " min=" << cert.min_eigenvalue;
    }
  }
}

TEST(Certificate, LargerDoubleV1CoefficientsFail) {
  // rho1 = 1 - 1/c, rho20 = 1/8 - 9c/64 is violated by some constrained jet
  const auto a = analyze("su2-double-v1");
  for (double c : {0.2, 0.5, 1.0})
    for (double ell : {0.1, 1.0, 10.0}) {
      CDParams p = cd_parameters(a.k, c);
      p.rho1 = 1.0 - 1.0 / c;
      p.rho20 = 0.125 - 9.0 * c / 64.0;
      const auto cert = certify_cd(a.conn, a.k, p, ell);
      EXPECT_LT(cert.min_eigenvalue, -1e-3) << "c=" << c << " ell=" << ell;
      // the returned jet is a genuine counterexample
      EXPECT_LT(verify_cd(cert.worst_jet, p, a.conn, a.k, ell).margin, 0.0);
    }
}

TEST(Certificate, Sl2cHalfVerticalCoefficientFails) {
  const auto a = analyze("sl2c");
  for (double ell : {0.1, 1.0, 10.0}) {
    CDParams p = cd_parameters(a.k, kInf);
    p.rho20 = 0.5;
    EXPECT_NEAR(certify_cd(a.conn, a.k, p, ell).min_eigenvalue, -0.25, 1e-9) << ell;
    p.rho20 = 0.25;
    EXPECT_TRUE(certify_cd(a.conn, a.k, p, ell).holds()) << ell;
  }
}

// ---------------------------------------------------------------- optimize_c

TEST(OptimizeC, FindsInteriorMaximum) {
  const auto opt = optimize_c([](double c) { return -std::pow(std::log10(c) - 1.0, 2); }, false);
  ASSERT_TRUE(opt.has_value());
  EXPECT_NEAR(opt->c, 10.0, 1e-6);
}

TEST(OptimizeC, TiesGoToLargerC) {
  const auto opt = optimize_c([](double) { return 1.0; }, false);
  ASSERT_TRUE(opt.has_value());
  EXPECT_NEAR(opt->c, 1e6, 1e-6);
}

TEST(OptimizeC, InfeasibleAndInfinite) {
  EXPECT_FALSE(optimize_c([](double) { return std::nan(""); }, false).has_value());
  const auto inf = optimize_c([](double c) { return std::isinf(c) ? 2.0 : 1.0; }, true);
  ASSERT_TRUE(inf.has_value());
  EXPECT_TRUE(std::isinf(inf->c));
  EXPECT_EQ(inf->value, 2.0);
  const auto part = optimize_c([](double c) { return c < 1.0 ? 1.0 / c : std::nan(""); }, false);
  ASSERT_TRUE(part.has_value());
  EXPECT_LT(part->c, 1e-5);
}

// ---------------------------------------------------------------- spectral bounds

TEST(Spectral, DoubleV2BoundsAgree) {
  const auto a = analyze("su2-double-v2:rho=1");
  const auto p41 = gap_bound_prop41(cd_parameters(a.k, kInf));
  EXPECT_NEAR(p41.bound, 6.0 / 7.0, 1e-12);
  const auto opt = gap_bound_prop41(a.k);
  const auto kap = gap_bound_kappa(a.k);
  EXPECT_NEAR(opt.bound, 6.0 / 7.0, 1e-10);
  EXPECT_NEAR(kap.bound, opt.bound, 1e-10);
  EXPECT_NEAR(*kap.kappa, 1.0, 1e-12);
  EXPECT_EQ(kap.source, GapSource::kappa_corollary);
  const auto st = gap_bound_step2(build_example("su2-double-v2:rho=1"));
  EXPECT_NEAR(st.bound, 6.0 / 7.0, 1e-10);
  EXPECT_NEAR(*st.b, std::sqrt(2.0), 1e-10);
}

TEST(Spectral, BoundFormula) {
  // n rho20 / (n + rho20 (n-1)) (rho1 - k2 / rho20)
  CDParams p{4.0, 3.0, 0.5, -0.25, 1.0};
  const auto g = gap_bound_prop41(p);
  EXPECT_NEAR(g.k2, 0.25, 1e-15);
  EXPECT_NEAR(g.bound, 4.0 * 0.5 / (4.0 + 0.5 * 3.0) * (3.0 - 0.5), 1e-14);
  // independent of rho21 once it is nonnegative
  p.rho21 = 0.0;
  const double b0 = gap_bound_prop41(p).bound;
  p.rho21 = 7.0;
  EXPECT_EQ(gap_bound_prop41(p).bound, b0);
  p.rho20 = 0.0;
  EXPECT_EQ(error_of([&] { gap_bound_prop41(p); }), Errc::non_positive_rho20);
  // step-2 bound reproduced with rho20 = 1/(2 b^2), rho21 = 0, c = infinity
  const double b2 = 2.0, n = 3.0, rho_h = 4.0;
  const CDParams q{n, rho_h, 1.0 / (2.0 * b2), 0.0, kInf};
  EXPECT_NEAR(gap_bound_prop41(q).bound, n / (n * (2.0 * b2 + 1.0) - 1.0) * rho_h, 1e-14);
}

TEST(Spectral, KappaErrors) {
  EXPECT_EQ(error_of([] { gap_bound_kappa(analyze("free-step2:n=3").k); }), Errc::non_positive_kappa);
  EXPECT_EQ(error_of([] { gap_bound_kappa(analyze("sl2c").k); }), Errc::non_positive_kappa);
  Eigen::MatrixXd gv = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  const auto aniso = analyze(build_example("su2-double-v2").with_gram_v(gv / 4.0));
  EXPECT_EQ(error_of([&] { gap_bound_kappa(aniso.k); }), Errc::requires_parallel_metric);
  EXPECT_EQ(error_of([] { gap_bound_step2(build_example("heisenberg")); }), Errc::non_positive_rho20);
  // negative horizontal Ricci gives a vacuous (negative) bound rather than an error
  EXPECT_LT(gap_bound_prop41(analyze("sl2c").k).bound, 0.0);
}

TEST(Spectral, HopfSpinHalfBlockAndGap) {
  const auto a = analyze("su2-hopf");
  const auto r = irrep_spectrum_oracle(a.s, a.conn, 1);
  bool found = false;
  for (const auto& b : r.blocks)
    if (b.two_j1 == 1) {
      found = true;
      ASSERT_EQ(b.eigenvalues.size(), 2u);
      EXPECT_NEAR(b.eigenvalues[0], -1.0, 1e-12);
      EXPECT_NEAR(b.eigenvalues[1], -1.0, 1e-12);
    }
  EXPECT_TRUE(found);
  EXPECT_NEAR(r.gap, 1.0, 1e-12);
}

TEST(Spectral, HopfMatchesCasimirFormula) {
  // X1^2 + X2^2 = 2 (J_z^2 - J^2) on spin j, i.e. -2 (j(j+1) - m^2)
  const auto a = analyze("su2-hopf");
  const auto r = irrep_spectrum_oracle(a.s, a.conn, 11);
  for (const auto& b : r.blocks) {
    const double j = b.two_j1 / 2.0;
    std::vector<double> expected;
    for (int k = 0; k <= b.two_j1; ++k) {
      const double m = j - k;
      expected.push_back(-2.0 * (j * (j + 1.0) - m * m));
    }
    std::sort(expected.rbegin(), expected.rend());
    ASSERT_EQ(b.eigenvalues.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(b.eigenvalues[i], expected[i], 1e-10);
  }
}

TEST(Spectral, BoundsBelowOracleGap) {
  const auto v2 = analyze("su2-double-v2:rho=1");
  const auto r = irrep_spectrum_oracle(v2.s, v2.conn, default_two_jmax(v2.s));
  EXPECT_EQ(r.two_jmax, 5);
  EXPECT_GE(r.gap + 1e-8, 6.0 / 7.0);
  const auto hopf = analyze("su2-hopf");
  const auto rh = irrep_spectrum_oracle(hopf.s, hopf.conn, default_two_jmax(hopf.s));
  for (const auto& g : {gap_bound_prop41(hopf.k), gap_bound_kappa(hopf.k), gap_bound_step2(build_example("su2-hopf"))})
    EXPECT_LE(g.bound, rh.gap + 1e-8) << gap_source_name(g.source);
}

TEST(Spectral, OracleGapMonotoneInJmax) {
  for (const char* name : {"su2-hopf", "su2-double-v1", "su2-double-v2"}) {
    const auto a = analyze(name);
    double prev = kInf;
    for (int tj = 1; tj <= 5; ++tj) {
      const auto r = irrep_spectrum_oracle(a.s, a.conn, tj);
      EXPECT_LE(r.gap, prev + 1e-12) << name;
      prev = r.gap;
    }
  }
}

TEST(Spectral, SpinMatrices) {
  const std::complex<double> I(0.0, 1.0);
  for (int tj = 0; tj <= 6; ++tj) {
    const auto J = spin_matrices(tj);
    ASSERT_EQ(J.size(), 3u);
    const double j = tj / 2.0;
    const Eigen::MatrixXcd c1 = J[0] * J[1] - J[1] * J[0] - I * J[2];
    const Eigen::MatrixXcd c2 = J[1] * J[2] - J[2] * J[1] - I * J[0];
    EXPECT_LT(c1.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(c2.cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXcd cas = J[0] * J[0] + J[1] * J[1] + J[2] * J[2];
    const Eigen::MatrixXcd id = j * (j + 1.0) * Eigen::MatrixXcd::Identity(tj + 1, tj + 1);
    EXPECT_LT((cas - id).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Spectral, OracleErrors) {
  const auto sl = analyze("sl2c");
  EXPECT_EQ(error_of([&] { irrep_spectrum_oracle(sl.s, sl.conn, 3); }), Errc::unsupported_algebra);
  const auto he = analyze("heisenberg");
  EXPECT_EQ(error_of([&] { irrep_spectrum_oracle(he.s, he.conn, 3); }), Errc::unsupported_algebra);
  const auto hopf = analyze("su2-hopf");
  EXPECT_EQ(error_of([&] { irrep_spectrum_oracle(hopf.s, hopf.conn, 0); }), Errc::jmax_too_small);
  EXPECT_EQ(error_of([&] { irrep_spectrum_oracle(hopf.s, hopf.conn, 26); }), Errc::bad_param);
}

}  // namespace
}  // namespace srcd
