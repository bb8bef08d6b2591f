#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "srcd/connection.hpp"
#include "srcd/liealg.hpp"

namespace srcd {

// All group elements are realified d x d matrices (complex realizations are
// doubled, see MatrixRealization::realified).

enum class Scheme { lie_euler };

struct SimConfig {
  double t_final = 1.0;
  int steps = 100;
  std::size_t paths = 1000;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::lie_euler;
  int record_stride = 0;          // 0: record only the initial and final states
  bool store_increments = false;  // keep the Brownian increments for audits
  std::size_t threads = 0;
};

struct PathSample {
  std::vector<double> times;                       // record times
  std::vector<std::vector<Eigen::MatrixXd>> paths;  // paths[p][r] at times[r]
  std::vector<Eigen::MatrixXd> increments;         // steps x n per path, when stored
  double max_group_defect = 0.0;                   // compact realizations only
};

// g <- g exp(sum_i dW_i E_i + dt/2 sum_j drift[j] E_j) with dW_i ~ N(0, dt);
// polar re-projection every 64 steps for compact realizations. Increment
// dW_i of step k on path p is sqrt(dt) times normal(stream p, counter k n + i).
// g0 defaults to the identity.
PathSample simulate_paths(const LieSRStructure& s, const ConnectionData& conn, const SimConfig& cfg,
                          const Eigen::MatrixXd& g0 = Eigen::MatrixXd());

// max |g^T g - I|
double unitarity_defect(const Eigen::MatrixXd& g);

// true when every realified generator is skew-symmetric
bool compact_realization(const LieSRStructure& s);

// Polynomial in the entries of the realified matrix, with exact first and
// second derivatives.
class PolynomialFunction {
 public:
  struct Monomial {
    double coef = 1.0;
    std::vector<int> entries;  // row-major flat indices r * dim + c, repeats allowed
  };

  PolynomialFunction(std::string name, int dim, std::vector<Monomial> terms);

  // x = g(0,1), y = g(1,2), z = g(0,2), x2y2 = x^2 + y^2, x4 = x^4, z2 = z^2,
  // coef00 = g(0,0), one = 1, entry:r,c = g(r,c)
  static PolynomialFunction named(std::string_view name, int dim);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  double operator()(const Eigen::Ref<const Eigen::MatrixXd>& g) const;
  // Df(g)[X]
  double d1(const Eigen::Ref<const Eigen::MatrixXd>& g, const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  // D^2 f(g)[X, Y]
  double d2(const Eigen::Ref<const Eigen::MatrixXd>& g, const Eigen::Ref<const Eigen::MatrixXd>& X,
            const Eigen::Ref<const Eigen::MatrixXd>& Y) const;

 private:
  double entry(const Eigen::Ref<const Eigen::MatrixXd>& m, int idx) const { return m(idx / dim_, idx % dim_); }

  std::string name_;
  int dim_;
  std::vector<Monomial> terms_;
};

// Delta' f(g) = sum_i E_i E_i f + sum_j drift[j] E_j f from the exact derivatives,
// with E_i f(g) = Df(g)[g E_i] and E_i E_j f(g) = D^2 f(g)[g E_i, g E_j] + Df(g)[g E_i E_j].
double exact_sublaplacian(const LieSRStructure& s, const ConnectionData& conn, const PolynomialFunction& f,
                          const Eigen::MatrixXd& g);

// Central differences along the frame exponential curves, O(h^2).
double apply_sublaplacian_numeric(const LieSRStructure& s, const ConnectionData& conn,
                                  const std::function<double(const Eigen::MatrixXd&)>& f, const Eigen::MatrixXd& g0,
                                  double h);

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
};

// Monte Carlo estimate of E f(X_T). With control variates the per-path value
// is f(X_T) - sum_k [sum_i E_i f(g_k) dW_i + 1/2 sum_ij E_iE_j f(g_k)(dW_i dW_j - delta_ij dt)],
// which has the same mean.
MCEstimate estimate_expectation(const LieSRStructure& s, const ConnectionData& conn, const SimConfig& cfg,
                                const PolynomialFunction& f, const Eigen::MatrixXd& g0 = Eigen::MatrixXd(),
                                bool control_variates = false);

struct ConsistencyPoint {
  double t = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double residual = 0.0;  // mean - f(g0) - t/2 Delta' f(g0)
  bool resolved = false;
};

struct ConsistencyReport {
  std::vector<ConsistencyPoint> points;  // t = T, T/2, T/4, T/8
  double f0 = 0.0;
  double lf0 = 0.0;   // Delta' f(g0)
  double l2f0 = 0.0;  // Delta'^2 f(g0), numeric
  double exponent = 0.0;  // +infinity for a vanishing remainder
  double t2_coef = 0.0;
  double model_deviation = 0.0;  // |r - a t^2| at the smallest t
  bool vanishing_remainder = false;
  bool passed = false;
};

// Fits |E f(X_t) - f(g0) - t/2 Delta' f(g0)| against t at t = T, T/2, T/4, T/8
// with cfg.steps steps per horizon and common random numbers. Throws
// InsufficientPaths when the standard error cannot resolve the t^2 term.
ConsistencyReport generator_consistency(const LieSRStructure& s, const ConnectionData& conn, const SimConfig& cfg,
                                        const PolynomialFunction& f, const Eigen::MatrixXd& g0 = Eigen::MatrixXd());

// Header "time,path_id,g00,g01,...", one row per recorded state.
void write_paths_csv(std::ostream& os, const PathSample& sample, std::size_t max_paths);

}  // namespace srcd
