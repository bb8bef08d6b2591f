#include "srcd/diffusion.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <type_traits>

#include <unsupported/Eigen/MatrixFunctions>

#include "srcd/error.hpp"
#include "srcd/parallel.hpp"
#include "srcd/rng.hpp"

namespace srcd {

namespace {

constexpr int kProjectEvery = 64;
constexpr double kBlowup = 1e12;

struct Setup {
  int n = 0;
  int dim = 0;  // realified matrix size
  std::vector<Eigen::MatrixXd> E;  // realified generators, orthonormal frame
  Eigen::MatrixXd half_drift;      // 1/2 sum_j drift[j] E_j
  bool nilpotent = false;
  bool compact = false;
};

bool strictly_upper(const Eigen::MatrixXd& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c <= r; ++c)
      if (m(r, c) != 0.0) return false;
  return true;
}

Setup make_setup(const LieSRStructure& s, const ConnectionData& conn) {
  if (!s.realization()) throw Error(Errc::no_realization, "'" + s.name() + "' has no matrix realization");
  if (!is_orthonormal(s, 1e-12))
    throw Error(Errc::not_orthonormal_frame, "diffusion needs the structure in its orthonormal frame");
  Setup st;
  st.n = s.n();
  st.E = s.realization()->realified();
  st.dim = static_cast<int>(st.E[0].rows());
  st.half_drift = Eigen::MatrixXd::Zero(st.dim, st.dim);
  for (int j = 0; j < st.n; ++j) st.half_drift += 0.5 * conn.drift[j] * st.E[j];
  st.nilpotent = true;
  st.compact = true;
  for (const auto& e : st.E) {
    st.nilpotent = st.nilpotent && strictly_upper(e);
    st.compact = st.compact && (e + e.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + e.cwiseAbs().maxCoeff());
  }
  return st;
}

Eigen::MatrixXd initial_state(const Setup& st, const Eigen::MatrixXd& g0) {
  if (g0.size() == 0) return Eigen::MatrixXd::Identity(st.dim, st.dim);
  if (g0.rows() != st.dim || g0.cols() != st.dim)
    throw Error(Errc::dimension_mismatch, "initial state must be a realified " + std::to_string(st.dim) + "-matrix");
  return g0;
}

template <int D>
struct Stepper {
  using Mat = Eigen::Matrix<double, D, D>;
  int n, dim;
  std::vector<Mat> E;
  Mat half_drift;
  bool nilpotent, compact;

  explicit Stepper(const Setup& st)
      : n(st.n), dim(st.dim), half_drift(st.half_drift), nilpotent(st.nilpotent), compact(st.compact) {
    for (const auto& e : st.E) E.emplace_back(e);
  }

  Mat expm(const Mat& A) const {
    if (!nilpotent) return A.exp();
    Mat term = Mat::Identity(dim, dim), sum = term;
    for (int k = 1; k < dim; ++k) {
      term = (term * A / k).eval();
      sum += term;
    }
    return sum;
  }

  void project(Mat& g) const {
    Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    g = svd.matrixU() * svd.matrixV().transpose();
  }
};

// Runs paths [begin, end) and reports to the observer:
// before_step(p, k, g, dW), after_step(p, k + 1, g), end_path(p, g).
template <int D, class Obs>
void run_paths(const Setup& st, double t_final, int steps, std::uint64_t seed, const Eigen::MatrixXd& g0,
               std::size_t begin, std::size_t end, Obs& obs) {
  using Mat = typename Stepper<D>::Mat;
  const Stepper<D> stp(st);
  const CounterRng rng(seed);
  const double dt = t_final / steps, sq = std::sqrt(dt);
  const int n = st.n;
  const Mat g_init = g0;
  const Mat drift_dt = stp.half_drift * dt;
  std::vector<double> dW(n);
  for (std::size_t p = begin; p < end; ++p) {
    Mat g = g_init;
    for (int k = 0; k < steps; ++k) {
      for (int i = 0; i < n; ++i) dW[i] = sq * rng.normal(p, static_cast<std::uint64_t>(k) * n + i);
      obs.before_step(p, k, g, dW);
      Mat A = drift_dt;
      for (int i = 0; i < n; ++i) A += dW[i] * stp.E[i];
      g = (g * stp.expm(A)).eval();
      if (stp.compact && (k + 1) % kProjectEvery == 0) stp.project(g);
      if (!(g.cwiseAbs().maxCoeff() <= kBlowup))
        throw Error(Errc::numerical_blowup, "matrix norm exceeded 1e12 on path " + std::to_string(p));
      obs.after_step(p, k + 1, g);
    }
    obs.end_path(p, g);
  }
}

template <class F>
void dispatch_dim(int dim, F&& f) {
  switch (dim) {
    case 3: f(std::integral_constant<int, 3>{}); return;
    case 4: f(std::integral_constant<int, 4>{}); return;
    case 8: f(std::integral_constant<int, 8>{}); return;
    default: f(std::integral_constant<int, Eigen::Dynamic>{}); return;
  }
}

void check_config(const SimConfig& cfg) {
  if (!(cfg.t_final > 0.0) || cfg.steps < 1 || cfg.paths < 1 || cfg.record_stride < 0)
    throw Error(Errc::bad_param, "need t_final > 0, steps >= 1, paths >= 1, record_stride >= 0");
}

bool record_at(int k, int steps, int stride) { return k == 0 || k == steps || (stride > 0 && k % stride == 0); }

double entry_product(const Eigen::Ref<const Eigen::MatrixXd>& g, const std::vector<int>& idx, int dim, int skip1,
                     int skip2) {
  double v = 1.0;
  for (int m = 0; m < static_cast<int>(idx.size()); ++m)
    if (m != skip1 && m != skip2) v *= g(idx[m] / dim, idx[m] % dim);
  return v;
}

}  // namespace

double unitarity_defect(const Eigen::MatrixXd& g) {
  return (g.transpose() * g - Eigen::MatrixXd::Identity(g.cols(), g.cols())).cwiseAbs().maxCoeff();
}

bool compact_realization(const LieSRStructure& s) {
  if (!s.realization()) return false;
  for (const auto& e : s.realization()->realified())
    if ((e + e.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + e.cwiseAbs().maxCoeff())) return false;
  return true;
}

PathSample simulate_paths(const LieSRStructure& s, const ConnectionData& conn, const SimConfig& cfg,
                          const Eigen::MatrixXd& g0) {
  check_config(cfg);
  const Setup st = make_setup(s, conn);
  const Eigen::MatrixXd g_init = initial_state(st, g0);
  PathSample out;
  const double dt = cfg.t_final / cfg.steps;
  for (int k = 0; k <= cfg.steps; ++k)
    if (record_at(k, cfg.steps, cfg.record_stride)) out.times.push_back(k == cfg.steps ? cfg.t_final : k * dt);
  out.paths.assign(cfg.paths, {});
  if (cfg.store_increments) out.increments.assign(cfg.paths, Eigen::MatrixXd(cfg.steps, st.n));

  dispatch_dim(st.dim, [&](auto d) {
    constexpr int D = decltype(d)::value;
    using Mat = typename Stepper<D>::Mat;
    struct Recorder {
      PathSample* out;
      int steps, stride;
      bool increments;
      void before_step(std::size_t p, int k, const Mat& g, const std::vector<double>& dW) {
        if (k == 0) out->paths[p].emplace_back(g);
        if (increments)
          for (std::size_t i = 0; i < dW.size(); ++i) out->increments[p](k, static_cast<int>(i)) = dW[i];
      }
      void after_step(std::size_t p, int k, const Mat& g) {
        if (record_at(k, steps, stride)) out->paths[p].emplace_back(g);
      }
      void end_path(std::size_t, const Mat&) {}
    };

    parallel_for(
        cfg.paths,
        [&](std::size_t b, std::size_t e) {
          Recorder rec{&out, cfg.steps, cfg.record_stride, cfg.store_increments};
          run_paths<D>(st, cfg.t_final, cfg.steps, cfg.seed, g_init, b, e, rec);
        },
        cfg.threads);
  });
  if (st.compact)
    for (const auto& path : out.paths)
      for (const auto& g : path) out.max_group_defect = std::max(out.max_group_defect, unitarity_defect(g));
  return out;
}

PolynomialFunction::PolynomialFunction(std::string name, int dim, std::vector<Monomial> terms)
    : name_(std::move(name)), dim_(dim), terms_(std::move(terms)) {
  for (const auto& m : terms_)
    for (int idx : m.entries)
      if (idx < 0 || idx >= dim_ * dim_) throw Error(Errc::bad_param, "polynomial entry index out of range");
}

PolynomialFunction PolynomialFunction::named(std::string_view name, int dim) {
  auto at = [dim, name](int r, int c) {
    if (r >= dim || c >= dim)
      throw Error(Errc::bad_param, "function '" + std::string(name) + "' needs a larger matrix than " +
                                       std::to_string(dim));
    return r * dim + c;
  };
  const std::string nm(name);
  if (name == "one") return {nm, dim, {{1.0, {}}}};
  if (name == "x") return {nm, dim, {{1.0, {at(0, 1)}}}};
  if (name == "y") return {nm, dim, {{1.0, {at(1, 2)}}}};
  if (name == "z") return {nm, dim, {{1.0, {at(0, 2)}}}};
  if (name == "x2y2") return {nm, dim, {{1.0, {at(0, 1), at(0, 1)}}, {1.0, {at(1, 2), at(1, 2)}}}};
  if (name == "x4") return {nm, dim, {{1.0, {at(0, 1), at(0, 1), at(0, 1), at(0, 1)}}}};
  if (name == "z2") return {nm, dim, {{1.0, {at(0, 2), at(0, 2)}}}};
  if (name == "coef00") return {nm, dim, {{1.0, {at(0, 0)}}}};
  if (name.starts_with("entry:")) {
    const std::string_view rest = name.substr(6);
    const auto comma = rest.find(',');
    int r = -1, c = -1;
    if (comma != std::string_view::npos) {
      const auto pr = std::from_chars(rest.data(), rest.data() + comma, r);
      const auto pc = std::from_chars(rest.data() + comma + 1, rest.data() + rest.size(), c);
      if (pr.ec != std::errc() || pc.ec != std::errc() || pc.ptr != rest.data() + rest.size()) r = -1;
    }
    if (r < 0 || c < 0) throw Error(Errc::bad_param, "expected entry:ROW,COL, got '" + nm + "'");
    return {nm, dim, {{1.0, {at(r, c)}}}};
  }
  throw Error(Errc::bad_param, "unknown function '" + nm + "'");
}

double PolynomialFunction::operator()(const Eigen::Ref<const Eigen::MatrixXd>& g) const {
  double v = 0.0;
  for (const auto& m : terms_) v += m.coef * entry_product(g, m.entries, dim_, -1, -1);
  return v;
}

double PolynomialFunction::d1(const Eigen::Ref<const Eigen::MatrixXd>& g,
                              const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  double v = 0.0;
  for (const auto& m : terms_) {
    const int deg = static_cast<int>(m.entries.size());
    for (int k = 0; k < deg; ++k) v += m.coef * entry(X, m.entries[k]) * entry_product(g, m.entries, dim_, k, -1);
  }
  return v;
}

double PolynomialFunction::d2(const Eigen::Ref<const Eigen::MatrixXd>& g, const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const Eigen::Ref<const Eigen::MatrixXd>& Y) const {
  double v = 0.0;
  for (const auto& m : terms_) {
    const int deg = static_cast<int>(m.entries.size());
    for (int k = 0; k < deg; ++k)
      for (int l = 0; l < deg; ++l)
        if (k != l)
          v += m.coef * entry(X, m.entries[k]) * entry(Y, m.entries[l]) * entry_product(g, m.entries, dim_, k, l);
  }
  return v;
}

double exact_sublaplacian(const LieSRStructure& s, const ConnectionData& conn, const PolynomialFunction& f,
                          const Eigen::MatrixXd& g) {
  const Setup st = make_setup(s, conn);
  if (f.dim() != st.dim) throw Error(Errc::dimension_mismatch, "function dimension does not match the realization");
  double v = 0.0;
  for (int i = 0; i < st.n; ++i) {
    const Eigen::MatrixXd gE = g * st.E[i];
    v += f.d2(g, gE, gE) + f.d1(g, gE * st.E[i]) + conn.drift[i] * f.d1(g, gE);
  }
  return v;
}

double apply_sublaplacian_numeric(const LieSRStructure& s, const ConnectionData& conn,
                                  const std::function<double(const Eigen::MatrixXd&)>& f, const Eigen::MatrixXd& g0,
                                  double h) {
  if (!(h > 0.0 && h <= 0.1)) throw Error(Errc::bad_param, "step h must lie in (0, 0.1]");
  const Setup st = make_setup(s, conn);
  const Eigen::MatrixXd g = initial_state(st, g0);
  const double f0 = f(g);
  double v = 0.0;
  for (int i = 0; i < st.n; ++i) {
    const Eigen::MatrixXd A = h * st.E[i];
    const Eigen::MatrixXd Am = -A;
    const double fp = f(g * A.exp()), fm = f(g * Am.exp());
    v += (fp - 2.0 * f0 + fm) / (h * h) + conn.drift[i] * (fp - fm) / (2.0 * h);
  }
  return v;
}

MCEstimate estimate_expectation(const LieSRStructure& s, const ConnectionData& conn, const SimConfig& cfg,
                                const PolynomialFunction& f, const Eigen::MatrixXd& g0, bool control_variates) {
  check_config(cfg);
  const Setup st = make_setup(s, conn);
  if (f.dim() != st.dim) throw Error(Errc::dimension_mismatch, "function dimension does not match the realization");
  const Eigen::MatrixXd g_init = initial_state(st, g0);
  std::vector<double> values(cfg.paths);
  const double dt = cfg.t_final / cfg.steps;

  dispatch_dim(st.dim, [&](auto d) {
    constexpr int D = decltype(d)::value;
    using Mat = typename Stepper<D>::Mat;
    std::vector<Mat> E, EE;
    for (int i = 0; i < st.n; ++i) E.emplace_back(st.E[i]);
    for (int i = 0; i < st.n; ++i)
      for (int j = 0; j < st.n; ++j) EE.emplace_back(st.E[i] * st.E[j]);

    struct Observer {
      const PolynomialFunction* f;
      const std::vector<Mat>* E;
      const std::vector<Mat>* EE;
      std::vector<double>* values;
      bool cv;
      double dt;
      double acc = 0.0;
      std::vector<Mat> gE;
      void before_step(std::size_t, int k, const Mat& g, const std::vector<double>& dW) {
        if (k == 0) acc = 0.0;
        if (!cv) return;
        const int n = static_cast<int>(dW.size());
        gE.resize(n);
        for (int i = 0; i < n; ++i) {
          gE[i] = g * (*E)[i];
          acc += f->d1(g, gE[i]) * dW[i];
        }
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double w = dW[i] * dW[j] - (i == j ? dt : 0.0);
            const Mat gEE = g * (*EE)[i * n + j];
            acc += 0.5 * (f->d2(g, gE[i], gE[j]) + f->d1(g, gEE)) * w;
          }
      }
      void after_step(std::size_t, int, const Mat&) {}
      void end_path(std::size_t p, const Mat& g) { (*values)[p] = (*f)(g)-acc; }
    };

    parallel_for(
        cfg.paths,
        [&](std::size_t b, std::size_t e) {
          Observer obs{&f, &E, &EE, &values, control_variates, dt};
          run_paths<D>(st, cfg.t_final, cfg.steps, cfg.seed, g_init, b, e, obs);
        },
        cfg.threads);
  });

  MCEstimate est;
  est.paths = cfg.paths;
  est.mean = pairwise_sum(values) / static_cast<double>(cfg.paths);
  if (cfg.paths > 1) {
    std::vector<double> sq(cfg.paths);
    for (std::size_t p = 0; p < cfg.paths; ++p) sq[p] = (values[p] - est.mean) * (values[p] - est.mean);
    const double var = pairwise_sum(sq) / static_cast<double>(cfg.paths - 1);
    est.std_error = std::sqrt(var / static_cast<double>(cfg.paths));
  }
  return est;
}

ConsistencyReport generator_consistency(const LieSRStructure& s, const ConnectionData& conn, const SimConfig& cfg,
                                        const PolynomialFunction& f, const Eigen::MatrixXd& g0) {
  check_config(cfg);
  const Setup st = make_setup(s, conn);
  const Eigen::MatrixXd g = initial_state(st, g0);
  ConsistencyReport rep;
  rep.f0 = f(g);
  rep.lf0 = exact_sublaplacian(s, conn, f, g);
  rep.l2f0 = apply_sublaplacian_numeric(
      s, conn, [&](const Eigen::MatrixXd& x) { return exact_sublaplacian(s, conn, f, x); }, g, 1e-3);
  const double T = cfg.t_final;
  const double scale = 1.0 + std::abs(rep.f0) + std::abs(T * rep.lf0);
  const double floor = 1e-12 * scale;

  for (int m = 0; m < 4; ++m) {
    SimConfig c = cfg;
    c.t_final = T / std::pow(2.0, m);
    const MCEstimate est = estimate_expectation(s, conn, c, f, g, true);
    ConsistencyPoint pt;
    pt.t = c.t_final;
    pt.mean = est.mean;
    pt.std_error = est.std_error;
    pt.residual = est.mean - rep.f0 - 0.5 * pt.t * rep.lf0;
    pt.resolved = std::abs(pt.residual) > 3.0 * pt.std_error + floor;
    rep.points.push_back(pt);
  }

  const ConsistencyPoint& big = rep.points.front();
  const double q = T * T / 8.0 * std::abs(rep.l2f0);
  if (big.std_error > 0.1 * std::max(q, std::abs(big.residual)) + floor)
    throw Error(Errc::insufficient_paths, "standard error " + std::to_string(big.std_error) +
                                              " cannot resolve the t^2 term (" + std::to_string(q) + ")");

  // weighted least squares for r = a t^2
  double num = 0.0, den = 0.0;
  for (const auto& pt : rep.points) {
    const double w = 1.0 / (pt.std_error * pt.std_error + floor * floor);
    num += w * pt.residual * pt.t * pt.t;
    den += w * std::pow(pt.t, 4);
  }
  rep.t2_coef = num / den;
  const ConsistencyPoint& small = rep.points.back();
  rep.model_deviation = std::abs(small.residual - rep.t2_coef * small.t * small.t);
  const bool model_ok = rep.model_deviation <= 3.0 * small.std_error + floor;

  std::vector<const ConsistencyPoint*> res;
  for (const auto& pt : rep.points)
    if (pt.resolved) res.push_back(&pt);
  const bool negligible = std::abs(rep.l2f0) <= 1e-6 * (1.0 + std::abs(rep.f0) + std::abs(rep.lf0));
  if (res.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto* pt : res) {
      const double x = std::log(pt->t), y = std::log(std::abs(pt->residual));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(res.size());
    rep.exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    rep.passed = rep.exponent >= 1.7 && model_ok;
  } else if (negligible) {
    rep.exponent = std::numeric_limits<double>::infinity();
    rep.vanishing_remainder = true;
    rep.passed = res.empty();
  } else {
    throw Error(Errc::insufficient_paths, "the t^2 term is resolved at fewer than two horizons");
  }
  return rep;
}

void write_paths_csv(std::ostream& os, const PathSample& sample, std::size_t max_paths) {
  const std::size_t count = std::min(max_paths, sample.paths.size());
  const int dim = sample.paths.empty() || sample.paths[0].empty() ? 0 : static_cast<int>(sample.paths[0][0].rows());
  os << "time,path_id";
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) os << ",g" << r << '_' << c;
  os << '\n';
  os << std::setprecision(17);
  for (std::size_t p = 0; p < count; ++p)
    for (std::size_t k = 0; k < sample.paths[p].size(); ++k) {
      os << sample.times[k] << ',' << p;
      const Eigen::MatrixXd& g = sample.paths[p][k];
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) os << ',' << g(r, c);
      os << '\n';
    }
}

}  // namespace srcd
