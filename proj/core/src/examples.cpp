#include <cmath>
#include <complex>
#include <set>
#include <sstream>

#include "srcd/error.hpp"
#include "srcd/liealg.hpp"

namespace srcd {

namespace {

using CMat = Eigen::MatrixXcd;

// spin-1/2 generators A_a = -i sigma_a / 2, so [A_x, A_y] = A_z cyclically
std::array<CMat, 3> su2_fundamental() {
  const std::complex<double> I(0.0, 1.0);
  CMat sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -I, I, 0;
  sz << 1, 0, 0, -1;
  return {-0.5 * I * sx, -0.5 * I * sy, -0.5 * I * sz};
}

CMat block_diag(const CMat& a, const CMat& b) {
  CMat m = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

MatrixRealization complex_realization(const std::vector<CMat>& gens) {
  MatrixRealization r;
  r.dim = static_cast<int>(gens.front().rows());
  r.field = Field::complex;
  for (const auto& g : gens) {
    r.re.push_back(g.real());
    r.im.push_back(g.imag());
  }
  return r;
}

LieSRStructure from_realization(std::string name, int n, int nu, MatrixRealization r, Eigen::MatrixXd gram_h,
                                Eigen::MatrixXd gram_v) {
  Tensor3 c = constants_from_realization(r);
  return LieSRStructure(std::move(name), n, nu, std::move(c), std::move(gram_h), std::move(gram_v), std::move(r));
}

double take_param(std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

std::string fmt_param(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

LieSRStructure free_step2(int n) {
  const int nu = n * (n - 1) / 2;
  const int N = n + nu;
  Tensor3 c({N, N, N});
  int idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b, ++idx) {
      c(a, b, n + idx) = 1.0;
      c(b, a, n + idx) = -1.0;
    }
  // vertical Gram scaled by 1/(n-1) so that M_R = 1
  return LieSRStructure("free-step2(n=" + std::to_string(n) + ")", n, nu, std::move(c),
                        Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(nu, nu) / (n - 1));
}

LieSRStructure su2_double(double rho, int variant) {
  const double k = std::sqrt(2.0 * rho);
  const auto A = su2_fundamental();
  const CMat Z = CMat::Zero(2, 2);
  std::vector<CMat> gens;
  for (int i = 0; i < 3; ++i) gens.push_back(block_diag(k * A[i], 2.0 * k * A[i]));
  for (int i = 0; i < 3; ++i)
    gens.push_back(variant == 1 ? block_diag(Z, k * A[i]) : block_diag(k * A[i], Z));
  const double scale = variant == 1 ? 1.0 / (16.0 * rho) : 1.0 / (4.0 * rho);
  return from_realization("su2-double-v" + std::to_string(variant) + "(rho=" + fmt_param(rho) + ")", 3, 3,
                          complex_realization(gens), Eigen::MatrixXd::Identity(3, 3),
                          scale * Eigen::MatrixXd::Identity(3, 3));
}

LieSRStructure su2_hopf(double rho) {
  const double k = std::sqrt(2.0 * rho);
  const auto A = su2_fundamental();
  std::vector<CMat> gens{k * A[0], k * A[1], k * A[2]};
  // ||X_3||^2 = 1/(2 rho) makes R(X_1, X_2) a unit vertical vector
  return from_realization("su2-hopf(rho=" + fmt_param(rho) + ")", 2, 1, complex_realization(gens),
                          Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Constant(1, 1, 1.0 / (2.0 * rho)));
}

LieSRStructure sl2c() {
  const std::complex<double> I(0.0, 1.0);
  const auto A = su2_fundamental();
  std::vector<CMat> gens{I * A[0], I * A[1], I * A[2], A[2], A[0], A[1]};
  // iA, iB, iC, C, sqrt2 A, sqrt2 B orthonormal
  return from_realization("sl2c", 4, 2, complex_realization(gens), Eigen::MatrixXd::Identity(4, 4),
                          0.5 * Eigen::MatrixXd::Identity(2, 2));
}

LieSRStructure heisenberg() {
  MatrixRealization r;
  r.dim = 3;
  r.field = Field::real;
  for (auto [row, col] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(3, 3);
    e(row, col) = 1.0;
    r.re.push_back(e);
  }
  return from_realization("heisenberg", 2, 1, std::move(r), Eigen::MatrixXd::Identity(2, 2),
                          Eigen::MatrixXd::Identity(1, 1));
}

}  // namespace

ExampleName parse_example_name(std::string_view name) {
  if (name == "free-step2") return ExampleName::free_step2;
  if (name == "su2-double-v1") return ExampleName::su2_double_v1;
  if (name == "su2-double-v2") return ExampleName::su2_double_v2;
  if (name == "sl2c") return ExampleName::sl2c;
  if (name == "su2-hopf") return ExampleName::su2_hopf;
  if (name == "heisenberg") return ExampleName::heisenberg;
  throw Error(Errc::unknown_example, "unknown example '" + std::string(name) + "'");
}

std::string_view example_name(ExampleName name) {
  switch (name) {
    case ExampleName::free_step2: return "free-step2";
    case ExampleName::su2_double_v1: return "su2-double-v1";
    case ExampleName::su2_double_v2: return "su2-double-v2";
    case ExampleName::sl2c: return "sl2c";
    case ExampleName::su2_hopf: return "su2-hopf";
    case ExampleName::heisenberg: return "heisenberg";
  }
  return "";
}

LieSRStructure build_example(ExampleName name, const std::map<std::string, double>& params_in) {
  auto params = params_in;
  auto finish = [&](LieSRStructure s) {
    if (!params.empty())
      throw Error(Errc::bad_param, "unknown parameter '" + params.begin()->first + "' for " +
                                       std::string(example_name(name)));
    return s;
  };
  switch (name) {
    case ExampleName::free_step2: {
      const double n = take_param(params, "n", 2.0);
      if (n < 2 || n != std::floor(n) || n > 12) throw Error(Errc::bad_param, "free-step2 needs integer 2 <= n <= 12");
      return finish(free_step2(static_cast<int>(n)));
    }
    case ExampleName::su2_double_v1:
    case ExampleName::su2_double_v2:
    case ExampleName::su2_hopf: {
      const double rho = take_param(params, "rho", 1.0);
      if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(Errc::bad_param, "rho must be positive");
      if (name == ExampleName::su2_hopf) return finish(su2_hopf(rho));
      return finish(su2_double(rho, name == ExampleName::su2_double_v1 ? 1 : 2));
    }
    case ExampleName::sl2c:
      return finish(sl2c());
    case ExampleName::heisenberg:
      return finish(heisenberg());
  }
  throw Error(Errc::unknown_example, "unknown example");
}

LieSRStructure build_example(std::string_view spec) {
  const auto colon = spec.find(':');
  const ExampleName name = parse_example_name(spec.substr(0, colon));
  std::map<std::string, double> params;
  if (colon != std::string_view::npos) {
    std::string rest(spec.substr(colon + 1));
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw Error(Errc::bad_param, "malformed parameter '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != val.size() || val.empty()) throw Error(Errc::bad_param, "parameter '" + key + "' is not a number");
      if (params.count(key)) throw Error(Errc::bad_param, "duplicate parameter '" + key + "'");
      params[key] = v;
    }
  }
  return build_example(name, params);
}

}  // namespace srcd
