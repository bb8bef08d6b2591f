#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "srcd/cdcore.hpp"
#include "srcd/connection.hpp"
#include "srcd/invariants.hpp"
#include "srcd/liealg.hpp"
#include "srcd/rng.hpp"

namespace srcd::test {

inline const std::vector<std::string>& catalog() {
  static const std::vector<std::string> names = {"free-step2:n=2", "free-step2:n=3", "free-step2:n=4",
                                                 "su2-double-v1",  "su2-double-v2",  "sl2c",
                                                 "su2-hopf",       "heisenberg"};
  return names;
}

// Normalized structure in its orthonormal frame, with connection and constants.
struct Analyzed {
  LieSRStructure s;
  ConnectionData conn;
  CDConstants k;
};

inline Analyzed analyze(const LieSRStructure& raw, bool normalize = true) {
  LieSRStructure s = adapted_orthonormal_frame(normalize ? normalize_vertical(raw) : raw);
  ConnectionData conn = compute_connection(s);
  CDConstants k = cd_constants(conn);
  return {std::move(s), std::move(conn), std::move(k)};
}

inline Analyzed analyze(const std::string& spec, bool normalize = true) {
  return analyze(build_example(spec), normalize);
}

// Random orthogonal matrix from the QR factorization of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(int d, const CounterRng& rng, std::uint64_t stream) {
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d * d; ++i) g(i / d, i % d) = rng.normal(stream, i);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

inline Eigen::MatrixXd block_diag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

inline std::string label(std::string s) {
  for (auto& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
  return s;
}

}  // namespace srcd::test
