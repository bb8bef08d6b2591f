#pragma once

#include <optional>

#include <Eigen/Dense>

#include "srcd/connection.hpp"
#include "srcd/liealg.hpp"

namespace srcd {

struct RicciHorizontal {
  Eigen::MatrixXd ric_h;  // N x N, symmetric
  double rho_H = 0.0;
};

struct RicciHV {
  Eigen::MatrixXd ric_hv;      // N x N, symmetric
  std::optional<double> M_HV;  // nullopt: unbounded (a pure block is not PSD)
};

struct CurvatureConstants {
  double M_R = 0.0;
  double m_R = 0.0;
};

struct NablaVConstants {
  double M_nabla_v = 0.0;
  std::optional<double> rho_delta_v;  // nullopt: -infinity
};

struct CDConstants {
  int n = 0;
  int nu = 0;
  double M_R = 0.0;
  double m_R = 0.0;
  double rho_H = 0.0;
  std::optional<double> M_HV;
  double M_nabla_v = 0.0;
  std::optional<double> rho_delta_v;
  Eigen::MatrixXd ric_h;
  Eigen::MatrixXd ric_hv;
};

RicciHorizontal ricci_horizontal(const ConnectionData& conn);
RicciHV ricci_hv(const ConnectionData& conn);
CurvatureConstants curvature_constants(const ConnectionData& conn);
NablaVConstants nabla_v_constants(const ConnectionData& conn);
CDConstants cd_constants(const ConnectionData& conn);

// sum_{i<j, s} R[i][j][s]^2
double curvature_norm_squared(const ConnectionData& conn);

// gram_v scaled by M_R^-2. The structure may be in any adapted basis; conn
// must belong to its orthonormal frame.
LieSRStructure normalize_vertical(const LieSRStructure& s, const ConnectionData& conn);
LieSRStructure normalize_vertical(const LieSRStructure& s);

struct PrivilegedMetric {
  double b = 0.0;
  Eigen::MatrixXd psi_gram;   // vertical Gram induced through the bracket map
  LieSRStructure structure;   // gram_v = psi_gram / b^2
};

PrivilegedMetric privileged_step2(const LieSRStructure& s);

}  // namespace srcd
