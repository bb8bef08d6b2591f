#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "srcd/tensor.hpp"

namespace srcd {

enum class Field { real, complex };

// Matrices realizing the basis. Complex matrices are stored as (re, im)
// pairs; `im` is empty for real realizations.
struct MatrixRealization {
  int dim = 0;
  Field field = Field::real;
  std::vector<Eigen::MatrixXd> re;
  std::vector<Eigen::MatrixXd> im;

  int realified_dim() const { return field == Field::complex ? 2 * dim : dim; }
  // Complex X = A + iB becomes [[A, -B], [B, A]].
  Eigen::MatrixXd realified(int k) const;
  std::vector<Eigen::MatrixXd> realified() const;
  // New generators E'_i = sum_a T(a, i) E_a.
  MatrixRealization transformed(const Eigen::MatrixXd& T) const;
};

// New basis e'_i = sum_a to_new(a, i) e_a; to_old is its inverse.
struct FrameChange {
  Eigen::MatrixXd to_new;
  Eigen::MatrixXd to_old;
};

class LieSRStructure {
 public:
  LieSRStructure(std::string name, int n, int nu, Tensor3 c, Eigen::MatrixXd gram_h,
                 Eigen::MatrixXd gram_v, std::optional<MatrixRealization> realization = std::nullopt,
                 std::optional<FrameChange> frame_change = std::nullopt);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int nu() const { return nu_; }
  int dim() const { return n_ + nu_; }
  bool horizontal(int i) const { return i < n_; }

  double c(int i, int j, int k) const { return c_(i, j, k); }
  const Tensor3& constants() const { return c_; }
  const Eigen::MatrixXd& gram_h() const { return gram_h_; }
  const Eigen::MatrixXd& gram_v() const { return gram_v_; }
  Eigen::MatrixXd gram() const;
  const std::optional<MatrixRealization>& realization() const { return realization_; }
  const std::optional<FrameChange>& frame_change() const { return frame_change_; }

  // [u, v] for coordinate vectors in this basis
  Eigen::VectorXd bracket(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

  LieSRStructure with_gram_v(Eigen::MatrixXd gram_v) const;
  LieSRStructure with_name(std::string name) const;

 private:
  std::string name_;
  int n_;
  int nu_;
  Tensor3 c_;
  Eigen::MatrixXd gram_h_;
  Eigen::MatrixXd gram_v_;
  std::optional<MatrixRealization> realization_;
  std::optional<FrameChange> frame_change_;
};

// Structure constants in the basis e'_i = sum_a T(a,i) e_a.
Tensor3 transform_constants(const Tensor3& c, const Eigen::MatrixXd& T);

// Same algebra and splitting, expressed in a new basis adapted to the
// splitting. T must be block diagonal (H block, V block).
LieSRStructure change_basis(const LieSRStructure& s, const Eigen::MatrixXd& T);

struct GrowthFlag {
  std::vector<int> dims;
  std::optional<int> step;
  bool bracket_generating = false;
};

struct ValidationCheck {
  std::string name;
  bool passed = true;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  GrowthFlag growth;

  bool ok() const;
  const ValidationCheck* first_failure() const;
};

GrowthFlag growth_flag(const LieSRStructure& s);
ValidationReport validate_structure(const LieSRStructure& s);

bool is_orthonormal(const LieSRStructure& s, double tol = 1e-12);
LieSRStructure adapted_orthonormal_frame(const LieSRStructure& s);

// Symmetric inverse square root; throws NotPositiveDefinite.
Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& g, std::string_view what);

enum class ExampleName { free_step2, su2_double_v1, su2_double_v2, sl2c, su2_hopf, heisenberg };

ExampleName parse_example_name(std::string_view name);
std::string_view example_name(ExampleName name);

LieSRStructure build_example(ExampleName name, const std::map<std::string, double>& params = {});
// "name" or "name:key=value,key=value", e.g. "su2-double-v2:rho=1"
LieSRStructure build_example(std::string_view spec);

// Structure constants of the span of the given realization matrices
// (must be closed under commutators).
Tensor3 constants_from_realization(const MatrixRealization& r);

}  // namespace srcd
