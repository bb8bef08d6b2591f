#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace srcd {

enum class Slot { co, contra };

// Dense component array of a tensor in a fixed frame. Indices are frame
// indices (horizontal block first); the valence records which slots are
// covariant.
template <std::size_t Rank>
class FrameTensor {
 public:
  FrameTensor() { dims_.fill(0); valence_.fill(Slot::co); }

  explicit FrameTensor(std::array<int, Rank> dims) : dims_(dims) {
    valence_.fill(Slot::co);
    std::size_t total = 1;
    for (int d : dims_) total *= static_cast<std::size_t>(d);
    data_.assign(total, 0.0);
  }

  FrameTensor(std::array<int, Rank> dims, std::array<Slot, Rank> valence)
      : FrameTensor(dims) { valence_ = valence; }

  template <typename... I>
  double& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <typename... I>
  double operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }

  int dim(std::size_t slot) const { return dims_[slot]; }
  const std::array<int, Rank>& dims() const { return dims_; }
  const std::array<Slot, Rank>& valence() const { return valence_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  bool same_shape(const FrameTensor& o) const { return dims_ == o.dims_; }

 private:
  std::size_t offset(std::array<int, Rank> idx) const {
    std::size_t off = 0;
    for (std::size_t s = 0; s < Rank; ++s) {
      assert(idx[s] >= 0 && idx[s] < dims_[s]);
      off = off * static_cast<std::size_t>(dims_[s]) + static_cast<std::size_t>(idx[s]);
    }
    return off;
  }

  std::array<int, Rank> dims_;
  std::array<Slot, Rank> valence_;
  std::vector<double> data_;
};

using Tensor3 = FrameTensor<3>;
using Tensor4 = FrameTensor<4>;

template <std::size_t Rank>
double max_abs_diff(const FrameTensor<Rank>& a, const FrameTensor<Rank>& b) {
  assert(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace srcd
