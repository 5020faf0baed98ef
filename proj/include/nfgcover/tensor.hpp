#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nfgcover {

/// Dense real array holding the value table of one local function.
///
/// Layout is row-major with the first argument varying slowest, so for a
/// binary degree-3 function the storage index of f(a1,a2,a3) is
/// 4*a1 + 2*a2 + a3.
class DenseTensor {
 public:
  DenseTensor() = default;
  /// Throws Error(InvalidTensor) when the shape has a non-positive entry,
  /// values.size() differs from the shape product, or a value is not finite.
  DenseTensor(std::vector<int> shape, std::vector<double> values);

  /// All-zero tensor of the given shape.
  static DenseTensor zeros(std::vector<int> shape);

  const std::vector<int>& shape() const noexcept { return shape_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t arity() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return values_.size(); }

  std::size_t offset(std::span<const int> index) const;
  double at(std::span<const int> index) const { return values_[offset(index)]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  void set(std::span<const int> index, double v) { values_[offset(index)] = v; }
  void set_flat(std::size_t flat, double v) { values_[flat] = v; }

  /// Decodes a flat index into per-axis symbols.
  std::vector<int> unravel(std::size_t flat) const;

  double max_abs() const;
  bool all_binary() const;

  /// Permutes axes: result axis k is this tensor's axis order[k].
  DenseTensor transpose(std::span<const int> order) const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  std::vector<int> shape_;
  std::vector<double> values_;
};

}  // namespace nfgcover
