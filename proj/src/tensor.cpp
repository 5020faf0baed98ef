#include "nfgcover/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "nfgcover/error.hpp"

namespace nfgcover {

namespace {

std::size_t product(const std::vector<int>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

DenseTensor::DenseTensor(std::vector<int> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  for (int s : shape_) {
    if (s <= 0) {
      throw Error(ErrorKind::InvalidTensor,
                  "shape entries must be positive, got " + std::to_string(s));
    }
  }
  if (values_.size() != product(shape_)) {
    throw Error(ErrorKind::InvalidTensor,
                "expected " + std::to_string(product(shape_)) + " values, got " +
                    std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidTensor, "non-finite tensor value");
    }
  }
}

DenseTensor DenseTensor::zeros(std::vector<int> shape) {
  const std::size_t n = product(shape);
  return DenseTensor(std::move(shape), std::vector<double>(n, 0.0));
}

std::size_t DenseTensor::offset(std::span<const int> index) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    flat = flat * static_cast<std::size_t>(shape_[k]) +
           static_cast<std::size_t>(index[k]);
  }
  return flat;
}

std::vector<int> DenseTensor::unravel(std::size_t flat) const {
  std::vector<int> index(shape_.size());
  for (std::size_t k = shape_.size(); k-- > 0;) {
    index[k] = static_cast<int>(flat % static_cast<std::size_t>(shape_[k]));
    flat /= static_cast<std::size_t>(shape_[k]);
  }
  return index;
}

double DenseTensor::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool DenseTensor::all_binary() const {
  return std::all_of(shape_.begin(), shape_.end(),
                     [](int s) { return s == 2; });
}

DenseTensor DenseTensor::transpose(std::span<const int> order) const {
  std::vector<int> new_shape(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    new_shape[k] = shape_[static_cast<std::size_t>(order[k])];
  }
  DenseTensor out = zeros(new_shape);
  std::vector<int> src(shape_.size());
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const std::vector<int> dst = out.unravel(flat);
    for (std::size_t k = 0; k < order.size(); ++k) {
      src[static_cast<std::size_t>(order[k])] = dst[k];
    }
    out.values_[flat] = at(src);
  }
  return out;
}

}  // namespace nfgcover
