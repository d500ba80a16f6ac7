#include "eqf/neural/tensor.hpp"

#include "eqf/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace eqf::nn {

std::size_t shape_size(const std::vector<std::size_t>& shape) noexcept {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_size(shape_) != data_.size()) throw Error(Errc::ShapeMismatch, "tensor data does not match shape");
}

MatrixMap Tensor::matrix() {
    const auto rows = static_cast<Eigen::Index>(shape_.empty() ? 0 : shape_[0]);
    const auto cols = static_cast<Eigen::Index>(shape_.size() >= 2 ? size() / shape_[0] : 1);
    return {data_.data(), rows, cols};
}

ConstMatrixMap Tensor::matrix() const {
    const auto rows = static_cast<Eigen::Index>(shape_.empty() ? 0 : shape_[0]);
    const auto cols = static_cast<Eigen::Index>(shape_.size() >= 2 ? size() / shape_[0] : 1);
    return {data_.data(), rows, cols};
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
    if (shape_size(shape) != size()) throw Error(Errc::ShapeMismatch, "reshape changes element count");
    return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace eqf::nn
