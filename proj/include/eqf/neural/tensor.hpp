#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace eqf::nn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

// Dense row-major tensor.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    // Views a rank-2 tensor (or a rank-1 tensor as a column) as an Eigen matrix.
    MatrixMap matrix();
    ConstMatrixMap matrix() const;
    VectorMap vector() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }
    ConstVectorMap vector() const { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }

    void fill(double v);
    Tensor reshaped(std::vector<std::size_t> shape) const;
    bool all_finite() const noexcept;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::size_t shape_size(const std::vector<std::size_t>& shape) noexcept;

}  // namespace eqf::nn
