#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "idecode/errors.hpp"

namespace idecode {

// Dense shaped array of doubles, row-major. Every element is finite;
// construction through make_tensor enforces this.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> data;

  std::int64_t size() const {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }

  std::int64_t rows() const { return shape.at(0); }
  std::int64_t cols() const { return shape.at(1); }

  double& at(std::int64_t r, std::int64_t c) { return data[r * cols() + c]; }
  double at(std::int64_t r, std::int64_t c) const { return data[r * cols() + c]; }

  Eigen::Map<const Eigen::VectorXd> vec() const {
    return {data.data(), static_cast<Eigen::Index>(data.size())};
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
  mat() const {
    return {data.data(), static_cast<Eigen::Index>(rows()),
            static_cast<Eigen::Index>(cols())};
  }

  bool operator==(const Tensor&) const = default;
};

// Validates shape/data consistency and finiteness.
// Throws ShapeMismatch or NonFinite.
Tensor make_tensor(std::vector<std::int64_t> shape, std::vector<double> data);

Tensor make_vector(std::vector<double> data);

// Disjoint data splits; calibration must be nonempty before p-values exist.
struct DatasetSplit {
  std::vector<Tensor> proper_training;
  std::vector<Tensor> calibration;
  std::vector<Tensor> held_out;
};

}  // namespace idecode
