#pragma once

#include <cstddef>
#include <vector>

#include "lossypdc/simd/dispatch.hpp"

namespace lossypdc::simd {

// Dense row-major complex matrix in split (planar) layout.
class SplitMatrix {
 public:
  SplitMatrix() = default;
  SplitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), re_(rows * cols, 0.0), im_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return re_.size(); }

  double& re(std::size_t i, std::size_t j) { return re_[i * cols_ + j]; }
  double& im(std::size_t i, std::size_t j) { return im_[i * cols_ + j]; }
  double re(std::size_t i, std::size_t j) const { return re_[i * cols_ + j]; }
  double im(std::size_t i, std::size_t j) const { return im_[i * cols_ + j]; }

  ConstSplit view() const { return {re_.data(), im_.data()}; }
  MutSplit span() { return {re_.data(), im_.data()}; }

  const std::vector<double>& real_plane() const { return re_; }
  const std::vector<double>& imag_plane() const { return im_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> re_;
  std::vector<double> im_;
};

}  // namespace lossypdc::simd
