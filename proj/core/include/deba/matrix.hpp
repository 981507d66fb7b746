#pragma once

#include <cstddef>
#include <vector>

namespace deba {

// Dense row-major matrix of doubles. The only matrix type that appears in
// public interfaces; linear-algebra backends stay behind the .cpp files.
class RealMatrix {
 public:
  RealMatrix() = default;  // empty 0x0, only valid as a placeholder
  RealMatrix(int rows, int cols);  // zero-filled; throws InvalidInput if < 1

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) {
    return data_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                 static_cast<std::size_t>(c)];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                 static_cast<std::size_t>(c)];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  bool same_shape(const RealMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  static RealMatrix identity(int n);

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

bool all_finite(const RealMatrix& m);
double frobenius_norm(const RealMatrix& m);
double max_abs_diff(const RealMatrix& a, const RealMatrix& b);

}  // namespace deba
