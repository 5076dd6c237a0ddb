// Copyright 2026 The PLM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PLM_TENSOR_H_
#define PLM_TENSOR_H_

#include <span>
#include <vector>

namespace plm {

// Dense row-major matrix of doubles. Products accumulate each output element
// over the inner dimension in a fixed order, so row i of a product depends
// only on row i of the left operand and never on the other rows.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double &operator()(int r, int c) {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  double *row(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const double *row(int r) const {
    return data_.data() + static_cast<size_t>(r) * cols_;
  }
  std::span<double> row_span(int r) { return {row(r), static_cast<size_t>(cols_)}; }
  std::span<const double> row_span(int r) const {
    return {row(r), static_cast<size_t>(cols_)};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void SetZero();
  Matrix ZerosLike() const { return Matrix(rows_, cols_); }

  friend bool operator==(const Matrix &, const Matrix &) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// a (n x k) * b (k x m).
Matrix MatMul(const Matrix &a, const Matrix &b);
// a (n x k) * b^T, b is (m x k).
Matrix MatMulTransB(const Matrix &a, const Matrix &b);
// out += a^T * b, a is (n x k), b is (n x m), out is (k x m).
void AddMatMulTransA(const Matrix &a, const Matrix &b, Matrix *out);
// Adds the 1 x cols `bias` to every row.
void AddRowBias(const Matrix &bias, Matrix *m);
// out(0, c) += sum over rows of m(r, c).
void AddColumnSums(const Matrix &m, Matrix *out);
// a += b.
void AddInPlace(const Matrix &b, Matrix *a);

double Dot(std::span<const double> a, std::span<const double> b);

bool AllFinite(const Matrix &m);

}  // namespace plm

#endif  // PLM_TENSOR_H_
