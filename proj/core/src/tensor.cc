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

#include "plm/tensor.h"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace plm {

void Matrix::SetZero() { std::fill(data_.begin(), data_.end(), 0.0); }

Matrix MatMul(const Matrix &a, const Matrix &b) {
  assert(a.cols() == b.rows());
  Matrix out(a.rows(), b.cols());
  const int m = b.cols();
  for (int i = 0; i < a.rows(); ++i) {
    double *dst = out.row(i);
    const double *src = a.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const double scale = src[k];
      const double *brow = b.row(k);
      for (int j = 0; j < m; ++j) dst[j] += scale * brow[j];
    }
  }
  return out;
}

Matrix MatMulTransB(const Matrix &a, const Matrix &b) {
  assert(a.cols() == b.cols());
  Matrix out(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.rows(); ++j) {
      out(i, j) = Dot(a.row_span(i), b.row_span(j));
    }
  }
  return out;
}

void AddMatMulTransA(const Matrix &a, const Matrix &b, Matrix *out) {
  assert(a.rows() == b.rows());
  assert(out->rows() == a.cols() && out->cols() == b.cols());
  const int m = b.cols();
  for (int r = 0; r < a.rows(); ++r) {
    const double *arow = a.row(r);
    const double *brow = b.row(r);
    for (int k = 0; k < a.cols(); ++k) {
      const double scale = arow[k];
      if (scale == 0.0) continue;
      double *dst = out->row(k);
      for (int j = 0; j < m; ++j) dst[j] += scale * brow[j];
    }
  }
}

void AddRowBias(const Matrix &bias, Matrix *m) {
  assert(bias.rows() == 1 && bias.cols() == m->cols());
  const double *b = bias.row(0);
  for (int r = 0; r < m->rows(); ++r) {
    double *dst = m->row(r);
    for (int c = 0; c < m->cols(); ++c) dst[c] += b[c];
  }
}

void AddColumnSums(const Matrix &m, Matrix *out) {
  assert(out->rows() == 1 && out->cols() == m.cols());
  double *dst = out->row(0);
  for (int r = 0; r < m.rows(); ++r) {
    const double *src = m.row(r);
    for (int c = 0; c < m.cols(); ++c) dst[c] += src[c];
  }
}

void AddInPlace(const Matrix &b, Matrix *a) {
  assert(a->rows() == b.rows() && a->cols() == b.cols());
  std::span<double> dst = a->values();
  std::span<const double> src = b.values();
  for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

bool AllFinite(const Matrix &m) {
  for (double v : m.values()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace plm
