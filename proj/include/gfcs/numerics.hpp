/*
 * Copyright 2026 The gfcs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gfcs/error.hpp"

namespace gfcs {

using Vector = std::vector<double>;
using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

// Image-like shape. Flattening is row-major over (row, column, channel):
// index(r, c, k) = (r * width + c) * channels + k. A flat vector of length n
// has shape {1, 1, n}.
struct Shape {
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t channels = 1;

  std::size_t size() const { return height * width * channels; }
  std::size_t index(std::size_t r, std::size_t c, std::size_t k) const {
    return (r * width + c) * channels + k;
  }
  bool is_flat() const { return height == 1 && width == 1; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

Shape flat_shape(std::size_t n);

struct Grid {
  Shape shape;
  Vector values;

  Grid() = default;
  Grid(Shape s, Vector v);
  explicit Grid(Shape s, double fill = 0.0);

  double& at(std::size_t r, std::size_t c, std::size_t k) {
    return values[shape.index(r, c, k)];
  }
  double at(std::size_t r, std::size_t c, std::size_t k) const {
    return values[shape.index(r, c, k)];
  }
};

// ---- vector primitives ----------------------------------------------------

bool all_finite(ConstSpan v);
void require_finite(ConstSpan v, const char* what);

double dot(ConstSpan a, ConstSpan b);
double l2_norm(ConstSpan v);
double l2_distance(ConstSpan a, ConstSpan b);

// y += a * x
void axpy(double a, ConstSpan x, MutSpan y);
void scale(MutSpan v, double a);
Vector add_scaled(ConstSpan x, double a, ConstSpan q);

// Normalizes in place and returns the original norm. Leaves v untouched if
// its norm is zero.
double normalize(MutSpan v);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(ConstSpan v);
// Largest entry excluding `skip`; ties go to the lowest index.
std::size_t argmax_excluding(ConstSpan v, std::size_t skip);

// Euclidean projection of x onto the ball of radius nu centred on center.
Vector project_to_ball(ConstSpan x, ConstSpan center, double nu);

void clamp_inplace(MutSpan v, double lo, double hi);

// ---- bilinear resampling --------------------------------------------------
//
// Half-pixel (align_corners = false) sampling with edge clamping: output
// pixel i maps to source coordinate (i + 0.5) * in / out - 0.5, clamped to
// [0, in - 1]. Channels are resampled independently.

Grid bilinear_resize(const Grid& g, std::size_t out_h, std::size_t out_w);

// Exact transpose of bilinear_resize. `g` lives in the resized (out_h x
// out_w) domain; the result lives in the source domain `source`.
Grid bilinear_resize_adjoint(const Grid& g, Shape source);

// ---- DCT ------------------------------------------------------------------

// The freq_count^2 * channels lowest-frequency orthonormal 2-D DCT-II basis
// grids, ordered by (u + v), then u, then channel.
std::vector<Grid> dct2_basis(std::size_t height, std::size_t width,
                             std::size_t channels, std::size_t freq_count);

// ---- dense matrices and SVD -----------------------------------------------

// Column-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[j * rows + i]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data[j * rows + i];
  }
  MutSpan col(std::size_t j) { return {data.data() + j * rows, rows}; }
  ConstSpan col(std::size_t j) const { return {data.data() + j * rows, rows}; }

  static Matrix from_columns(const std::vector<Vector>& columns);
  Matrix transpose() const;
};

struct SvdResult {
  Matrix u;         // rows x k, orthonormal columns
  Vector s;         // k values, nonincreasing
  Matrix v;         // k x k, orthogonal
  std::size_t sweeps = 0;
};

struct SvdOptions {
  std::size_t max_sweeps = 100;
  double tolerance = 1e-12;
};

// Thin SVD of an m x k matrix with k <= m by one-sided (Hestenes) Jacobi.
// Columns of U belonging to zero singular values are completed to an
// orthonormal set. Throws NumericalFailure if the sweep cap is hit.
SvdResult thin_svd(const Matrix& m, SvdOptions opts = {});

}  // namespace gfcs
