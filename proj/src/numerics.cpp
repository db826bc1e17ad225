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

#include "gfcs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace gfcs {

Shape flat_shape(std::size_t n) { return Shape{1, 1, n}; }

Grid::Grid(Shape s, Vector v) : shape(s), values(std::move(v)) {
  require(values.size() == shape.size(), "grid: value count does not match shape");
}

Grid::Grid(Shape s, double fill) : shape(s), values(s.size(), fill) {}

bool all_finite(ConstSpan v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require_finite(ConstSpan v, const char* what) {
  if (!all_finite(v)) fail(ErrorCode::InvalidInput, std::string(what) + ": non-finite entry");
}

double dot(ConstSpan a, ConstSpan b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(ConstSpan v) {
  require_finite(v, "l2_norm");
  // Scaled accumulation avoids overflow for large entries.
  double scale_ = 0.0;
  for (double x : v) scale_ = std::max(scale_, std::abs(x));
  if (scale_ == 0.0) return 0.0;
  double acc = 0.0;
  for (double x : v) {
    const double y = x / scale_;
    acc += y * y;
  }
  return scale_ * std::sqrt(acc);
}

double l2_distance(ConstSpan a, ConstSpan b) {
  require(a.size() == b.size(), "l2_distance: length mismatch");
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return l2_norm(d);
}

void axpy(double a, ConstSpan x, MutSpan y) {
  require(x.size() == y.size(), "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(MutSpan v, double a) {
  for (double& x : v) x *= a;
}

Vector add_scaled(ConstSpan x, double a, ConstSpan q) {
  Vector out(x.begin(), x.end());
  axpy(a, q, out);
  return out;
}

double normalize(MutSpan v) {
  const double n = l2_norm(v);
  if (n > 0.0) scale(v, 1.0 / n);
  return n;
}

std::size_t argmax(ConstSpan v) {
  require(!v.empty(), "argmax: empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

std::size_t argmax_excluding(ConstSpan v, std::size_t skip) {
  require(v.size() >= 2, "argmax_excluding: need at least two entries");
  std::size_t best = skip == 0 ? 1 : 0;
  for (std::size_t i = best + 1; i < v.size(); ++i)
    if (i != skip && v[i] > v[best]) best = i;
  return best;
}

Vector project_to_ball(ConstSpan x, ConstSpan center, double nu) {
  require(x.size() == center.size(), "project_to_ball: length mismatch");
  require(nu > 0.0, "project_to_ball: radius must be positive");
  Vector delta(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) delta[i] = x[i] - center[i];
  const double dist = l2_norm(delta);
  if (dist <= nu) return Vector(x.begin(), x.end());
  const double f = nu / dist;
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = center[i] + f * delta[i];
  return out;
}

void clamp_inplace(MutSpan v, double lo, double hi) {
  for (double& x : v) x = std::clamp(x, lo, hi);
}

// ---- bilinear --------------------------------------------------------------

namespace {

struct Tap {
  std::size_t lo, hi;
  double w_lo, w_hi;
};

std::vector<Tap> axis_taps(std::size_t in, std::size_t out) {
  std::vector<Tap> taps(out);
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double src = (static_cast<double>(i) + 0.5) * ratio - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    const std::size_t hi = std::min(lo + 1, in - 1);
    const double frac = src - static_cast<double>(lo);
    taps[i] = {lo, hi, 1.0 - frac, frac};
  }
  return taps;
}

void check_resize(Shape s, std::size_t out_h, std::size_t out_w) {
  require(s.height >= 1 && s.width >= 1 && s.channels >= 1, "bilinear: empty grid");
  require(out_h >= 1 && out_w >= 1, "bilinear: output size must be positive");
}

}  // namespace

Grid bilinear_resize(const Grid& g, std::size_t out_h, std::size_t out_w) {
  check_resize(g.shape, out_h, out_w);
  require(g.values.size() == g.shape.size(), "bilinear: value count does not match shape");
  const auto rows = axis_taps(g.shape.height, out_h);
  const auto cols = axis_taps(g.shape.width, out_w);
  const std::size_t ch = g.shape.channels;
  Grid out(Shape{out_h, out_w, ch});
  for (std::size_t r = 0; r < out_h; ++r) {
    const Tap& tr = rows[r];
    for (std::size_t c = 0; c < out_w; ++c) {
      const Tap& tc = cols[c];
      for (std::size_t k = 0; k < ch; ++k) {
        out.at(r, c, k) = tr.w_lo * (tc.w_lo * g.at(tr.lo, tc.lo, k) + tc.w_hi * g.at(tr.lo, tc.hi, k)) +
                          tr.w_hi * (tc.w_lo * g.at(tr.hi, tc.lo, k) + tc.w_hi * g.at(tr.hi, tc.hi, k));
      }
    }
  }
  return out;
}

Grid bilinear_resize_adjoint(const Grid& g, Shape source) {
  check_resize(source, g.shape.height, g.shape.width);
  require(g.shape.channels == source.channels, "bilinear adjoint: channel mismatch");
  require(g.values.size() == g.shape.size(), "bilinear adjoint: value count does not match shape");
  const auto rows = axis_taps(source.height, g.shape.height);
  const auto cols = axis_taps(source.width, g.shape.width);
  Grid out(source);
  for (std::size_t r = 0; r < g.shape.height; ++r) {
    const Tap& tr = rows[r];
    for (std::size_t c = 0; c < g.shape.width; ++c) {
      const Tap& tc = cols[c];
      for (std::size_t k = 0; k < source.channels; ++k) {
        const double v = g.at(r, c, k);
        out.at(tr.lo, tc.lo, k) += tr.w_lo * tc.w_lo * v;
        out.at(tr.lo, tc.hi, k) += tr.w_lo * tc.w_hi * v;
        out.at(tr.hi, tc.lo, k) += tr.w_hi * tc.w_lo * v;
        out.at(tr.hi, tc.hi, k) += tr.w_hi * tc.w_hi * v;
      }
    }
  }
  return out;
}

// ---- DCT -------------------------------------------------------------------

std::vector<Grid> dct2_basis(std::size_t height, std::size_t width,
                             std::size_t channels, std::size_t freq_count) {
  require(height >= 1 && width >= 1 && channels >= 1, "dct2_basis: empty shape");
  if (freq_count < 1 || freq_count > std::min(height, width))
    fail(ErrorCode::InvalidInput, "dct2_basis: freq_count must lie in [1, min(H, W)]");

  auto cosine_table = [](std::size_t n, std::size_t f) {
    // table[u * n + i] = alpha_u * cos((2i + 1) u pi / 2n)
    Vector t(f * n);
    for (std::size_t u = 0; u < f; ++u) {
      const double alpha = std::sqrt((u == 0 ? 1.0 : 2.0) / static_cast<double>(n));
      for (std::size_t i = 0; i < n; ++i)
        t[u * n + i] = alpha * std::cos(std::numbers::pi * static_cast<double>((2 * i + 1) * u) /
                                        (2.0 * static_cast<double>(n)));
    }
    return t;
  };
  const Vector rows = cosine_table(height, freq_count);
  const Vector cols = cosine_table(width, freq_count);

  std::vector<std::pair<std::size_t, std::size_t>> freqs;
  for (std::size_t u = 0; u < freq_count; ++u)
    for (std::size_t v = 0; v < freq_count; ++v) freqs.emplace_back(u, v);
  std::stable_sort(freqs.begin(), freqs.end(), [](const auto& a, const auto& b) {
    if (a.first + a.second != b.first + b.second) return a.first + a.second < b.first + b.second;
    return a.first < b.first;
  });

  const Shape shape{height, width, channels};
  std::vector<Grid> basis;
  basis.reserve(freqs.size() * channels);
  for (auto [u, v] : freqs) {
    for (std::size_t k = 0; k < channels; ++k) {
      Grid g(shape);
      for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c)
          g.at(r, c, k) = rows[u * height + r] * cols[v * width + c];
      normalize(g.values);
      basis.push_back(std::move(g));
    }
  }
  return basis;
}

// ---- SVD -------------------------------------------------------------------

Matrix Matrix::from_columns(const std::vector<Vector>& columns) {
  require(!columns.empty(), "Matrix::from_columns: no columns");
  Matrix m(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    require(columns[j].size() == m.rows, "Matrix::from_columns: ragged columns");
    std::copy(columns[j].begin(), columns[j].end(), m.col(j).begin());
  }
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols, rows);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) t(j, i) = (*this)(i, j);
  return t;
}

namespace {

void rotate(MutSpan a, MutSpan b, double c, double s) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    a[i] = c * x - s * y;
    b[i] = s * x + c * y;
  }
}

// Orthogonalizes `v` against the first `count` columns of `u` (two passes of
// modified Gram-Schmidt) and normalizes it. Returns the norm before
// normalization.
double orthonormalize_against(const Matrix& u, std::size_t count, MutSpan v) {
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t j = 0; j < count; ++j) axpy(-dot(u.col(j), v), u.col(j), v);
  return normalize(v);
}

}  // namespace

SvdResult thin_svd(const Matrix& m, SvdOptions opts) {
  const std::size_t rows = m.rows;
  const std::size_t k = m.cols;
  require(k >= 1 && k <= rows, "thin_svd: need 1 <= columns <= rows");
  require(m.data.size() == rows * k, "thin_svd: storage does not match shape");
  require_finite(m.data, "thin_svd");

  Matrix a = m;
  Matrix v(k, k);
  for (std::size_t i = 0; i < k; ++i) v(i, i) = 1.0;

  double frob2 = 0.0;
  for (double x : m.data) frob2 += x * x;
  const double negligible = frob2 * 1e-30;

  std::size_t sweep = 0;
  double worst = 0.0;
  bool converged = (k == 1);
  while (!converged) {
    if (sweep == opts.max_sweeps) {
      std::ostringstream msg;
      msg << "thin_svd: no convergence after " << sweep
          << " sweeps (largest normalized off-diagonal " << worst << ")";
      fail(ErrorCode::NumericalFailure, msg.str());
    }
    ++sweep;
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double alpha = dot(a.col(p), a.col(p));
        const double beta = dot(a.col(q), a.col(q));
        if (alpha <= negligible || beta <= negligible) continue;
        const double gamma = dot(a.col(p), a.col(q));
        const double off = std::abs(gamma) / std::sqrt(alpha * beta);
        worst = std::max(worst, off);
        if (off <= opts.tolerance) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(a.col(p), a.col(q), c, s);
        rotate(v.col(p), v.col(q), c, s);
      }
    }
    converged = worst <= opts.tolerance;
  }

  Vector norms(k);
  for (std::size_t j = 0; j < k; ++j) norms[j] = l2_norm(a.col(j));
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SvdResult out;
  out.u = Matrix(rows, k);
  out.v = Matrix(k, k);
  out.s.resize(k);
  out.sweeps = sweep;
  const double smax = norms[order[0]];
  const double rank_tol = smax * 1e-13 * static_cast<double>(std::max(rows, k));

  std::size_t next_canonical = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t src = order[j];
    out.s[j] = norms[src];
    std::copy(v.col(src).begin(), v.col(src).end(), out.v.col(j).begin());
    MutSpan uj = out.u.col(j);
    if (norms[src] > rank_tol) {
      std::copy(a.col(src).begin(), a.col(src).end(), uj.begin());
      scale(uj, 1.0 / norms[src]);
      orthonormalize_against(out.u, j, uj);
      continue;
    }
    // Numerically zero singular value: complete U with a canonical vector
    // orthogonal to the columns found so far.
    while (true) {
      if (next_canonical == rows)
        fail(ErrorCode::NumericalFailure, "thin_svd: could not complete orthonormal basis");
      std::fill(uj.begin(), uj.end(), 0.0);
      uj[next_canonical++] = 1.0;
      if (orthonormalize_against(out.u, j, uj) > 0.5) break;
    }
  }
  return out;
}

}  // namespace gfcs
