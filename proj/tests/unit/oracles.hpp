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

// Straightforward reference implementations used as test oracles. They are
// written directly from the textbook definitions and share no code with the
// library.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

// SplitMix64 / xoshiro256** as published by Blackman and Vigna.
struct Xoshiro {
  std::uint64_t s[4];

  static std::uint64_t splitmix(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  explicit Xoshiro(std::uint64_t seed) {
    for (auto& w : s) w = splitmix(seed);
  }
  std::uint64_t next() {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }
};

// Central differences of a scalar function, step h.
inline Vec central_difference(const std::function<double(const Vec&)>& f, Vec x, double h) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

inline double rel_error(const Vec& a, const Vec& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

// One output pixel of an align-corners-false bilinear resize, computed from
// the sampling definition.
inline double bilinear_pixel(const Vec& src, std::size_t h, std::size_t w, std::size_t c, std::size_t out_h,
                             std::size_t out_w, std::size_t r, std::size_t col, std::size_t k) {
  auto coord = [](std::size_t i, std::size_t in, std::size_t out) {
    double s = (static_cast<double>(i) + 0.5) * static_cast<double>(in) / static_cast<double>(out) - 0.5;
    if (s < 0) s = 0;
    if (s > static_cast<double>(in - 1)) s = static_cast<double>(in - 1);
    return s;
  };
  const double sy = coord(r, h, out_h), sx = coord(col, w, out_w);
  const auto y0 = static_cast<std::size_t>(std::floor(sy)), x0 = static_cast<std::size_t>(std::floor(sx));
  const std::size_t y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
  const double fy = sy - static_cast<double>(y0), fx = sx - static_cast<double>(x0);
  auto at = [&](std::size_t y, std::size_t x) { return src[(y * w + x) * c + k]; };
  return (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x1)) + fy * ((1 - fx) * at(y1, x0) + fx * at(y1, x1));
}

// Orthonormal 2-D DCT-II basis function (u, v) on an h x w grid.
inline double dct_value(std::size_t u, std::size_t v, std::size_t r, std::size_t c, std::size_t h, std::size_t w) {
  const double pi = std::numbers::pi;
  const double au = u == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
  const double av = v == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
  return au * av * std::cos(pi * (2.0 * r + 1) * u / (2.0 * h)) * std::cos(pi * (2.0 * c + 1) * v / (2.0 * w));
}

// log softmax_t in extended precision.
inline long double log_softmax(const Vec& f, std::size_t t) {
  long double m = f[0];
  for (double v : f) m = std::max<long double>(m, v);
  long double sum = 0;
  for (double v : f) sum += std::exp(static_cast<long double>(v) - m);
  return static_cast<long double>(f[t]) - m - std::log(sum);
}

}  // namespace oracle
