// Copyright 2026 The fctn-rtc Authors
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

#include "fctn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "fctn/error.hpp"

namespace fctn {

Rng::Rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  eng_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Index Rng::below(Index n) {
  if (n == 0) throw InvalidArgument("Rng::below(0)");
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do v = eng_();
  while (v >= limit);
  return v % bound;
}

namespace {

// First `k` entries of a partial Fisher-Yates shuffle of 0..n-1.
std::vector<Index> draw_without_replacement(Index n, Index k, Rng& rng) {
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  return idx;
}

Index rounded_count(double frac, Index n) {
  return static_cast<Index>(std::llround(frac * static_cast<double>(n)));
}

}  // namespace

Synthetic gen_synthetic(const Shape& shape, const FctnRank& rank, std::uint64_t seed) {
  if (rank.order() != shape.size()) throw InvalidArgument("rank order does not match shape");
  Rng rng(seed, Stream::data);
  std::vector<Tensor> g;
  for (Index k = 0; k < shape.size(); ++k) {
    Tensor f(factor_shape(rank, shape, k));
    for (double& v : f.data()) v = rng.uniform();
    g.push_back(std::move(f));
  }
  FctnFactors f(std::move(g), rank, shape);
  Tensor x0 = fctn_compose(f);
  return {std::move(x0), std::move(f)};
}

Corruption apply_sap(const Tensor& x, double s, std::uint64_t seed) {
  if (!(s >= 0.0 && s < 1.0)) throw InvalidArgument("SaP density must be in [0, 1)");
  Rng rng(seed, Stream::noise);
  const Index k = rounded_count(s, x.size());
  const auto idx = draw_without_replacement(x.size(), k, rng);
  const double salt = *std::max_element(x.data().begin(), x.data().end());
  Corruption c{x, Tensor::zeros(x.shape())};
  for (Index i = 0; i < k; ++i) c.corrupted.data()[idx[i]] = i < k / 2 ? 0.0 : salt;
  c.e_true.vec() = c.corrupted.vec() - x.vec();
  return c;
}

ObservationMask sample_mask(const Shape& shape, double rho_obs, std::uint64_t seed) {
  if (!(rho_obs > 0.0 && rho_obs <= 1.0)) throw InvalidArgument("sampling ratio must be in (0, 1]");
  const Index n = shape_product(shape);
  Rng rng(seed, Stream::mask);
  std::vector<std::uint8_t> w(n, 0);
  for (Index l : draw_without_replacement(n, rounded_count(rho_obs, n), rng)) w[l] = 1;
  return ObservationMask(shape, std::move(w));
}

double rel_error(const Tensor& x, const Tensor& x0) {
  require_same_shape(x, x0, "rel_error");
  const double d = x0.vec().norm();
  if (d == 0.0) throw InvalidArgument("rel_error: zero reference tensor");
  return (x.vec() - x0.vec()).norm() / d;
}

std::vector<Matrix> frames(const Tensor& x, FrameAxes axes) {
  const Index n = x.order();
  if (axes.rows >= n || axes.cols >= n || axes.rows == axes.cols)
    throw InvalidArgument("frame axes must be two distinct modes");
  std::vector<Index> perm{axes.rows, axes.cols};
  for (Index a = 0; a < n; ++a)
    if (a != axes.rows && a != axes.cols) perm.push_back(a);
  const Tensor p = permute(x, ModePermutation(perm));
  const auto r = static_cast<Eigen::Index>(x.dim(axes.rows));
  const auto c = static_cast<Eigen::Index>(x.dim(axes.cols));
  const Index count = x.size() / static_cast<Index>(r * c);
  std::vector<Matrix> out;
  out.reserve(count);
  for (Index f = 0; f < count; ++f)
    out.emplace_back(Eigen::Map<const Matrix>(p.data().data() + f * static_cast<Index>(r * c), r, c));
  return out;
}

double mpsnr(const Tensor& x, const Tensor& x0, FrameAxes axes) {
  require_same_shape(x, x0, "mpsnr");
  const auto a = frames(x, axes), b = frames(x0, axes);
  double total = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    const double mse = (a[f] - b[f]).squaredNorm() / static_cast<double>(a[f].size());
    total += mse > 0.0 ? std::min(100.0, 10.0 * std::log10(1.0 / mse)) : 100.0;
  }
  return total / static_cast<double>(a.size());
}

namespace {

Matrix gaussian_window(Eigen::Index h, Eigen::Index w, double sigma) {
  Matrix g(h, w);
  const double ch = (static_cast<double>(h) - 1) / 2, cw = (static_cast<double>(w) - 1) / 2;
  for (Eigen::Index i = 0; i < h; ++i)
    for (Eigen::Index j = 0; j < w; ++j) {
      const double di = static_cast<double>(i) - ch, dj = static_cast<double>(j) - cw;
      g(i, j) = std::exp(-(di * di + dj * dj) / (2 * sigma * sigma));
    }
  return g / g.sum();
}

// Valid-region correlation of m with window g.
Matrix filter_valid(const Matrix& m, const Matrix& g) {
  const Eigen::Index h = m.rows() - g.rows() + 1, w = m.cols() - g.cols() + 1;
  Matrix out(h, w);
  for (Eigen::Index j = 0; j < w; ++j)
    for (Eigen::Index i = 0; i < h; ++i)
      out(i, j) = (m.block(i, j, g.rows(), g.cols()).array() * g.array()).sum();
  return out;
}

double ssim_frame(const Matrix& a, const Matrix& b) {
  constexpr double c1 = (0.01 * 1.0) * (0.01 * 1.0), c2 = (0.03 * 1.0) * (0.03 * 1.0);
  const Matrix g = gaussian_window(std::min<Eigen::Index>(11, a.rows()),
                                   std::min<Eigen::Index>(11, a.cols()), 1.5);
  const Matrix mu_a = filter_valid(a, g), mu_b = filter_valid(b, g);
  const Matrix saa = filter_valid(a.cwiseProduct(a), g) - mu_a.cwiseProduct(mu_a);
  const Matrix sbb = filter_valid(b.cwiseProduct(b), g) - mu_b.cwiseProduct(mu_b);
  const Matrix sab = filter_valid(a.cwiseProduct(b), g) - mu_a.cwiseProduct(mu_b);
  const auto num = (2 * mu_a.array() * mu_b.array() + c1) * (2 * sab.array() + c2);
  const auto den = (mu_a.array().square() + mu_b.array().square() + c1) *
                   (saa.array() + sbb.array() + c2);
  return (num / den).mean();
}

}  // namespace

double mssim(const Tensor& x, const Tensor& x0, FrameAxes axes) {
  require_same_shape(x, x0, "mssim");
  const auto a = frames(x, axes), b = frames(x0, axes);
  double total = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) total += ssim_frame(a[f], b[f]);
  return total / static_cast<double>(a.size());
}

}  // namespace fctn
