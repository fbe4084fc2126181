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

#include "fctn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fctn/error.hpp"

namespace fctn {
namespace {

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '(';
  for (Index i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ')';
  return os.str();
}

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw InvalidArgument("tensor order must be >= 1");
  for (Index d : shape)
    if (d == 0) throw InvalidArgument("tensor dimensions must be >= 1, got " + shape_str(shape));
}

std::vector<Index> strides_of(const Shape& shape) {
  std::vector<Index> s(shape.size());
  Index acc = 1;
  for (Index k = 0; k < shape.size(); ++k) {
    s[k] = acc;
    acc *= shape[k];
  }
  return s;
}

}  // namespace

Index shape_product(std::span<const Index> shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

Tensor::Tensor() : shape_{1}, data_(1, 0.0) {}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(shape_product(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (data_.size() != shape_product(shape_))
    throw InvalidArgument("data length " + std::to_string(data_.size()) +
                          " does not match shape " + shape_str(shape_));
}

Index Tensor::linear_index(std::span<const Index> idx) const {
  if (idx.size() != shape_.size()) throw InvalidArgument("index arity mismatch");
  Index lin = 0;
  Index stride = 1;
  for (Index k = 0; k < idx.size(); ++k) {
    if (idx[k] >= shape_[k]) throw InvalidArgument("index out of range");
    lin += idx[k] * stride;
    stride *= shape_[k];
  }
  return lin;
}

std::vector<Index> Tensor::multi_index(Index linear) const {
  if (linear >= data_.size()) throw InvalidArgument("linear index out of range");
  std::vector<Index> idx(shape_.size());
  for (Index k = 0; k < shape_.size(); ++k) {
    idx[k] = linear % shape_[k];
    linear /= shape_[k];
  }
  return idx;
}

Tensor Tensor::reshaped(Shape shape) const {
  validate_shape(shape);
  if (shape_product(shape) != data_.size())
    throw InvalidArgument("cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
  return Tensor(std::move(shape), data_);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape())
    throw InvalidArgument(std::string(what) + ": shape mismatch " + shape_str(a.shape()) +
                          " vs " + shape_str(b.shape()));
}

Tensor& Tensor::operator+=(const Tensor& other) {
  require_same_shape(*this, other, "operator+=");
  vec() += other.vec();
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  require_same_shape(*this, other, "operator-=");
  vec() -= other.vec();
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  vec() *= s;
  return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(double s, Tensor a) { return a *= s; }

ModePermutation::ModePermutation(std::vector<Index> order) : order_(std::move(order)) {
  if (order_.empty()) throw InvalidArgument("permutation must be nonempty");
  std::vector<bool> seen(order_.size(), false);
  for (Index v : order_) {
    if (v >= order_.size()) throw InvalidArgument("permutation entry out of range");
    if (seen[v]) throw InvalidArgument("permutation has duplicate entries");
    seen[v] = true;
  }
}

ModePermutation ModePermutation::identity(Index n) {
  std::vector<Index> o(n);
  std::iota(o.begin(), o.end(), Index{0});
  return ModePermutation(std::move(o));
}

ModePermutation ModePermutation::inverse() const {
  std::vector<Index> inv(order_.size());
  for (Index a = 0; a < order_.size(); ++a) inv[order_[a]] = a;
  return ModePermutation(std::move(inv));
}

UnfoldingSpec::UnfoldingSpec(ModePermutation p, Index d) : perm(std::move(p)), split(d) {
  if (split < 1 || split >= perm.size())
    throw InvalidArgument("unfolding split must satisfy 1 <= d < N");
}

Tensor permute(const Tensor& x, const ModePermutation& n) {
  const Index order = x.order();
  if (n.size() != order)
    throw InvalidArgument("permutation length " + std::to_string(n.size()) +
                          " does not match tensor order " + std::to_string(order));
  Shape out_shape(order);
  const auto src_strides = strides_of(x.shape());
  std::vector<Index> step(order);
  for (Index a = 0; a < order; ++a) {
    out_shape[a] = x.dim(n[a]);
    step[a] = src_strides[n[a]];
  }
  Tensor out(out_shape);
  auto src = x.data();
  auto dst = out.data();

  // Odometer over the output in column-major order; the source offset follows.
  std::vector<Index> counter(order, 0);
  const Index inner = out_shape[0];
  const Index inner_step = step[0];
  Index src_off = 0;
  for (Index lin = 0; lin < dst.size(); lin += inner) {
    const double* s = src.data() + src_off;
    double* d = dst.data() + lin;
    for (Index i = 0; i < inner; ++i) d[i] = s[i * inner_step];
    for (Index a = 1; a < order; ++a) {
      if (++counter[a] < out_shape[a]) {
        src_off += step[a];
        break;
      }
      src_off -= step[a] * (out_shape[a] - 1);
      counter[a] = 0;
    }
  }
  return out;
}

Tensor ipermute(const Tensor& x, const ModePermutation& n) {
  if (n.size() != x.order())
    throw InvalidArgument("permutation length does not match tensor order");
  return permute(x, n.inverse());
}

Matrix unfold(const Tensor& x, const UnfoldingSpec& spec) {
  if (spec.perm.size() != x.order())
    throw InvalidArgument("unfolding spec order does not match tensor order");
  const Tensor p = permute(x, spec.perm);
  Index rows = 1;
  for (Index a = 0; a < spec.split; ++a) rows *= p.dim(a);
  const Index cols = p.size() / rows;
  return Eigen::Map<const Matrix>(p.data().data(), static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

Tensor fold(const Matrix& m, const UnfoldingSpec& spec, const Shape& shape) {
  if (spec.perm.size() != shape.size())
    throw InvalidArgument("unfolding spec order does not match target shape");
  Shape permuted(shape.size());
  for (Index a = 0; a < shape.size(); ++a) permuted[a] = shape.at(spec.perm[a]);
  Index rows = 1;
  for (Index a = 0; a < spec.split; ++a) rows *= permuted[a];
  const Index cols = shape_product(permuted) / rows;
  if (static_cast<Index>(m.rows()) != rows || static_cast<Index>(m.cols()) != cols)
    throw InvalidArgument("fold: matrix is " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                          "x" + std::to_string(cols));
  Tensor p(permuted, std::vector<double>(m.data(), m.data() + m.size()));
  return ipermute(p, spec.perm);
}

Tensor contract(const Tensor& x, const Tensor& y, std::span<const Index> modes_x,
                std::span<const Index> modes_y) {
  if (modes_x.size() != modes_y.size())
    throw InvalidArgument("contract: mode lists differ in length");
  const Index d = modes_x.size();
  std::vector<bool> used_x(x.order(), false), used_y(y.order(), false);
  for (Index i = 0; i < d; ++i) {
    if (modes_x[i] >= x.order() || modes_y[i] >= y.order())
      throw InvalidArgument("contract: mode out of range");
    if (used_x[modes_x[i]] || used_y[modes_y[i]])
      throw InvalidArgument("contract: repeated mode");
    used_x[modes_x[i]] = used_y[modes_y[i]] = true;
    if (x.dim(modes_x[i]) != y.dim(modes_y[i]))
      throw InvalidArgument("contract: dimension mismatch on pair " + std::to_string(i) + " (" +
                            std::to_string(x.dim(modes_x[i])) + " vs " +
                            std::to_string(y.dim(modes_y[i])) + ")");
  }

  // X_[free; contracted] * Y_[contracted; free]
  std::vector<Index> px, py;
  Shape out_shape;
  for (Index a = 0; a < x.order(); ++a)
    if (!used_x[a]) {
      px.push_back(a);
      out_shape.push_back(x.dim(a));
    }
  px.insert(px.end(), modes_x.begin(), modes_x.end());
  py.assign(modes_y.begin(), modes_y.end());
  for (Index a = 0; a < y.order(); ++a)
    if (!used_y[a]) {
      py.push_back(a);
      out_shape.push_back(y.dim(a));
    }

  const Tensor xp = permute(x, ModePermutation(px));
  const Tensor yp = permute(y, ModePermutation(py));
  Index k = 1;
  for (Index i = 0; i < d; ++i) k *= x.dim(modes_x[i]);
  const Index m = xp.size() / k;
  const Index n = yp.size() / k;
  Eigen::Map<const Matrix> xm(xp.data().data(), m, k);
  Eigen::Map<const Matrix> ym(yp.data().data(), k, n);
  if (out_shape.empty()) out_shape.push_back(1);
  Tensor out(out_shape);
  Eigen::Map<Matrix>(out.data().data(), m, n).noalias() = xm * ym;
  return out;
}

Norms norms(const Tensor& x) {
  Norms r;
  const auto v = x.vec();
  r.frobenius = v.norm();
  r.l1 = v.lpNorm<1>();
  r.max_abs = v.lpNorm<Eigen::Infinity>();
  return r;
}

double frobenius_norm(const Tensor& x) { return x.vec().norm(); }

double inner(const Tensor& x, const Tensor& y) {
  require_same_shape(x, y, "inner");
  return x.vec().dot(y.vec());
}

}  // namespace fctn
