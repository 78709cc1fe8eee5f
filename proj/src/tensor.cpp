// Copyright 2026 The initlab Authors
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

#include "initlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "initlab/error.hpp"

namespace initlab {

namespace {

std::size_t checked_count(const std::vector<std::size_t>& dims) {
  std::size_t count = 1;
  for (auto d : dims) {
    if (d == 0) throw InvalidArgument("shape extents must be >= 1");
    if (count > std::numeric_limits<std::size_t>::max() / d)
      throw InvalidArgument("shape element count overflows");
    count *= d;
  }
  return count;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch(std::string(op) + ": shapes " + a.shape().str() +
                        " and " + b.shape().str() + " differ");
  }
}

template <typename F>
Tensor map(const Tensor& a, F f) {
  Tensor out(a.shape());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

}  // namespace

Shape::Shape(std::initializer_list<std::size_t> dims)
    : Shape(std::vector<std::size_t>(dims)) {}

Shape::Shape(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), count_(checked_count(dims_)) {}

std::string Shape::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(dims_[i]);
  }
  return s + ")";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_.element_count(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_.element_count()) {
    throw ShapeMismatch("tensor data length " + std::to_string(data_.size()) +
                        " does not match shape " + shape_.str());
  }
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape.element_count() != shape_.element_count()) {
    throw ShapeMismatch("cannot reshape " + shape_.str() + " to " +
                        shape.str());
  }
  return Tensor(std::move(shape), data_);
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().rank() != 2 || b.shape().rank() != 2 ||
      a.shape()[1] != b.shape()[0]) {
    throw ShapeMismatch("matmul: cannot multiply " + a.shape().str() + " by " +
                        b.shape().str());
  }
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  Tensor out(Shape{m, n});
  auto A = a.data();
  auto B = b.data();
  auto C = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      const double* brow = &B[p * n];
      double* crow = &C[i * n];
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  return out;
}

std::size_t conv_output_extent(std::size_t in, std::size_t kernel,
                               std::size_t stride, std::size_t padding) {
  if (stride == 0) throw InvalidArgument("conv stride must be >= 1");
  if (in + 2 * padding < kernel) {
    throw ShapeMismatch("conv kernel extent " + std::to_string(kernel) +
                        " exceeds padded input extent " +
                        std::to_string(in + 2 * padding));
  }
  return (in + 2 * padding - kernel) / stride + 1;
}

Tensor conv2d(const Tensor& input, const Tensor& kernel, std::size_t stride,
              std::size_t padding) {
  const auto& is = input.shape();
  const auto& ks = kernel.shape();
  const bool batched = is.rank() == 4;
  if ((is.rank() != 3 && !batched) || ks.rank() != 4 ||
      is[batched ? 1 : 0] != ks[1]) {
    throw ShapeMismatch("conv2d: input " + is.str() +
                        " does not conform to kernel " + ks.str());
  }
  const std::size_t n = batched ? is[0] : 1;
  const std::size_t c = ks[1], h = is[is.rank() - 2], w = is[is.rank() - 1];
  const std::size_t o = ks[0], kh = ks[2], kw = ks[3];
  const std::size_t oh = conv_output_extent(h, kh, stride, padding);
  const std::size_t ow = conv_output_extent(w, kw, stride, padding);

  Tensor out(batched ? Shape{n, o, oh, ow} : Shape{o, oh, ow});
  auto X = input.data();
  auto K = kernel.data();
  auto Y = out.data();
  const auto pad = static_cast<std::ptrdiff_t>(padding);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t oc = 0; oc < o; ++oc) {
      double* yplane = &Y[(b * o + oc) * oh * ow];
      for (std::size_t ic = 0; ic < c; ++ic) {
        const double* xplane = &X[(b * c + ic) * h * w];
        for (std::size_t ky = 0; ky < kh; ++ky) {
          for (std::size_t kx = 0; kx < kw; ++kx) {
            const double kv = K[((oc * c + ic) * kh + ky) * kw + kx];
            for (std::size_t y = 0; y < oh; ++y) {
              const auto iy = static_cast<std::ptrdiff_t>(y * stride + ky) - pad;
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
              const double* xrow = xplane + iy * static_cast<std::ptrdiff_t>(w);
              double* yrow = yplane + y * ow;
              for (std::size_t x = 0; x < ow; ++x) {
                const auto ix =
                    static_cast<std::ptrdiff_t>(x * stride + kx) - pad;
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
                yrow[x] += kv * xrow[ix];
              }
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= src[i];
  return out;
}

Tensor relu(const Tensor& a) {
  return map(a, [](double v) { return v > 0.0 ? v : 0.0; });
}

Tensor tanh(const Tensor& a) {
  return map(a, [](double v) { return std::tanh(v); });
}

}  // namespace initlab
