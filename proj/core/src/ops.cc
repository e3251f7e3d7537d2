// Copyright 2026 The Anonybench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anonybench/ops.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace anonybench {
namespace {

Tape& TapeOf(const Tensor& t) {
  if (!t.valid()) throw std::logic_error("op on an empty tensor handle");
  return *t.tape();
}

Tape& TapeOf(const Tensor& a, const Tensor& b) {
  if (&TapeOf(a) != &TapeOf(b)) {
    throw std::logic_error("binary op on tensors from different tapes");
  }
  return *a.tape();
}

[[noreturn]] void Mismatch(std::string_view op, const Shape& a,
                           const Shape& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + ShapeToString(a) +
                   " vs " + ShapeToString(b));
}

void RequireSameShape(std::string_view op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) Mismatch(op, a.shape(), b.shape());
}

void RequireRank(std::string_view op, const Tensor& x, int rank) {
  if (static_cast<int>(x.shape().size()) != rank) {
    throw ShapeError(std::string(op) + ": expected rank " +
                     std::to_string(rank) + ", got shape " +
                     ShapeToString(x.shape()));
  }
}

// Elementwise y = f(x) with adjoint g * df(x, y).
template <class F, class D>
Tensor Unary(OpKind kind, const Tensor& x, F f, D df) {
  const Array& xv = x.value();
  Array out(xv.shape());
  for (size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  return TapeOf(x).Record(kind, {x.id()}, std::move(out),
                          [df](const AdjointArgs& a) {
                            const Array& in = *a.in[0];
                            Array& gi = *a.in_grad[0];
                            for (size_t i = 0; i < in.size(); ++i) {
                              gi[i] += a.out_grad[i] * df(in[i], a.out[i]);
                            }
                          });
}

// (outer, len, inner) view of `shape` around `axis`.
struct AxisView {
  int64_t outer = 1, len = 1, inner = 1;
};

AxisView ViewAround(const Shape& shape, int axis) {
  AxisView v;
  for (int i = 0; i < axis; ++i) v.outer *= shape[i];
  v.len = shape[axis];
  for (size_t i = axis + 1; i < shape.size(); ++i) v.inner *= shape[i];
  return v;
}

int NormalizeAxis(std::string_view op, const Shape& shape, int axis) {
  int rank = static_cast<int>(shape.size());
  if (axis < 0) axis += rank;
  if (axis < 0 || axis >= rank) {
    throw ShapeError(std::string(op) + ": axis out of range for shape " +
                     ShapeToString(shape));
  }
  return axis;
}

}  // namespace

Tensor Add(const Tensor& a, const Tensor& b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape("add", a, b);
  Array out = a.value();
  out.AddInPlace(b.value());
  return tape.Record(OpKind::kAdd, {a.id(), b.id()}, std::move(out),
                     [](const AdjointArgs& g) {
                       for (Array* gi : g.in_grad) {
                         if (gi) gi->AddInPlace(g.out_grad);
                       }
                     });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape("sub", a, b);
  Array out = a.value();
  out.AddScaledInPlace(b.value(), -1.0);
  return tape.Record(OpKind::kSub, {a.id(), b.id()}, std::move(out),
                     [](const AdjointArgs& g) {
                       if (g.in_grad[0]) g.in_grad[0]->AddInPlace(g.out_grad);
                       if (g.in_grad[1]) {
                         g.in_grad[1]->AddScaledInPlace(g.out_grad, -1.0);
                       }
                     });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape("mul", a, b);
  const Array& av = a.value();
  const Array& bv = b.value();
  Array out(av.shape());
  for (size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return tape.Record(OpKind::kMul, {a.id(), b.id()}, std::move(out),
                     [](const AdjointArgs& g) {
                       const Array& x = *g.in[0];
                       const Array& y = *g.in[1];
                       if (Array* gx = g.in_grad[0]) {
                         for (size_t i = 0; i < x.size(); ++i) {
                           (*gx)[i] += g.out_grad[i] * y[i];
                         }
                       }
                       if (Array* gy = g.in_grad[1]) {
                         for (size_t i = 0; i < x.size(); ++i) {
                           (*gy)[i] += g.out_grad[i] * x[i];
                         }
                       }
                     });
}

Tensor Scale(const Tensor& a, double s) {
  Array out = a.value();
  for (double& v : out.data()) v *= s;
  return TapeOf(a).Record(OpKind::kScale, {a.id()}, std::move(out),
                          [s](const AdjointArgs& g) {
                            g.in_grad[0]->AddScaledInPlace(g.out_grad, s);
                          });
}

Tensor AddScalar(const Tensor& a, double s) {
  Array out = a.value();
  for (double& v : out.data()) v += s;
  return TapeOf(a).Record(OpKind::kAddScalar, {a.id()}, std::move(out),
                          [](const AdjointArgs& g) {
                            g.in_grad[0]->AddInPlace(g.out_grad);
                          });
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  Tape& tape = TapeOf(a, b);
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() != 2 || sb.size() != 2 || sa[1] != sb[0]) {
    Mismatch("matmul", sa, sb);
  }
  const int64_t m = sa[0], k = sa[1], n = sb[1];
  const double* A = a.value().data().data();
  const double* B = b.value().data().data();
  Array out(Shape{m, n});
  double* C = out.data().data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t p = 0; p < k; ++p) {
      const double av = A[i * k + p];
      const double* brow = B + p * n;
      double* crow = C + i * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return tape.Record(
      OpKind::kMatMul, {a.id(), b.id()}, std::move(out),
      [m, k, n](const AdjointArgs& g) {
        const double* A = g.in[0]->data().data();
        const double* B = g.in[1]->data().data();
        const double* G = g.out_grad.data().data();
        if (Array* ga = g.in_grad[0]) {
          double* dA = ga->data().data();
          for (int64_t i = 0; i < m; ++i) {
            for (int64_t p = 0; p < k; ++p) {
              const double* brow = B + p * n;
              const double* grow = G + i * n;
              double acc = 0.0;
              for (int64_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
              dA[i * k + p] += acc;
            }
          }
        }
        if (Array* gb = g.in_grad[1]) {
          double* dB = gb->data().data();
          for (int64_t i = 0; i < m; ++i) {
            for (int64_t p = 0; p < k; ++p) {
              const double av = A[i * k + p];
              const double* grow = G + i * n;
              double* drow = dB + p * n;
              for (int64_t j = 0; j < n; ++j) drow[j] += av * grow[j];
            }
          }
        }
      });
}

Tensor Transpose(const Tensor& a) {
  RequireRank("transpose", a, 2);
  const int64_t m = a.shape()[0], n = a.shape()[1];
  const Array& av = a.value();
  Array out(Shape{n, m});
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) out[j * m + i] = av[i * n + j];
  }
  return TapeOf(a).Record(OpKind::kTranspose, {a.id()}, std::move(out),
                          [m, n](const AdjointArgs& g) {
                            Array& gi = *g.in_grad[0];
                            for (int64_t i = 0; i < m; ++i) {
                              for (int64_t j = 0; j < n; ++j) {
                                gi[i * n + j] += g.out_grad[j * m + i];
                              }
                            }
                          });
}

Tensor AddBias(const Tensor& x, const Tensor& b) {
  Tape& tape = TapeOf(x, b);
  const Shape& sx = x.shape();
  if (sx.empty() || b.shape().size() != 1 || b.shape()[0] != sx.back()) {
    Mismatch("add_bias", sx, b.shape());
  }
  const int64_t n = sx.back();
  Array out = x.value();
  const Array& bv = b.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i % n];
  return tape.Record(OpKind::kAddBias, {x.id(), b.id()}, std::move(out),
                     [n](const AdjointArgs& g) {
                       if (g.in_grad[0]) g.in_grad[0]->AddInPlace(g.out_grad);
                       if (Array* gb = g.in_grad[1]) {
                         for (size_t i = 0; i < g.out_grad.size(); ++i) {
                           (*gb)[i % n] += g.out_grad[i];
                         }
                       }
                     });
}

Tensor Conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  Tape& tape = TapeOf(x, weight);
  TapeOf(x, bias);
  const Shape& sx = x.shape();
  const Shape& sw = weight.shape();
  if (sx.size() != 4 || sw.size() != 4 || sw[1] != sx[1] || sw[2] != sw[3] ||
      sw[2] % 2 == 0) {
    Mismatch("conv2d", sx, sw);
  }
  if (bias.shape() != Shape{sw[0]}) Mismatch("conv2d", sw, bias.shape());

  const int64_t N = sx[0], C = sx[1], H = sx[2], W = sx[3];
  const int64_t O = sw[0], K = sw[2], P = K / 2;
  const int64_t plane = H * W;

  const double* in = x.value().data().data();
  const double* w = weight.value().data().data();
  const double* bv = bias.value().data().data();
  Array out(Shape{N, O, H, W});
  double* o_ptr = out.data().data();

  for (int64_t n = 0; n < N; ++n) {
    for (int64_t o = 0; o < O; ++o) {
      double* dst = o_ptr + (n * O + o) * plane;
      std::fill(dst, dst + plane, bv[o]);
      for (int64_t c = 0; c < C; ++c) {
        const double* src = in + (n * C + c) * plane;
        for (int64_t ky = 0; ky < K; ++ky) {
          const int64_t dy = ky - P;
          const int64_t y0 = std::max<int64_t>(0, -dy);
          const int64_t y1 = std::min<int64_t>(H, H - dy);
          for (int64_t kx = 0; kx < K; ++kx) {
            const int64_t dx = kx - P;
            const int64_t x0 = std::max<int64_t>(0, -dx);
            const int64_t x1 = std::min<int64_t>(W, W - dx);
            const double wv = w[((o * C + c) * K + ky) * K + kx];
            for (int64_t y = y0; y < y1; ++y) {
              double* drow = dst + y * W;
              const double* srow = src + (y + dy) * W + dx;
              for (int64_t xx = x0; xx < x1; ++xx) drow[xx] += wv * srow[xx];
            }
          }
        }
      }
    }
  }

  return tape.Record(
      OpKind::kConv2d, {x.id(), weight.id(), bias.id()}, std::move(out),
      [N, C, H, W, O, K, P, plane](const AdjointArgs& g) {
        const double* in = g.in[0]->data().data();
        const double* w = g.in[1]->data().data();
        const double* G = g.out_grad.data().data();
        double* dx_ptr = g.in_grad[0] ? g.in_grad[0]->data().data() : nullptr;
        double* dw_ptr = g.in_grad[1] ? g.in_grad[1]->data().data() : nullptr;
        double* db_ptr = g.in_grad[2] ? g.in_grad[2]->data().data() : nullptr;
        for (int64_t n = 0; n < N; ++n) {
          for (int64_t o = 0; o < O; ++o) {
            const double* gp = G + (n * O + o) * plane;
            if (db_ptr) {
              double acc = 0.0;
              for (int64_t i = 0; i < plane; ++i) acc += gp[i];
              db_ptr[o] += acc;
            }
            for (int64_t c = 0; c < C; ++c) {
              const double* src = in + (n * C + c) * plane;
              double* dsrc = dx_ptr ? dx_ptr + (n * C + c) * plane : nullptr;
              for (int64_t ky = 0; ky < K; ++ky) {
                const int64_t dy = ky - P;
                const int64_t y0 = std::max<int64_t>(0, -dy);
                const int64_t y1 = std::min<int64_t>(H, H - dy);
                for (int64_t kx = 0; kx < K; ++kx) {
                  const int64_t dx = kx - P;
                  const int64_t x0 = std::max<int64_t>(0, -dx);
                  const int64_t x1 = std::min<int64_t>(W, W - dx);
                  const int64_t widx = ((o * C + c) * K + ky) * K + kx;
                  const double wv = w[widx];
                  double wacc = 0.0;
                  for (int64_t y = y0; y < y1; ++y) {
                    const double* grow = gp + y * W;
                    const double* srow = src + (y + dy) * W + dx;
                    if (dsrc) {
                      double* dsrow = dsrc + (y + dy) * W + dx;
                      for (int64_t xx = x0; xx < x1; ++xx) {
                        dsrow[xx] += wv * grow[xx];
                      }
                    }
                    if (dw_ptr) {
                      for (int64_t xx = x0; xx < x1; ++xx) {
                        wacc += grow[xx] * srow[xx];
                      }
                    }
                  }
                  if (dw_ptr) dw_ptr[widx] += wacc;
                }
              }
            }
          }
        }
      });
}

Tensor MeanPool2(const Tensor& x) {
  const Shape& s = x.shape();
  if (s.size() < 2 || s[s.size() - 1] % 2 || s[s.size() - 2] % 2) {
    throw ShapeError("mean_pool2: last two extents must be even, got " +
                     ShapeToString(s));
  }
  const int64_t H = s[s.size() - 2], W = s[s.size() - 1];
  const int64_t planes = NumElements(s) / (H * W);
  const int64_t h = H / 2, w = W / 2;
  Shape os = s;
  os[os.size() - 2] = h;
  os[os.size() - 1] = w;
  const Array& in = x.value();
  Array out(os);
  for (int64_t p = 0; p < planes; ++p) {
    const double* src = in.data().data() + p * H * W;
    double* dst = out.data().data() + p * h * w;
    for (int64_t y = 0; y < h; ++y) {
      for (int64_t xx = 0; xx < w; ++xx) {
        const double* q = src + 2 * y * W + 2 * xx;
        dst[y * w + xx] = 0.25 * (q[0] + q[1] + q[W] + q[W + 1]);
      }
    }
  }
  return TapeOf(x).Record(
      OpKind::kMeanPool2, {x.id()}, std::move(out),
      [planes, H, W, h, w](const AdjointArgs& g) {
        for (int64_t p = 0; p < planes; ++p) {
          double* dsrc = g.in_grad[0]->data().data() + p * H * W;
          const double* gp = g.out_grad.data().data() + p * h * w;
          for (int64_t y = 0; y < h; ++y) {
            for (int64_t xx = 0; xx < w; ++xx) {
              const double v = 0.25 * gp[y * w + xx];
              double* q = dsrc + 2 * y * W + 2 * xx;
              q[0] += v;
              q[1] += v;
              q[W] += v;
              q[W + 1] += v;
            }
          }
        }
      });
}

Tensor Upsample2(const Tensor& x) {
  const Shape& s = x.shape();
  if (s.size() < 2) {
    throw ShapeError("upsample2: need at least rank 2, got " +
                     ShapeToString(s));
  }
  const int64_t h = s[s.size() - 2], w = s[s.size() - 1];
  const int64_t planes = NumElements(s) / (h * w);
  const int64_t H = 2 * h, W = 2 * w;
  Shape os = s;
  os[os.size() - 2] = H;
  os[os.size() - 1] = W;
  const Array& in = x.value();
  Array out(os);
  for (int64_t p = 0; p < planes; ++p) {
    const double* src = in.data().data() + p * h * w;
    double* dst = out.data().data() + p * H * W;
    for (int64_t y = 0; y < H; ++y) {
      for (int64_t xx = 0; xx < W; ++xx) {
        dst[y * W + xx] = src[(y / 2) * w + xx / 2];
      }
    }
  }
  return TapeOf(x).Record(
      OpKind::kUpsample2, {x.id()}, std::move(out),
      [planes, H, W, h, w](const AdjointArgs& g) {
        for (int64_t p = 0; p < planes; ++p) {
          double* dsrc = g.in_grad[0]->data().data() + p * h * w;
          const double* gp = g.out_grad.data().data() + p * H * W;
          for (int64_t y = 0; y < H; ++y) {
            for (int64_t xx = 0; xx < W; ++xx) {
              dsrc[(y / 2) * w + xx / 2] += gp[y * W + xx];
            }
          }
        }
      });
}

Tensor Relu(const Tensor& x) {
  return Unary(
      OpKind::kRelu, x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor Sigmoid(const Tensor& x) {
  return Unary(
      OpKind::kSigmoid, x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Exp(const Tensor& x) {
  return Unary(
      OpKind::kExp, x, [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Tensor Log(const Tensor& x) {
  for (double v : x.value().data()) {
    if (v <= 0.0) {
      throw DomainError("log: non-positive input " + std::to_string(v) +
                        " in shape " + ShapeToString(x.shape()));
    }
  }
  return Unary(
      OpKind::kLog, x, [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; });
}

Tensor Abs(const Tensor& x) {
  return Unary(
      OpKind::kAbs, x, [](double v) { return std::abs(v); },
      [](double v, double) {
        return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      });
}

Tensor Softplus(const Tensor& x) {
  return Unary(
      OpKind::kSoftplus, x,
      [](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); },
      [](double v, double) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      });
}

Tensor Square(const Tensor& x) {
  return Unary(
      OpKind::kSquare, x, [](double v) { return v * v; },
      [](double v, double) { return 2.0 * v; });
}

Tensor Sqrt(const Tensor& x) {
  for (double v : x.value().data()) {
    if (v < 0.0) {
      throw DomainError("sqrt: negative input " + std::to_string(v));
    }
  }
  return Unary(
      OpKind::kSqrt, x, [](double v) { return std::sqrt(v); },
      [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
}

Tensor MaxScalar(const Tensor& x, double c) {
  return Unary(
      OpKind::kMaxScalar, x, [c](double v) { return v > c ? v : c; },
      [c](double v, double) { return v > c ? 1.0 : 0.0; });
}

Tensor MinScalar(const Tensor& x, double c) {
  return Scale(MaxScalar(Scale(x, -1.0), -c), -1.0);
}

Tensor Sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.value().data()) acc += v;
  return TapeOf(x).Record(OpKind::kSum, {x.id()}, Array::Scalar(acc),
                          [](const AdjointArgs& g) {
                            const double v = g.out_grad[0];
                            for (double& d : g.in_grad[0]->data()) d += v;
                          });
}

Tensor Mean(const Tensor& x) {
  const double n = static_cast<double>(x.value().size());
  double acc = 0.0;
  for (double v : x.value().data()) acc += v;
  return TapeOf(x).Record(OpKind::kMean, {x.id()}, Array::Scalar(acc / n),
                          [n](const AdjointArgs& g) {
                            const double v = g.out_grad[0] / n;
                            for (double& d : g.in_grad[0]->data()) d += v;
                          });
}

namespace {

Tensor ReduceAxis(OpKind kind, const Tensor& x, int axis, double scale) {
  const Shape& s = x.shape();
  axis = NormalizeAxis(OpName(kind), s, axis);
  const AxisView v = ViewAround(s, axis);
  Shape os;
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    if (i != axis) os.push_back(s[i]);
  }
  const Array& in = x.value();
  Array out(os);
  for (int64_t o = 0; o < v.outer; ++o) {
    for (int64_t l = 0; l < v.len; ++l) {
      const double* src = in.data().data() + (o * v.len + l) * v.inner;
      double* dst = out.data().data() + o * v.inner;
      for (int64_t i = 0; i < v.inner; ++i) dst[i] += src[i];
    }
  }
  if (scale != 1.0) {
    for (double& d : out.data()) d *= scale;
  }
  return TapeOf(x).Record(
      kind, {x.id()}, std::move(out), [v, scale](const AdjointArgs& g) {
        for (int64_t o = 0; o < v.outer; ++o) {
          const double* gp = g.out_grad.data().data() + o * v.inner;
          for (int64_t l = 0; l < v.len; ++l) {
            double* dst = g.in_grad[0]->data().data() + (o * v.len + l) * v.inner;
            for (int64_t i = 0; i < v.inner; ++i) dst[i] += scale * gp[i];
          }
        }
      });
}

}  // namespace

Tensor SumAxis(const Tensor& x, int axis) {
  return ReduceAxis(OpKind::kSumAxis, x, axis, 1.0);
}

Tensor MeanAxis(const Tensor& x, int axis) {
  axis = NormalizeAxis("mean_axis", x.shape(), axis);
  return ReduceAxis(OpKind::kMeanAxis, x, axis,
                    1.0 / static_cast<double>(x.shape()[axis]));
}

Tensor Concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  Tape& tape = TapeOf(parts[0]);
  const Shape& s0 = parts[0].shape();
  axis = NormalizeAxis("concat", s0, axis);
  Shape os = s0;
  os[axis] = 0;
  std::vector<int> ids;
  std::vector<int64_t> lens;
  for (const Tensor& p : parts) {
    TapeOf(parts[0], p);
    Shape a = p.shape(), b = s0;
    if (a.size() != b.size()) Mismatch("concat", s0, p.shape());
    a[axis] = b[axis] = 0;
    if (a != b) Mismatch("concat", s0, p.shape());
    os[axis] += p.shape()[axis];
    ids.push_back(p.id());
    lens.push_back(p.shape()[axis]);
  }
  const AxisView v = ViewAround(os, axis);
  Array out(os);
  int64_t offset = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    const Array& in = parts[k].value();
    for (int64_t o = 0; o < v.outer; ++o) {
      const double* src = in.data().data() + o * lens[k] * v.inner;
      double* dst = out.data().data() + (o * v.len + offset) * v.inner;
      std::copy(src, src + lens[k] * v.inner, dst);
    }
    offset += lens[k];
  }
  return tape.Record(OpKind::kConcat, std::move(ids), std::move(out),
                     [v, lens](const AdjointArgs& g) {
                       int64_t offset = 0;
                       for (size_t k = 0; k < lens.size(); ++k) {
                         if (Array* gi = g.in_grad[k]) {
                           for (int64_t o = 0; o < v.outer; ++o) {
                             const double* src =
                                 g.out_grad.data().data() +
                                 (o * v.len + offset) * v.inner;
                             double* dst =
                                 gi->data().data() + o * lens[k] * v.inner;
                             for (int64_t i = 0; i < lens[k] * v.inner; ++i) {
                               dst[i] += src[i];
                             }
                           }
                         }
                         offset += lens[k];
                       }
                     });
}

Tensor Reshape(const Tensor& x, Shape shape) {
  if (NumElements(shape) != NumElements(x.shape())) {
    Mismatch("reshape", x.shape(), shape);
  }
  return TapeOf(x).Record(OpKind::kReshape, {x.id()},
                          x.value().Reshaped(std::move(shape)),
                          [](const AdjointArgs& g) {
                            double* d = g.in_grad[0]->data().data();
                            for (size_t i = 0; i < g.out_grad.size(); ++i) {
                              d[i] += g.out_grad[i];
                            }
                          });
}

Tensor L2Normalize(const Tensor& x) {
  const Shape& s = x.shape();
  if (s.empty()) throw ShapeError("l2_normalize: scalar input");
  const int64_t n = s.back();
  const int64_t rows = NumElements(s) / n;
  const Array& in = x.value();
  Array out(s);
  std::vector<double> norms(static_cast<size_t>(rows));
  for (int64_t r = 0; r < rows; ++r) {
    double ss = 0.0;
    for (int64_t j = 0; j < n; ++j) ss += in[r * n + j] * in[r * n + j];
    const double norm = std::sqrt(ss);
    if (!(norm > 0.0)) {
      throw DomainError("l2_normalize: zero-norm row " + std::to_string(r));
    }
    norms[r] = norm;
    for (int64_t j = 0; j < n; ++j) out[r * n + j] = in[r * n + j] / norm;
  }
  return TapeOf(x).Record(
      OpKind::kL2Normalize, {x.id()}, std::move(out),
      [rows, n, norms = std::move(norms)](const AdjointArgs& g) {
        for (int64_t r = 0; r < rows; ++r) {
          const double* y = g.out.data().data() + r * n;
          const double* gy = g.out_grad.data().data() + r * n;
          double dot = 0.0;
          for (int64_t j = 0; j < n; ++j) dot += y[j] * gy[j];
          double* gx = g.in_grad[0]->data().data() + r * n;
          for (int64_t j = 0; j < n; ++j) {
            gx[j] += (gy[j] - y[j] * dot) / norms[r];
          }
        }
      });
}

Tensor LogSoftmax(const Tensor& x) {
  const Shape& s = x.shape();
  if (s.empty()) throw ShapeError("log_softmax: scalar input");
  const int64_t n = s.back();
  const int64_t rows = NumElements(s) / n;
  const Array& in = x.value();
  Array out(s);
  for (int64_t r = 0; r < rows; ++r) {
    const double* xr = in.data().data() + r * n;
    double mx = xr[0];
    for (int64_t j = 1; j < n; ++j) mx = std::max(mx, xr[j]);
    double se = 0.0;
    for (int64_t j = 0; j < n; ++j) se += std::exp(xr[j] - mx);
    const double lse = mx + std::log(se);
    for (int64_t j = 0; j < n; ++j) out[r * n + j] = xr[j] - lse;
  }
  return TapeOf(x).Record(
      OpKind::kLogSoftmax, {x.id()}, std::move(out),
      [rows, n](const AdjointArgs& g) {
        for (int64_t r = 0; r < rows; ++r) {
          const double* y = g.out.data().data() + r * n;
          const double* gy = g.out_grad.data().data() + r * n;
          double total = 0.0;
          for (int64_t j = 0; j < n; ++j) total += gy[j];
          double* gx = g.in_grad[0]->data().data() + r * n;
          for (int64_t j = 0; j < n; ++j) gx[j] += gy[j] - std::exp(y[j]) * total;
        }
      });
}

}  // namespace anonybench
