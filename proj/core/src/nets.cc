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

#include "anonybench/nets.h"

#include <algorithm>
#include <stdexcept>

#include "anonybench/ops.h"
#include "anonybench/rng.h"

namespace anonybench {
namespace {

constexpr int kKernel = 3;
constexpr int64_t kApplyChunk = 64;

void AddConv(ParamSet& params, const std::string& name, int in, int out,
             Rng& rng) {
  const int64_t fan_in = static_cast<int64_t>(in) * kKernel * kKernel;
  params.AddUniform(name + ".w", {out, in, kKernel, kKernel}, fan_in, rng);
  params.AddUniform(name + ".b", {out}, fan_in, rng);
}

void AddLinear(ParamSet& params, const std::string& name, int64_t in,
               int64_t out, Rng& rng) {
  params.AddUniform(name + ".w", {in, out}, in, rng);
  params.AddUniform(name + ".b", {out}, in, rng);
}

Tensor ConvRelu(const Tensor& x, const Bound& p, size_t i) {
  return Relu(Conv2d(x, p[i], p[i + 1]));
}

Tensor Linear(const Tensor& x, const Bound& p, size_t i) {
  return AddBias(MatMul(x, p[i]), p[i + 1]);
}

// [N, C, H, W] -> [N, width2 * H/4 * W/4].
Tensor FrameEncoder(const Tensor& frames, const Bound& p, size_t i) {
  Tensor h = MeanPool2(ConvRelu(frames, p, i));
  h = MeanPool2(ConvRelu(h, p, i + 2));
  const Shape& s = h.shape();
  return Reshape(h, {s[0], s[1] * s[2] * s[3]});
}

void CheckFrames(std::string_view who, const Shape& s, int channels) {
  if (s.size() < 4 || s[s.size() - 3] != channels) {
    throw ShapeError(std::string(who) + ": expected [..., " +
                     std::to_string(channels) + ", H, W], got " +
                     ShapeToString(s));
  }
}

}  // namespace

std::string ToString(OutputMode mode) {
  return mode == OutputMode::kSigmoid ? "sigmoid" : "unconstrained";
}

OutputMode ParseOutputMode(const std::string& text) {
  if (text == "sigmoid") return OutputMode::kSigmoid;
  if (text == "unconstrained") return OutputMode::kUnconstrained;
  throw std::invalid_argument("unknown anonymizer output mode '" + text + "'");
}

std::string ToString(UtilityArch arch) {
  return arch == UtilityArch::kConvTemporalMean ? "conv" : "linear";
}

UtilityArch ParseUtilityArch(const std::string& text) {
  if (text == "conv") return UtilityArch::kConvTemporalMean;
  if (text == "linear") return UtilityArch::kLinearMeanFrame;
  throw std::invalid_argument("unknown utility architecture '" + text + "'");
}

Anonymizer::Anonymizer(const AnonymizerSpec& spec, uint64_t seed) : spec_(spec) {
  Rng rng(seed);
  const int c = spec.channels, w1 = spec.width1, w2 = spec.width2;
  AddConv(params_, "enc1", c, w1, rng);
  AddConv(params_, "enc2", w1, w2, rng);
  AddConv(params_, "mid", w2, w2, rng);
  AddConv(params_, "dec1", w2, w1, rng);
  AddConv(params_, "dec2", w1, w1, rng);
  AddConv(params_, "out", spec.skip ? w1 + c : w1, c, rng);
}

Tensor Anonymizer::Forward(const Bound& p,
                           const Tensor& frames) const {
  const Shape in_shape = frames.shape();
  CheckFrames("anonymize", in_shape, spec_.channels);
  const int64_t H = in_shape[in_shape.size() - 2];
  const int64_t W = in_shape[in_shape.size() - 1];
  if (H % 4 || W % 4) {
    throw ShapeError("anonymize: H and W must be divisible by 4, got " +
                     ShapeToString(in_shape));
  }
  const int64_t n = NumElements(in_shape) / (spec_.channels * H * W);
  Tensor x = in_shape.size() == 4
                 ? frames
                 : Reshape(frames, {n, spec_.channels, H, W});

  Tensor h = MeanPool2(ConvRelu(x, p, 0));
  h = MeanPool2(ConvRelu(h, p, 2));
  h = ConvRelu(h, p, 4);
  h = ConvRelu(Upsample2(h), p, 6);
  h = ConvRelu(Upsample2(h), p, 8);
  if (spec_.skip) {
    const Tensor parts[] = {h, x};
    h = Concat(parts, 1);
  }
  Tensor y = Conv2d(h, p[10], p[11]);
  if (spec_.output == OutputMode::kSigmoid) y = Sigmoid(y);
  return in_shape.size() == 4 ? y : Reshape(y, in_shape);
}

Array Anonymizer::Apply(const Array& frames) const {
  const Shape& s = frames.shape();
  CheckFrames("anonymize", s, spec_.channels);
  const int64_t per = s[s.size() - 3] * s[s.size() - 2] * s[s.size() - 1];
  const int64_t n = NumElements(s) / per;
  Array out(s);
  for (int64_t start = 0; start < n; start += kApplyChunk) {
    const int64_t m = std::min(kApplyChunk, n - start);
    std::vector<double> chunk(frames.data().begin() + start * per,
                              frames.data().begin() + (start + m) * per);
    Tape tape;
    Bound p = params_.Bind(tape, false);
    Tensor x = tape.Constant(
        Array({m, s[s.size() - 3], s[s.size() - 2], s[s.size() - 1]},
              std::move(chunk)));
    const Array& y = Forward(p, x).value();
    std::copy(y.data().begin(), y.data().end(),
              out.data().begin() + start * per);
  }
  return out;
}

UtilityNet::UtilityNet(const UtilitySpec& spec, uint64_t seed) : spec_(spec) {
  Rng rng(seed);
  int64_t features;
  if (spec.arch == UtilityArch::kConvTemporalMean) {
    AddConv(params_, "conv1", spec.channels, spec.width1, rng);
    AddConv(params_, "conv2", spec.width1, spec.width2, rng);
    features = static_cast<int64_t>(spec.width2) * (spec.height / 4) *
               (spec.width / 4);
  } else {
    features = static_cast<int64_t>(spec.channels) * spec.height * spec.width;
  }
  AddLinear(params_, "head", features, spec.num_classes, rng);
  if (spec.zero_init_head) {
    params_.at("head.w").value.Fill(0.0);
    params_.at("head.b").value.Fill(0.0);
  }
}

void UtilityNet::CheckClips(const Tensor& clips) const {
  const Shape& s = clips.shape();
  if (s.size() != 5 || s[2] != spec_.channels || s[3] != spec_.height ||
      s[4] != spec_.width) {
    throw ShapeError("classify_action: expected [B, T, " +
                     std::to_string(spec_.channels) + ", " +
                     std::to_string(spec_.height) + ", " +
                     std::to_string(spec_.width) + "], got " +
                     ShapeToString(s));
  }
}

Tensor UtilityNet::Features(const Bound& p,
                            const Tensor& clips) const {
  CheckClips(clips);
  const Shape& s = clips.shape();
  const int64_t B = s[0], T = s[1];
  if (spec_.arch == UtilityArch::kLinearMeanFrame) {
    return MeanAxis(Reshape(clips, {B, T, s[2] * s[3] * s[4]}), 1);
  }
  Tensor f = FrameEncoder(Reshape(clips, {B * T, s[2], s[3], s[4]}), p, 0);
  return MeanAxis(Reshape(f, {B, T, f.shape()[1]}), 1);
}

Tensor UtilityNet::Forward(const Bound& p,
                           const Tensor& clips) const {
  const size_t head = spec_.arch == UtilityArch::kConvTemporalMean ? 4 : 0;
  return Linear(Features(p, clips), p, head);
}

BudgetNet::BudgetNet(const BudgetSpec& spec, uint64_t seed) : spec_(spec) {
  Rng rng(seed);
  AddConv(params_, "conv1", spec.channels, spec.width1, rng);
  AddConv(params_, "conv2", spec.width1, spec.width2, rng);
  const int64_t flat =
      static_cast<int64_t>(spec.width2) * (spec.height / 4) * (spec.width / 4);
  AddLinear(params_, "encoder", flat, spec.feature_dim, rng);
  AddLinear(params_, "head1", spec.feature_dim, spec.feature_dim, rng);
  AddLinear(params_, "head2", spec.feature_dim, output_dim(), rng);
}

int BudgetNet::output_dim() const {
  return spec_.head == BudgetHead::kProjection ? spec_.projection_dim
                                               : spec_.num_attributes;
}

Tensor BudgetNet::Forward(const Bound& p,
                          const Tensor& frames) const {
  const Shape& s = frames.shape();
  if (s.size() != 4 || s[1] != spec_.channels || s[2] != spec_.height ||
      s[3] != spec_.width) {
    throw ShapeError("embed_privacy: expected [N, " +
                     std::to_string(spec_.channels) + ", " +
                     std::to_string(spec_.height) + ", " +
                     std::to_string(spec_.width) + "], got " +
                     ShapeToString(s));
  }
  Tensor h = Linear(FrameEncoder(frames, p, 0), p, 4);
  h = Relu(Linear(h, p, 6));
  return Linear(h, p, 8);
}

}  // namespace anonybench
