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

// The three networks of the anonymization game, at desk scale:
//
//   Anonymizer  image -> image encoder-decoder with output in [0, 1]
//   UtilityNet  clip  -> action logits
//   BudgetNet   frame -> contrastive projection (or attribute logits)
//
// Every Forward takes parameters already bound to the tape (see
// ParamSet::Bind) so callers choose which networks are trainable.

#ifndef ANONYBENCH_NETS_H_
#define ANONYBENCH_NETS_H_

#include <cstdint>
#include <string>

#include "anonybench/params.h"
#include "anonybench/tape.h"

namespace anonybench {

enum class OutputMode { kSigmoid, kUnconstrained };

std::string ToString(OutputMode mode);
OutputMode ParseOutputMode(const std::string& text);

struct AnonymizerSpec {
  int channels = 3;
  int width1 = 8;
  int width2 = 16;
  // Concatenates the input onto the last decoder stage.
  bool skip = false;
  OutputMode output = OutputMode::kSigmoid;
};

// conv+relu, pool, conv+relu, pool, bottleneck conv+relu, upsample,
// conv+relu, upsample, conv+relu, conv (+sigmoid). 3x3 kernels throughout.
class Anonymizer {
 public:
  Anonymizer(const AnonymizerSpec& spec, uint64_t seed);

  // frames [N, C, H, W] or [B, T, C, H, W] with H and W divisible by 4.
  // Returns the same shape.
  Tensor Forward(const Bound& params, const Tensor& frames) const;

  // Forward without gradients, processed in chunks of frames.
  Array Apply(const Array& frames) const;

  const AnonymizerSpec& spec() const { return spec_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

 private:
  AnonymizerSpec spec_;
  ParamSet params_;
};

enum class UtilityArch {
  // Per-frame conv stack, temporal mean of frame features, linear head.
  kConvTemporalMean,
  // One linear layer over the temporal mean frame.
  kLinearMeanFrame,
};

std::string ToString(UtilityArch arch);
UtilityArch ParseUtilityArch(const std::string& text);

struct UtilitySpec {
  int channels = 3;
  int height = 16;
  int width = 16;
  int width1 = 8;
  int width2 = 16;
  int num_classes = 4;
  UtilityArch arch = UtilityArch::kConvTemporalMean;
  bool zero_init_head = false;
};

class UtilityNet {
 public:
  UtilityNet(const UtilitySpec& spec, uint64_t seed);

  // clips [B, T, C, H, W] -> logits [B, num_classes].
  Tensor Forward(const Bound& params, const Tensor& clips) const;
  // Clip features fed to the head: [B, F].
  Tensor Features(const Bound& params, const Tensor& clips) const;

  const UtilitySpec& spec() const { return spec_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

 private:
  void CheckClips(const Tensor& clips) const;

  UtilitySpec spec_;
  ParamSet params_;
};

enum class BudgetHead {
  // linear, relu, linear to projection_dim.
  kProjection,
  // linear, relu, linear to num_attributes logits.
  kMultiLabel,
};

struct BudgetSpec {
  int channels = 3;
  int height = 16;
  int width = 16;
  int width1 = 8;
  int width2 = 16;
  int feature_dim = 32;
  int projection_dim = 16;
  int num_attributes = 3;
  BudgetHead head = BudgetHead::kProjection;
};

class BudgetNet {
 public:
  BudgetNet(const BudgetSpec& spec, uint64_t seed);

  // frames [N, C, H, W] -> [N, projection_dim] or [N, num_attributes].
  Tensor Forward(const Bound& params, const Tensor& frames) const;

  int output_dim() const;
  const BudgetSpec& spec() const { return spec_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

 private:
  BudgetSpec spec_;
  ParamSet params_;
};

}  // namespace anonybench

#endif  // ANONYBENCH_NETS_H_
