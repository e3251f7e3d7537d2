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

// Synthetic benchmark data. A clip is the clipped sum of two independent
// components plus pixel noise:
//
//   action   flat background with a 3x3 blob translating along a line whose
//            orientation is pi * y_t / num_actions
//   privacy  for every set attribute bit k: a constant offset on channel
//            k % C and a 3x3 glyph in corner k
//
// The action component depends only on (y_t, seed) and the privacy component
// only on y_b, so either can be destroyed without touching the other.

#ifndef ANONYBENCH_SYNTHDATA_H_
#define ANONYBENCH_SYNTHDATA_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anonybench/array.h"

namespace anonybench {

class Rng;

struct DataConfig {
  int frames = 8;
  int channels = 3;
  int height = 16;
  int width = 16;
  int num_actions = 4;
  int num_attributes = 3;

  double background = 0.25;
  double blob_amplitude = 0.5;
  double blob_speed = 1.0;  // pixels per frame
  int blob_jitter = 0;      // max |offset| of the trajectory centre
  double hue_offset = 0.15;
  double glyph_amplitude = 0.0;
  double noise_sigma = 0.05;

  int action_train = 512;
  int action_eval = 128;
  int privacy_train = 512;
  int privacy_eval = 128;

  void Validate() const;
};

struct Clip {
  Array frames;  // [T, C, H, W] in [0, 1]
  int y_t = 0;
  std::vector<int> y_b;
  uint64_t seed = 0;
};

// Background plus moving blob, [T, C, H, W], before noise and clipping.
Array ActionComponent(const DataConfig& config, int y_t, uint64_t seed);
// Hue offsets plus glyphs, [C, H, W]; zero when no bit is set.
Array PrivacyComponent(const DataConfig& config, std::span<const int> y_b);
// Blob centre (row, col) at every frame.
std::vector<std::pair<double, double>> BlobTrajectory(const DataConfig& config,
                                                      int y_t, uint64_t seed);

Clip MakeClip(const DataConfig& config, int y_t, std::span<const int> y_b,
              uint64_t seed);

struct ActionSet {
  Array clips;                // [n, T, C, H, W]
  std::vector<int> labels;    // y_t
  Array attributes;           // [n, K_privacy], 0/1
  std::vector<uint64_t> seeds;
  int size() const { return static_cast<int>(labels.size()); }
};

struct PrivacySet {
  Array frames;               // [n, C, H, W]
  Array attributes;           // [n, K_privacy], 0/1
  std::vector<int> actions;   // y_t of the clip each still was cut from
  std::vector<uint64_t> seeds;
  int size() const { return static_cast<int>(actions.size()); }
};

struct ActionSplit {
  ActionSet train;
  ActionSet eval;
};

struct PrivacySplit {
  PrivacySet train;
  PrivacySet eval;
};

struct Splits {
  ActionSplit action;
  PrivacySplit privacy;
};

// Stratified labels: action classes are balanced in the action split and
// attribute combinations in the privacy split; the other label is drawn
// independently. Per-sample seeds are DeriveSeed(seed, "<split>/<part>", i).
Splits MakeSplits(const DataConfig& config, uint64_t seed);

// Hash of every frame byte and label, in split order.
std::string DatasetDigest(const Splits& splits);

// Two frames `skip` apart from a clip [T, C, H, W]; t is uniform over the
// valid start range.
std::pair<Array, Array> SampleFramePair(const Array& clip, int skip, Rng& rng);

// Random 0.8-scale crop resized back (nearest), horizontal flip with p=0.5,
// per-channel additive jitter in [-0.1, 0.1]; frame is [C, H, W].
Array Augment(const Array& frame, Rng& rng);
std::pair<Array, Array> AugmentedPair(const Array& frame, Rng& rng);

// Rows `indices` of a [n, ...] array.
Array Gather(const Array& batch, std::span<const int> indices);
std::vector<int> GatherLabels(std::span<const int> labels,
                              std::span<const int> indices);

}  // namespace anonybench

#endif  // ANONYBENCH_SYNTHDATA_H_
