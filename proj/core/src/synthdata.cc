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

#include "anonybench/synthdata.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "anonybench/digest.h"
#include "anonybench/rng.h"

namespace anonybench {
namespace {

constexpr int kMaxAttributes = 4;

// 3x3 glyph masks, one per attribute bit.
constexpr int kGlyphs[kMaxAttributes][9] = {
    {0, 1, 0, 1, 1, 1, 0, 1, 0},  // plus
    {1, 0, 1, 0, 1, 0, 1, 0, 1},  // x
    {1, 1, 1, 1, 0, 1, 1, 1, 1},  // ring
    {1, 1, 1, 0, 1, 0, 0, 1, 0},  // tee
};

double Clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void CheckLabels(const DataConfig& config, int y_t, std::span<const int> y_b) {
  if (y_t < 0 || y_t >= config.num_actions) {
    throw std::out_of_range("make_clip: action label " + std::to_string(y_t) +
                            " outside [0, " +
                            std::to_string(config.num_actions) + ")");
  }
  if (static_cast<int>(y_b.size()) != config.num_attributes) {
    throw std::out_of_range("make_clip: expected " +
                            std::to_string(config.num_attributes) +
                            " attribute bits, got " +
                            std::to_string(y_b.size()));
  }
  for (int bit : y_b) {
    if (bit != 0 && bit != 1) {
      throw std::out_of_range("make_clip: attribute bits must be 0 or 1");
    }
  }
}

std::vector<int> Bits(int value, int count) {
  std::vector<int> bits(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) bits[k] = (value >> k) & 1;
  return bits;
}

}  // namespace

void DataConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("data config: " + what);
  };
  require(frames >= 1, "frames must be >= 1");
  require(channels >= 1, "channels must be >= 1");
  require(height >= 8 && width >= 8, "frames must be at least 8x8");
  require(height % 4 == 0 && width % 4 == 0,
          "height and width must be divisible by 4");
  require(num_actions >= 2, "num_actions must be >= 2");
  require(num_attributes >= 1 && num_attributes <= kMaxAttributes,
          "num_attributes must be in [1, 4]");
  require(noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(blob_jitter >= 0, "blob_jitter must be >= 0");
  require(action_train >= 2 * num_actions && action_eval >= 2 * num_actions,
          "action split sizes must hold >= 2 clips per class");
  require(privacy_train >= 4 && privacy_eval >= 4,
          "privacy split sizes must be >= 4");
}

std::vector<std::pair<double, double>> BlobTrajectory(const DataConfig& config,
                                                      int y_t, uint64_t seed) {
  Rng rng(DeriveSeed(seed, "blob"));
  const int span = 2 * config.blob_jitter + 1;
  const double jy = static_cast<double>(rng.Below(span)) - config.blob_jitter;
  const double jx = static_cast<double>(rng.Below(span)) - config.blob_jitter;
  const double angle = std::numbers::pi * y_t / config.num_actions;
  const double cy = (config.height - 1) / 2.0 + jy;
  const double cx = (config.width - 1) / 2.0 + jx;
  std::vector<std::pair<double, double>> path;
  for (int t = 0; t < config.frames; ++t) {
    const double s = config.blob_speed * (t - (config.frames - 1) / 2.0);
    path.emplace_back(cy + s * std::sin(angle), cx + s * std::cos(angle));
  }
  return path;
}

Array ActionComponent(const DataConfig& config, int y_t, uint64_t seed) {
  const int T = config.frames, C = config.channels;
  const int H = config.height, W = config.width;
  Array out({T, C, H, W}, config.background);
  const auto path = BlobTrajectory(config, y_t, seed);
  for (int t = 0; t < T; ++t) {
    const int r0 = static_cast<int>(std::floor(path[t].first + 0.5));
    const int c0 = static_cast<int>(std::floor(path[t].second + 0.5));
    for (int c = 0; c < C; ++c) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int r = r0 + dy, col = c0 + dx;
          if (r < 0 || r >= H || col < 0 || col >= W) continue;
          out[((t * C + c) * H + r) * W + col] += config.blob_amplitude;
        }
      }
    }
  }
  return out;
}

Array PrivacyComponent(const DataConfig& config, std::span<const int> y_b) {
  const int C = config.channels, H = config.height, W = config.width;
  Array out({C, H, W}, 0.0);
  for (int k = 0; k < static_cast<int>(y_b.size()); ++k) {
    if (!y_b[k]) continue;
    double* plane = out.data().data() + (k % C) * H * W;
    for (int i = 0; i < H * W; ++i) plane[i] += config.hue_offset;
    const int row0 = (k / 2) % 2 ? H - 3 : 0;
    const int col0 = k % 2 ? W - 3 : 0;
    for (int c = 0; c < C; ++c) {
      for (int i = 0; i < 9; ++i) {
        if (!kGlyphs[k][i]) continue;
        out[(c * H + row0 + i / 3) * W + col0 + i % 3] += config.glyph_amplitude;
      }
    }
  }
  return out;
}

Clip MakeClip(const DataConfig& config, int y_t, std::span<const int> y_b,
              uint64_t seed) {
  CheckLabels(config, y_t, y_b);
  Array frames = ActionComponent(config, y_t, seed);
  const Array privacy = PrivacyComponent(config, y_b);
  const size_t per_frame = privacy.size();
  Rng noise(DeriveSeed(seed, "noise"));
  for (size_t i = 0; i < frames.size(); ++i) {
    double v = frames[i] + privacy[i % per_frame];
    if (config.noise_sigma > 0.0) v += config.noise_sigma * noise.Normal();
    frames[i] = Clamp01(v);
  }
  return Clip{std::move(frames), y_t, std::vector<int>(y_b.begin(), y_b.end()),
              seed};
}

namespace {

ActionSet MakeActionSet(const DataConfig& config, int n, uint64_t master,
                        const std::string& stream) {
  const int K = config.num_attributes;
  const int64_t per_clip = static_cast<int64_t>(config.frames) *
                           config.channels * config.height * config.width;
  ActionSet set;
  set.clips = Array({n, config.frames, config.channels, config.height,
                     config.width});
  set.attributes = Array({n, K}, 0.0);
  std::vector<int> order = Permutation(n, DeriveSeed(master, stream + "/order"));
  Rng bits(DeriveSeed(master, stream + "/attributes"));
  for (int i = 0; i < n; ++i) {
    const int y_t = order[i] % config.num_actions;
    std::vector<int> y_b(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) y_b[k] = static_cast<int>(bits.Below(2));
    const uint64_t seed = DeriveSeed(master, stream, static_cast<uint64_t>(i));
    Clip clip = MakeClip(config, y_t, y_b, seed);
    std::copy(clip.frames.data().begin(), clip.frames.data().end(),
              set.clips.data().begin() + i * per_clip);
    for (int k = 0; k < K; ++k) set.attributes[i * K + k] = y_b[k];
    set.labels.push_back(y_t);
    set.seeds.push_back(seed);
  }
  return set;
}

PrivacySet MakePrivacySet(const DataConfig& config, int n, uint64_t master,
                          const std::string& stream) {
  const int K = config.num_attributes;
  const int64_t per_frame =
      static_cast<int64_t>(config.channels) * config.height * config.width;
  PrivacySet set;
  set.frames = Array({n, config.channels, config.height, config.width});
  set.attributes = Array({n, K}, 0.0);
  std::vector<int> order = Permutation(n, DeriveSeed(master, stream + "/order"));
  Rng draws(DeriveSeed(master, stream + "/actions"));
  for (int i = 0; i < n; ++i) {
    const std::vector<int> y_b = Bits(order[i] % (1 << K), K);
    const int y_t = static_cast<int>(draws.Below(config.num_actions));
    const int t = static_cast<int>(draws.Below(config.frames));
    const uint64_t seed = DeriveSeed(master, stream, static_cast<uint64_t>(i));
    Clip clip = MakeClip(config, y_t, y_b, seed);
    std::copy(clip.frames.data().begin() + t * per_frame,
              clip.frames.data().begin() + (t + 1) * per_frame,
              set.frames.data().begin() + i * per_frame);
    for (int k = 0; k < K; ++k) set.attributes[i * K + k] = y_b[k];
    set.actions.push_back(y_t);
    set.seeds.push_back(seed);
  }
  return set;
}

}  // namespace

Splits MakeSplits(const DataConfig& config, uint64_t seed) {
  config.Validate();
  Splits s;
  s.action.train = MakeActionSet(config, config.action_train, seed, "action/train");
  s.action.eval = MakeActionSet(config, config.action_eval, seed, "action/eval");
  s.privacy.train =
      MakePrivacySet(config, config.privacy_train, seed, "privacy/train");
  s.privacy.eval =
      MakePrivacySet(config, config.privacy_eval, seed, "privacy/eval");
  return s;
}

std::string DatasetDigest(const Splits& splits) {
  Digest d;
  for (const ActionSet* set : {&splits.action.train, &splits.action.eval}) {
    d.Update(set->clips.data());
    for (int y : set->labels) d.Update(static_cast<uint64_t>(y));
    d.Update(set->attributes.data());
  }
  for (const PrivacySet* set : {&splits.privacy.train, &splits.privacy.eval}) {
    d.Update(set->frames.data());
    d.Update(set->attributes.data());
  }
  return d.hex();
}

std::pair<Array, Array> SampleFramePair(const Array& clip, int skip, Rng& rng) {
  if (clip.rank() != 4) {
    throw ShapeError("sample_frame_pair: expected [T, C, H, W], got " +
                     ShapeToString(clip.shape()));
  }
  const int64_t T = clip.dim(0);
  if (skip < 0 || skip >= T) {
    throw std::out_of_range("sample_frame_pair: skip " + std::to_string(skip) +
                            " must be in [0, " + std::to_string(T) + ")");
  }
  const int64_t t = static_cast<int64_t>(rng.Below(T - skip));
  const int64_t per = clip.size() / T;
  Shape fs(clip.shape().begin() + 1, clip.shape().end());
  auto frame = [&](int64_t i) {
    return Array(fs, std::vector<double>(clip.data().begin() + i * per,
                                         clip.data().begin() + (i + 1) * per));
  };
  return {frame(t), frame(t + skip)};
}

Array Augment(const Array& frame, Rng& rng) {
  if (frame.rank() != 3) {
    throw ShapeError("augment: expected [C, H, W], got " +
                     ShapeToString(frame.shape()));
  }
  const int64_t C = frame.dim(0), H = frame.dim(1), W = frame.dim(2);
  const int64_t ch = std::max<int64_t>(1, std::llround(0.8 * H));
  const int64_t cw = std::max<int64_t>(1, std::llround(0.8 * W));
  const int64_t oy = static_cast<int64_t>(rng.Below(H - ch + 1));
  const int64_t ox = static_cast<int64_t>(rng.Below(W - cw + 1));
  const bool flip = rng.Bernoulli(0.5);
  std::vector<double> jitter(static_cast<size_t>(C));
  for (double& j : jitter) j = rng.Uniform(-0.1, 0.1);

  Array out(frame.shape());
  for (int64_t c = 0; c < C; ++c) {
    for (int64_t y = 0; y < H; ++y) {
      const int64_t sy = oy + y * ch / H;
      for (int64_t x = 0; x < W; ++x) {
        const int64_t xx = flip ? W - 1 - x : x;
        const int64_t sx = ox + xx * cw / W;
        out[(c * H + y) * W + x] =
            Clamp01(frame[(c * H + sy) * W + sx] + jitter[c]);
      }
    }
  }
  return out;
}

std::pair<Array, Array> AugmentedPair(const Array& frame, Rng& rng) {
  Array a = Augment(frame, rng);
  Array b = Augment(frame, rng);
  return {std::move(a), std::move(b)};
}

Array Gather(const Array& batch, std::span<const int> indices) {
  const int64_t n = batch.dim(0);
  const int64_t per = batch.size() / n;
  Shape s = batch.shape();
  s[0] = static_cast<int64_t>(indices.size());
  std::vector<double> out;
  out.reserve(indices.size() * per);
  for (int i : indices) {
    if (i < 0 || i >= n) throw std::out_of_range("gather: index out of range");
    out.insert(out.end(), batch.data().begin() + i * per,
               batch.data().begin() + (i + 1) * per);
  }
  return Array(std::move(s), std::move(out));
}

std::vector<int> GatherLabels(std::span<const int> labels,
                              std::span<const int> indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(labels[i]);
  return out;
}

}  // namespace anonybench
