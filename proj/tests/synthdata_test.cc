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


#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "anonybench/rng.h"
#include "anonybench/synthdata.h"

namespace anonybench {
namespace {

DataConfig SmallData() {
  DataConfig c;
  c.action_train = 32;
  c.action_eval = 8;
  c.privacy_train = 32;
  c.privacy_eval = 16;
  return c;
}

TEST(SynthDataTest, ClipShapeAndRange) {
  const DataConfig c;
  const std::vector<int> y_b = {1, 0, 1};
  const Clip clip = MakeClip(c, 2, y_b, 42);
  EXPECT_EQ(clip.frames.shape(), (Shape{8, 3, 16, 16}));
  for (double v : clip.frames.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(SynthDataTest, ComponentsAreDisentangled) {
  const DataConfig c;
  // The action component ignores y_b entirely.
  const Array a = ActionComponent(c, 1, 9);
  EXPECT_EQ(a.vec(), ActionComponent(c, 1, 9).vec());
  // With no noise, changing y_b changes the clip by exactly the privacy
  // component (away from clipping).
  DataConfig quiet = c;
  quiet.noise_sigma = 0.0;
  const std::vector<int> none = {0, 0, 0}, some = {1, 1, 0};
  const Clip x0 = MakeClip(quiet, 3, none, 5);
  const Clip x1 = MakeClip(quiet, 3, some, 5);
  const Array p = PrivacyComponent(quiet, some);
  const size_t per = p.size();
  for (size_t i = 0; i < x0.frames.size(); ++i) {
    const double expect = std::min(1.0, x0.frames[i] + p[i % per]);
    EXPECT_NEAR(x1.frames[i], expect, 1e-12);
  }
  const Array blank = PrivacyComponent(quiet, none);
  for (double v : blank.data()) EXPECT_EQ(v, 0.0);
}

TEST(SynthDataTest, TrajectoryDirectionEncodesAction) {
  const DataConfig c;
  for (int y = 0; y < c.num_actions; ++y) {
    const auto path = BlobTrajectory(c, y, 17);
    ASSERT_EQ(path.size(), static_cast<size_t>(c.frames));
    const double dr = path[1].first - path[0].first;
    const double dc = path[1].second - path[0].second;
    const double angle = M_PI * y / c.num_actions;
    EXPECT_NEAR(dr, c.blob_speed * std::sin(angle), 1e-9);
    EXPECT_NEAR(dc, c.blob_speed * std::cos(angle), 1e-9);
  }
}

TEST(SynthDataTest, SplitsAreDeterministicAndSeedSensitive) {
  const DataConfig c = SmallData();
  EXPECT_EQ(DatasetDigest(MakeSplits(c, 1)), DatasetDigest(MakeSplits(c, 1)));
  EXPECT_NE(DatasetDigest(MakeSplits(c, 1)), DatasetDigest(MakeSplits(c, 2)));
}

TEST(SynthDataTest, SplitsAreStratified) {
  const DataConfig c = SmallData();
  const Splits s = MakeSplits(c, 3);
  std::map<int, int> actions;
  for (int y : s.action.train.labels) ++actions[y];
  for (int y = 0; y < c.num_actions; ++y) EXPECT_EQ(actions[y], 8);
  std::map<int, int> combos;
  const int K = c.num_attributes;
  for (int i = 0; i < s.privacy.train.size(); ++i) {
    int code = 0;
    for (int k = 0; k < K; ++k) {
      code |= static_cast<int>(s.privacy.train.attributes[i * K + k]) << k;
    }
    ++combos[code];
  }
  for (int code = 0; code < (1 << K); ++code) EXPECT_EQ(combos[code], 4);
}

TEST(SynthDataTest, TrainAndEvalDiffer) {
  const Splits s = MakeSplits(SmallData(), 4);
  std::set<uint64_t> seeds(s.action.train.seeds.begin(),
                           s.action.train.seeds.end());
  for (uint64_t seed : s.action.eval.seeds) EXPECT_EQ(seeds.count(seed), 0u);
}

TEST(SynthDataTest, InvalidConfigRejected) {
  DataConfig c;
  c.height = 15;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = DataConfig();
  c.num_attributes = 5;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
}

TEST(FramePairTest, FramesAreSkipApart) {
  Array clip({6, 1, 2, 2});
  for (size_t i = 0; i < clip.size(); ++i) clip[i] = static_cast<double>(i / 4);
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [a, b] = SampleFramePair(clip, 4, rng);
    EXPECT_EQ(b[0] - a[0], 4.0);
    EXPECT_LE(b[0], 5.0);
  }
  EXPECT_THROW(SampleFramePair(clip, 6, rng), std::out_of_range);
}

TEST(AugmentTest, KeepsShapeAndRange) {
  Rng rng(8);
  const Array frame({3, 16, 16}, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    const Array out = Augment(frame, rng);
    EXPECT_EQ(out.shape(), frame.shape());
    for (double v : out.data()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(GatherTest, SelectsRows) {
  const Array a({3, 2}, std::vector<double>{0, 1, 2, 3, 4, 5});
  const std::vector<int> idx = {2, 0};
  EXPECT_EQ(Gather(a, idx).vec(), (std::vector<double>{4, 5, 0, 1}));
  const std::vector<int> labels = {7, 8, 9};
  EXPECT_EQ(GatherLabels(labels, idx), (std::vector<int>{9, 7}));
}

}  // namespace
}  // namespace anonybench
