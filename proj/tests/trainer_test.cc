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
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "anonybench/ops.h"
#include "anonybench/rng.h"
#include "anonybench/trainer.h"
#include "test_util.h"

namespace anonybench {
namespace {

using testing::TinyConfig;

class TrainerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = TinyConfig();
    splits_ = MakeSplits(config_.data, config_.seed);
  }

  StepBatch Batch(uint64_t seed) const {
    StepBatch b;
    const std::vector<int> idx = {0, 1, 2, 3};
    b.action_clips = Gather(splits_.action.train.clips, idx);
    b.action_labels = GatherLabels(splits_.action.train.labels, idx);
    Rng rng(seed);
    FillPrivacyPairs(b, splits_.privacy.train, splits_.action.train,
                     config_.train, idx, rng);
    return b;
  }

  RunConfig config_;
  Splits splits_;
};

TEST_F(TrainerTest, Step1UpdatesOnlyTheAnonymizer) {
  TrainingState s(config_);
  const uint64_t a = s.anonymizer.params().Checksum();
  const uint64_t u = s.utility.params().Checksum();
  const uint64_t b = s.budget.params().Checksum();
  StepOptions opts;
  opts.check_isolation = true;
  TrainStep1(s, Batch(1), config_.train, opts);
  EXPECT_NE(s.anonymizer.params().Checksum(), a);
  EXPECT_EQ(s.utility.params().Checksum(), u);
  EXPECT_EQ(s.budget.params().Checksum(), b);
}

TEST_F(TrainerTest, Step2LeavesTheAnonymizer) {
  TrainingState s(config_);
  const uint64_t a = s.anonymizer.params().Checksum();
  const uint64_t u = s.utility.params().Checksum();
  const uint64_t b = s.budget.params().Checksum();
  StepOptions opts;
  opts.check_isolation = true;
  TrainStep2(s, Batch(1), config_.train, opts);
  EXPECT_EQ(s.anonymizer.params().Checksum(), a);
  EXPECT_NE(s.utility.params().Checksum(), u);
  EXPECT_NE(s.budget.params().Checksum(), b);
}

// grad L_A = grad L_T - grad L_B + lambda grad L_P while L_B < mu.
TEST_F(TrainerTest, GradientDecomposesWithSigns) {
  config_.train.mu = 100.0;
  config_.train.lambda_penalty = 0.7;
  config_.train.limiter = 0.0;  // keep the penalty active
  TrainingState s(config_);
  const StepBatch batch = Batch(2);
  auto grad = [&](auto select) {
    return AnonymizerGradient(s, batch, config_.train, select);
  };
  const auto ga = grad([](const LossTerms& t) { return t.l_a; });
  const auto gt = grad([](const LossTerms& t) { return t.l_t; });
  const auto gb = grad([](const LossTerms& t) { return t.l_b; });
  const auto gp = grad([](const LossTerms& t) { return t.l_penalty; });
  double norm_b = 0.0;
  for (size_t p = 0; p < ga.size(); ++p) {
    for (size_t i = 0; i < ga[p].size(); ++i) {
      EXPECT_NEAR(ga[p][i], gt[p][i] - gb[p][i] + 0.7 * gp[p][i], 1e-10);
      norm_b += gb[p][i] * gb[p][i];
    }
  }
  EXPECT_GT(norm_b, 0.0);
}

TEST_F(TrainerTest, CapRemovesBudgetGradient) {
  config_.train.mu = 1e-6;
  config_.train.lambda_penalty = 0.0;
  TrainingState s(config_);
  const StepBatch batch = Batch(3);
  const auto ga = AnonymizerGradient(s, batch, config_.train,
                                     [](const LossTerms& t) { return t.l_a; });
  const auto gt = AnonymizerGradient(s, batch, config_.train,
                                     [](const LossTerms& t) { return t.l_t; });
  for (size_t p = 0; p < ga.size(); ++p) EXPECT_EQ(ga[p].vec(), gt[p].vec());
}

TEST_F(TrainerTest, PenaltySeesOnlyTheActionBatch) {
  TrainingState s(config_);
  const Step1Report r = TrainStep1(s, Batch(4), config_.train);
  EXPECT_FALSE(r.penalty_touches_privacy);
}

TEST_F(TrainerTest, NonFiniteInputIsNumericalError) {
  TrainingState s(config_);
  StepBatch b = Batch(5);
  b.action_clips[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(TrainStep1(s, b, config_.train), NumericalError);
}

TEST_F(TrainerTest, LoopIsDeterministic) {
  TrainingState a(config_), b(config_);
  TrainAnonymization(a, splits_, config_);
  TrainAnonymization(b, splits_, config_);
  EXPECT_EQ(a.anonymizer.params().Checksum(), b.anonymizer.params().Checksum());
  EXPECT_EQ(a.budget.params().Checksum(), b.budget.params().Checksum());
  ASSERT_EQ(a.curve.size(), 2u);
  EXPECT_EQ(a.curve[1].l_a, b.curve[1].l_a);
  EXPECT_EQ(a.curve[1].wall_time, 0.0);
}

TEST_F(TrainerTest, ResumeMatchesUninterruptedRun) {
  TrainingState full(config_);
  TrainAnonymization(full, splits_, config_);

  TrainingState half(config_);
  LoopOptions stop;
  stop.stop_after = 1;
  TrainAnonymization(half, splits_, config_, stop);
  const std::string bytes = EncodeCheckpoint(SaveTrainingState(half, config_));
  TrainingState resumed =
      LoadTrainingState(DecodeCheckpoint(bytes), config_);
  EXPECT_EQ(resumed.epoch, 1);
  TrainAnonymization(resumed, splits_, config_);
  EXPECT_EQ(EncodeCheckpoint(SaveTrainingState(resumed, config_)),
            EncodeCheckpoint(SaveTrainingState(full, config_)));
}

TEST_F(TrainerTest, LoadRejectsOtherArchitecture) {
  TrainingState s(config_);
  const CheckpointFile f = SaveTrainingState(s, config_);
  RunConfig other = config_;
  other.nets.anon_width1 = 6;
  EXPECT_THROW(LoadTrainingState(f, other), CheckpointError);
}

TEST_F(TrainerTest, PretrainingReducesReconstructionError) {
  config_.train.epochs_pretrain = 5;
  TrainingState s(config_);
  const double before = ReconstructionMae(
      s.anonymizer, PretrainFrames(splits_.action.eval, 1, 0));
  const PretrainReport r =
      PretrainAnonymizer(s.anonymizer, splits_.action, config_);
  EXPECT_EQ(r.losses.size(), 5u);
  EXPECT_LT(r.heldout_mae, before);
}

TEST_F(TrainerTest, EpochCsvFormat) {
  std::vector<EpochLog> curve = {{0, 1.0, 2.0, 0.0, -1.0, 0.0}};
  EXPECT_EQ(EpochLogCsv(curve),
            "epoch,l_t,l_b,l_penalty,l_a,wall_time\n0,1,2,0,-1,0.000\n");
}

TEST(ProbeTest, LearnsRawActions) {
  RunConfig c = TinyConfig();
  c.data.action_train = 64;
  c.data.action_eval = 32;
  const Splits s = MakeSplits(c.data, 11);
  ProbeOptions opts = ActionProbeOptions(c, UtilityArch::kConvTemporalMean);
  opts.epochs = 15;
  const ActionProbe probe =
      TrainActionProbe(c.utility_spec(UtilityArch::kConvTemporalMean),
                       s.action.train.clips, s.action.train.labels, opts);
  EXPECT_LT(probe.losses.back(), probe.losses.front());
}

TEST(ProbeTest, PrivacyProbeNeedsMultiLabelHead) {
  const RunConfig c = TinyConfig();
  const Splits s = MakeSplits(c.data, 1);
  EXPECT_ANY_THROW(TrainPrivacyProbe(c.budget_spec(BudgetHead::kProjection),
                                     s.privacy.train.frames,
                                     s.privacy.train.attributes,
                                     PrivacyProbeOptions(c)));
}

}  // namespace
}  // namespace anonybench
