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

// Run configuration. The text form is flat UTF-8 "key = value" lines with
// '#' comments; unknown keys are errors. Serialize() writes every key in a
// fixed order, so the output is a complete, diff-able record of a run.

#ifndef ANONYBENCH_CONFIG_H_
#define ANONYBENCH_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anonybench/nets.h"
#include "anonybench/optimizer.h"
#include "anonybench/synthdata.h"

namespace anonybench {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class PenaltySpace {
  kPixel,    // rms(X - f_A(X))
  kFeature,  // rms(f_T(X) - f_T(f_A(X))) on utility features
};

enum class BudgetPairs {
  kAugment,   // two augmentations of one still frame
  kTemporal,  // frames `skip` apart in an action clip
};

enum class LrSchedule {
  kConstant,
  // Divide the rate by 5 when the epoch loss stops improving.
  kStepOnPlateau,
};

struct NetConfig {
  int anon_width1 = 8;
  int anon_width2 = 16;
  bool anon_skip = false;
  OutputMode anon_output = OutputMode::kSigmoid;
  int util_width1 = 8;
  int util_width2 = 16;
  int budget_width1 = 8;
  int budget_width2 = 16;
  int budget_feature_dim = 32;
  int projection_dim = 16;
};

struct TrainConfig {
  double limiter = 0.3;  // B
  double lambda_penalty = 1.0;
  double mu = 4.0;
  double tau = 0.1;
  double lr_anon = 1e-3;
  double lr_util = 1e-3;
  double lr_budget = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;

  int epochs_pretrain = 100;
  int pretrain_frames_per_clip = 1;
  int batch_pretrain = 4;
  int epochs_util_init = 8;
  int epochs_budget_init = 20;
  int epochs_anon = 30;
  int batch_action = 8;
  int batch_privacy = 16;
  int skip = 4;
  BudgetPairs budget_pairs = BudgetPairs::kTemporal;
  PenaltySpace penalty_space = PenaltySpace::kPixel;

  int epochs_action = 12;
  int epochs_privacy = 20;
  double lr_probe = 1e-3;
  int batch_probe = 16;
  UtilityArch probe_arch = UtilityArch::kConvTemporalMean;
  LrSchedule probe_schedule = LrSchedule::kConstant;

  // Checksum the frozen networks around every step.
  bool check_isolation = false;

  void Validate() const;
};

struct SweepConfig {
  std::vector<double> b_values = {0.0, 0.3, 0.5, 0.7, 0.9, 1.0};
  std::vector<double> lambda_values = {0.0, 0.1, 0.3, 0.5, 0.7, 1.0};
  // false: B grid at fixed_lambda plus lambda grid at fixed_b.
  bool cross = false;
  double fixed_lambda = 1.0;
  double fixed_b = 0.3;
  bool raw_pretrained_rows = false;
  int jobs = 1;
};

struct RunConfig {
  uint64_t seed = 20240607;
  std::string out_dir = "anonybench_out";
  bool record_timing = false;
  DataConfig data;
  NetConfig nets;
  TrainConfig train;
  SweepConfig sweep;

  void Validate() const;

  AnonymizerSpec anonymizer_spec() const;
  UtilitySpec utility_spec(UtilityArch arch) const;
  BudgetSpec budget_spec(BudgetHead head) const;
};

// All recognised keys, in serialization order.
std::vector<std::string> ConfigKeys();
void SetConfigValue(RunConfig& config, std::string_view key,
                    std::string_view value);
std::string GetConfigValue(const RunConfig& config, std::string_view key);

// Applies "key = value" lines on top of `base`.
RunConfig ParseConfig(std::string_view text, RunConfig base = RunConfig());
// With `placement` false the keys that cannot change results (out_dir, jobs)
// are left out; ConfigDigest hashes that form.
std::string SerializeConfig(const RunConfig& config, bool placement = true);
std::string ConfigDigest(const RunConfig& config);

std::string ToString(PenaltySpace space);
std::string ToString(BudgetPairs pairs);
std::string ToString(LrSchedule schedule);

}  // namespace anonybench

#endif  // ANONYBENCH_CONFIG_H_
