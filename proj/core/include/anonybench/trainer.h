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

// Adversarial anonymization training.
//
// The anonymizer f_A is pretrained towards the identity, the utility branch
// f_T gets a short supervised warm-up and the budget branch f_B starts random.
// Each iteration then runs
//
//   Step 1: theta_A <- theta_A - lr * grad(L_T - min(L_B, mu) + lambda * L_P)
//   Step 2: theta_T <- theta_T - lr * grad(L_T),
//           theta_B <- theta_B - lr * grad(L_B)
//
// where L_P only sees the action batch. Afterwards the anonymizer is frozen
// and fresh probes are trained on its output to measure utility and leakage.

#ifndef ANONYBENCH_TRAINER_H_
#define ANONYBENCH_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anonybench/checkpoint.h"
#include "anonybench/config.h"
#include "anonybench/losses.h"
#include "anonybench/nets.h"
#include "anonybench/optimizer.h"
#include "anonybench/synthdata.h"

namespace anonybench {

// A loss or gradient became NaN or infinite.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochLog {
  int epoch = 0;
  double l_t = 0.0;
  double l_b = 0.0;
  double l_penalty = 0.0;
  double l_a = 0.0;
  double wall_time = 0.0;  // 0 unless record_timing
};

std::string EpochLogCsv(const std::vector<EpochLog>& curve);

struct TrainingState {
  TrainingState(const RunConfig& config);

  Anonymizer anonymizer;
  UtilityNet utility;
  BudgetNet budget;
  Optimizer opt_anonymizer;
  Optimizer opt_utility;
  Optimizer opt_budget;
  int epoch = 0;  // completed anonymization epochs
  std::vector<EpochLog> curve;
};

// --- Initialization -------------------------------------------------------

struct PretrainReport {
  std::vector<double> losses;  // mean L1 per epoch
  double heldout_mae = 0.0;    // mean |X - f_A(X)| per pixel on eval frames
};

// The frames used for identity pretraining: `per_clip` frames of each clip,
// chosen by a seeded draw. Returns [n * per_clip, C, H, W].
Array PretrainFrames(const ActionSet& set, int per_clip, uint64_t seed);

// Mean absolute pixel difference between `frames` and f_A(frames).
double ReconstructionMae(const Anonymizer& anonymizer, const Array& frames);

PretrainReport PretrainAnonymizer(Anonymizer& anonymizer,
                                  const ActionSplit& split,
                                  const RunConfig& config);

// Supervised warm-up of f_T on clean clips. Returns per-epoch mean loss.
std::vector<double> PretrainUtility(UtilityNet& utility,
                                    const ActionSet& train,
                                    const RunConfig& config);

// Contrastive warm-up of f_B on clean pairs (epochs_budget_init epochs),
// drawn as in training; see FillPrivacyPairs.
std::vector<double> PretrainBudget(BudgetNet& budget, const PrivacySet& stills,
                                   const ActionSet& clips,
                                   const RunConfig& config);

// --- Minimax steps --------------------------------------------------------

struct StepBatch {
  Array action_clips;  // [B, T, C, H, W]
  std::vector<int> action_labels;
  Array privacy_a;  // [N, C, H, W], first view of each pair
  Array privacy_b;  // [N, C, H, W], second view
};

struct StepOptions {
  // When false the L_T term is evaluated but contributes no gradient.
  bool include_utility = true;
  // Checksum the frozen networks before and after the step.
  bool check_isolation = false;
};

struct Step1Report {
  double l_t = 0.0;
  double l_b = 0.0;
  double l_penalty = 0.0;
  double l_a = 0.0;
  // Whether any privacy input is reachable from the penalty node.
  bool penalty_touches_privacy = false;
};

struct Step2Report {
  double l_t = 0.0;
  double l_b = 0.0;
};

// Thrown by the isolation check when a frozen network changed.
class IsolationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Records the anonymizer objective for `batch` on `tape`. `anonymizer` holds
// the bound anonymizer parameters; the branches are bound as constants.
LossTerms BuildAnonymizerObjective(Tape& tape, const Bound& anonymizer,
                                   const TrainingState& state,
                                   const StepBatch& batch,
                                   const TrainConfig& config,
                                   const StepOptions& options = {});

Step1Report TrainStep1(TrainingState& state, const StepBatch& batch,
                       const TrainConfig& config,
                       const StepOptions& options = {});

Step2Report TrainStep2(TrainingState& state, const StepBatch& batch,
                       const TrainConfig& config,
                       const StepOptions& options = {});

// Gradient of `select(terms)` with respect to theta_A, one array per
// anonymizer parameter. Does not modify the state.
std::vector<Array> AnonymizerGradient(
    const TrainingState& state, const StepBatch& batch,
    const TrainConfig& config,
    const std::function<Tensor(const LossTerms&)>& select);

// Draws the two views of each budget pair. With BudgetPairs::kAugment the
// indices select stills of `stills`; with kTemporal they select clips of
// `clips` and the views are frames `skip` apart.
void FillPrivacyPairs(StepBatch& batch, const PrivacySet& stills,
                      const ActionSet& clips, const TrainConfig& config,
                      std::span<const int> indices, Rng& rng);

// --- Anonymization loop ---------------------------------------------------

struct LoopOptions {
  // Stop once this many epochs are complete (default: epochs_anon).
  std::optional<int> stop_after;
  bool check_isolation = false;
  // Called after every step pair with the Step-1 diagnostics.
  std::function<void(const Step1Report&)> on_step;
  std::function<void(const TrainingState&)> on_epoch;
};

// Runs epochs state.epoch .. epochs_anon - 1. Every epoch derives its own
// shuffles from the master seed, so resuming from a saved state is exact.
void TrainAnonymization(TrainingState& state, const Splits& splits,
                        const RunConfig& config,
                        const LoopOptions& options = {});

CheckpointFile SaveTrainingState(const TrainingState& state,
                                 const RunConfig& config);
// Throws CheckpointError if the stored networks do not match `config`.
TrainingState LoadTrainingState(const CheckpointFile& file,
                                const RunConfig& config);

// --- Probes ---------------------------------------------------------------

struct ProbeOptions {
  int epochs = 0;
  int batch = 16;
  double lr = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  LrSchedule schedule = LrSchedule::kConstant;
  uint64_t seed = 0;
};

ProbeOptions ActionProbeOptions(const RunConfig& config, UtilityArch arch);
ProbeOptions PrivacyProbeOptions(const RunConfig& config);

struct ActionProbe {
  UtilityNet net;
  std::vector<double> losses;
};

struct PrivacyProbe {
  BudgetNet net;
  std::vector<double> losses;
};

// Trains a fresh f_T' with cross-entropy on `clips` (already anonymized, or
// raw for the identity bypass).
ActionProbe TrainActionProbe(const UtilitySpec& spec, const Array& clips,
                             std::span<const int> labels,
                             const ProbeOptions& options);

// Trains a fresh multi-label f_B' with per-attribute BCE on `frames`.
PrivacyProbe TrainPrivacyProbe(const BudgetSpec& spec, const Array& frames,
                               const Array& attributes,
                               const ProbeOptions& options);

Array PredictLogits(const UtilityNet& net, const Array& clips);
// Per-attribute sigmoid scores [N, K].
Array PredictScores(const BudgetNet& net, const Array& frames);

}  // namespace anonybench

#endif  // ANONYBENCH_TRAINER_H_
