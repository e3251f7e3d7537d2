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

#include "anonybench/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "anonybench/ops.h"
#include "anonybench/rng.h"

namespace anonybench {
namespace {

using Clock = std::chrono::steady_clock;

constexpr int64_t kPredictChunk = 64;

std::vector<std::vector<int>> Minibatches(int n, int batch, uint64_t seed) {
  const std::vector<int> perm = Permutation(n, seed);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < n; start += batch) {
    const int end = std::min(n, start + batch);
    out.emplace_back(perm.begin() + start, perm.begin() + end);
  }
  return out;
}

void CheckFinite(double loss, const std::string& where) {
  if (!std::isfinite(loss)) {
    throw NumericalError(where + ": loss is not finite");
  }
}

// Accumulates gradients from `bound` into `params` and applies one update.
void ApplyUpdate(ParamSet& params, const Bound& bound, Optimizer& optimizer,
                 const std::string& where) {
  params.AccumulateGrads(bound);
  if (!params.GradsFinite()) {
    params.ZeroGrads();
    throw NumericalError(where + ": gradient is not finite");
  }
  optimizer.Step(params);
}

// Rows [i * per, (i + 1) * per) of a flat batch as one item of shape `item`.
Array Row(const Array& batch, int64_t i, const Shape& item) {
  const int64_t per = NumElements(item);
  return Array(item,
               std::vector<double>(batch.data().begin() + i * per,
                                   batch.data().begin() + (i + 1) * per));
}

Array Stack(const std::vector<Array>& items) {
  Shape s = items.front().shape();
  s.insert(s.begin(), static_cast<int64_t>(items.size()));
  std::vector<double> out;
  out.reserve(static_cast<size_t>(NumElements(s)));
  for (const Array& a : items) {
    out.insert(out.end(), a.data().begin(), a.data().end());
  }
  return Array(std::move(s), std::move(out));
}

Tensor Hinge(const Tensor& distance, double limiter) {
  return MaxScalar(AddScalar(distance, -limiter), 0.0);
}

struct Objective {
  LossTerms terms;
  Tensor privacy_a;
  Tensor privacy_b;
};

Objective BuildObjective(Tape& tape, const Bound& pa, const TrainingState& s,
                         const StepBatch& batch, const TrainConfig& config,
                         const StepOptions& options) {
  if (batch.action_labels.empty() || batch.privacy_a.size() == 0) {
    throw std::invalid_argument("train step: empty batch");
  }
  Objective o;
  const Tensor x = tape.Constant(batch.action_clips);
  o.privacy_a = tape.Constant(batch.privacy_a);
  o.privacy_b = tape.Constant(batch.privacy_b);
  const Bound pt = s.utility.params().Bind(tape, false);
  const Bound pb = s.budget.params().Bind(tape, false);

  const Tensor anon_x = s.anonymizer.Forward(pa, x);
  Tensor l_t = CrossEntropy(s.utility.Forward(pt, anon_x), batch.action_labels);
  if (!options.include_utility) l_t = tape.Constant(l_t.value());

  const Tensor z = s.budget.Forward(pb, s.anonymizer.Forward(pa, o.privacy_a));
  const Tensor zp = s.budget.Forward(pb, s.anonymizer.Forward(pa, o.privacy_b));
  const Tensor l_b = NtXent(z, zp, config.tau);

  Tensor l_p;
  if (config.penalty_space == PenaltySpace::kPixel) {
    l_p = PenaltyLoss(x, anon_x, config.limiter);
  } else {
    l_p = Hinge(RmsDiff(s.utility.Features(pt, x),
                        s.utility.Features(pt, anon_x)),
                config.limiter);
  }
  o.terms.l_t = l_t;
  o.terms.l_b = l_b;
  o.terms.l_penalty = l_p;
  o.terms.l_a =
      AnonymizerLoss(l_t, l_b, l_p, config.lambda_penalty, config.mu);
  return o;
}

// Minibatch training loop shared by the warm-ups and the probes. `loss`
// records the loss of one minibatch given the bound trainable parameters.
std::vector<double> Fit(
    ParamSet& params, int n, const ProbeOptions& options,
    const std::string& where,
    const std::function<Tensor(Tape&, const Bound&, std::span<const int>)>&
        loss) {
  std::vector<double> curve;
  if (options.epochs <= 0) return curve;
  Optimizer opt(options.optimizer, options.lr);
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < options.epochs; ++e) {
    double sum = 0.0;
    for (const auto& idx :
         Minibatches(n, options.batch, DeriveSeed(options.seed, "shuffle", e))) {
      Tape tape;
      const Bound bound = params.Bind(tape, true);
      const Tensor l = loss(tape, bound, idx);
      CheckFinite(l.item(), where);
      tape.Backward(l);
      ApplyUpdate(params, bound, opt, where);
      sum += l.item() * static_cast<double>(idx.size());
    }
    const double mean = sum / n;
    curve.push_back(mean);
    if (options.schedule == LrSchedule::kStepOnPlateau) {
      if (mean < best * (1.0 - 1e-3)) {
        best = mean;
      } else {
        opt.set_learning_rate(opt.learning_rate() / 5.0);
      }
    }
  }
  return curve;
}

}  // namespace

std::string EpochLogCsv(const std::vector<EpochLog>& curve) {
  std::string out = "epoch,l_t,l_b,l_penalty,l_a,wall_time\n";
  char buf[256];
  for (const EpochLog& e : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.3f\n",
                  e.epoch, e.l_t, e.l_b, e.l_penalty, e.l_a, e.wall_time);
    out += buf;
  }
  return out;
}

TrainingState::TrainingState(const RunConfig& config)
    : anonymizer(config.anonymizer_spec(),
                 DeriveSeed(config.seed, "init/anonymizer", 0)),
      utility(config.utility_spec(UtilityArch::kConvTemporalMean),
              DeriveSeed(config.seed, "init/utility", 0)),
      budget(config.budget_spec(BudgetHead::kProjection),
             DeriveSeed(config.seed, "init/budget", 0)),
      opt_anonymizer(config.train.optimizer, config.train.lr_anon),
      opt_utility(config.train.optimizer, config.train.lr_util),
      opt_budget(config.train.optimizer, config.train.lr_budget) {}

// --- Initialization -------------------------------------------------------

Array PretrainFrames(const ActionSet& set, int per_clip, uint64_t seed) {
  const Shape& s = set.clips.shape();
  const int T = static_cast<int>(s[1]);
  if (per_clip < 1 || per_clip > T) {
    throw std::invalid_argument("pretrain frames: per_clip must be in [1, T]");
  }
  const Shape frame(s.begin() + 2, s.end());
  std::vector<Array> frames;
  for (int i = 0; i < set.size(); ++i) {
    const std::vector<int> order = Permutation(T, DeriveSeed(seed, "clip", i));
    for (int k = 0; k < per_clip; ++k) {
      frames.push_back(Row(set.clips, static_cast<int64_t>(i) * T + order[k],
                           frame));
    }
  }
  return Stack(frames);
}

double ReconstructionMae(const Anonymizer& anonymizer, const Array& frames) {
  const Array out = anonymizer.Apply(frames);
  double sum = 0.0;
  for (size_t i = 0; i < frames.size(); ++i) {
    sum += std::abs(frames[i] - out[i]);
  }
  return sum / static_cast<double>(frames.size());
}

PretrainReport PretrainAnonymizer(Anonymizer& anonymizer,
                                  const ActionSplit& split,
                                  const RunConfig& config) {
  const TrainConfig& tc = config.train;
  const Shape& es = split.eval.clips.shape();
  const Array heldout = split.eval.clips.Reshaped(
      {es[0] * es[1], es[2], es[3], es[4]});
  PretrainReport report;
  const Array frames = PretrainFrames(
      split.train, tc.pretrain_frames_per_clip,
      DeriveSeed(config.seed, "pretrain/frames", 0));
  ProbeOptions options{tc.epochs_pretrain, tc.batch_pretrain, tc.lr_anon,
                       tc.optimizer, LrSchedule::kConstant,
                       DeriveSeed(config.seed, "pretrain/anonymizer", 0)};
  report.losses = Fit(
      anonymizer.params(), static_cast<int>(frames.dim(0)), options,
      "pretrain", [&](Tape& tape, const Bound& p, std::span<const int> idx) {
        const Tensor x = tape.Constant(Gather(frames, idx));
        return L1ReconLoss(x, anonymizer.Forward(p, x));
      });
  report.heldout_mae = ReconstructionMae(anonymizer, heldout);
  CheckFinite(report.heldout_mae, "pretrain");
  return report;
}

std::vector<double> PretrainUtility(UtilityNet& utility,
                                    const ActionSet& train,
                                    const RunConfig& config) {
  const TrainConfig& tc = config.train;
  ProbeOptions options{tc.epochs_util_init, tc.batch_action, tc.lr_util,
                       tc.optimizer, LrSchedule::kConstant,
                       DeriveSeed(config.seed, "pretrain/utility", 0)};
  return Fit(utility.params(), train.size(), options, "pretrain utility",
             [&](Tape& tape, const Bound& p, std::span<const int> idx) {
               const Tensor x = tape.Constant(Gather(train.clips, idx));
               return CrossEntropy(utility.Forward(p, x),
                                   GatherLabels(train.labels, idx));
             });
}

std::vector<double> PretrainBudget(BudgetNet& budget, const PrivacySet& stills,
                                   const ActionSet& clips,
                                   const RunConfig& config) {
  const TrainConfig& tc = config.train;
  ProbeOptions options{tc.epochs_budget_init, tc.batch_privacy, tc.lr_budget,
                       tc.optimizer, LrSchedule::kConstant,
                       DeriveSeed(config.seed, "pretrain/budget", 0)};
  Rng rng(DeriveSeed(config.seed, "pretrain/budget/pairs", 0));
  const int pool = tc.budget_pairs == BudgetPairs::kAugment ? stills.size()
                                                            : clips.size();
  return Fit(budget.params(), pool, options, "pretrain budget",
             [&](Tape& tape, const Bound& p, std::span<const int> idx) {
               StepBatch b;
               FillPrivacyPairs(b, stills, clips, tc, idx, rng);
               return NtXent(budget.Forward(p, tape.Constant(b.privacy_a)),
                             budget.Forward(p, tape.Constant(b.privacy_b)),
                             tc.tau);
             });
}

// --- Minimax steps --------------------------------------------------------

void FillPrivacyPairs(StepBatch& batch, const PrivacySet& stills,
                      const ActionSet& clips, const TrainConfig& config,
                      std::span<const int> indices, Rng& rng) {
  std::vector<Array> a, b;
  if (config.budget_pairs == BudgetPairs::kAugment) {
    const Shape& s = stills.frames.shape();
    const Shape frame(s.begin() + 1, s.end());
    for (int i : indices) {
      auto [u, v] = AugmentedPair(Row(stills.frames, i, frame), rng);
      a.push_back(std::move(u));
      b.push_back(std::move(v));
    }
  } else {
    const Shape& s = clips.clips.shape();
    const Shape clip(s.begin() + 1, s.end());
    for (int i : indices) {
      auto [u, v] = SampleFramePair(Row(clips.clips, i, clip), config.skip, rng);
      a.push_back(std::move(u));
      b.push_back(std::move(v));
    }
  }
  batch.privacy_a = Stack(a);
  batch.privacy_b = Stack(b);
}

LossTerms BuildAnonymizerObjective(Tape& tape, const Bound& anonymizer,
                                   const TrainingState& state,
                                   const StepBatch& batch,
                                   const TrainConfig& config,
                                   const StepOptions& options) {
  return BuildObjective(tape, anonymizer, state, batch, config, options).terms;
}

Step1Report TrainStep1(TrainingState& state, const StepBatch& batch,
                       const TrainConfig& config, const StepOptions& options) {
  uint64_t util_before = 0, budget_before = 0;
  if (options.check_isolation) {
    util_before = state.utility.params().Checksum();
    budget_before = state.budget.params().Checksum();
  }
  Tape tape;
  const Bound pa = state.anonymizer.params().Bind(tape, true);
  const Objective o = BuildObjective(tape, pa, state, batch, config, options);
  Step1Report r;
  r.l_t = o.terms.t();
  r.l_b = o.terms.b();
  r.l_penalty = o.terms.penalty();
  r.l_a = o.terms.a();
  r.penalty_touches_privacy = tape.DependsOn(o.privacy_a, o.terms.l_penalty) ||
                              tape.DependsOn(o.privacy_b, o.terms.l_penalty);
  CheckFinite(r.l_a, "step 1");
  tape.Backward(o.terms.l_a);
  ApplyUpdate(state.anonymizer.params(), pa, state.opt_anonymizer, "step 1");
  if (options.check_isolation &&
      (state.utility.params().Checksum() != util_before ||
       state.budget.params().Checksum() != budget_before)) {
    throw IsolationError("step 1 modified a frozen branch");
  }
  return r;
}

Step2Report TrainStep2(TrainingState& state, const StepBatch& batch,
                       const TrainConfig& config, const StepOptions& options) {
  if (batch.action_labels.empty() || batch.privacy_a.size() == 0) {
    throw std::invalid_argument("train step: empty batch");
  }
  const uint64_t anon_before =
      options.check_isolation ? state.anonymizer.params().Checksum() : 0;
  const Array anon_x = state.anonymizer.Apply(batch.action_clips);
  const Array anon_a = state.anonymizer.Apply(batch.privacy_a);
  const Array anon_b = state.anonymizer.Apply(batch.privacy_b);
  Step2Report r;
  {
    Tape tape;
    const Bound pt = state.utility.params().Bind(tape, true);
    const Tensor l = CrossEntropy(
        state.utility.Forward(pt, tape.Constant(anon_x)), batch.action_labels);
    r.l_t = l.item();
    CheckFinite(r.l_t, "step 2 utility");
    tape.Backward(l);
    ApplyUpdate(state.utility.params(), pt, state.opt_utility,
                "step 2 utility");
  }
  {
    Tape tape;
    const Bound pb = state.budget.params().Bind(tape, true);
    const Tensor l =
        NtXent(state.budget.Forward(pb, tape.Constant(anon_a)),
               state.budget.Forward(pb, tape.Constant(anon_b)), config.tau);
    r.l_b = l.item();
    CheckFinite(r.l_b, "step 2 budget");
    tape.Backward(l);
    ApplyUpdate(state.budget.params(), pb, state.opt_budget, "step 2 budget");
  }
  if (options.check_isolation &&
      state.anonymizer.params().Checksum() != anon_before) {
    throw IsolationError("step 2 modified the anonymizer");
  }
  return r;
}

std::vector<Array> AnonymizerGradient(
    const TrainingState& state, const StepBatch& batch,
    const TrainConfig& config,
    const std::function<Tensor(const LossTerms&)>& select) {
  Tape tape;
  const Bound pa = state.anonymizer.params().Bind(tape, true);
  const LossTerms terms =
      BuildAnonymizerObjective(tape, pa, state, batch, config);
  tape.Backward(select(terms));
  std::vector<Array> grads;
  for (const Tensor& t : pa) grads.push_back(t.grad());
  return grads;
}

// --- Anonymization loop ---------------------------------------------------

void TrainAnonymization(TrainingState& state, const Splits& splits,
                        const RunConfig& config, const LoopOptions& options) {
  const TrainConfig& tc = config.train;
  const ActionSet& action = splits.action.train;
  const PrivacySet& stills = splits.privacy.train;
  const int pool = tc.budget_pairs == BudgetPairs::kAugment ? stills.size()
                                                            : action.size();
  const int stop =
      std::min(options.stop_after.value_or(tc.epochs_anon), tc.epochs_anon);
  const StepOptions step_options{
      true, options.check_isolation || tc.check_isolation};

  while (state.epoch < stop) {
    const int e = state.epoch;
    const auto start = Clock::now();
    const std::vector<int> privacy_order =
        Permutation(pool, DeriveSeed(config.seed, "anon/privacy", e));
    Rng rng(DeriveSeed(config.seed, "anon/augment", e));
    size_t cursor = 0;
    EpochLog log;
    log.epoch = e;
    int steps = 0;
    for (const auto& idx : Minibatches(action.size(), tc.batch_action,
                                       DeriveSeed(config.seed, "anon/action", e))) {
      StepBatch batch;
      batch.action_clips = Gather(action.clips, idx);
      batch.action_labels = GatherLabels(action.labels, idx);
      std::vector<int> pidx(static_cast<size_t>(tc.batch_privacy));
      for (int& i : pidx) i = privacy_order[cursor++ % privacy_order.size()];
      FillPrivacyPairs(batch, stills, action, tc, pidx, rng);

      const Step1Report r = TrainStep1(state, batch, tc, step_options);
      if (options.on_step) options.on_step(r);
      TrainStep2(state, batch, tc, step_options);

      log.l_t += r.l_t;
      log.l_b += r.l_b;
      log.l_penalty += r.l_penalty;
      log.l_a += r.l_a;
      ++steps;
    }
    if (steps > 0) {
      log.l_t /= steps;
      log.l_b /= steps;
      log.l_penalty /= steps;
      log.l_a /= steps;
    }
    if (config.record_timing) {
      log.wall_time =
          std::chrono::duration<double>(Clock::now() - start).count();
    }
    state.curve.push_back(log);
    ++state.epoch;
    if (options.on_epoch) options.on_epoch(state);
  }
}

CheckpointFile SaveTrainingState(const TrainingState& state,
                                 const RunConfig& config) {
  CheckpointFile file;
  file.meta["kind"] = "training_state";
  file.meta["epoch"] = state.epoch;
  file.meta["config_digest"] = ConfigDigest(config);
  file.meta["config"] = SerializeConfig(config, false);
  nlohmann::json curve = nlohmann::json::array();
  for (const EpochLog& e : state.curve) {
    curve.push_back({e.epoch, e.l_t, e.l_b, e.l_penalty, e.l_a, e.wall_time});
  }
  file.meta["curve"] = curve;
  AppendParams(file, "anonymizer", state.anonymizer.params());
  AppendParams(file, "utility", state.utility.params());
  AppendParams(file, "budget", state.budget.params());
  state.opt_anonymizer.Save(file, "opt/anonymizer");
  state.opt_utility.Save(file, "opt/utility");
  state.opt_budget.Save(file, "opt/budget");
  return file;
}

TrainingState LoadTrainingState(const CheckpointFile& file,
                                const RunConfig& config) {
  if (file.meta.value("kind", "") != "training_state") {
    throw CheckpointError("checkpoint: not a training state");
  }
  TrainingState state(config);
  RestoreParams(file, "anonymizer", state.anonymizer.params());
  RestoreParams(file, "utility", state.utility.params());
  RestoreParams(file, "budget", state.budget.params());
  try {
    state.opt_anonymizer.Load(file, "opt/anonymizer",
                              state.anonymizer.params());
    state.opt_utility.Load(file, "opt/utility", state.utility.params());
    state.opt_budget.Load(file, "opt/budget", state.budget.params());
    state.epoch = file.meta.at("epoch").get<int>();
    for (const auto& row : file.meta.at("curve")) {
      state.curve.push_back(EpochLog{row.at(0).get<int>(), row.at(1), row.at(2),
                                     row.at(3), row.at(4), row.at(5)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: bad metadata: ") + e.what());
  }
  return state;
}

// --- Probes ---------------------------------------------------------------

ProbeOptions ActionProbeOptions(const RunConfig& config, UtilityArch arch) {
  const TrainConfig& tc = config.train;
  return ProbeOptions{tc.epochs_action, tc.batch_probe, tc.lr_probe,
                      tc.optimizer, tc.probe_schedule,
                      DeriveSeed(config.seed, "probe/action/" + ToString(arch),
                                 0)};
}

ProbeOptions PrivacyProbeOptions(const RunConfig& config) {
  const TrainConfig& tc = config.train;
  return ProbeOptions{tc.epochs_privacy, tc.batch_probe, tc.lr_probe,
                      tc.optimizer, tc.probe_schedule,
                      DeriveSeed(config.seed, "probe/privacy", 0)};
}

ActionProbe TrainActionProbe(const UtilitySpec& spec, const Array& clips,
                             std::span<const int> labels,
                             const ProbeOptions& options) {
  ActionProbe probe{UtilityNet(spec, DeriveSeed(options.seed, "init", 0)), {}};
  probe.losses = Fit(
      probe.net.params(), static_cast<int>(labels.size()), options,
      "action probe", [&](Tape& tape, const Bound& p, std::span<const int> idx) {
        return CrossEntropy(probe.net.Forward(p, tape.Constant(Gather(clips, idx))),
                            GatherLabels(labels, idx));
      });
  return probe;
}

PrivacyProbe TrainPrivacyProbe(const BudgetSpec& spec, const Array& frames,
                               const Array& attributes,
                               const ProbeOptions& options) {
  if (spec.head != BudgetHead::kMultiLabel) {
    throw std::invalid_argument("privacy probe: needs the multi-label head");
  }
  PrivacyProbe probe{BudgetNet(spec, DeriveSeed(options.seed, "init", 0)), {}};
  probe.losses = Fit(
      probe.net.params(), static_cast<int>(frames.dim(0)), options,
      "privacy probe", [&](Tape& tape, const Bound& p, std::span<const int> idx) {
        return BinaryCrossEntropy(
            probe.net.Forward(p, tape.Constant(Gather(frames, idx))),
            tape.Constant(Gather(attributes, idx)));
      });
  return probe;
}

Array PredictLogits(const UtilityNet& net, const Array& clips) {
  const int64_t n = clips.dim(0);
  std::vector<double> out;
  for (int64_t start = 0; start < n; start += kPredictChunk) {
    std::vector<int> idx;
    for (int64_t i = start; i < std::min(n, start + kPredictChunk); ++i) {
      idx.push_back(static_cast<int>(i));
    }
    Tape tape;
    const Bound p = net.params().Bind(tape, false);
    const Array& y = net.Forward(p, tape.Constant(Gather(clips, idx))).value();
    out.insert(out.end(), y.data().begin(), y.data().end());
  }
  return Array({n, net.spec().num_classes}, std::move(out));
}

Array PredictScores(const BudgetNet& net, const Array& frames) {
  const int64_t n = frames.dim(0);
  std::vector<double> out;
  for (int64_t start = 0; start < n; start += kPredictChunk) {
    std::vector<int> idx;
    for (int64_t i = start; i < std::min(n, start + kPredictChunk); ++i) {
      idx.push_back(static_cast<int>(i));
    }
    Tape tape;
    const Bound p = net.params().Bind(tape, false);
    const Array& y =
        Sigmoid(net.Forward(p, tape.Constant(Gather(frames, idx)))).value();
    out.insert(out.end(), y.data().begin(), y.data().end());
  }
  return Array({n, static_cast<int64_t>(net.output_dim())}, std::move(out));
}

}  // namespace anonybench
