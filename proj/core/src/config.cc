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

#include "anonybench/config.h"

#include <charconv>
#include <functional>
#include <map>

#include "anonybench/digest.h"

namespace anonybench {
namespace {

std::string_view Trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Bad(std::string_view key, std::string_view value,
                      std::string_view expected) {
  throw ConfigError(std::string(key), "config key '" + std::string(key) +
                                          "': cannot parse '" +
                                          std::string(value) + "' as " +
                                          std::string(expected));
}

int64_t ToInt(std::string_view key, std::string_view v) {
  int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) Bad(key, v, "an integer");
  return out;
}

uint64_t ToU64(std::string_view key, std::string_view v) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    Bad(key, v, "an unsigned integer");
  }
  return out;
}

double ToDouble(std::string_view key, std::string_view v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) Bad(key, v, "a number");
  return out;
}

bool ToBool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  Bad(key, v, "true/false");
}

std::vector<double> ToList(std::string_view key, std::string_view v) {
  std::vector<double> out;
  while (!v.empty()) {
    const size_t comma = v.find(',');
    out.push_back(ToDouble(key, Trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string Fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string Fmt(int64_t v) { return std::to_string(v); }
std::string Fmt(bool v) { return v ? "true" : "false"; }

std::string Fmt(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += Fmt(v[i]);
  }
  return s;
}

template <class E>
E Choice(std::string_view key, std::string_view v,
         std::initializer_list<std::pair<const char*, E>> options) {
  std::string expected;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    expected += expected.empty() ? "" : "|";
    expected += name;
  }
  Bad(key, v, expected);
}

struct Entry {
  std::function<void(RunConfig&, std::string_view key, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

using Registry = std::vector<std::pair<std::string, Entry>>;

#define INT_KEY(name, field)                                                \
  {name,                                                                    \
   {[](RunConfig& c, std::string_view k, std::string_view v) {              \
      c.field = static_cast<decltype(c.field)>(ToInt(k, v));                \
    },                                                                      \
    [](const RunConfig& c) { return Fmt(static_cast<int64_t>(c.field)); }}}
#define DOUBLE_KEY(name, field)                                             \
  {name,                                                                    \
   {[](RunConfig& c, std::string_view k, std::string_view v) {              \
      c.field = ToDouble(k, v);                                             \
    },                                                                      \
    [](const RunConfig& c) { return Fmt(c.field); }}}
#define BOOL_KEY(name, field)                                               \
  {name,                                                                    \
   {[](RunConfig& c, std::string_view k, std::string_view v) {              \
      c.field = ToBool(k, v);                                               \
    },                                                                      \
    [](const RunConfig& c) { return Fmt(c.field); }}}
#define LIST_KEY(name, field)                                               \
  {name,                                                                    \
   {[](RunConfig& c, std::string_view k, std::string_view v) {              \
      c.field = ToList(k, v);                                               \
    },                                                                      \
    [](const RunConfig& c) { return Fmt(c.field); }}}

const Registry& GetRegistry() {
  static const Registry* registry = new Registry{
      {"seed",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.seed = ToU64(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.seed); }}},
      {"out_dir",
       {[](RunConfig& c, std::string_view, std::string_view v) {
          c.out_dir = std::string(v);
        },
        [](const RunConfig& c) { return c.out_dir; }}},
      BOOL_KEY("record_timing", record_timing),

      INT_KEY("frames", data.frames),
      INT_KEY("channels", data.channels),
      INT_KEY("height", data.height),
      INT_KEY("width", data.width),
      INT_KEY("num_actions", data.num_actions),
      INT_KEY("num_attributes", data.num_attributes),
      DOUBLE_KEY("background", data.background),
      DOUBLE_KEY("blob_amplitude", data.blob_amplitude),
      DOUBLE_KEY("blob_speed", data.blob_speed),
      INT_KEY("blob_jitter", data.blob_jitter),
      DOUBLE_KEY("hue_offset", data.hue_offset),
      DOUBLE_KEY("glyph_amplitude", data.glyph_amplitude),
      DOUBLE_KEY("noise_sigma", data.noise_sigma),
      INT_KEY("action_train", data.action_train),
      INT_KEY("action_eval", data.action_eval),
      INT_KEY("privacy_train", data.privacy_train),
      INT_KEY("privacy_eval", data.privacy_eval),

      INT_KEY("anon_width1", nets.anon_width1),
      INT_KEY("anon_width2", nets.anon_width2),
      BOOL_KEY("anon_skip", nets.anon_skip),
      {"anon_output",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.nets.anon_output = Choice<OutputMode>(
              k, v, {{"sigmoid", OutputMode::kSigmoid},
                     {"unconstrained", OutputMode::kUnconstrained}});
        },
        [](const RunConfig& c) { return ToString(c.nets.anon_output); }}},
      INT_KEY("util_width1", nets.util_width1),
      INT_KEY("util_width2", nets.util_width2),
      INT_KEY("budget_width1", nets.budget_width1),
      INT_KEY("budget_width2", nets.budget_width2),
      INT_KEY("budget_feature_dim", nets.budget_feature_dim),
      INT_KEY("projection_dim", nets.projection_dim),

      DOUBLE_KEY("limiter", train.limiter),
      DOUBLE_KEY("lambda_penalty", train.lambda_penalty),
      DOUBLE_KEY("mu", train.mu),
      {"mu_mechanism",
       {[](RunConfig&, std::string_view k, std::string_view v) {
          if (v != "cap") Bad(k, v, "cap");
        },
        [](const RunConfig&) { return std::string("cap"); }}},
      DOUBLE_KEY("tau", train.tau),
      DOUBLE_KEY("lr_anon", train.lr_anon),
      DOUBLE_KEY("lr_util", train.lr_util),
      DOUBLE_KEY("lr_budget", train.lr_budget),
      {"optimizer",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.train.optimizer = Choice<OptimizerKind>(
              k, v, {{"sgd", OptimizerKind::kSgd},
                     {"adam", OptimizerKind::kAdam}});
        },
        [](const RunConfig& c) { return ToString(c.train.optimizer); }}},
      INT_KEY("epochs_pretrain", train.epochs_pretrain),
      INT_KEY("pretrain_frames_per_clip", train.pretrain_frames_per_clip),
      INT_KEY("batch_pretrain", train.batch_pretrain),
      INT_KEY("epochs_util_init", train.epochs_util_init),
      INT_KEY("epochs_budget_init", train.epochs_budget_init),
      INT_KEY("epochs_anon", train.epochs_anon),
      INT_KEY("batch_action", train.batch_action),
      INT_KEY("batch_privacy", train.batch_privacy),
      INT_KEY("skip", train.skip),
      {"budget_pairs",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.train.budget_pairs = Choice<BudgetPairs>(
              k, v, {{"augment", BudgetPairs::kAugment},
                     {"temporal", BudgetPairs::kTemporal}});
        },
        [](const RunConfig& c) { return ToString(c.train.budget_pairs); }}},
      {"penalty_space",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.train.penalty_space = Choice<PenaltySpace>(
              k, v, {{"pixel", PenaltySpace::kPixel},
                     {"feature", PenaltySpace::kFeature}});
        },
        [](const RunConfig& c) { return ToString(c.train.penalty_space); }}},
      INT_KEY("epochs_action", train.epochs_action),
      INT_KEY("epochs_privacy", train.epochs_privacy),
      DOUBLE_KEY("lr_probe", train.lr_probe),
      INT_KEY("batch_probe", train.batch_probe),
      {"probe_arch",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.train.probe_arch = Choice<UtilityArch>(
              k, v, {{"conv", UtilityArch::kConvTemporalMean},
                     {"linear", UtilityArch::kLinearMeanFrame}});
        },
        [](const RunConfig& c) { return ToString(c.train.probe_arch); }}},
      {"probe_schedule",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.train.probe_schedule = Choice<LrSchedule>(
              k, v, {{"constant", LrSchedule::kConstant},
                     {"step", LrSchedule::kStepOnPlateau}});
        },
        [](const RunConfig& c) { return ToString(c.train.probe_schedule); }}},
      BOOL_KEY("check_isolation", train.check_isolation),

      LIST_KEY("sweep_b", sweep.b_values),
      LIST_KEY("sweep_lambda", sweep.lambda_values),
      BOOL_KEY("sweep_cross", sweep.cross),
      DOUBLE_KEY("sweep_fixed_lambda", sweep.fixed_lambda),
      DOUBLE_KEY("sweep_fixed_b", sweep.fixed_b),
      BOOL_KEY("sweep_raw_pretrained_rows", sweep.raw_pretrained_rows),
      INT_KEY("jobs", sweep.jobs),
  };
  return *registry;
}

#undef INT_KEY
#undef DOUBLE_KEY
#undef BOOL_KEY
#undef LIST_KEY

const Entry& Find(std::string_view key) {
  for (const auto& [name, entry] : GetRegistry()) {
    if (name == key) return entry;
  }
  throw ConfigError(std::string(key),
                    "unknown config key '" + std::string(key) + "'");
}

void Require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(key, std::string("config key '") + key + "': " + what);
}

}  // namespace

std::string ToString(PenaltySpace space) {
  return space == PenaltySpace::kPixel ? "pixel" : "feature";
}

std::string ToString(BudgetPairs pairs) {
  return pairs == BudgetPairs::kAugment ? "augment" : "temporal";
}

std::string ToString(LrSchedule schedule) {
  return schedule == LrSchedule::kConstant ? "constant" : "step";
}

void TrainConfig::Validate() const {
  Require(limiter >= 0.0 && limiter <= 1.0, "limiter", "must be in [0, 1]");
  Require(lambda_penalty >= 0.0, "lambda_penalty", "must be >= 0");
  Require(mu > 0.0, "mu", "must be > 0");
  Require(tau > 0.0, "tau", "must be > 0");
  Require(lr_anon > 0.0, "lr_anon", "must be > 0");
  Require(lr_util > 0.0, "lr_util", "must be > 0");
  Require(lr_budget > 0.0, "lr_budget", "must be > 0");
  Require(lr_probe > 0.0, "lr_probe", "must be > 0");
  Require(epochs_pretrain >= 0, "epochs_pretrain", "must be >= 0");
  Require(epochs_util_init >= 0, "epochs_util_init", "must be >= 0");
  Require(epochs_budget_init >= 0, "epochs_budget_init", "must be >= 0");
  Require(epochs_anon >= 0, "epochs_anon", "must be >= 0");
  Require(epochs_action >= 0, "epochs_action", "must be >= 0");
  Require(epochs_privacy >= 0, "epochs_privacy", "must be >= 0");
  Require(pretrain_frames_per_clip >= 1, "pretrain_frames_per_clip",
          "must be >= 1");
  Require(batch_pretrain >= 1, "batch_pretrain", "must be >= 1");
  Require(batch_action >= 1, "batch_action", "must be >= 1");
  Require(batch_privacy >= 1, "batch_privacy", "must be >= 1");
  Require(batch_probe >= 1, "batch_probe", "must be >= 1");
  Require(skip >= 0, "skip", "must be >= 0");
}

void RunConfig::Validate() const {
  try {
    data.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("data", e.what());
  }
  train.Validate();
  Require(train.skip < data.frames, "skip", "must be < frames");
  Require(train.pretrain_frames_per_clip <= data.frames,
          "pretrain_frames_per_clip", "must be <= frames");
  Require(nets.anon_width1 >= 1 && nets.anon_width2 >= 1, "anon_width1",
          "widths must be >= 1");
  Require(nets.util_width1 >= 1 && nets.util_width2 >= 1, "util_width1",
          "widths must be >= 1");
  Require(nets.budget_width1 >= 1 && nets.budget_width2 >= 1, "budget_width1",
          "widths must be >= 1");
  Require(nets.budget_feature_dim >= 1, "budget_feature_dim", "must be >= 1");
  Require(nets.projection_dim >= 1, "projection_dim", "must be >= 1");
  Require(!sweep.b_values.empty(), "sweep_b", "must not be empty");
  Require(!sweep.lambda_values.empty(), "sweep_lambda", "must not be empty");
  for (double b : sweep.b_values) {
    Require(b >= 0.0 && b <= 1.0, "sweep_b", "values must be in [0, 1]");
  }
  for (double l : sweep.lambda_values) {
    Require(l >= 0.0, "sweep_lambda", "values must be >= 0");
  }
  Require(sweep.jobs >= 1, "jobs", "must be >= 1");
}

AnonymizerSpec RunConfig::anonymizer_spec() const {
  return AnonymizerSpec{data.channels, nets.anon_width1, nets.anon_width2,
                        nets.anon_skip, nets.anon_output};
}

UtilitySpec RunConfig::utility_spec(UtilityArch arch) const {
  UtilitySpec s;
  s.channels = data.channels;
  s.height = data.height;
  s.width = data.width;
  s.width1 = nets.util_width1;
  s.width2 = nets.util_width2;
  s.num_classes = data.num_actions;
  s.arch = arch;
  return s;
}

BudgetSpec RunConfig::budget_spec(BudgetHead head) const {
  BudgetSpec s;
  s.channels = data.channels;
  s.height = data.height;
  s.width = data.width;
  s.width1 = nets.budget_width1;
  s.width2 = nets.budget_width2;
  s.feature_dim = nets.budget_feature_dim;
  s.projection_dim = nets.projection_dim;
  s.num_attributes = data.num_attributes;
  s.head = head;
  return s;
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& entry : GetRegistry()) keys.push_back(entry.first);
  return keys;
}

void SetConfigValue(RunConfig& config, std::string_view key,
                    std::string_view value) {
  Find(key).set(config, key, Trim(value));
}

std::string GetConfigValue(const RunConfig& config, std::string_view key) {
  return Find(key).get(config);
}

RunConfig ParseConfig(std::string_view text, RunConfig base) {
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "config line " +
                                               std::to_string(line_no) +
                                               ": expected 'key = value'");
    }
    SetConfigValue(base, Trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

std::string SerializeConfig(const RunConfig& config, bool placement) {
  std::string out;
  for (const auto& [key, entry] : GetRegistry()) {
    if (!placement && (key == "out_dir" || key == "jobs")) continue;
    out += key + " = " + entry.get(config) + "\n";
  }
  return out;
}

std::string ConfigDigest(const RunConfig& config) {
  return DigestBytes(SerializeConfig(config, /*placement=*/false));
}

}  // namespace anonybench
