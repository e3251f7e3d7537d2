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

// anonybench: batch front end for the anonymization benchmark.
//
// Exit codes: 0 success, 1 replay mismatch, 2 configuration error,
// 3 numerical failure, 4 I/O failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anonybench/checkpoint.h"
#include "anonybench/config.h"
#include "anonybench/digest.h"
#include "anonybench/io.h"
#include "anonybench/pipeline.h"
#include "anonybench/trainer.h"

namespace fs = std::filesystem;
using namespace anonybench;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;
constexpr int kIoExit = 4;

// Command-line failure that maps straight to an exit code.
struct ExitError : std::runtime_error {
  ExitError(int code, const std::string& what)
      : std::runtime_error(what), code(code) {}
  int code;
};

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
};

void AddCommon(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "Config file (key = value)");
  app->add_option("-s,--set", c.overrides, "Override one key: key=value")
      ->allow_extra_args(false);
  app->add_option("-o,--out", c.out,
                  "Output directory (overrides ANONYBENCH_OUT and out_dir)");
}

// Defaults, then the file, then --set, then ANONYBENCH_OUT, then --out.
RunConfig ResolveConfig(const Common& c) {
  RunConfig config;
  if (!c.config_path.empty()) {
    std::string text;
    try {
      text = ReadFile(c.config_path);
    } catch (const fs::filesystem_error&) {
      throw ExitError(kConfigExit,
                      "cannot read config file '" + c.config_path + "'");
    }
    config = ParseConfig(text);
  }
  for (const std::string& kv : c.overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(kv, "--set expects key=value, got '" + kv + "'");
    }
    SetConfigValue(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (const char* env = std::getenv("ANONYBENCH_OUT"); env && *env) {
    config.out_dir = env;
  }
  if (!c.out.empty()) config.out_dir = c.out;
  config.Validate();
  return config;
}

fs::path OutDir(const RunConfig& config) {
  const fs::path dir = config.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
  return dir;
}

// Collects output digests and writes <command>.manifest.json at the end.
class ManifestWriter {
 public:
  ManifestWriter(std::string command, const RunConfig& config, fs::path dir)
      : dir_(std::move(dir)) {
    m_.command = std::move(command);
    m_.config = SerializeConfig(config);
    m_.config_digest = ConfigDigest(config);
    m_.started_at = UtcTimestamp();
  }

  void Argument(const std::string& key, const std::string& value) {
    m_.arguments[key] = value;
  }
  void Dataset(const std::string& digest) { m_.dataset_digest = digest; }

  void Output(const std::string& name, std::string_view bytes) {
    WriteText(dir_ / name, bytes);
    m_.outputs[name] = DigestBytes(bytes);
  }

  void Checkpoint(const std::string& name, const CheckpointFile& file) {
    const std::string bytes = EncodeCheckpoint(file);
    WriteText(dir_ / name, bytes);
    m_.checkpoints[name] = DigestBytes(bytes);
  }

  void Finish() {
    m_.finished_at = UtcTimestamp();
    WriteText(dir_ / (m_.command + ".manifest.json"), m_.ToJson().dump(2));
  }

 private:
  fs::path dir_;
  RunManifest m_;
};

CheckpointFile LoadAnyCheckpoint(const std::string& path) {
  try {
    return LoadCheckpoint(path);
  } catch (const fs::filesystem_error&) {
    throw ExitError(kConfigExit, "cannot read checkpoint '" + path + "'");
  } catch (const CheckpointError& e) {
    throw ExitError(kConfigExit, e.what());
  }
}

// The anonymizer stored in a pretrain or training-state checkpoint.
Anonymizer LoadAnonymizer(const std::string& path, const RunConfig& config) {
  const CheckpointFile file = LoadAnyCheckpoint(path);
  Anonymizer anonymizer(config.anonymizer_spec(), 0);
  try {
    RestoreParams(file, "anonymizer", anonymizer.params());
  } catch (const CheckpointError& e) {
    throw ExitError(kConfigExit, std::string("incompatible checkpoint: ") +
                                     e.what());
  }
  return anonymizer;
}

std::string PretrainCsv(const std::vector<double>& losses) {
  std::string out = "epoch,l1_loss\n";
  char buf[64];
  for (size_t e = 0; e < losses.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", e, losses[e]);
    out += buf;
  }
  return out;
}

CheckpointFile PretrainCheckpoint(const Anonymizer& anonymizer,
                                  const PretrainReport& report,
                                  const RunConfig& config) {
  CheckpointFile file;
  file.meta["kind"] = "pretrain";
  file.meta["config_digest"] = ConfigDigest(config);
  file.meta["config"] = SerializeConfig(config, false);
  file.meta["heldout_mae"] = report.heldout_mae;
  AppendParams(file, "anonymizer", anonymizer.params());
  return file;
}

// --- Commands --------------------------------------------------------------

int CmdPretrain(const Common& c) {
  const RunConfig config = ResolveConfig(c);
  const fs::path dir = OutDir(config);
  ManifestWriter manifest("pretrain", config, dir);
  const Splits splits = MakeSplits(config.data, config.seed);
  manifest.Dataset(DatasetDigest(splits));
  TrainingState state(config);
  const PretrainReport report =
      PretrainAnonymizer(state.anonymizer, splits.action, config);
  manifest.Checkpoint("pretrain.ckpt",
                      PretrainCheckpoint(state.anonymizer, report, config));
  manifest.Output("pretrain_log.csv", PretrainCsv(report.losses));
  manifest.Finish();
  std::cout << "held-out MAE " << report.heldout_mae << "\n";
  return kOk;
}

int CmdTrain(const Common& c, const std::string& pretrained, bool resume) {
  const RunConfig config = ResolveConfig(c);
  const fs::path dir = OutDir(config);
  ManifestWriter manifest("train", config, dir);
  const Splits splits = MakeSplits(config.data, config.seed);
  manifest.Dataset(DatasetDigest(splits));
  const fs::path state_path = dir / "train_state.ckpt";

  std::optional<TrainingState> state;
  if (resume && fs::exists(state_path)) {
    try {
      state.emplace(LoadTrainingState(LoadCheckpoint(state_path), config));
    } catch (const CheckpointError& e) {
      throw ExitError(kConfigExit, e.what());
    }
    std::cerr << "resuming at epoch " << state->epoch << "\n";
  } else {
    state.emplace(config);
    if (!pretrained.empty()) {
      manifest.Argument("checkpoint", pretrained);
      state->anonymizer = LoadAnonymizer(pretrained, config);
    } else {
      const PretrainReport report =
          PretrainAnonymizer(state->anonymizer, splits.action, config);
      manifest.Output("pretrain_log.csv", PretrainCsv(report.losses));
    }
    PretrainUtility(state->utility, splits.action.train, config);
    PretrainBudget(state->budget, splits.privacy.train, splits.action.train,
                   config);
  }
  LoopOptions options;
  options.on_epoch = [&](const TrainingState& s) {
    WriteText(state_path, EncodeCheckpoint(SaveTrainingState(s, config)));
    const EpochLog& e = s.curve.back();
    std::cerr << "epoch " << e.epoch << " l_t " << e.l_t << " l_b " << e.l_b
              << " l_penalty " << e.l_penalty << " l_a " << e.l_a << "\n";
  };
  TrainAnonymization(*state, splits, config, options);
  manifest.Checkpoint("anonymizer.ckpt", SaveTrainingState(*state, config));
  manifest.Output("curves.csv", EpochLogCsv(state->curve));
  manifest.Finish();
  return kOk;
}

int CmdProbe(const Common& c, const std::string& checkpoint,
             const std::string& which, bool identity) {
  const RunConfig config = ResolveConfig(c);
  const std::map<std::string, std::pair<std::string, ProbeSet>> kinds = {
      {"action", {kKnownData, ProbeSet::kAction}},
      {"privacy", {kKnownData, ProbeSet::kPrivacy}},
      {"both", {kKnownData, ProbeSet::kBoth}},
      {"novel-data", {kNovelData, ProbeSet::kBoth}},
      {"privacy-raw-pretrained", {kRawPretrained, ProbeSet::kPrivacy}}};
  const auto kind = kinds.find(which);
  if (kind == kinds.end()) {
    throw ExitError(kConfigExit, "unknown probe kind '" + which + "'");
  }
  if (checkpoint.empty() && !identity) {
    throw ExitError(kConfigExit, "probe needs --checkpoint or --identity");
  }
  const fs::path dir = OutDir(config);
  ManifestWriter manifest("probe", config, dir);
  manifest.Argument("which", which);
  std::optional<Anonymizer> anonymizer;
  if (!identity) {
    manifest.Argument("checkpoint", checkpoint);
    anonymizer.emplace(LoadAnonymizer(checkpoint, config));
  } else {
    manifest.Argument("identity", "true");
  }

  SharedStages shared;
  shared.splits = MakeSplits(config.data, config.seed);
  shared.dataset_digest = DatasetDigest(shared.splits);
  manifest.Dataset(shared.dataset_digest);
  if (kind->second.first == kRawPretrained) {
    const Splits& d = shared.splits;
    shared.raw_privacy_probe = TrainPrivacyProbe(
        config.budget_spec(BudgetHead::kMultiLabel), d.privacy.train.frames,
        d.privacy.train.attributes, PrivacyProbeOptions(config));
  }
  MetricsReport report =
      ProbeAnonymizer(anonymizer ? &*anonymizer : nullptr, shared, config,
                      kind->second.first, kind->second.second);
  if (identity) report.run_id = "identity";
  const std::string stem = "probe_" + which;
  manifest.Output(stem + ".json", report.ToJson().dump(2));
  manifest.Output(stem + ".csv",
                  MetricsCsv({report}, config.data.num_attributes));
  manifest.Finish();
  std::cout << MetricsCsv({report}, config.data.num_attributes);
  return kOk;
}

int CmdSweep(const Common& c) {
  const RunConfig config = ResolveConfig(c);
  const fs::path dir = OutDir(config);
  ManifestWriter manifest("sweep", config, dir);
  manifest.Dataset(DatasetDigest(MakeSplits(config.data, config.seed)));
  SweepOptions options;
  options.cell_dir = dir / "cells";
  options.on_cell = [](const SweepCell& cell, const CellResult& result) {
    std::cerr << "cell " << CellId(cell.limiter, cell.lambda)
              << (result.rows.front().error ? " FAILED: " + *result.rows.front().error
                                            : std::string(" done"))
              << "\n";
  };
  const std::vector<MetricsReport> rows = RunSweep(config, options);
  manifest.Output("sweep.csv", MetricsCsv(rows, config.data.num_attributes));
  manifest.Finish();
  return kOk;
}

std::vector<int> ParseIndices(const std::string& text, int limit,
                              const std::string& what) {
  std::vector<int> out;
  if (text == "all") {
    for (int i = 0; i < limit; ++i) out.push_back(i);
    return out;
  }
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma - pos);
    int v = -1;
    try {
      v = std::stoi(item);
    } catch (const std::exception&) {
    }
    if (v < 0 || v >= limit) {
      throw ExitError(kConfigExit, what + " index '" + item +
                                       "' out of range [0, " +
                                       std::to_string(limit) + ")");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int CmdDumpFrames(const Common& c, const std::string& checkpoint,
                  const std::string& clips, const std::string& frames) {
  const RunConfig config = ResolveConfig(c);
  if (config.data.channels != 3) {
    throw ExitError(kConfigExit, "dump-frames needs channels = 3");
  }
  const Anonymizer anonymizer = LoadAnonymizer(checkpoint, config);
  // B of the run that produced the checkpoint, when recorded.
  double limiter = config.train.limiter;
  const CheckpointFile file = LoadAnyCheckpoint(checkpoint);
  if (file.meta.contains("config")) {
    limiter = ParseConfig(file.meta["config"].get<std::string>()).train.limiter;
  }
  const fs::path dir = OutDir(config);
  ManifestWriter manifest("dump-frames", config, dir);
  manifest.Argument("checkpoint", checkpoint);
  manifest.Argument("clips", clips);
  manifest.Argument("frames", frames);
  const Splits splits = MakeSplits(config.data, config.seed);
  manifest.Dataset(DatasetDigest(splits));
  const ActionSet& eval = splits.action.eval;
  const Shape& s = eval.clips.shape();
  const int T = static_cast<int>(s[1]);
  const int64_t per = s[2] * s[3] * s[4];
  char tag[32];
  std::snprintf(tag, sizeof(tag), "B%g", limiter);
  for (int clip : ParseIndices(clips, eval.size(), "clip")) {
    const std::vector<int> one = {clip};
    const Array raw = Gather(eval.clips, one);
    const Array anon = anonymizer.Apply(raw);
    for (int t : ParseIndices(frames, T, "frame")) {
      auto frame = [&](const Array& a) {
        return Array({s[2], s[3], s[4]},
                     std::vector<double>(a.data().begin() + t * per,
                                         a.data().begin() + (t + 1) * per));
      };
      const std::string stem = "clip" + std::to_string(clip) + "_frame" +
                               std::to_string(t) + "_" + tag;
      manifest.Output(stem + "_raw.ppm", EncodePpm(frame(raw)));
      manifest.Output(stem + "_anon.ppm", EncodePpm(frame(anon)));
    }
  }
  manifest.Finish();
  return kOk;
}

int CmdGenData(const Common& c) {
  const RunConfig config = ResolveConfig(c);
  const fs::path dir = OutDir(config);
  ManifestWriter manifest("gen-data", config, dir);
  const Splits splits = MakeSplits(config.data, config.seed);
  manifest.Dataset(DatasetDigest(splits));
  const int files = ExportDataset(splits, dir / "data");
  manifest.Output("data_digest.txt", DatasetDigest(splits) + "\n");
  manifest.Finish();
  std::cout << "wrote " << files << " files\n";
  return kOk;
}

int Dispatch(const RunManifest& m, const Common& c);

// Re-runs the command recorded in a manifest into a fresh directory and
// compares every output and checkpoint digest.
int CmdReplay(const std::string& manifest_path, const std::string& out) {
  RunManifest m;
  try {
    m = RunManifest::FromJson(nlohmann::json::parse(ReadFile(manifest_path)));
  } catch (const fs::filesystem_error&) {
    throw ExitError(kConfigExit, "cannot read manifest '" + manifest_path + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ExitError(kConfigExit, std::string("bad manifest: ") + e.what());
  }
  if (out.empty()) throw ExitError(kConfigExit, "replay needs --out");
  const fs::path config_file = fs::path(out) / "replay.config";
  WriteText(config_file, m.config);
  Common c;
  c.config_path = config_file.string();
  c.out = out;
  const int code = Dispatch(m, c);
  if (code != kOk) return code;
  int mismatches = 0;
  auto check = [&](const std::map<std::string, std::string>& expected) {
    for (const auto& [name, digest] : expected) {
      const std::string got = FileDigest(fs::path(out) / name);
      if (got != digest) {
        std::cerr << "mismatch: " << name << " " << got << " != " << digest
                  << "\n";
        ++mismatches;
      }
    }
  };
  check(m.outputs);
  check(m.checkpoints);
  std::cout << (mismatches ? "replay: MISMATCH\n" : "replay: all digests match\n");
  return mismatches ? kMismatch : kOk;
}

int Dispatch(const RunManifest& m, const Common& c) {
  auto arg = [&](const std::string& k, const std::string& fallback = "") {
    const auto it = m.arguments.find(k);
    return it == m.arguments.end() ? fallback : it->second;
  };
  if (m.command == "pretrain") return CmdPretrain(c);
  if (m.command == "train") return CmdTrain(c, arg("checkpoint"), false);
  if (m.command == "probe") {
    return CmdProbe(c, arg("checkpoint"), arg("which"),
                    arg("identity") == "true");
  }
  if (m.command == "sweep") return CmdSweep(c);
  if (m.command == "dump-frames") {
    return CmdDumpFrames(c, arg("checkpoint"), arg("clips", "0"),
                         arg("frames", "all"));
  }
  if (m.command == "gen-data") return CmdGenData(c);
  throw ExitError(kConfigExit, "manifest has unknown command '" + m.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anonybench: adversarial video anonymization benchmark"};
  app.require_subcommand(1);

  Common common;
  std::string checkpoint, which = "action", clips = "0", frames = "all";
  std::string manifest_path, replay_out;
  bool identity = false, resume = false;

  auto* pretrain = app.add_subcommand("pretrain", "Identity-pretrain f_A");
  AddCommon(pretrain, common);

  auto* train = app.add_subcommand("train", "Two-step anonymization training");
  AddCommon(train, common);
  train->add_option("--checkpoint", checkpoint,
                    "Pretrained anonymizer (pretrains inline when omitted)");
  train->add_flag("--resume", resume,
                  "Continue from <out>/train_state.ckpt if present");

  auto* probe = app.add_subcommand("probe", "Train a fresh probe on f_A*");
  AddCommon(probe, common);
  probe->add_option("--checkpoint", checkpoint, "Anonymizer checkpoint");
  probe->add_option("--which", which,
                    "action | privacy | both | novel-data | "
                    "privacy-raw-pretrained");
  probe->add_flag("--identity", identity,
                  "Bypass the anonymizer (probes see raw data)");

  auto* sweep = app.add_subcommand("sweep", "B / lambda sweep");
  AddCommon(sweep, common);
  std::string b_grid, lambda_grid;
  std::optional<int> jobs;
  bool cross = false;
  sweep->add_option("--b", b_grid, "Comma-separated B values");
  sweep->add_option("--lambda", lambda_grid, "Comma-separated lambda values");
  sweep->add_flag("--cross", cross, "Full B x lambda product");
  sweep->add_option("-j,--jobs", jobs, "Parallel cells");

  auto* dump = app.add_subcommand("dump-frames", "Raw and anonymized PPMs");
  AddCommon(dump, common);
  dump->add_option("--checkpoint", checkpoint, "Anonymizer checkpoint")
      ->required();
  dump->add_option("--clips", clips, "Eval clip ids, comma-separated or all");
  dump->add_option("--frames", frames, "Frame ids, comma-separated or all");

  auto* gen = app.add_subcommand("gen-data", "Export the dataset as PPM + JSON");
  AddCommon(gen, common);

  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare");
  replay->add_option("manifest", manifest_path, "Manifest JSON")->required();
  replay->add_option("-o,--out", replay_out, "Fresh output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigExit;
  }

  try {
    if (*sweep) {
      if (!b_grid.empty()) common.overrides.push_back("sweep_b=" + b_grid);
      if (!lambda_grid.empty()) {
        common.overrides.push_back("sweep_lambda=" + lambda_grid);
      }
      if (cross) common.overrides.push_back("sweep_cross=true");
      if (jobs) common.overrides.push_back("jobs=" + std::to_string(*jobs));
      return CmdSweep(common);
    }
    if (*pretrain) return CmdPretrain(common);
    if (*train) return CmdTrain(common, checkpoint, resume);
    if (*probe) return CmdProbe(common, checkpoint, which, identity);
    if (*dump) return CmdDumpFrames(common, checkpoint, clips, frames);
    if (*gen) return CmdGenData(common);
    if (*replay) return CmdReplay(manifest_path, replay_out);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << "\n";
    return kConfigExit;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalExit;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoExit;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoExit;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kConfigExit;
  }
  return kConfigExit;
}
