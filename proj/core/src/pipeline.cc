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

#include "anonybench/pipeline.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <thread>

#include "anonybench/rng.h"

namespace anonybench {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string Short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string Opt(const std::optional<double>& v) { return v ? Num(*v) : ""; }

nlohmann::json OptJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> OptFrom(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

MetricsReport BaseReport(const RunConfig& config, std::string run_id,
                         std::string protocol) {
  MetricsReport r;
  r.run_id = std::move(run_id);
  r.protocol = std::move(protocol);
  r.mu = config.train.mu;
  r.tau = config.train.tau;
  r.seed = config.seed;
  r.config_digest = ConfigDigest(config);
  return r;
}

// Frames after the (optional) anonymizer.
Array Transform(const Anonymizer* anonymizer, const Array& x) {
  return anonymizer ? anonymizer->Apply(x) : x;
}

// Trains and evaluates the requested probes on `d` seen through `anonymizer`.
void ProbeSplits(MetricsReport& r, const RunConfig& config,
                 const Anonymizer* anonymizer, const Splits& d,
                 ProbeSet probes,
                 std::optional<PrivacyProbe>* keep_privacy = nullptr) {
  if (probes != ProbeSet::kPrivacy) {
    const UtilityArch arch = config.train.probe_arch;
    const ActionProbe action = TrainActionProbe(
        config.utility_spec(arch), Transform(anonymizer, d.action.train.clips),
        d.action.train.labels, ActionProbeOptions(config, arch));
    r.top1 = Top1(PredictLogits(action.net,
                                Transform(anonymizer, d.action.eval.clips)),
                  d.action.eval.labels);
    r.n_eval_action = d.action.eval.size();
  }
  if (probes != ProbeSet::kAction) {
    PrivacyProbe privacy = TrainPrivacyProbe(
        config.budget_spec(BudgetHead::kMultiLabel),
        Transform(anonymizer, d.privacy.train.frames),
        d.privacy.train.attributes, PrivacyProbeOptions(config));
    FillPrivacyMetrics(
        r,
        PredictScores(privacy.net, Transform(anonymizer, d.privacy.eval.frames)),
        d.privacy.eval.attributes);
    r.n_eval_privacy = d.privacy.eval.size();
    if (keep_privacy) keep_privacy->emplace(std::move(privacy));
  }
}

}  // namespace

nlohmann::json MetricsReport::ToJson() const {
  nlohmann::json ap_json = nlohmann::json::array();
  for (const auto& a : ap) ap_json.push_back(OptJson(a));
  nlohmann::json j = {{"run_id", run_id},
                      {"protocol", protocol},
                      {"B", OptJson(limiter)},
                      {"lambda", OptJson(lambda)},
                      {"mu", mu},
                      {"tau", tau},
                      {"seed", seed},
                      {"top1", OptJson(top1)},
                      {"cmap", OptJson(cmap)},
                      {"f1", OptJson(f1)},
                      {"ap", ap_json},
                      {"l_penalty_final", OptJson(l_penalty_final)},
                      {"wall_seconds", wall_seconds},
                      {"n_eval_action", n_eval_action},
                      {"n_eval_privacy", n_eval_privacy},
                      {"config_digest", config_digest},
                      {"f1_convention", "macro, threshold 0.5"}};
  j["error"] = error ? nlohmann::json(*error) : nlohmann::json(nullptr);
  return j;
}

MetricsReport MetricsReport::FromJson(const nlohmann::json& j) {
  MetricsReport r;
  r.run_id = j.at("run_id").get<std::string>();
  r.protocol = j.at("protocol").get<std::string>();
  r.limiter = OptFrom(j.at("B"));
  r.lambda = OptFrom(j.at("lambda"));
  r.mu = j.at("mu").get<double>();
  r.tau = j.at("tau").get<double>();
  r.seed = j.at("seed").get<uint64_t>();
  r.top1 = OptFrom(j.at("top1"));
  r.cmap = OptFrom(j.at("cmap"));
  r.f1 = OptFrom(j.at("f1"));
  for (const auto& a : j.at("ap")) r.ap.push_back(OptFrom(a));
  r.l_penalty_final = OptFrom(j.at("l_penalty_final"));
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.n_eval_action = j.at("n_eval_action").get<int>();
  r.n_eval_privacy = j.at("n_eval_privacy").get<int>();
  r.config_digest = j.at("config_digest").get<std::string>();
  if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  return r;
}

std::string MetricsCsvHeader(int num_attributes) {
  std::string h = "run_id,protocol,B,lambda,mu,tau,seed,top1,cmap,f1";
  for (int k = 0; k < num_attributes; ++k) {
    h += ",ap_attr_" + std::to_string(k);
  }
  return h + ",l_penalty_final,wall_seconds\n";
}

std::string MetricsCsvRow(const MetricsReport& r, int num_attributes) {
  const bool failed = r.error.has_value();
  std::string row = r.run_id + "," + r.protocol + "," +
                    (r.limiter ? Short(*r.limiter) : "") + "," +
                    (r.lambda ? Short(*r.lambda) : "") + "," + Short(r.mu) +
                    "," + Short(r.tau) + "," + std::to_string(r.seed) + ",";
  if (failed) {
    row += "nan,nan,nan";
    for (int k = 0; k < num_attributes; ++k) row += ",nan";
  } else {
    row += Opt(r.top1) + "," + Opt(r.cmap) + "," + Opt(r.f1);
    for (int k = 0; k < num_attributes; ++k) {
      row += ",";
      if (k < static_cast<int>(r.ap.size())) row += Opt(r.ap[k]);
    }
  }
  row += "," + Opt(r.l_penalty_final) + "," + Num(r.wall_seconds) + "\n";
  return row;
}

std::string MetricsCsv(const std::vector<MetricsReport>& rows,
                       int num_attributes) {
  std::string out = MetricsCsvHeader(num_attributes);
  for (const auto& r : rows) out += MetricsCsvRow(r, num_attributes);
  return out;
}

void FillPrivacyMetrics(MetricsReport& report, const Array& scores,
                        const Array& labels) {
  const CmapResult c = Cmap(scores, labels);
  report.cmap = c.cmap;
  report.ap = c.ap;
  report.f1 = MacroF1(scores, labels, 0.5);
}

SharedStages PrepareShared(const RunConfig& config, bool with_raw) {
  config.Validate();
  SharedStages s;
  s.splits = MakeSplits(config.data, config.seed);
  s.dataset_digest = DatasetDigest(s.splits);
  s.init.emplace(config);
  s.pretrain = PretrainAnonymizer(s.init->anonymizer, s.splits.action, config);
  s.utility_init =
      PretrainUtility(s.init->utility, s.splits.action.train, config);
  s.budget_init = PretrainBudget(s.init->budget, s.splits.privacy.train,
                                 s.splits.action.train, config);
  s.raw = BaseReport(config, "raw", kRawData);
  if (with_raw) {
    const auto start = Clock::now();
    ProbeSplits(s.raw, config, nullptr, s.splits, ProbeSet::kBoth,
                &s.raw_privacy_probe);
    if (config.record_timing) s.raw.wall_seconds = Seconds(start);
  }
  return s;
}

MetricsReport ProbeAnonymizer(const Anonymizer* anonymizer,
                              const SharedStages& shared,
                              const RunConfig& config,
                              const std::string& protocol, ProbeSet probes) {
  MetricsReport r = BaseReport(
      config, CellId(config.train.limiter, config.train.lambda_penalty),
      protocol);
  r.limiter = config.train.limiter;
  r.lambda = config.train.lambda_penalty;
  if (protocol == kRawPretrained) {
    if (!shared.raw_privacy_probe) {
      throw std::logic_error("raw-pretrained protocol needs the raw probe");
    }
    const PrivacySet& eval = shared.splits.privacy.eval;
    FillPrivacyMetrics(r,
                       PredictScores(shared.raw_privacy_probe->net,
                                     Transform(anonymizer, eval.frames)),
                       eval.attributes);
    r.n_eval_privacy = eval.size();
    return r;
  }
  if (protocol == kKnownData) {
    ProbeSplits(r, config, anonymizer, shared.splits, probes);
  } else if (protocol == kNovelData) {
    const Splits novel =
        MakeSplits(config.data, DeriveSeed(config.seed, "novel", 0));
    ProbeSplits(r, config, anonymizer, novel, probes);
  } else {
    throw std::invalid_argument("unknown protocol '" + protocol + "'");
  }
  return r;
}

std::string CellId(double limiter, double lambda) {
  return "B" + Short(limiter) + "_lambda" + Short(lambda);
}

CellResult RunCell(const SharedStages& shared, const RunConfig& config) {
  const auto start = Clock::now();
  CellResult out;
  std::vector<std::string> protocols = {kKnownData};
  if (config.sweep.raw_pretrained_rows) protocols.push_back(kRawPretrained);
  try {
    TrainingState state = *shared.init;
    TrainAnonymization(state, shared.splits, config);
    out.curve = state.curve;
    out.state = SaveTrainingState(state, config);
    for (const auto& p : protocols) {
      out.rows.push_back(ProbeAnonymizer(&state.anonymizer, shared, config, p));
    }
  } catch (const std::exception& e) {
    out.rows.clear();
    for (const auto& p : protocols) {
      MetricsReport r = BaseReport(
          config, CellId(config.train.limiter, config.train.lambda_penalty), p);
      r.limiter = config.train.limiter;
      r.lambda = config.train.lambda_penalty;
      r.error = e.what();
      out.rows.push_back(r);
    }
  }
  for (auto& r : out.rows) {
    if (!out.curve.empty()) r.l_penalty_final = out.curve.back().l_penalty;
    if (config.record_timing) r.wall_seconds = Seconds(start);
  }
  return out;
}

std::vector<SweepCell> SweepGrid(const SweepConfig& sweep) {
  std::vector<SweepCell> cells;
  if (sweep.cross) {
    for (double b : sweep.b_values) {
      for (double l : sweep.lambda_values) cells.push_back({b, l});
    }
    return cells;
  }
  for (double b : sweep.b_values) cells.push_back({b, sweep.fixed_lambda});
  for (double l : sweep.lambda_values) cells.push_back({sweep.fixed_b, l});
  return cells;
}

std::vector<MetricsReport> RunSweep(const RunConfig& config,
                                    const SweepOptions& options) {
  const std::vector<SweepCell> grid = SweepGrid(config.sweep);
  if (grid.empty()) throw ConfigError("sweep_b", "sweep grid is empty");
  const SharedStages shared = PrepareShared(config, true);

  // Unique cells in first-appearance order.
  std::vector<std::string> ids;
  std::map<std::string, RunConfig> configs;
  for (const SweepCell& c : grid) {
    const std::string id = CellId(c.limiter, c.lambda);
    if (configs.count(id)) continue;
    RunConfig rc = config;
    rc.train.limiter = c.limiter;
    rc.train.lambda_penalty = c.lambda;
    configs.emplace(id, rc);
    ids.push_back(id);
  }

  std::map<std::string, std::vector<MetricsReport>> done;
  std::vector<std::string> todo;
  for (const std::string& id : ids) {
    if (options.cell_dir) {
      const auto path = *options.cell_dir / (id + ".json");
      std::error_code ec;
      if (std::filesystem::exists(path, ec)) {
        try {
          const auto j = nlohmann::json::parse(ReadFile(path));
          if (j.at("config_digest") == ConfigDigest(configs.at(id))) {
            std::vector<MetricsReport> rows;
            for (const auto& r : j.at("rows")) {
              rows.push_back(MetricsReport::FromJson(r));
            }
            done.emplace(id, std::move(rows));
            continue;
          }
        } catch (const std::exception&) {
          // Unreadable cell record: recompute.
        }
      }
    }
    todo.push_back(id);
  }

  std::mutex mu;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < todo.size(); i = next++) {
      const std::string& id = todo[i];
      const RunConfig& rc = configs.at(id);
      CellResult result = RunCell(shared, rc);
      std::lock_guard<std::mutex> lock(mu);
      if (options.cell_dir) {
        nlohmann::json j = {{"config_digest", ConfigDigest(rc)},
                            {"rows", nlohmann::json::array()}};
        for (const auto& r : result.rows) j["rows"].push_back(r.ToJson());
        WriteFileAtomic(*options.cell_dir / (id + ".json"), j.dump(2));
      }
      if (options.on_cell) {
        options.on_cell({rc.train.limiter, rc.train.lambda_penalty}, result);
      }
      done.emplace(id, std::move(result.rows));
    }
  };
  const int jobs = std::max(1, std::min<int>(config.sweep.jobs,
                                             static_cast<int>(todo.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  std::vector<MetricsReport> rows = {shared.raw};
  for (const SweepCell& c : grid) {
    for (const auto& r : done.at(CellId(c.limiter, c.lambda))) rows.push_back(r);
  }
  return rows;
}

}  // namespace anonybench
