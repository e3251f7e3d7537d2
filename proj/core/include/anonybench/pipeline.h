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

// End-to-end runs: data, initialization, anonymization training, probes and
// metrics, plus the B / lambda sweep built from them.

#ifndef ANONYBENCH_PIPELINE_H_
#define ANONYBENCH_PIPELINE_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anonybench/config.h"
#include "anonybench/metrics.h"
#include "anonybench/trainer.h"

namespace anonybench {

// Protocol tags of a metrics row.
inline constexpr char kRawData[] = "raw-data";
inline constexpr char kKnownData[] = "known-data";
inline constexpr char kNovelData[] = "novel-data";
inline constexpr char kRawPretrained[] = "raw-pretrained";

struct MetricsReport {
  std::string run_id;
  std::string protocol;
  std::optional<double> limiter;  // B; empty for raw-data rows
  std::optional<double> lambda;
  double mu = 0.0;
  double tau = 0.0;
  uint64_t seed = 0;
  // Each metric is empty when the corresponding probe did not run.
  std::optional<double> top1;
  std::optional<double> cmap;
  std::optional<double> f1;
  std::vector<std::optional<double>> ap;
  std::optional<double> l_penalty_final;
  double wall_seconds = 0.0;
  int n_eval_action = 0;
  int n_eval_privacy = 0;
  std::string config_digest;
  // Set when the cell failed; metric fields are then meaningless.
  std::optional<std::string> error;

  nlohmann::json ToJson() const;
  static MetricsReport FromJson(const nlohmann::json& j);
};

// CSV header for K attributes; one line, trailing newline.
std::string MetricsCsvHeader(int num_attributes);
std::string MetricsCsvRow(const MetricsReport& report, int num_attributes);
std::string MetricsCsv(const std::vector<MetricsReport>& rows,
                       int num_attributes);

// Privacy metrics of probe scores against multi-hot labels.
void FillPrivacyMetrics(MetricsReport& report, const Array& scores,
                        const Array& labels);

// Everything that does not depend on B or lambda: the data, the initialized
// networks and the probes trained on raw data.
struct SharedStages {
  Splits splits;
  std::string dataset_digest;
  std::optional<TrainingState> init;
  PretrainReport pretrain;
  std::vector<double> utility_init;
  std::vector<double> budget_init;
  MetricsReport raw;  // probes trained and evaluated on raw data
  std::optional<PrivacyProbe> raw_privacy_probe;
};

// `with_raw` trains the raw-data probes (needed for baselines and the
// raw-pretrained protocol).
SharedStages PrepareShared(const RunConfig& config, bool with_raw = true);

enum class ProbeSet { kBoth, kAction, kPrivacy };

// Freezes `anonymizer` and trains fresh probes on its output; a null
// anonymizer is the identity bypass (probes see raw data).
// Protocols: known-data (default), novel-data (probes on a second dataset
// drawn from an independent seed stream), raw-pretrained (the raw privacy
// probe from `shared` evaluated on anonymized stills; privacy only).
MetricsReport ProbeAnonymizer(const Anonymizer* anonymizer,
                              const SharedStages& shared,
                              const RunConfig& config,
                              const std::string& protocol,
                              ProbeSet probes = ProbeSet::kBoth);

struct CellResult {
  std::vector<MetricsReport> rows;
  CheckpointFile state;  // final training state
  std::vector<EpochLog> curve;
};

std::string CellId(double limiter, double lambda);

// Anonymization training from the shared initialization with the B and
// lambda of `config`, then the probes. Failures are reported in the rows.
CellResult RunCell(const SharedStages& shared, const RunConfig& config);

struct SweepCell {
  double limiter;
  double lambda;
};

// Default: the B grid at fixed lambda followed by the lambda grid at fixed
// B; a cell on both grids appears in both blocks (and is trained once).
// `cross` gives the full product.
std::vector<SweepCell> SweepGrid(const SweepConfig& sweep);

struct SweepOptions {
  // Cells already present here (same config digest) are loaded, not rerun.
  std::optional<std::filesystem::path> cell_dir;
  std::function<void(const SweepCell&, const CellResult&)> on_cell;
};

// Rows in grid order: the raw-data baseline, then per cell the known-data
// row and, when sweep.raw_pretrained_rows, the raw-pretrained row.
std::vector<MetricsReport> RunSweep(const RunConfig& config,
                                    const SweepOptions& options = {});

}  // namespace anonybench

#endif  // ANONYBENCH_PIPELINE_H_
