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


#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "anonybench/checkpoint.h"
#include "anonybench/config.h"
#include "anonybench/io.h"
#include "anonybench/optimizer.h"
#include "anonybench/pipeline.h"
#include "test_util.h"

namespace anonybench {
namespace {

namespace fs = std::filesystem;
using testing::RandomArray;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("anonybench_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(PpmTest, QuantizeRoundsAndClamps) {
  EXPECT_EQ(Quantize(-0.5), 0);
  EXPECT_EQ(Quantize(1.5), 255);
  EXPECT_EQ(Quantize(0.5), 128);  // 127.5 rounds away from zero
  EXPECT_EQ(Quantize(1.0 / 255.0), 1);
}

TEST(PpmTest, HeaderAndLayout) {
  Array f({3, 1, 2}, 0.0);
  f[0] = 1.0;  // R of (0, 0)
  f[5] = 1.0;  // B of (0, 1)
  const std::string bytes = EncodePpm(f);
  const std::string header = "P6\n2 1\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 6);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  const std::string px = bytes.substr(header.size());
  EXPECT_EQ(static_cast<unsigned char>(px[0]), 255);
  EXPECT_EQ(static_cast<unsigned char>(px[1]), 0);
  EXPECT_EQ(static_cast<unsigned char>(px[5]), 255);
}

TEST(PpmTest, RoundTripWithinQuantization) {
  Rng rng(3);
  const Array f = testing::RandomArray({3, 4, 6}, rng, 0.0, 1.0);
  const Array g = DecodePpm(EncodePpm(f));
  ASSERT_EQ(g.shape(), f.shape());
  for (size_t i = 0; i < f.size(); ++i) EXPECT_LE(std::abs(f[i] - g[i]), 0.5 / 255 + 1e-12);
  EXPECT_EQ(EncodePpm(g), EncodePpm(f));
}

TEST(PpmTest, RejectsBadInput) {
  EXPECT_THROW(EncodePpm(Array({1, 2, 2})), ShapeError);
  EXPECT_THROW(DecodePpm("P5\n1 1\n255\n\0"), IoError);
  EXPECT_THROW(DecodePpm("P6\n4 4\n255\nabc"), IoError);
}

TEST(PpmTest, UnwritablePathIsIoError) {
  EXPECT_THROW(WritePpm("/proc/nonexistent/x.ppm", Array({3, 1, 1})), IoError);
}

TEST(ExportTest, WritesEveryFrame) {
  const RunConfig c = testing::TinyConfig();
  const Splits s = MakeSplits(c.data, 1);
  const fs::path dir = TempDir("export");
  const int files = ExportDataset(s, dir);
  EXPECT_EQ(files, (16 + 8) * 4 + 16 + 8 + 1);
  EXPECT_TRUE(fs::exists(dir / "action/eval/clip_00007/frame_3.ppm"));
  EXPECT_TRUE(fs::exists(dir / "privacy/train/still_00015.ppm"));
  const auto labels = nlohmann::json::parse(ReadFile(dir / "labels.json"));
  EXPECT_EQ(labels["dataset_digest"], DatasetDigest(s));
  const Array back = ReadPpm(dir / "privacy/train/still_00000.ppm");
  EXPECT_EQ(back.shape(), (Shape{3, 16, 16}));
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  Rng rng(5);
  CheckpointFile f;
  f.meta["kind"] = "test";
  f.meta["x"] = 1.25;
  f.arrays.emplace_back("a", RandomArray({2, 3}, rng));
  f.arrays.emplace_back("b", Array::Scalar(-0.0));
  const std::string bytes = EncodeCheckpoint(f);
  const CheckpointFile g = DecodeCheckpoint(bytes);
  EXPECT_EQ(g.meta, f.meta);
  ASSERT_EQ(g.arrays.size(), 2u);
  EXPECT_EQ(g.Find("a")->vec(), f.arrays[0].second.vec());
  EXPECT_EQ(EncodeCheckpoint(g), bytes);
  EXPECT_EQ(g.Find("missing"), nullptr);
}

TEST(CheckpointTest, CorruptionIsDetected) {
  CheckpointFile f;
  f.arrays.emplace_back("a", Array({4}, 1.0));
  std::string bytes = EncodeCheckpoint(f);
  EXPECT_THROW(DecodeCheckpoint(bytes.substr(0, bytes.size() - 3)),
               CheckpointError);
  bytes[bytes.size() - 2] ^= 0x40;
  EXPECT_THROW(DecodeCheckpoint(bytes), CheckpointError);
  EXPECT_THROW(DecodeCheckpoint("not a checkpoint"), CheckpointError);
}

TEST(CheckpointTest, ParamsRestoreAndShapeMismatch) {
  Rng rng(9);
  ParamSet p;
  p.AddUniform("w", {2, 2}, 2, rng);
  CheckpointFile f;
  AppendParams(f, "net", p);
  ParamSet q;
  q.Add("w", Array({2, 2}));
  RestoreParams(f, "net", q);
  EXPECT_EQ(q.Checksum(), p.Checksum());
  ParamSet wrong;
  wrong.Add("w", Array({3}));
  EXPECT_THROW(RestoreParams(f, "net", wrong), CheckpointError);
  EXPECT_THROW(RestoreParams(f, "other", q), CheckpointError);
}

TEST(OptimizerTest, AdamStateRoundTrip) {
  Rng rng(2);
  ParamSet p;
  p.AddUniform("w", {3}, 3, rng);
  Optimizer a(OptimizerKind::kAdam, 0.01);
  for (int i = 0; i < 3; ++i) {
    p.at("w").grad.Fill(0.5);
    a.Step(p);
  }
  CheckpointFile f;
  a.Save(f, "opt");
  Optimizer b(OptimizerKind::kAdam, 0.01);
  b.Load(f, "opt", p);
  EXPECT_EQ(b.steps(), 3);
  ParamSet p2 = p;
  p.at("w").grad.Fill(0.1);
  p2.at("w").grad.Fill(0.1);
  a.Step(p);
  b.Step(p2);
  EXPECT_EQ(p.Checksum(), p2.Checksum());
}

TEST(ConfigTest, ParseSerializeRoundTrip) {
  RunConfig c;
  c.train.limiter = 0.7;
  c.sweep.b_values = {0.1, 0.2};
  c.nets.anon_skip = true;
  const RunConfig d = ParseConfig(SerializeConfig(c));
  EXPECT_EQ(SerializeConfig(d), SerializeConfig(c));
  EXPECT_EQ(ConfigDigest(d), ConfigDigest(c));
}

TEST(ConfigTest, CommentsAndWhitespace) {
  const RunConfig c =
      ParseConfig("# header\n\n   mu = 2.5   # trailing\nsweep_b = 0.1, 0.4\n");
  EXPECT_EQ(c.train.mu, 2.5);
  EXPECT_EQ(c.sweep.b_values, (std::vector<double>{0.1, 0.4}));
}

TEST(ConfigTest, Errors) {
  try {
    ParseConfig("mu = fast\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "mu");
  }
  EXPECT_THROW(ParseConfig("nonsense_key = 1\n"), ConfigError);
  EXPECT_THROW(ParseConfig("limiter\n"), ConfigError);
  RunConfig c;
  c.train.tau = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = RunConfig();
  c.train.skip = c.data.frames;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(ConfigTest, DigestIgnoresPlacement) {
  RunConfig a, b;
  b.out_dir = "elsewhere";
  b.sweep.jobs = 4;
  EXPECT_EQ(ConfigDigest(a), ConfigDigest(b));
  b.train.mu = 2.0;
  EXPECT_NE(ConfigDigest(a), ConfigDigest(b));
}

TEST(ManifestTest, JsonRoundTrip) {
  RunManifest m;
  m.command = "train";
  m.config = "seed = 1\n";
  m.config_digest = "abc";
  m.dataset_digest = "def";
  m.checkpoints["anonymizer.ckpt"] = "0123";
  m.outputs["curves.csv"] = "4567";
  m.arguments["checkpoint"] = "p.ckpt";
  m.started_at = m.finished_at = UtcTimestamp();
  const RunManifest n = RunManifest::FromJson(m.ToJson());
  EXPECT_EQ(n.ToJson(), m.ToJson());
  EXPECT_EQ(n.tool_version, kToolVersion);
}

TEST(MetricsReportTest, CsvAndJson) {
  MetricsReport r;
  r.run_id = "B0.3_lambda1";
  r.protocol = kKnownData;
  r.limiter = 0.3;
  r.lambda = 1.0;
  r.mu = 1.0;
  r.tau = 0.1;
  r.seed = 7;
  r.top1 = 0.5;
  r.cmap = 0.75;
  r.f1 = 0.25;
  r.ap = {1.0, std::nullopt, 0.5};
  r.l_penalty_final = 0.0;
  EXPECT_EQ(MetricsCsvHeader(3),
            "run_id,protocol,B,lambda,mu,tau,seed,top1,cmap,f1,ap_attr_0,"
            "ap_attr_1,ap_attr_2,l_penalty_final,wall_seconds\n");
  EXPECT_EQ(MetricsCsvRow(r, 3),
            "B0.3_lambda1,known-data,0.3,1,1,0.1,7,0.500000,0.750000,0.250000,"
            "1.000000,,0.500000,0.000000,0.000000\n");
  const MetricsReport back = MetricsReport::FromJson(r.ToJson());
  EXPECT_EQ(MetricsCsvRow(back, 3), MetricsCsvRow(r, 3));
}

}  // namespace
}  // namespace anonybench
