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

#include "anonybench/io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "anonybench/checkpoint.h"
#include "anonybench/digest.h"

namespace anonybench {
namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string Token(std::string_view bytes, size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const size_t start = pos;
  while (pos < bytes.size() &&
         !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    ++pos;
  }
  return std::string(bytes.substr(start, pos - start));
}

int HeaderInt(std::string_view bytes, size_t& pos) {
  const std::string t = Token(bytes, pos);
  if (t.empty() || !std::all_of(t.begin(), t.end(), ::isdigit)) {
    throw IoError("ppm: bad header field '" + t + "'");
  }
  return std::stoi(t);
}

std::string Index(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05d", i);
  return buf;
}

Array Slice(const Array& batch, int64_t i, const Shape& item) {
  const int64_t per = NumElements(item);
  return Array(item,
               std::vector<double>(batch.data().begin() + i * per,
                                   batch.data().begin() + (i + 1) * per));
}

}  // namespace

uint8_t Quantize(double x) {
  const double c = std::clamp(x, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(255.0 * c));
}

std::string EncodePpm(const Array& frame) {
  if (frame.rank() != 3 || frame.dim(0) != 3) {
    throw ShapeError("ppm: expected [3, H, W], got " +
                     ShapeToString(frame.shape()));
  }
  const int64_t H = frame.dim(1), W = frame.dim(2);
  std::string out =
      "P6\n" + std::to_string(W) + " " + std::to_string(H) + "\n255\n";
  out.reserve(out.size() + static_cast<size_t>(3 * H * W));
  for (int64_t y = 0; y < H; ++y) {
    for (int64_t x = 0; x < W; ++x) {
      for (int64_t c = 0; c < 3; ++c) {
        out.push_back(static_cast<char>(Quantize(frame[(c * H + y) * W + x])));
      }
    }
  }
  return out;
}

Array DecodePpm(std::string_view bytes) {
  size_t pos = 0;
  if (Token(bytes, pos) != "P6") throw IoError("ppm: not a P6 file");
  const int W = HeaderInt(bytes, pos);
  const int H = HeaderInt(bytes, pos);
  const int maxval = HeaderInt(bytes, pos);
  if (maxval != 255 || W <= 0 || H <= 0) {
    throw IoError("ppm: only 8-bit images are supported");
  }
  ++pos;  // single whitespace after maxval
  const size_t need = static_cast<size_t>(3) * W * H;
  if (bytes.size() < pos + need) throw IoError("ppm: truncated pixel data");
  Array out({3, H, W});
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      for (int c = 0; c < 3; ++c) {
        const auto v = static_cast<unsigned char>(bytes[pos++]);
        out[(static_cast<int64_t>(c) * H + y) * W + x] = v / 255.0;
      }
    }
  }
  return out;
}

void WriteText(const std::filesystem::path& path, std::string_view text) {
  try {
    WriteFileAtomic(path, text);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(std::string("cannot write ") + path.string() + ": " +
                  e.what());
  }
}

void WritePpm(const std::filesystem::path& path, const Array& frame) {
  WriteText(path, EncodePpm(frame));
}

Array ReadPpm(const std::filesystem::path& path) {
  try {
    return DecodePpm(ReadFile(path));
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(std::string("cannot read ") + path.string() + ": " +
                  e.what());
  }
}

int ExportDataset(const Splits& splits, const std::filesystem::path& dir) {
  int files = 0;
  nlohmann::json index;
  auto action = [&](const ActionSet& set, const std::string& name) {
    const Shape& s = set.clips.shape();
    const Shape frame(s.begin() + 2, s.end());
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < set.size(); ++i) {
      const std::string clip = "action/" + name + "/clip_" + Index(i);
      for (int64_t t = 0; t < s[1]; ++t) {
        WritePpm(dir / clip / ("frame_" + std::to_string(t) + ".ppm"),
                 Slice(set.clips, i * s[1] + t, frame));
        ++files;
      }
      std::vector<int> bits;
      for (int64_t k = 0; k < set.attributes.dim(1); ++k) {
        bits.push_back(static_cast<int>(set.attributes[i * set.attributes.dim(1) + k]));
      }
      rows.push_back({{"path", clip}, {"y_t", set.labels[i]}, {"y_b", bits},
                      {"seed", set.seeds[i]}});
    }
    index["action"][name] = rows;
  };
  auto privacy = [&](const PrivacySet& set, const std::string& name) {
    const Shape& s = set.frames.shape();
    const Shape frame(s.begin() + 1, s.end());
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < set.size(); ++i) {
      const std::string still =
          "privacy/" + name + "/still_" + Index(i) + ".ppm";
      WritePpm(dir / still, Slice(set.frames, i, frame));
      ++files;
      std::vector<int> bits;
      for (int64_t k = 0; k < set.attributes.dim(1); ++k) {
        bits.push_back(static_cast<int>(set.attributes[i * set.attributes.dim(1) + k]));
      }
      rows.push_back({{"path", still}, {"y_b", bits},
                      {"source_y_t", set.actions[i]}, {"seed", set.seeds[i]}});
    }
    index["privacy"][name] = rows;
  };
  action(splits.action.train, "train");
  action(splits.action.eval, "eval");
  privacy(splits.privacy.train, "train");
  privacy(splits.privacy.eval, "eval");
  index["dataset_digest"] = DatasetDigest(splits);
  WriteText(dir / "labels.json", index.dump(1));
  return files + 1;
}

nlohmann::json RunManifest::ToJson() const {
  return {{"tool_version", tool_version},     {"command", command},
          {"config", config},                 {"config_digest", config_digest},
          {"dataset_digest", dataset_digest}, {"checkpoints", checkpoints},
          {"outputs", outputs},               {"arguments", arguments},
          {"started_at", started_at},         {"finished_at", finished_at}};
}

RunManifest RunManifest::FromJson(const nlohmann::json& j) {
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config").get<std::string>();
  m.config_digest = j.at("config_digest").get<std::string>();
  m.dataset_digest = j.at("dataset_digest").get<std::string>();
  m.checkpoints =
      j.at("checkpoints").get<std::map<std::string, std::string>>();
  m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  m.arguments = j.value("arguments", std::map<std::string, std::string>{});
  m.started_at = j.at("started_at").get<std::string>();
  m.finished_at = j.at("finished_at").get<std::string>();
  return m;
}

std::string UtcTimestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string FileDigest(const std::filesystem::path& path) {
  try {
    return DigestBytes(ReadFile(path));
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(std::string("cannot read ") + path.string() + ": " +
                  e.what());
  }
}

}  // namespace anonybench
