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

// Frame export (binary PPM) and run manifests.

#ifndef ANONYBENCH_IO_H_
#define ANONYBENCH_IO_H_

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "anonybench/array.h"
#include "anonybench/synthdata.h"

namespace anonybench {

inline constexpr char kToolVersion[] = "anonybench 0.1.0";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// round(255 * x) after clamping to [0, 1].
uint8_t Quantize(double x);

// frame [3, H, W] -> P6 bytes ("P6\n<W> <H>\n255\n" + row-major RGB).
std::string EncodePpm(const Array& frame);
// P6 bytes -> [3, H, W] with values k / 255.
Array DecodePpm(std::string_view bytes);

// Throw IoError on failure.
void WritePpm(const std::filesystem::path& path, const Array& frame);
Array ReadPpm(const std::filesystem::path& path);
void WriteText(const std::filesystem::path& path, std::string_view text);

// Writes every clip and still as PPM frames plus labels.json:
//   action/{train,eval}/clip_NNNNN/frame_T.ppm
//   privacy/{train,eval}/still_NNNNN.ppm
// Returns the number of files written.
int ExportDataset(const Splits& splits, const std::filesystem::path& dir);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::string config;  // SerializeConfig text
  std::string config_digest;
  std::string dataset_digest;
  std::map<std::string, std::string> checkpoints;  // file -> digest
  std::map<std::string, std::string> outputs;      // file -> digest
  std::map<std::string, std::string> arguments;    // command arguments
  std::string started_at;
  std::string finished_at;

  nlohmann::json ToJson() const;
  static RunManifest FromJson(const nlohmann::json& j);
};

// UTC, ISO 8601 to the second.
std::string UtcTimestamp();

// Digest of a file's bytes.
std::string FileDigest(const std::filesystem::path& path);

}  // namespace anonybench

#endif  // ANONYBENCH_IO_H_
