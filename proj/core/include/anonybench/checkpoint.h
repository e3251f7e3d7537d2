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

// Checkpoint file layout (all integers little-endian):
//
//   8 bytes   magic "ANBCKPT1"
//   u64       header length L
//   L bytes   UTF-8 JSON header:
//               {"arrays": [{"name", "shape", "offset"}, ...],
//                "data_digest": digest of the data section,
//                "format": "anonybench.checkpoint", "meta": {...},
//                "version": 1}
//   data      per array: u64 element count, then that many IEEE-754
//             binary64 values
//
// `offset` is the byte offset of an array's count prefix from the start of
// the data section. Encoding is deterministic: equal contents give equal
// bytes.

#ifndef ANONYBENCH_CHECKPOINT_H_
#define ANONYBENCH_CHECKPOINT_H_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "anonybench/array.h"
#include "anonybench/params.h"

namespace anonybench {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckpointFile {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, Array>> arrays;

  const Array* Find(std::string_view name) const;
};

std::string EncodeCheckpoint(const CheckpointFile& file);
CheckpointFile DecodeCheckpoint(std::string_view bytes);

// Writes through a temporary file and renames it into place.
void SaveCheckpoint(const std::filesystem::path& path,
                    const CheckpointFile& file);
CheckpointFile LoadCheckpoint(const std::filesystem::path& path);
// Digest of the encoded bytes.
std::string CheckpointDigest(const CheckpointFile& file);

// Stores each parameter as "<prefix>/<name>".
void AppendParams(CheckpointFile& file, std::string_view prefix,
                  const ParamSet& params);
// Overwrites `params` from "<prefix>/<name>" entries; every parameter must
// be present with a matching shape.
void RestoreParams(const CheckpointFile& file, std::string_view prefix,
                   ParamSet& params);
bool HasPrefix(const CheckpointFile& file, std::string_view prefix);

void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace anonybench

#endif  // ANONYBENCH_CHECKPOINT_H_
