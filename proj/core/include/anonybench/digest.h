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

#ifndef ANONYBENCH_DIGEST_H_
#define ANONYBENCH_DIGEST_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace anonybench {

// Incremental 64-bit FNV-1a. Doubles are hashed by their little-endian IEEE
// bytes, so digests agree across platforms.
class Digest {
 public:
  void Update(std::span<const unsigned char> bytes);
  void Update(std::string_view text);
  void Update(uint64_t value);
  void Update(double value);
  void Update(std::span<const double> values);

  uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string ToHex(uint64_t value);
std::string DigestBytes(std::string_view bytes);

}  // namespace anonybench

#endif  // ANONYBENCH_DIGEST_H_
