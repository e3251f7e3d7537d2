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

#include "anonybench/digest.h"

#include <bit>
#include <cstdio>

namespace anonybench {

void Digest::Update(std::span<const unsigned char> bytes) {
  for (unsigned char b : bytes) {
    state_ ^= b;
    state_ *= 0x100000001b3ULL;
  }
}

void Digest::Update(std::string_view text) {
  Update(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

void Digest::Update(uint64_t value) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  Update(std::span<const unsigned char>(bytes, 8));
}

void Digest::Update(double value) { Update(std::bit_cast<uint64_t>(value)); }

void Digest::Update(std::span<const double> values) {
  for (double v : values) Update(v);
}

std::string ToHex(uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string Digest::hex() const { return ToHex(state_); }

std::string DigestBytes(std::string_view bytes) {
  Digest d;
  d.Update(bytes);
  return d.hex();
}

}  // namespace anonybench
