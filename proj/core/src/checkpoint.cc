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

#include "anonybench/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "anonybench/digest.h"

namespace anonybench {
namespace {

constexpr char kMagic[8] = {'A', 'N', 'B', 'C', 'K', 'P', 'T', '1'};
constexpr char kFormat[] = "anonybench.checkpoint";

void PutU64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

uint64_t GetU64(std::string_view bytes, size_t pos) {
  if (pos + 8 > bytes.size()) throw CheckpointError("checkpoint: truncated");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[pos + i]))
         << (8 * i);
  }
  return v;
}

}  // namespace

const Array* CheckpointFile::Find(std::string_view name) const {
  for (const auto& [n, a] : arrays) {
    if (n == name) return &a;
  }
  return nullptr;
}

std::string EncodeCheckpoint(const CheckpointFile& file) {
  nlohmann::json header;
  header["format"] = kFormat;
  header["version"] = 1;
  header["meta"] = file.meta;
  header["arrays"] = nlohmann::json::array();
  std::string data;
  for (const auto& [name, array] : file.arrays) {
    header["arrays"].push_back(
        {{"name", name}, {"shape", array.shape()}, {"offset", data.size()}});
    PutU64(data, array.size());
    for (double v : array.data()) PutU64(data, std::bit_cast<uint64_t>(v));
  }
  header["data_digest"] = DigestBytes(data);
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  PutU64(out, text.size());
  out += text;
  out += data;
  return out;
}

CheckpointFile DecodeCheckpoint(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw CheckpointError("checkpoint: bad magic");
  }
  const uint64_t header_len = GetU64(bytes, 8);
  if (16 + header_len > bytes.size()) throw CheckpointError("checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: bad header: ") + e.what());
  }
  if (header.value("format", "") != kFormat || header.value("version", 0) != 1) {
    throw CheckpointError("checkpoint: unsupported format");
  }
  const std::string_view data = bytes.substr(16 + header_len);
  if (header.value("data_digest", "") != DigestBytes(data)) {
    throw CheckpointError("checkpoint: data digest mismatch (corrupt file)");
  }
  CheckpointFile file;
  file.meta = header.value("meta", nlohmann::json::object());
  for (const auto& entry : header.at("arrays")) {
    const auto offset = entry.at("offset").get<uint64_t>();
    Shape shape = entry.at("shape").get<Shape>();
    const uint64_t count = GetU64(data, offset);
    if (static_cast<int64_t>(count) != NumElements(shape)) {
      throw CheckpointError("checkpoint: count/shape mismatch for " +
                            entry.at("name").get<std::string>());
    }
    if (offset + 8 + count * 8 > data.size()) {
      throw CheckpointError("checkpoint: truncated array data");
    }
    std::vector<double> values(count);
    for (uint64_t i = 0; i < count; ++i) {
      values[i] = std::bit_cast<double>(GetU64(data, offset + 8 + 8 * i));
    }
    file.arrays.emplace_back(entry.at("name").get<std::string>(),
                             Array(std::move(shape), std::move(values)));
  }
  return file;
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::filesystem::filesystem_error(
        "cannot open for writing", tmp,
        std::make_error_code(std::errc::permission_denied));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::filesystem::filesystem_error(
        "write failed", tmp, std::make_error_code(std::errc::io_error));
  }
  std::filesystem::rename(tmp, path);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::filesystem::filesystem_error(
        "cannot open for reading", path,
        std::make_error_code(std::errc::no_such_file_or_directory));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const CheckpointFile& file) {
  WriteFileAtomic(path, EncodeCheckpoint(file));
}

CheckpointFile LoadCheckpoint(const std::filesystem::path& path) {
  return DecodeCheckpoint(ReadFile(path));
}

std::string CheckpointDigest(const CheckpointFile& file) {
  return DigestBytes(EncodeCheckpoint(file));
}

void AppendParams(CheckpointFile& file, std::string_view prefix,
                  const ParamSet& params) {
  for (const Parameter& p : params.items()) {
    file.arrays.emplace_back(std::string(prefix) + "/" + p.name, p.value);
  }
}

void RestoreParams(const CheckpointFile& file, std::string_view prefix,
                   ParamSet& params) {
  for (Parameter& p : params.items()) {
    const std::string key = std::string(prefix) + "/" + p.name;
    const Array* a = file.Find(key);
    if (!a) throw CheckpointError("checkpoint: missing " + key);
    if (a->shape() != p.value.shape()) {
      throw CheckpointError("checkpoint: " + key + " has shape " +
                            ShapeToString(a->shape()) + ", expected " +
                            ShapeToString(p.value.shape()));
    }
    p.value = *a;
  }
}

bool HasPrefix(const CheckpointFile& file, std::string_view prefix) {
  const std::string head = std::string(prefix) + "/";
  for (const auto& entry : file.arrays) {
    if (entry.first.starts_with(head)) return true;
  }
  return false;
}

}  // namespace anonybench
