// Copyright 2026 The MTAL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cstring>
#include <fstream>
#include <random>

#include "mtal/error.hpp"
#include "mtal/io.hpp"

namespace mtal::io {
namespace {

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
  }
}

std::uint16_t GetU16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t GetU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> EncodeTensor(const ProbabilityMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(kTensorHeaderSize + map.data().size() * 4);
  out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
  PutU16(out, kTensorVersion);
  PutU32(out, static_cast<std::uint32_t>(map.height()));
  PutU32(out, static_cast<std::uint32_t>(map.width()));
  PutU32(out, static_cast<std::uint32_t>(map.channels()));
  PutU16(out, kElementFloat32);
  for (float v : map.data()) PutU32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

ProbabilityMap DecodeTensor(std::span<const std::uint8_t> bytes,
                            const std::string& source) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kTensorMagic, 4) != 0) {
    throw Error(ErrorKind::kWrongMagic, source + " does not start with MTPR");
  }
  if (bytes.size() < kTensorHeaderSize) {
    throw Error(ErrorKind::kTruncated,
                source + ": header needs " + std::to_string(kTensorHeaderSize) +
                    " bytes, got " + std::to_string(bytes.size()));
  }
  const std::uint8_t* p = bytes.data();
  const std::uint16_t version = GetU16(p + 4);
  if (version != kTensorVersion) {
    throw Error(ErrorKind::kVersionMismatch,
                source + ": tensor format version " + std::to_string(version));
  }
  const std::uint32_t height = GetU32(p + 6);
  const std::uint32_t width = GetU32(p + 10);
  const std::uint32_t channels = GetU32(p + 14);
  const std::uint16_t element = GetU16(p + 18);
  if (element != kElementFloat32) {
    throw Error(ErrorKind::kUnsupportedElement,
                source + ": element code " + std::to_string(element));
  }
  const std::uint64_t count = std::uint64_t{height} * width * channels;
  const std::uint64_t expected = count * 4;
  const std::uint64_t payload = bytes.size() - kTensorHeaderSize;
  if (payload < expected) {
    throw Error(ErrorKind::kTruncated,
                source + ": payload has " + std::to_string(payload) +
                    " bytes, expected " + std::to_string(expected));
  }
  if (payload > expected) {
    throw Error(ErrorKind::kSyntax, source + ": " +
                                        std::to_string(payload - expected) +
                                        " trailing bytes after payload");
  }
  std::vector<float> data(count);
  const std::uint8_t* q = p + kTensorHeaderSize;
  for (std::uint64_t i = 0; i < count; ++i) {
    data[i] = std::bit_cast<float>(GetU32(q + 4 * i));
  }
  return ProbabilityMap(height, width, channels, std::move(data));
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileAtomically(const std::filesystem::path& path,
                         std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::kIo,
                "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

void WriteTextAtomically(const std::filesystem::path& path,
                         const std::string& text) {
  WriteFileAtomically(
      path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                      text.size()));
}

void WriteTensor(const ProbabilityMap& map, const std::filesystem::path& path) {
  WriteFileAtomically(path, EncodeTensor(map));
}

ProbabilityMap ReadTensor(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::kMissingFile, "tensor file " + path.string());
  }
  return DecodeTensor(ReadFileBytes(path), path.string());
}

ProbabilityMap LabelMapToTensor(const LabelMap& labels) {
  ProbabilityMap out(labels.height, labels.width, 1);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    out.data()[i] = static_cast<float>(labels.labels[i]);
  }
  return out;
}

LabelMap TensorToLabelMap(const ProbabilityMap& tensor) {
  if (tensor.channels() != 1) {
    throw Error(ErrorKind::kDimensionMismatch,
                "label tensors must have exactly one channel");
  }
  LabelMap out(tensor.height(), tensor.width());
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    const float v = tensor.data()[i];
    if (!(v >= 0.0f) || v != static_cast<float>(static_cast<std::int32_t>(v))) {
      throw Error(ErrorKind::kInvariant,
                  "label tensor holds a non-integer class value");
    }
    out.labels[i] = static_cast<std::int32_t>(v);
  }
  return out;
}

}  // namespace mtal::io
