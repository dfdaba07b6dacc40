// Copyright (c) 2026 The SCTTS Authors
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

#include "wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace sctts {

namespace {

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void write_u16(std::ostream& out, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(b, 2);
}

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open wav file: " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0)
    fail(ErrorCode::kParse, "not a RIFF file: " + path);
  read_u32(in);  // riff size
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0)
    fail(ErrorCode::kParse, "not a WAVE file: " + path);

  WavData wav;
  bool have_fmt = false;
  while (in.read(tag, 4)) {
    uint32_t size = read_u32(in);
    if (!in) break;
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      uint16_t format = read_u16(in);
      uint16_t channels = read_u16(in);
      uint32_t rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      uint16_t bits = read_u16(in);
      if (format != 1 || bits != 16)
        fail(ErrorCode::kParse, "unsupported wav encoding (want 16-bit PCM): " + path);
      if (channels != 1) fail(ErrorCode::kParse, "unsupported channel count (want mono): " + path);
      wav.sample_rate = static_cast<int>(rate);
      if (size > 16) in.seekg(size - 16, std::ios::cur);
      if (size & 1) in.seekg(1, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) fail(ErrorCode::kParse, "data chunk before fmt chunk: " + path);
      const size_t n = size / 2;
      std::vector<int16_t> raw(n);
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 2));
      if (!in) fail(ErrorCode::kParse, "truncated wav data: " + path);
      wav.samples.resize(n);
      for (size_t i = 0; i < n; ++i) wav.samples[i] = raw[i] / 32768.0;
      return wav;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  fail(ErrorCode::kParse, "wav file has no data chunk: " + path);
}

void write_wav(const std::string& path, const std::vector<double>& samples,
               int sample_rate) {
  if (sample_rate <= 0) fail(ErrorCode::kInvalidArgument, "sample rate must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write wav file: " + path);

  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<uint32_t>(sample_rate));
  write_u32(out, static_cast<uint32_t>(sample_rate * 2));
  write_u16(out, 2);
  write_u16(out, 16);
  out.write("data", 4);
  write_u32(out, data_bytes);

  for (double s : samples) {
    double clamped = std::clamp(s, -1.0, 1.0);
    auto v = static_cast<int16_t>(std::lrint(clamped * 32767.0));
    write_u16(out, static_cast<uint16_t>(v));
  }
  if (!out) fail(ErrorCode::kIo, "short write: " + path);
}

}  // namespace sctts
