// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

// Binary checkpoint format, all integers little-endian:
//
//   "BASCKPT1"                      8 bytes, the last one is the version
//   precision                       u8, 0 = float32 values, 1 = float64
//   tensor count                    u32
//   per tensor:
//     name length, name             u16, UTF-8 bytes
//     rank, dims                    u8, rank × u32
//     values                        IEEE-754, row-major
//
// Architecture sizes travel as the reserved tensors "meta.encoder" and
// "meta.head" so a model can be rebuilt from the file alone.

#ifndef ANSSEL_CHECKPOINT_H_
#define ANSSEL_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "anssel/model.h"
#include "anssel/tensor.h"

namespace anssel {

inline constexpr std::string_view kCheckpointMagic = "BASCKPT";
inline constexpr char kCheckpointVersion = '1';

struct NamedTensor {
  std::string name;
  Tensor value;
};

std::vector<std::uint8_t> encode_tensors(std::span<const NamedTensor> tensors, Precision precision);

struct DecodedTensors {
  Precision precision = Precision::kFloat64;
  std::vector<NamedTensor> tensors;
};

// Throws MagicError, VersionError, TruncationError (naming the tensor being
// read), ByteCountError for trailing bytes, or SerializationError for other
// malformed content.
DecodedTensors decode_tensors(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> checkpoint_bytes(const Model& model);
Model model_from_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Model& model, const std::filesystem::path& path);
// Also throws ShapeMismatchError when a stored tensor disagrees with the
// architecture described by the meta tensors.
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace anssel

#endif  // ANSSEL_CHECKPOINT_H_
