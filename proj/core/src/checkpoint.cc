// Copyright 2026 The anssel Authors
// SPDX-License-Identifier: Apache-2.0

#include "anssel/checkpoint.h"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <unordered_map>

#include "anssel/error.h"

namespace anssel {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<std::uint8_t, sizeof(T)> raw;
  std::memcpy(raw.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.insert(out.end(), raw.begin(), raw.end());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const std::string& tensor) {
    std::array<std::uint8_t, sizeof(T)> raw;
    take(raw.data(), sizeof(T), tensor);
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    T value;
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
  }

  void take(void* dst, std::size_t n, const std::string& tensor) {
    if (bytes_.size() - pos_ < n) {
      throw TruncationError(fmt::format("checkpoint ends inside '{}' at byte {}", tensor, bytes_.size()),
                            tensor);
    }
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

constexpr const char* kHeader = "<header>";

Tensor meta_encoder(const EncoderConfig& c) {
  return Tensor::vector({static_cast<double>(c.layers), static_cast<double>(c.hidden),
                         static_cast<double>(c.heads), static_cast<double>(c.vocab_size),
                         static_cast<double>(c.max_len), c.bert_compat ? 1.0 : 0.0});
}

Tensor meta_head(const HeadConfig& c) {
  return Tensor::vector({static_cast<double>(c.kind), static_cast<double>(c.hidden),
                         static_cast<double>(c.cnn_filters), static_cast<double>(c.cnn_window),
                         static_cast<double>(c.rnn_layers)});
}

std::size_t meta_size(const Tensor& t, std::size_t i, const char* what) {
  const double v = t[i];
  if (!(v >= 0.0) || v > 1e9 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw SerializationError(fmt::format("checkpoint meta field {} is not a valid size", what));
  }
  return static_cast<std::size_t>(v);
}

ModelConfig config_from_meta(const Tensor& enc, const Tensor& head, Precision precision) {
  if (enc.size() != 6 || head.size() != 5) {
    throw ShapeMismatchError("checkpoint meta tensors have unexpected sizes");
  }
  ModelConfig cfg;
  cfg.encoder.layers = meta_size(enc, 0, "layers");
  cfg.encoder.hidden = meta_size(enc, 1, "hidden");
  cfg.encoder.heads = meta_size(enc, 2, "heads");
  cfg.encoder.vocab_size = meta_size(enc, 3, "vocab_size");
  cfg.encoder.max_len = meta_size(enc, 4, "max_len");
  cfg.encoder.bert_compat = meta_size(enc, 5, "bert_compat") != 0;
  const std::size_t kind = meta_size(head, 0, "head kind");
  if (kind > static_cast<std::size_t>(HeadKind::kRnn)) {
    throw SerializationError("checkpoint names an unknown head kind");
  }
  cfg.head.kind = static_cast<HeadKind>(kind);
  cfg.head.hidden = meta_size(head, 1, "head hidden");
  cfg.head.cnn_filters = meta_size(head, 2, "cnn filters");
  cfg.head.cnn_window = meta_size(head, 3, "cnn window");
  cfg.head.rnn_layers = meta_size(head, 4, "rnn layers");
  cfg.precision = precision;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw SerializationError(std::string("checkpoint describes an invalid model: ") + e.what());
  }
  return cfg;
}

}  // namespace

std::vector<std::uint8_t> encode_tensors(std::span<const NamedTensor> tensors, Precision precision) {
  std::vector<std::uint8_t> out(kCheckpointMagic.begin(), kCheckpointMagic.end());
  out.push_back(static_cast<std::uint8_t>(kCheckpointVersion));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(precision));
  if (tensors.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw SerializationError("too many tensors for one checkpoint");
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const NamedTensor& t : tensors) {
    if (t.name.empty() || t.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw SerializationError("tensor name length out of range: '" + t.name + "'");
    }
    if (t.value.rank() > std::numeric_limits<std::uint8_t>::max()) {
      throw SerializationError("tensor rank too large for " + t.name);
    }
    put<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(t.value.rank()));
    for (std::size_t d : t.value.shape()) {
      if (d > std::numeric_limits<std::uint32_t>::max()) {
        throw SerializationError("dimension too large for " + t.name);
      }
      put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    }
    for (double v : t.value.data()) {
      if (precision == Precision::kFloat32) {
        put<float>(out, static_cast<float>(v));
      } else {
        put<double>(out, v);
      }
    }
  }
  return out;
}

DecodedTensors decode_tensors(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  std::array<char, 8> magic{};
  if (bytes.size() < magic.size()) {
    if (bytes.size() < kCheckpointMagic.size() ||
        std::memcmp(bytes.data(), kCheckpointMagic.data(), kCheckpointMagic.size()) != 0) {
      throw MagicError("not a checkpoint: bad magic bytes");
    }
  }
  r.take(magic.data(), magic.size(), kHeader);
  if (std::memcmp(magic.data(), kCheckpointMagic.data(), kCheckpointMagic.size()) != 0) {
    throw MagicError("not a checkpoint: bad magic bytes");
  }
  if (magic[7] != kCheckpointVersion) {
    throw VersionError(fmt::format("unsupported checkpoint version '{}'", magic[7]));
  }
  DecodedTensors out;
  const auto precision = r.get<std::uint8_t>(kHeader);
  if (precision > 1) throw SerializationError(fmt::format("unknown precision flag {}", precision));
  out.precision = static_cast<Precision>(precision);
  const auto count = r.get<std::uint32_t>(kHeader);

  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string where = fmt::format("<tensor #{}>", i);
    const auto name_len = r.get<std::uint16_t>(where);
    std::string name(name_len, '\0');
    r.take(name.data(), name_len, where);
    const auto rank = r.get<std::uint8_t>(name);
    if (rank == 0) throw ShapeMismatchError("tensor '" + name + "' has rank 0");
    Shape shape(rank);
    std::size_t numel = 1;
    for (auto& d : shape) {
      d = r.get<std::uint32_t>(name);
      if (d == 0) throw ShapeMismatchError("tensor '" + name + "' has a zero dimension");
      numel *= d;
      if (numel > r.remaining()) {
        throw TruncationError(fmt::format("checkpoint ends inside '{}'", name), name);
      }
    }
    const std::size_t width = out.precision == Precision::kFloat32 ? 4 : 8;
    if (numel > r.remaining() / width) {
      throw TruncationError(fmt::format("checkpoint ends inside '{}': {} values declared", name, numel),
                            name);
    }
    std::vector<double> values(numel);
    for (double& v : values) {
      v = out.precision == Precision::kFloat32 ? static_cast<double>(r.get<float>(name))
                                               : r.get<double>(name);
    }
    out.tensors.push_back({std::move(name), Tensor(std::move(shape), std::move(values))});
  }
  if (r.remaining() != 0) {
    throw ByteCountError(fmt::format("{} unexpected bytes after the last tensor", r.remaining()));
  }
  return out;
}

std::vector<std::uint8_t> checkpoint_bytes(const Model& model) {
  std::vector<NamedTensor> tensors;
  tensors.push_back({"meta.encoder", meta_encoder(model.config().encoder)});
  tensors.push_back({"meta.head", meta_head(model.config().head)});
  for (const Parameter& p : model.parameters().all()) tensors.push_back({p.name, p.var.value()});
  return encode_tensors(tensors, model.config().precision);
}

Model model_from_checkpoint(std::span<const std::uint8_t> bytes) {
  DecodedTensors decoded = decode_tensors(bytes);
  std::unordered_map<std::string, const Tensor*> by_name;
  for (const NamedTensor& t : decoded.tensors) {
    if (!by_name.emplace(t.name, &t.value).second) {
      throw SerializationError("duplicate tensor '" + t.name + "' in checkpoint");
    }
  }
  auto find = [&](const std::string& name) -> const Tensor& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw ShapeMismatchError("checkpoint lacks tensor '" + name + "'");
    return *it->second;
  };
  const ModelConfig cfg =
      config_from_meta(find("meta.encoder"), find("meta.head"), decoded.precision);
  Model model(cfg, 0);
  const auto& params = model.parameters().all();
  if (decoded.tensors.size() != params.size() + 2) {
    throw ByteCountError(fmt::format("checkpoint holds {} tensors, the model needs {}",
                                     decoded.tensors.size(), params.size() + 2));
  }
  for (const Parameter& p : params) {
    const Tensor& stored = find(p.name);
    if (stored.shape() != p.var.shape()) {
      throw ShapeMismatchError(fmt::format("tensor '{}' is {} in the checkpoint, model expects {}",
                                           p.name, shape_str(stored.shape()),
                                           shape_str(p.var.shape())));
    }
    Var v = p.var;
    v.mutable_value() = stored;
  }
  return model;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  const auto bytes = checkpoint_bytes(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for checkpoint " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return model_from_checkpoint(bytes);
}

}  // namespace anssel
