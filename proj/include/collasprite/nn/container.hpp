#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "collasprite/common.hpp"

namespace collasprite::nn {

// Single binary container used for weights, checkpoints and extractor files.
// Layout (all integers little-endian):
//   bytes 0..3   magic "CSPC"
//   bytes 4..7   format version (u32) = 1
//   bytes 8..15  header length in bytes (u64)
//   header       UTF-8 JSON: {kind, meta, tensors:[{name,dtype,shape,offset,bytes}]}
//   payload      raw tensor data, offsets relative to payload start
// Documented in docs/formats.md.

inline constexpr uint32_t kContainerMagic = 0x43505343u;  // "CSPC"
inline constexpr uint32_t kContainerVersion = 1;

struct TensorEntry {
  std::string name;
  std::string dtype;  // "f32" | "f64"
  std::vector<int> shape;
  uint64_t offset = 0;
  uint64_t bytes = 0;
};

class ContainerWriter {
 public:
  ContainerWriter(std::string kind, nlohmann::json meta)
      : kind_(std::move(kind)), meta_(std::move(meta)) {}

  void add_tensor(const std::string& name, const std::string& dtype,
                  const std::vector<int>& shape, const void* data, size_t bytes) {
    TensorEntry e;
    e.name = name;
    e.dtype = dtype;
    e.shape = shape;
    e.offset = payload_.size();
    e.bytes = bytes;
    entries_.push_back(e);
    const char* p = static_cast<const char*>(data);
    payload_.insert(payload_.end(), p, p + bytes);
  }

  template <typename T>
  void add_values(const std::string& name, const std::vector<int>& shape, const T* data,
                  size_t count) {
    add_tensor(name, sizeof(T) == 4 ? "f32" : "f64", shape, data, count * sizeof(T));
  }

  void write(const std::filesystem::path& path) const {
    nlohmann::json header;
    header["kind"] = kind_;
    header["meta"] = meta_;
    auto& tensors = header["tensors"] = nlohmann::json::array();
    for (const auto& e : entries_)
      tensors.push_back({{"name", e.name},
                         {"dtype", e.dtype},
                         {"shape", e.shape},
                         {"offset", e.offset},
                         {"bytes", e.bytes}});
    std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot write container: ", path.string());
    auto put_u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    uint64_t hlen = header_str.size();
    put_u32(kContainerMagic);
    put_u32(kContainerVersion);
    out.write(reinterpret_cast<const char*>(&hlen), 8);
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    out.write(payload_.data(), static_cast<std::streamsize>(payload_.size()));
    require(out.good(), "failed writing container: ", path.string());
  }

 private:
  std::string kind_;
  nlohmann::json meta_;
  std::vector<TensorEntry> entries_;
  std::vector<char> payload_;
};

class Container {
 public:
  static Container read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    require(in.good(), "cannot open container: ", path.string());
    uint64_t file_size = static_cast<uint64_t>(in.tellg());
    in.seekg(0);
    require(file_size >= 16, "container too small (", file_size, " bytes): ", path.string());

    uint32_t magic = 0, version = 0;
    uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&magic), 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&hlen), 8);
    require(magic == kContainerMagic, "not a container file (bad magic): ", path.string());
    require(version == kContainerVersion, "unsupported container version ", version,
            " (expected ", kContainerVersion, "): ", path.string());
    require(16 + hlen <= file_size, "truncated container header: ", path.string());

    std::string header_str(hlen, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(hlen));
    nlohmann::json header;
    try {
      header = nlohmann::json::parse(header_str);
    } catch (const std::exception& e) {
      fail("corrupt container header (", e.what(), "): ", path.string());
    }

    Container c;
    c.kind_ = header.at("kind").get<std::string>();
    c.meta_ = header.value("meta", nlohmann::json::object());
    uint64_t payload_size = file_size - 16 - hlen;
    for (const auto& t : header.at("tensors")) {
      TensorEntry e;
      e.name = t.at("name").get<std::string>();
      e.dtype = t.at("dtype").get<std::string>();
      e.shape = t.at("shape").get<std::vector<int>>();
      e.offset = t.at("offset").get<uint64_t>();
      e.bytes = t.at("bytes").get<uint64_t>();
      require(e.offset + e.bytes <= payload_size, "truncated container payload at tensor '",
              e.name, "': ", path.string());
      c.entries_.push_back(std::move(e));
    }
    c.payload_.resize(payload_size);
    in.read(c.payload_.data(), static_cast<std::streamsize>(payload_size));
    require(in.good() && static_cast<uint64_t>(in.gcount()) == payload_size,
            "truncated container payload: ", path.string());
    return c;
  }

  const std::string& kind() const { return kind_; }
  const nlohmann::json& meta() const { return meta_; }
  const std::vector<TensorEntry>& entries() const { return entries_; }

  const TensorEntry* find(const std::string& name) const {
    for (const auto& e : entries_)
      if (e.name == name) return &e;
    return nullptr;
  }

  template <typename T>
  void read_values(const TensorEntry& e, T* dst, size_t count) const {
    require(e.bytes == count * sizeof(T), "tensor '", e.name, "': size mismatch (",
            e.bytes, " bytes vs ", count * sizeof(T), " expected)");
    const char* expected_dtype = sizeof(T) == 4 ? "f32" : "f64";
    require(e.dtype == expected_dtype, "tensor '", e.name, "': dtype ", e.dtype,
            ", expected ", expected_dtype);
    std::memcpy(dst, payload_.data() + e.offset, e.bytes);
  }

 private:
  std::string kind_;
  nlohmann::json meta_;
  std::vector<TensorEntry> entries_;
  std::vector<char> payload_;
};

}  // namespace collasprite::nn
