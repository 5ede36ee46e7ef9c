#pragma once

// EmbeddingStore: an immutable id-addressed matrix of float32 embeddings,
// plus its binary file format.
//
// File layout (all integers little-endian):
//   magic   "UVRE"                      4 bytes
//   version u32                         currently 1
//   dim     u32
//   count   u64
//   ids     count x (u16 length + raw UTF-8 bytes)
//   matrix  count x dim float32, row-major
//
// read_store(write_store(s)) is the identity on (ids, dimension, matrix)
// bit-exactly; nothing is renormalized on the way in or out.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "uvre/embedding.hpp"
#include "uvre/errors.hpp"

namespace uvre {

constexpr char kStoreMagic[4] = {'U', 'V', 'R', 'E'};
constexpr uint32_t kStoreVersion = 1;

class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Builds a store from raw rows, normalizing each at ingestion.
  static EmbeddingStore from_rows(std::vector<std::string> ids,
                                  const std::vector<EmbeddingVector>& rows) {
    if (ids.size() != rows.size()) {
      throw DimensionMismatchError("from_rows: " + std::to_string(ids.size()) + " ids vs " +
                                   std::to_string(rows.size()) + " rows");
    }
    std::vector<EmbeddingVector> unit;
    unit.reserve(rows.size());
    for (const auto& r : rows) unit.push_back(l2_normalize(r));
    const uint32_t dim = rows.empty() ? 0 : static_cast<uint32_t>(rows[0].size());
    return EmbeddingStore(std::move(ids), unit, dim);
  }

  // Builds a store from rows already in final form (checkpoints, file loads).
  static EmbeddingStore from_raw_rows(std::vector<std::string> ids,
                                      const std::vector<EmbeddingVector>& rows, uint32_t dim) {
    return EmbeddingStore(std::move(ids), rows, dim);
  }

  uint32_t dimension() const { return dim_; }
  size_t count() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(size_t row) const { return ids_[row]; }

  std::span<const float> row(size_t i) const {
    return std::span<const float>(data_.data() + i * dim_, dim_);
  }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  size_t row_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw FormatError("store: unknown id '" + id + "'");
    return it->second;
  }

  std::span<const float> vector_of(const std::string& id) const { return row(row_of(id)); }

  std::span<const float> flat() const { return data_; }

 private:
  EmbeddingStore(std::vector<std::string> ids, const std::vector<EmbeddingVector>& rows, uint32_t dim)
      : ids_(std::move(ids)), dim_(dim) {
    data_.resize(ids_.size() * static_cast<size_t>(dim_));
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != dim_) {
        throw DimensionMismatchError("store row " + std::to_string(i) + ": dimension " +
                                     std::to_string(rows[i].size()) + " vs declared " +
                                     std::to_string(dim_));
      }
      std::memcpy(data_.data() + i * dim_, rows[i].data(), dim_ * sizeof(float));
    }
    index_.reserve(ids_.size());
    for (size_t i = 0; i < ids_.size(); ++i) {
      if (!index_.emplace(ids_[i], i).second) {
        throw FormatError("store: duplicate id '" + ids_[i] + "'");
      }
    }
  }

  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, size_t> index_;
  uint32_t dim_ = 0;
};

namespace detail {

inline void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class ByteReader {
 public:
  ByteReader(const uint8_t* p, size_t n) : p_(p), n_(n) {}

  uint16_t u16() {
    const uint8_t* b = take(2);
    return static_cast<uint16_t>(static_cast<uint16_t>(b[0]) | static_cast<uint16_t>(b[1]) << 8);
  }

  uint32_t u32() {
    uint32_t v = 0;
    const uint8_t* b = take(4);
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
  }

  uint64_t u64() {
    uint64_t v = 0;
    const uint8_t* b = take(8);
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  }

  const uint8_t* take(size_t k) {
    if (pos_ + k > n_) throw FormatError("store file: truncated payload");
    const uint8_t* r = p_ + pos_;
    pos_ += k;
    return r;
  }

  bool exhausted() const { return pos_ == n_; }

 private:
  const uint8_t* p_;
  size_t n_;
  size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_store(const EmbeddingStore& store) {
  std::string out;
  out.append(kStoreMagic, 4);
  detail::put_u32(out, kStoreVersion);
  detail::put_u32(out, store.dimension());
  detail::put_u64(out, static_cast<uint64_t>(store.count()));
  for (const auto& id : store.ids()) {
    if (id.size() > 0xffff) throw FormatError("store: id longer than 65535 bytes: '" + id + "'");
    detail::put_u16(out, static_cast<uint16_t>(id.size()));
    out.append(id);
  }
  for (size_t i = 0; i < store.count(); ++i) {
    for (float x : store.row(i)) {
      detail::put_u32(out, std::bit_cast<uint32_t>(x));
    }
  }
  return out;
}

inline EmbeddingStore parse_store(std::span<const uint8_t> bytes) {
  detail::ByteReader r(bytes.data(), bytes.size());
  const uint8_t* magic = r.take(4);
  if (std::memcmp(magic, kStoreMagic, 4) != 0) throw FormatError("store file: bad magic");
  const uint32_t version = r.u32();
  if (version != kStoreVersion) {
    throw FormatError("store file: unsupported version " + std::to_string(version));
  }
  const uint32_t dim = r.u32();
  const uint64_t count = r.u64();
  std::vector<std::string> ids;
  ids.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    const uint16_t len = r.u16();
    const uint8_t* s = r.take(len);
    ids.emplace_back(reinterpret_cast<const char*>(s), len);
  }
  std::vector<EmbeddingVector> rows(count, EmbeddingVector(dim));
  for (uint64_t i = 0; i < count; ++i) {
    for (uint32_t j = 0; j < dim; ++j) {
      rows[i][j] = std::bit_cast<float>(r.u32());
    }
  }
  if (!r.exhausted()) throw FormatError("store file: trailing bytes");
  return EmbeddingStore::from_raw_rows(std::move(ids), rows, dim);
}

inline void write_store(const EmbeddingStore& store, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for write: " + path);
  const std::string bytes = serialize_store(store);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path);
}

inline EmbeddingStore read_store(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for read: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_store(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size()));
}

}  // namespace uvre
