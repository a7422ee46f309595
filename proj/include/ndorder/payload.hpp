#ifndef NDORDER_PAYLOAD_HPP_
#define NDORDER_PAYLOAD_HPP_

#include <cstddef>
#include <cstring>
#include <span>
#include <type_traits>
#include <vector>

#include "ndorder/common.hpp"

namespace ndorder {

using Bytes = std::vector<std::byte>;

/// Appends trivially copyable values to a byte buffer.
class Packer {
 public:
  template <typename T>
  requires std::is_trivially_copyable_v<T>
  Packer& put(const T& value) {
    const auto offset = bytes_.size();
    bytes_.resize(offset + sizeof(T));
    std::memcpy(bytes_.data() + offset, &value, sizeof(T));
    return *this;
  }

  // Length-prefixed.
  template <typename T>
  requires std::is_trivially_copyable_v<T>
  Packer& put_span(std::span<const T> values) {
    put<Gnum>(static_cast<Gnum>(values.size()));
    const auto offset = bytes_.size();
    bytes_.resize(offset + values.size_bytes());
    if (!values.empty()) {
      std::memcpy(bytes_.data() + offset, values.data(), values.size_bytes());
    }
    return *this;
  }

  template <typename T>
  Packer& put_vector(const std::vector<T>& values) {
    return put_span(std::span<const T>(values));
  }

  Bytes take() { return std::move(bytes_); }

 private:
  Bytes bytes_;
};

/// Reads back what a Packer wrote, in the same order.
class Unpacker {
 public:
  explicit Unpacker(const Bytes& bytes) : bytes_(bytes) {}

  template <typename T>
  requires std::is_trivially_copyable_v<T>
  T get() {
    check_invariant(offset_ + sizeof(T) <= bytes_.size(), "payload underflow");
    T value;
    std::memcpy(&value, bytes_.data() + offset_, sizeof(T));
    offset_ += sizeof(T);
    return value;
  }

  template <typename T>
  requires std::is_trivially_copyable_v<T>
  std::vector<T> get_vector() {
    const auto count = static_cast<std::size_t>(get<Gnum>());
    check_invariant(offset_ + count * sizeof(T) <= bytes_.size(), "payload underflow");
    std::vector<T> values(count);
    if (count != 0) {
      std::memcpy(values.data(), bytes_.data() + offset_, count * sizeof(T));
    }
    offset_ += count * sizeof(T);
    return values;
  }

  bool done() const { return offset_ == bytes_.size(); }

 private:
  const Bytes& bytes_;
  std::size_t offset_ = 0;
};

}  // namespace ndorder

#endif  // NDORDER_PAYLOAD_HPP_
