#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ibwt/error.hpp"

namespace ibwt {

/// Appends bits most-significant-first within each byte.
class BitWriter {
 public:
  void put(std::uint32_t value, unsigned width) {
    for (unsigned k = width; k-- > 0;) put_bit((value >> k) & 1u);
  }

  void put_bit(unsigned bit) {
    if (used_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (used_ % 8));
    ++used_;
  }

  [[nodiscard]] std::size_t bit_count() const noexcept { return used_; }
  [[nodiscard]] const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  std::vector<std::uint8_t> take() && { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t used_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  unsigned get_bit() {
    if (pos_ >= bytes_.size() * 8) throw Error(Errc::corrupt_bitstream, "bitstream exhausted");
    const unsigned bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
    ++pos_;
    return bit;
  }

  std::uint32_t get(unsigned width) {
    std::uint32_t v = 0;
    for (unsigned k = 0; k < width; ++k) v = (v << 1) | get_bit();
    return v;
  }

  void align() { pos_ = (pos_ + 7) / 8 * 8; }

  [[nodiscard]] std::size_t position() const noexcept { return pos_; }
  [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() * 8 - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace ibwt
