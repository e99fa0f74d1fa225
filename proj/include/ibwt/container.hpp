#pragma once

// IBW1 container. All integers little-endian.
//
//   "IBW1" | version u8 = 1 | block_size u32
//   per block: original_len u32 | compressed_len u32 | crc32(compressed) u32 | compressed bytes

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "ibwt/codec.hpp"
#include "ibwt/error.hpp"

namespace ibwt::codec {

inline constexpr std::array<char, 4> kMagic{'I', 'B', 'W', '1'};
inline constexpr std::uint8_t kVersion = 0x01;

struct Container {
  std::uint32_t block_size = 0;
  std::vector<CompressedBlock> blocks;

  friend bool operator==(const Container&, const Container&) = default;
};

inline std::uint32_t crc32(std::span<const Byte> bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

inline void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(Errc::truncated_stream, std::string("stream ends inside ") + what);
  }
}

inline std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char*>(b), 4, what);
  return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
         std::uint32_t{b[3]} << 24;
}

}  // namespace detail

inline void write_container(const Container& c, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  out.put(static_cast<char>(kVersion));
  detail::put_u32(out, c.block_size);
  for (const auto& b : c.blocks) {
    detail::put_u32(out, b.original_len);
    detail::put_u32(out, static_cast<std::uint32_t>(b.bytes.size()));
    detail::put_u32(out, crc32(b.bytes));
    out.write(reinterpret_cast<const char*>(b.bytes.data()),
              static_cast<std::streamsize>(b.bytes.size()));
  }
  if (!out) throw Error(Errc::io_error, "failed writing container");
}

/// Reads blocks until end of stream. Blocks come back with `payload_bits`
/// set to their padded bitstream length.
inline Container read_container(std::istream& in) {
  std::array<char, 4> magic{};
  detail::read_exact(in, magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw Error(Errc::bad_magic, "not an IBW1 container");
  char version = 0;
  detail::read_exact(in, &version, 1, "version");
  if (static_cast<std::uint8_t>(version) != kVersion) {
    throw Error(Errc::unsupported_version,
                "version " + std::to_string(static_cast<std::uint8_t>(version)));
  }
  Container c;
  c.block_size = detail::get_u32(in, "block size");
  if (c.block_size == 0) throw Error(Errc::malformed_container, "block size 0");

  while (in.peek() != std::char_traits<char>::eof()) {
    CompressedBlock b;
    b.original_len = detail::get_u32(in, "block header");
    const std::uint32_t len = detail::get_u32(in, "block header");
    const std::uint32_t crc = detail::get_u32(in, "block header");
    if (b.original_len > c.block_size) {
      throw Error(Errc::malformed_container, "block longer than the container block size");
    }
    if (len < kTableBytes) throw Error(Errc::malformed_container, "block too short");
    // Grow in chunks so a corrupt length field cannot force a huge allocation.
    for (std::size_t have = 0; have < len;) {
      const std::size_t step = std::min<std::size_t>(len - have, std::size_t{1} << 16);
      b.bytes.resize(have + step);
      detail::read_exact(in, reinterpret_cast<char*>(b.bytes.data() + have), step, "block body");
      have += step;
    }
    if (crc32(b.bytes) != crc) throw Error(Errc::checksum_mismatch, "block CRC32 differs");
    b.payload_bits = (std::uint64_t{len} - kTableBytes) * 8;
    c.blocks.push_back(std::move(b));
  }
  return c;
}

}  // namespace ibwt::codec
