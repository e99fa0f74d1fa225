#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "ibwt/container.hpp"

using namespace ibwt;
using namespace ibwt::codec;

namespace {

Bytes sym(const std::string& s) { return Bytes(s.begin(), s.end()); }

std::string serialize(const Container& c) {
  std::ostringstream out;
  write_container(c, out);
  return out.str();
}

Container parse(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_container(in);
}

Errc parse_error(const std::string& bytes) {
  try {
    parse(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "container parsed without error";
  return Errc::io_error;
}

Container banana_container() {
  Container c;
  c.block_size = 1024;
  c.blocks.push_back(compress_block(sym("banana")));
  return c;
}

}  // namespace

TEST(Crc32, StandardCheckValue) {
  EXPECT_EQ(crc32(sym("123456789")), 0xCBF43926u);
  EXPECT_EQ(crc32({}), 0u);
}

TEST(Container, EmptyIsHeaderOnly) {
  Container c;
  c.block_size = 4096;
  const auto bytes = serialize(c);
  ASSERT_EQ(bytes.size(), 9u);
  EXPECT_EQ(bytes.substr(0, 4), "IBW1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);
  EXPECT_EQ(bytes.substr(5), std::string("\x00\x10\x00\x00", 4));
  EXPECT_EQ(parse(bytes), c);
}

TEST(Container, BananaRoundTrip) {
  const auto c = banana_container();
  const auto bytes = serialize(c);
  EXPECT_EQ(bytes.size(), 9 + 12 + c.blocks[0].bytes.size());
  const auto back = parse(bytes);
  EXPECT_EQ(back, c);
  EXPECT_EQ(to_string(decompress_block(back.blocks[0])), "banana");
}

TEST(Container, MultiBlockRoundTrip) {
  Container c;
  c.block_size = 8;
  const std::string text = "abracadabra, said the magician twice";
  for (std::size_t at = 0; at < text.size(); at += 8) {
    c.blocks.push_back(compress_block(sym(text.substr(at, 8))));
  }
  const auto back = parse(serialize(c));
  ASSERT_EQ(back, c);
  std::string joined;
  for (const auto& b : back.blocks) joined += to_string(decompress_block(b));
  EXPECT_EQ(joined, text);
}

TEST(Container, BadMagic) {
  auto bytes = serialize(banana_container());
  bytes[0] = 'X';
  EXPECT_EQ(parse_error(bytes), Errc::bad_magic);
}

TEST(Container, UnsupportedVersion) {
  auto bytes = serialize(banana_container());
  bytes[4] = 2;
  EXPECT_EQ(parse_error(bytes), Errc::unsupported_version);
}

TEST(Container, Truncated) {
  const auto bytes = serialize(banana_container());
  EXPECT_EQ(parse_error(bytes.substr(0, 3)), Errc::truncated_stream);
  EXPECT_EQ(parse_error(bytes.substr(0, 7)), Errc::truncated_stream);
  EXPECT_EQ(parse_error(bytes.substr(0, 15)), Errc::truncated_stream);
  EXPECT_EQ(parse_error(bytes.substr(0, bytes.size() - 1)), Errc::truncated_stream);
}

TEST(Container, ChecksumMismatch) {
  auto bytes = serialize(banana_container());
  bytes.back() ^= 0x01;
  EXPECT_EQ(parse_error(bytes), Errc::checksum_mismatch);
}

TEST(Container, HugeLengthFieldFailsCleanly) {
  auto bytes = serialize(banana_container());
  bytes[13] = bytes[14] = bytes[15] = bytes[16] = '\xff';
  EXPECT_EQ(parse_error(bytes), Errc::truncated_stream);
}

TEST(Container, Malformed) {
  auto zero_size = serialize(Container{});
  EXPECT_EQ(parse_error(zero_size), Errc::malformed_container);

  Container c = banana_container();
  c.block_size = 3;
  EXPECT_EQ(parse_error(serialize(c)), Errc::malformed_container);
}
