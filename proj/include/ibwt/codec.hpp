#pragma once

// Block compressor: BWT -> move-to-front -> zero-run coding -> canonical Huffman.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "ibwt/bitio.hpp"
#include "ibwt/bwt.hpp"
#include "ibwt/error.hpp"

namespace ibwt::codec {

using Symbol = std::uint16_t;
using SymbolSeq = std::vector<Symbol>;

// ---------------------------------------------------------------------------
// Move-to-front

/// Recency list starts in ascending byte order, so the sentinel (0x00) is at
/// the front. Indices are in [0, 255].
inline SymbolSeq mtf_encode(std::span<const Byte> data) {
  std::array<Byte, 256> list{};
  std::iota(list.begin(), list.end(), Byte{0});
  SymbolSeq out;
  out.reserve(data.size());
  for (Byte b : data) {
    std::size_t i = 0;
    while (list[i] != b) ++i;
    std::copy_backward(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(i),
                       list.begin() + static_cast<std::ptrdiff_t>(i + 1));
    list[0] = b;
    out.push_back(static_cast<Symbol>(i));
  }
  return out;
}

inline Bytes mtf_decode(std::span<const Symbol> indices) {
  std::array<Byte, 256> list{};
  std::iota(list.begin(), list.end(), Byte{0});
  Bytes out;
  out.reserve(indices.size());
  for (Symbol i : indices) {
    if (i >= list.size()) {
      throw Error(Errc::index_out_of_range, "move-to-front index " + std::to_string(i));
    }
    const Byte b = list[i];
    std::copy_backward(list.begin(), list.begin() + i, list.begin() + i + 1);
    list[0] = b;
    out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zero-run coding
//
// A run of L zeros is written as L in bijective base 2, least significant
// digit first, with RUNA worth 1 and RUNB worth 2 at each position. Nonzero
// MTF index k becomes symbol k + 1.

inline constexpr Symbol kRunA = 0;
inline constexpr Symbol kRunB = 1;
inline constexpr std::size_t kAlphabetSize = 257;  // RUNA, RUNB, indices 1..255

inline SymbolSeq zrle_encode(std::span<const Symbol> mtf) {
  SymbolSeq out;
  out.reserve(mtf.size());
  std::uint64_t run = 0;
  auto flush = [&] {
    while (run > 0) {
      if (run & 1u) {
        out.push_back(kRunA);
        run = (run - 1) / 2;
      } else {
        out.push_back(kRunB);
        run = (run - 2) / 2;
      }
    }
  };
  for (Symbol s : mtf) {
    if (s == 0) {
      ++run;
      continue;
    }
    if (s > 255) throw Error(Errc::index_out_of_range, "move-to-front index " + std::to_string(s));
    flush();
    out.push_back(static_cast<Symbol>(s + 1));
  }
  flush();
  return out;
}

/// Incremental decoder; lets the Huffman stage stop exactly at the
/// block's symbol count.
class ZrleDecoder {
 public:
  explicit ZrleDecoder(SymbolSeq& out) : out_(out) {}

  void push(Symbol s) {
    if (s == kRunA || s == kRunB) {
      if (weight_ > (std::uint64_t{1} << 40)) throw Error(Errc::malformed_run, "run too long");
      run_ += weight_ * (s == kRunA ? 1u : 2u);
      weight_ <<= 1;
      return;
    }
    if (s >= kAlphabetSize) throw Error(Errc::malformed_run, "symbol " + std::to_string(s));
    finish();
    out_.push_back(static_cast<Symbol>(s - 1));
  }

  void finish() {
    out_.insert(out_.end(), run_, Symbol{0});
    run_ = 0;
    weight_ = 1;
  }

  /// Indices emitted so far plus the run still being read.
  [[nodiscard]] std::uint64_t produced() const noexcept { return out_.size() + run_; }

 private:
  SymbolSeq& out_;
  std::uint64_t run_ = 0;
  std::uint64_t weight_ = 1;
};

inline SymbolSeq zrle_decode(std::span<const Symbol> symbols) {
  SymbolSeq out;
  ZrleDecoder dec(out);
  for (Symbol s : symbols) dec.push(s);
  dec.finish();
  return out;
}

// ---------------------------------------------------------------------------
// Canonical Huffman

inline constexpr unsigned kMaxCodeLength = 31;  // lengths are stored in 5 bits

inline double kraft_sum(std::span<const std::uint8_t> lengths) {
  double sum = 0.0;
  for (auto len : lengths) {
    if (len) sum += 1.0 / static_cast<double>(std::uint64_t{1} << len);
  }
  return sum;
}

class HuffmanTable {
 public:
  /// Rejects over-subscribed length sets and empty alphabets.
  static HuffmanTable from_lengths(std::vector<std::uint8_t> lengths) {
    HuffmanTable t;
    t.lengths_ = std::move(lengths);
    t.codes_.assign(t.lengths_.size(), 0);
    std::uint64_t kraft = 0;  // scaled by 2^kMaxCodeLength
    for (auto len : t.lengths_) {
      if (len > kMaxCodeLength) {
        throw Error(Errc::corrupt_bitstream, "code length " + std::to_string(len));
      }
      if (len) kraft += std::uint64_t{1} << (kMaxCodeLength - len);
    }
    if (kraft == 0) throw Error(Errc::empty_input, "no symbol has a code");
    if (kraft > (std::uint64_t{1} << kMaxCodeLength)) {
      throw Error(Errc::corrupt_bitstream, "code lengths are over-subscribed");
    }

    for (std::size_t s = 0; s < t.lengths_.size(); ++s) {
      if (t.lengths_[s]) t.sorted_.push_back(static_cast<Symbol>(s));
    }
    std::stable_sort(t.sorted_.begin(), t.sorted_.end(),
                     [&](Symbol a, Symbol b) { return t.lengths_[a] < t.lengths_[b]; });

    std::uint32_t code = 0;
    unsigned len = t.lengths_[t.sorted_.front()];
    for (std::size_t k = 0; k < t.sorted_.size(); ++k) {
      const Symbol s = t.sorted_[k];
      code <<= (t.lengths_[s] - len);
      len = t.lengths_[s];
      if (t.count_[len]++ == 0) {
        t.first_code_[len] = code;
        t.first_index_[len] = static_cast<std::uint32_t>(k);
      }
      t.codes_[s] = code++;
    }
    return t;
  }

  [[nodiscard]] const std::vector<std::uint8_t>& lengths() const noexcept { return lengths_; }
  [[nodiscard]] const std::vector<std::uint32_t>& codes() const noexcept { return codes_; }

  void encode(Symbol s, BitWriter& out) const {
    if (s >= lengths_.size() || lengths_[s] == 0) {
      throw Error(Errc::index_out_of_range, "symbol " + std::to_string(s) + " has no code");
    }
    out.put(codes_[s], lengths_[s]);
  }

  Symbol decode(BitReader& in) const {
    std::uint32_t code = 0;
    for (unsigned len = 1; len <= kMaxCodeLength; ++len) {
      code = (code << 1) | in.get_bit();
      if (count_[len] && code >= first_code_[len] && code - first_code_[len] < count_[len]) {
        return sorted_[first_index_[len] + (code - first_code_[len])];
      }
    }
    throw Error(Errc::corrupt_bitstream, "no code matches the input bits");
  }

 private:
  std::vector<std::uint8_t> lengths_;
  std::vector<std::uint32_t> codes_;
  std::vector<Symbol> sorted_;
  std::array<std::uint32_t, kMaxCodeLength + 1> count_{};
  std::array<std::uint32_t, kMaxCodeLength + 1> first_code_{};
  std::array<std::uint32_t, kMaxCodeLength + 1> first_index_{};
};

namespace detail {

inline std::vector<std::uint8_t> huffman_lengths(std::span<const std::uint64_t> freqs) {
  // (weight, creation order, node); ties resolve by creation order so the
  // result is deterministic.
  using Item = std::tuple<std::uint64_t, std::size_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<std::size_t> parent;
  std::vector<std::size_t> leaf_node(freqs.size(), SIZE_MAX);
  for (std::size_t s = 0; s < freqs.size(); ++s) {
    if (!freqs[s]) continue;
    leaf_node[s] = parent.size();
    heap.emplace(freqs[s], parent.size(), parent.size());
    parent.push_back(SIZE_MAX);
  }
  std::vector<std::uint8_t> lengths(freqs.size(), 0);
  if (parent.size() == 1) {
    for (std::size_t s = 0; s < freqs.size(); ++s) {
      if (freqs[s]) lengths[s] = 1;
    }
    return lengths;
  }
  while (heap.size() > 1) {
    const auto [wa, oa, a] = heap.top();
    heap.pop();
    const auto [wb, ob, b] = heap.top();
    heap.pop();
    const std::size_t node = parent.size();
    parent.push_back(SIZE_MAX);
    parent[a] = node;
    parent[b] = node;
    heap.emplace(wa + wb, node, node);
  }
  for (std::size_t s = 0; s < freqs.size(); ++s) {
    if (leaf_node[s] == SIZE_MAX) continue;
    unsigned depth = 0;
    for (std::size_t v = leaf_node[s]; parent[v] != SIZE_MAX; v = parent[v]) ++depth;
    lengths[s] = static_cast<std::uint8_t>(std::min(depth, 255u));
  }
  return lengths;
}

}  // namespace detail

/// Optimal prefix code for `freqs`, limited to `max_length` bits by
/// flattening the frequencies and rebuilding when the tree is too deep.
/// A lone symbol gets a 1-bit code.
inline HuffmanTable huffman_build(std::span<const std::uint64_t> freqs,
                                  unsigned max_length = kMaxCodeLength) {
  if (std::none_of(freqs.begin(), freqs.end(), [](auto f) { return f != 0; })) {
    throw Error(Errc::empty_input, "all symbol frequencies are zero");
  }
  std::vector<std::uint64_t> work(freqs.begin(), freqs.end());
  for (;;) {
    auto lengths = detail::huffman_lengths(work);
    if (*std::max_element(lengths.begin(), lengths.end()) <= max_length) {
      return HuffmanTable::from_lengths(std::move(lengths));
    }
    for (auto& f : work) {
      if (f) f = 1 + f / 2;
    }
  }
}

inline BitWriter huffman_encode(const HuffmanTable& table, std::span<const Symbol> seq) {
  BitWriter out;
  for (Symbol s : seq) table.encode(s, out);
  return out;
}

inline SymbolSeq huffman_decode(const HuffmanTable& table, BitReader& in, std::size_t count) {
  SymbolSeq out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(table.decode(in));
  return out;
}

// ---------------------------------------------------------------------------
// Block pipeline

inline constexpr unsigned kLengthFieldBits = 5;
inline constexpr std::size_t kTableBits = kAlphabetSize * kLengthFieldBits;
inline constexpr std::size_t kTableBytes = (kTableBits + 7) / 8;

/// Compressed bytes are the code-length table (257 x 5 bits, zero padded to a
/// byte) followed by the Huffman bitstream (zero padded to a byte).
struct CompressedBlock {
  std::uint32_t original_len = 0;
  Bytes bytes;
  /// Exact Huffman bitstream length; after a container read this is the
  /// padded length, since the container does not record it.
  std::uint64_t payload_bits = 0;

  friend bool operator==(const CompressedBlock& a, const CompressedBlock& b) {
    return a.original_len == b.original_len && a.bytes == b.bytes;
  }
};

inline CompressedBlock compress_block(std::span<const Byte> payload) {
  const TextBlock block = attach_sentinel(payload);
  Bytes buffer(block.symbols().begin(), block.symbols().end());
  bwt_inplace(std::span<Byte>(buffer));
  const SymbolSeq symbols = zrle_encode(mtf_encode(buffer));

  std::vector<std::uint64_t> freqs(kAlphabetSize, 0);
  for (Symbol s : symbols) ++freqs[s];
  const HuffmanTable table = huffman_build(freqs);

  BitWriter out;
  for (auto len : table.lengths()) out.put(len, kLengthFieldBits);
  while (out.bit_count() % 8) out.put_bit(0);
  const std::size_t header = out.bit_count();
  for (Symbol s : symbols) table.encode(s, out);

  CompressedBlock cb;
  cb.original_len = static_cast<std::uint32_t>(payload.size());
  cb.payload_bits = out.bit_count() - header;
  cb.bytes = std::move(out).take();
  return cb;
}

inline Bytes decompress_block(const CompressedBlock& cb) {
  if (cb.bytes.size() < kTableBytes) {
    throw Error(Errc::malformed_container, "block shorter than its code-length table");
  }
  BitReader in(cb.bytes);
  std::vector<std::uint8_t> lengths(kAlphabetSize);
  for (auto& len : lengths) len = static_cast<std::uint8_t>(in.get(kLengthFieldBits));
  in.align();
  const HuffmanTable table = HuffmanTable::from_lengths(std::move(lengths));

  const std::uint64_t n = std::uint64_t{cb.original_len} + 1;
  SymbolSeq mtf;
  mtf.reserve(n);
  ZrleDecoder runs(mtf);
  while (runs.produced() < n) runs.push(table.decode(in));
  if (runs.produced() != n) {
    throw Error(Errc::corrupt_bitstream, "decoded run overshoots the block length");
  }
  runs.finish();

  Bytes payload = bwt_inverse(mtf_decode(mtf));
  if (std::find(payload.begin(), payload.end(), kSentinel) != payload.end()) {
    throw Error(Errc::corrupt_bitstream, "sentinel inside decoded payload");
  }
  return payload;
}

/// Compresses consecutive `block_size` slices of `data` on up to `jobs`
/// threads (0 picks the hardware concurrency). Output order is input order.
inline std::vector<CompressedBlock> compress_blocks(std::span<const Byte> data,
                                                    std::size_t block_size,
                                                    unsigned jobs = 1) {
  if (block_size == 0) throw Error(Errc::invalid_config, "block size must be >= 1");
  const std::size_t count = (data.size() + block_size - 1) / block_size;
  std::vector<CompressedBlock> out(count);
  auto work = [&](std::size_t k) {
    const std::size_t at = k * block_size;
    out[k] = compress_block(data.subspan(at, std::min(block_size, data.size() - at)));
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  if (jobs == 1 || count < 2) {
    for (std::size_t k = 0; k < count; ++k) work(k);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t k; (k = next++) < count && !failed;) {
        try {
          work(k);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct BpcReport {
  std::size_t block_size = 0;
  std::uint64_t total_input_bytes = 0;
  std::uint64_t total_output_bits = 0;  // Huffman bitstreams only
  std::uint64_t header_bits = 0;        // code-length tables, padding, container framing
  std::size_t blocks = 0;

  [[nodiscard]] double bits_per_char() const noexcept {
    return total_input_bytes ? static_cast<double>(total_output_bits) /
                                   static_cast<double>(total_input_bytes)
                             : 0.0;
  }
};

inline constexpr std::size_t kContainerHeaderBytes = 9;
inline constexpr std::size_t kBlockHeaderBytes = 12;

inline BpcReport measure_bpc(std::span<const Byte> corpus, std::size_t block_size,
                             unsigned jobs = 1) {
  if (block_size == 0) throw Error(Errc::invalid_config, "block size must be >= 1");
  BpcReport r;
  r.block_size = block_size;
  r.total_input_bytes = corpus.size();
  r.header_bits = kContainerHeaderBytes * 8;
  for (const auto& cb : compress_blocks(corpus, block_size, jobs)) {
    r.total_output_bits += cb.payload_bits;
    r.header_bits += (kBlockHeaderBytes + cb.bytes.size()) * 8 - cb.payload_bits;
    ++r.blocks;
  }
  return r;
}

}  // namespace ibwt::codec
