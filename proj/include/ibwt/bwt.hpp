#pragma once

// Burrows-Wheeler transform: brute-force reference, the constant-extra-memory
// in-place algorithm with a single-iteration stepper, and LF-mapping inversion.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibwt/error.hpp"

namespace ibwt {

using Byte = std::uint8_t;
using Bytes = std::vector<Byte>;

/// End-of-text marker. Payload bytes are 0x01..0xFF, so the marker sorts first.
inline constexpr Byte kSentinel = 0x00;

inline Bytes to_bytes(std::string_view text) { return Bytes(text.begin(), text.end()); }

inline std::string to_string(std::span<const Byte> bytes) {
  return std::string(bytes.begin(), bytes.end());
}

/// A payload with the sentinel appended: the string S of length n = N + 1.
class TextBlock {
 public:
  TextBlock() : symbols_{kSentinel} {}

  [[nodiscard]] std::span<const Byte> symbols() const noexcept { return symbols_; }
  [[nodiscard]] std::span<const Byte> payload() const noexcept {
    return std::span<const Byte>(symbols_).first(symbols_.size() - 1);
  }
  /// n, including the sentinel.
  [[nodiscard]] std::size_t size() const noexcept { return symbols_.size(); }

  friend TextBlock attach_sentinel(std::span<const Byte> payload);

 private:
  explicit TextBlock(Bytes symbols) : symbols_(std::move(symbols)) {}
  Bytes symbols_;
};

inline TextBlock attach_sentinel(std::span<const Byte> payload) {
  const auto hit = std::find(payload.begin(), payload.end(), kSentinel);
  if (hit != payload.end()) {
    throw Error(Errc::sentinel_in_payload,
                "byte 0x00 at offset " + std::to_string(hit - payload.begin()));
  }
  Bytes symbols;
  symbols.reserve(payload.size() + 1);
  symbols.assign(payload.begin(), payload.end());
  symbols.push_back(kSentinel);
  return TextBlock(std::move(symbols));
}

/// The last column L, with the sentinel kept in-band.
class TransformedBlock {
 public:
  TransformedBlock() : data_{kSentinel} {}

  /// Throws MalformedTransform unless `data` holds exactly one sentinel.
  static TransformedBlock from_bytes(Bytes data) {
    const auto markers = std::count(data.begin(), data.end(), kSentinel);
    if (markers != 1) {
      throw Error(Errc::malformed_transform,
                  "expected exactly one sentinel, found " + std::to_string(markers));
    }
    TransformedBlock t;
    t.data_ = std::move(data);
    return t;
  }

  [[nodiscard]] std::span<const Byte> data() const noexcept { return data_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  /// Row of the sorted rotation matrix that holds S itself.
  [[nodiscard]] std::size_t primary_index() const noexcept {
    return static_cast<std::size_t>(std::find(data_.begin(), data_.end(), kSentinel) -
                                    data_.begin());
  }

  friend bool operator==(const TransformedBlock&, const TransformedBlock&) = default;

 private:
  Bytes data_;
};

/// Sorts all n rotations of S and reads off the last column. O(n^2 log n)
/// worst case; this is the oracle the other routes are checked against.
inline TransformedBlock bwt_reference(const TextBlock& block) {
  const auto s = block.symbols();
  const std::size_t n = s.size();
  std::vector<std::size_t> rotations(n);
  std::iota(rotations.begin(), rotations.end(), std::size_t{0});
  std::sort(rotations.begin(), rotations.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < n; ++k) {
      const Byte x = s[(a + k) % n];
      const Byte y = s[(b + k) % n];
      if (x != y) return x < y;
    }
    return false;
  });
  Bytes out(n);
  for (std::size_t row = 0; row < n; ++row) out[row] = s[(rotations[row] + n - 1) % n];
  return TransformedBlock::from_bytes(std::move(out));
}

/// Steps 1 and 2 of one outer iteration: where the sentinel sits and how many
/// suffixes sort before the suffix that starts with the inserted character.
struct RankResult {
  std::size_t rank = 0;
  std::size_t marker = 0;
  std::size_t count_le = 0;
  std::size_t count_lt = 0;
};

/// `buffer[s+1..]` must already be transformed and contain the sentinel.
/// The sentinel slot takes part in the strict count and always counts,
/// so `count_lt >= 1` whenever `c` is a payload byte.
inline RankResult rank_insert(std::span<const Byte> buffer, std::size_t s, Byte c) {
  if (s + 1 >= buffer.size()) {
    throw Error(Errc::no_marker, "empty region after cursor " + std::to_string(s));
  }
  const auto first = buffer.begin() + static_cast<std::ptrdiff_t>(s + 1);
  const auto marker = std::find(first, buffer.end(), kSentinel);
  if (marker == buffer.end()) {
    throw Error(Errc::no_marker, "no sentinel after cursor " + std::to_string(s));
  }
  RankResult out;
  out.marker = static_cast<std::size_t>(marker - buffer.begin());
  out.count_le = static_cast<std::size_t>(
      std::count_if(first, marker, [c](Byte b) { return b <= c; }));
  out.count_lt = static_cast<std::size_t>(
      std::count_if(marker, buffer.end(), [c](Byte b) { return b < c; }));
  out.rank = s + out.count_le + out.count_lt;
  return out;
}

namespace detail {

// Steps 3 and 4: the marker slot takes c, [s, r) slides left by one, and
// the marker moves to r.
inline void place(std::span<Byte> buffer, std::size_t s, Byte c, const RankResult& rr) {
  buffer[rr.marker] = c;
  std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(s + 1),
            buffer.begin() + static_cast<std::ptrdiff_t>(rr.rank + 1),
            buffer.begin() + static_cast<std::ptrdiff_t>(s));
  buffer[rr.rank] = kSentinel;
}

}  // namespace detail

/// Transforms `buffer` (payload followed by one trailing sentinel) in place,
/// right to left, using only a handful of scalars besides the buffer.
inline void bwt_inplace(std::span<Byte> buffer) {
  const std::size_t n = buffer.size();
  if (n < 3) return;
  for (std::size_t s = n - 3;; --s) {
    const Byte c = buffer[s];
    detail::place(buffer, s, c, rank_insert(buffer, s, c));
    if (s == 0) break;
  }
}

inline TransformedBlock bwt_inplace(const TextBlock& block) {
  Bytes buffer(block.symbols().begin(), block.symbols().end());
  bwt_inplace(std::span<Byte>(buffer));
  return TransformedBlock::from_bytes(std::move(buffer));
}

/// Trace of one outer-loop iteration.
struct StepTrace {
  std::size_t cursor = 0;  // s before the step
  Byte c = 0;
  std::size_t marker = 0;  // p
  std::size_t rank = 0;    // r, the new marker position
  std::size_t count_le = 0;
  std::size_t count_lt = 0;
};

/// Working buffer of the in-place algorithm paused between outer iterations.
///
/// While not done, `buffer()[cursor()+1 ..]` is the transform of the original
/// suffix S[cursor()+1 .. n-2] plus sentinel and `buffer()[0 .. cursor()]` is
/// still the untouched input prefix.
class BwtState {
 public:
  explicit BwtState(const TextBlock& block)
      : buffer_(block.symbols().begin(), block.symbols().end()) {
    const std::size_t n = buffer_.size();
    done_ = n <= 2;
    cursor_ = done_ ? 0 : n - 3;
  }

  [[nodiscard]] std::span<const Byte> buffer() const noexcept { return buffer_; }
  [[nodiscard]] std::size_t cursor() const noexcept { return cursor_; }
  [[nodiscard]] bool done() const noexcept { return done_; }

  /// Runs the outer iteration at cursor() and moves the cursor one left.
  StepTrace extend() {
    if (done_) throw Error(Errc::already_done, "stepper has consumed the whole block");
    const std::size_t s = cursor_;
    const Byte c = buffer_[s];
    const RankResult rr = rank_insert(buffer_, s, c);
    detail::place(buffer_, s, c, rr);
    if (s == 0) {
      done_ = true;
    } else {
      --cursor_;
    }
    return StepTrace{s, c, rr.marker, rr.rank, rr.count_le, rr.count_lt};
  }

  /// Only meaningful once done().
  [[nodiscard]] TransformedBlock result() const { return TransformedBlock::from_bytes(buffer_); }

 private:
  Bytes buffer_;
  std::size_t cursor_ = 0;
  bool done_ = true;
};

inline BwtState init_state(const TextBlock& block) { return BwtState(block); }

inline StepTrace extend_step(BwtState& state) { return state.extend(); }

/// Inverts via LF-mapping: a counting sort of L gives, for every row, the
/// position of its successor rotation; walking it from the row holding S
/// yields the payload in order.
inline Bytes bwt_inverse(std::span<const Byte> transformed) {
  const auto markers = std::count(transformed.begin(), transformed.end(), kSentinel);
  if (markers != 1) {
    throw Error(Errc::malformed_transform,
                "expected exactly one sentinel, found " + std::to_string(markers));
  }
  const std::size_t n = transformed.size();
  std::array<std::size_t, 257> start{};
  for (Byte b : transformed) ++start[std::size_t{b} + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());

  std::vector<std::size_t> next(n);
  std::size_t primary = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (transformed[i] == kSentinel) primary = i;
    next[start[transformed[i]]++] = i;
  }

  Bytes payload(n - 1);
  std::size_t row = next[primary];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    payload[k] = transformed[row];
    row = next[row];
  }
  return payload;
}

inline Bytes bwt_inverse(const TransformedBlock& t) { return bwt_inverse(t.data()); }

}  // namespace ibwt
