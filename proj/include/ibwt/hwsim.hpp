#pragma once

// Cycle-accurate model of the scanchain BWT datapath.
//
// The character buffer is a chain of N+1 symbol registers. Register 0 is the
// entry end, register N the exit end. Every six cycles one payload byte is
// shifted in (payload consumed last byte first, so the transform grows right
// to left) and one byte of the previous block's transform is shifted out.
//
// Physical layout of the chain at any slot boundary:
//
//   [ active region | free registers | drain tail ]
//
// The active region is the growing transform of the current block; logical
// index j of the software buffer lives in register j - s, so the cursor s
// always sits in register 0. The drain tail holds the rest of the previous
// block's transform, minus its sentinel, which is dropped on the first shift
// after the block completes. The sentinel position of each finished block is
// reported as its primary index instead, so each block drains exactly N bytes
// while loading N bytes and the shift rate stays one byte per six cycles.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibwt/bwt.hpp"
#include "ibwt/error.hpp"

namespace ibwt::hw {

enum class Phase : std::uint8_t {
  load_shift,
  find_marker,
  count_le,
  count_lt,
  place_char,
  place_marker,
};

inline constexpr std::size_t kCyclesPerSymbol = 6;

constexpr std::string_view phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::load_shift: return "LOAD_SHIFT";
    case Phase::find_marker: return "FIND_MARKER";
    case Phase::count_le: return "COUNT_LE";
    case Phase::count_lt: return "COUNT_LT";
    case Phase::place_char: return "PLACE_CHAR";
    case Phase::place_marker: return "PLACE_MARKER";
  }
  return "?";
}

constexpr Phase next_phase(Phase p) noexcept {
  return p == Phase::place_marker ? Phase::load_shift
                                  : static_cast<Phase>(static_cast<std::uint8_t>(p) + 1);
}

struct BlockConfig {
  std::size_t block_size = 1024;  // N
  bool two_stage_popcount = true;
};

/// One lane per register; 0 or 1.
using BitVector = std::vector<std::uint8_t>;

struct CompareVectors {
  BitVector eq;  // register holds the sentinel
  BitVector le;  // register <= c
  BitVector lt;  // register < c
};

/// All three comparator outputs for every register at once. `c` is a payload
/// byte (never the sentinel).
inline CompareVectors comparator_bank(std::span<const Byte> chain, Byte c) {
  CompareVectors v{BitVector(chain.size()), BitVector(chain.size()), BitVector(chain.size())};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    v.eq[i] = chain[i] == kSentinel;
    v.le[i] = chain[i] <= c;
    v.lt[i] = chain[i] < c;
  }
  return v;
}

/// Priority encoder over [first, last). Exactly one bit must be set there.
inline std::size_t encode_marker_position(std::span<const std::uint8_t> eq, std::size_t first,
                                          std::size_t last) {
  last = std::min(last, eq.size());
  std::optional<std::size_t> found;
  for (std::size_t i = first; i < last; ++i) {
    if (!eq[i]) continue;
    if (found) {
      throw Error(Errc::multiple_markers, "markers at " + std::to_string(*found) + " and " +
                                              std::to_string(i));
    }
    found = i;
  }
  if (!found) {
    throw Error(Errc::no_marker,
                "no marker in [" + std::to_string(first) + ", " + std::to_string(last) + ")");
  }
  return *found;
}

struct PartialSums {
  std::size_t a = 0;
  std::size_t b = 0;
  [[nodiscard]] std::size_t total() const noexcept { return a + b; }
  friend bool operator==(const PartialSums&, const PartialSums&) = default;
};

/// Population count of [first, last) split at the midpoint into two partial
/// sums: the lower half is [first, mid], the upper half the rest, with mid the
/// floor of the midpoint of the inclusive range.
inline PartialSums popcount_two_stage(std::span<const std::uint8_t> bits, std::size_t first,
                                      std::size_t last) {
  if (last <= first) return {};
  const std::size_t split = first + (last - 1 - first) / 2 + 1;
  const auto at = [&](std::size_t i) { return bits.begin() + static_cast<std::ptrdiff_t>(i); };
  PartialSums out;
  out.a = static_cast<std::size_t>(std::count_if(at(first), at(split), [](auto b) { return b != 0; }));
  out.b = static_cast<std::size_t>(std::count_if(at(split), at(last), [](auto b) { return b != 0; }));
  return out;
}

/// Bytes per second at a given clock: one byte enters every six cycles.
inline double throughput_model(double freq_hz) {
  if (!(freq_hz > 0.0)) throw Error(Errc::invalid_config, "frequency must be positive");
  return freq_hz / static_cast<double>(kCyclesPerSymbol);
}

/// What happened on one clock edge. Index-valued signals are in the
/// software buffer's coordinates (logical), not register numbers.
struct CycleEvents {
  std::uint64_t cycle = 0;
  Phase phase = Phase::load_shift;
  std::optional<std::size_t> cursor;
  std::optional<Byte> consumed_input;
  std::optional<Byte> emitted_output;
  std::optional<std::size_t> marker;
  std::optional<PartialSums> partial_le;
  std::optional<PartialSums> partial_lt;
  std::optional<std::size_t> count_le;
  std::optional<std::size_t> count_lt;
  std::optional<std::size_t> rank;
  // Set on the PLACE_MARKER edge that finishes a block.
  std::optional<std::size_t> completed_primary;
  std::optional<std::uint64_t> completed_block_cycles;
};

namespace detail {

template <class T>
std::string field(const std::optional<T>& v) {
  return v ? std::to_string(*v) : std::string("-");
}

inline std::string hex_field(const std::optional<Byte>& v) {
  if (!v) return "-";
  char buf[3];
  std::snprintf(buf, sizeof buf, "%02x", unsigned{*v});
  return buf;
}

}  // namespace detail

/// `cycle=<u64> phase=<name> s=<idx> in=<hex> out=<hex> p=<idx> le=<int> lt=<int> r=<idx>`
/// with `-` for any signal not valid on that edge.
inline std::string format_trace(const CycleEvents& e) {
  std::string line = "cycle=" + std::to_string(e.cycle);
  line += " phase=";
  line += phase_name(e.phase);
  line += " s=" + detail::field(e.cursor);
  line += " in=" + detail::hex_field(e.consumed_input);
  line += " out=" + detail::hex_field(e.emitted_output);
  line += " p=" + detail::field(e.marker);
  line += " le=" + detail::field(e.count_le);
  line += " lt=" + detail::field(e.count_lt);
  line += " r=" + detail::field(e.rank);
  return line;
}

struct BlockRun {
  TransformedBlock output;
  std::uint64_t cycles = 0;        // from the block's first LOAD_SHIFT to its last PLACE_MARKER
  std::uint64_t drain_cycles = 0;  // idle slots spent shifting the result out
};

struct StreamRun {
  std::vector<TransformedBlock> outputs;
  std::vector<std::uint64_t> block_cycles;
  std::uint64_t drain_cycles = 0;
  std::uint64_t total_cycles = 0;
};

struct NoObserver {
  void operator()(const CycleEvents&) const noexcept {}
};

class Simulator {
 public:
  explicit Simulator(BlockConfig config) : config_(config) {
    if (config.block_size == 0) throw Error(Errc::invalid_config, "block size must be >= 1");
    chain_.assign(config.block_size + 1, kReset);
    free_ = chain_.size();
    scratch_.resize(chain_.size());
  }

  [[nodiscard]] const BlockConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::size_t capacity() const noexcept { return chain_.size(); }
  [[nodiscard]] Phase phase() const noexcept { return phase_; }
  [[nodiscard]] std::uint64_t cycle_count() const noexcept { return cycle_; }
  [[nodiscard]] bool in_block() const noexcept { return in_block_; }
  [[nodiscard]] std::span<const Byte> chain() const noexcept { return chain_; }
  /// Registers holding the current block's partial transform.
  [[nodiscard]] std::span<const Byte> active_region() const noexcept {
    return std::span<const Byte>(chain_).first(active_);
  }
  /// Logical cursor s of the iteration in flight (meaningful while in_block()).
  [[nodiscard]] std::size_t cursor() const noexcept { return cursor_; }
  /// Nothing loaded, nothing left to shift out, at a slot boundary.
  [[nodiscard]] bool quiescent() const noexcept {
    return !in_block_ && drain_ == 0 && !pending_drop_ && phase_ == Phase::load_shift;
  }
  /// True exactly when the next tick must carry an input byte.
  [[nodiscard]] bool needs_input() const noexcept {
    return in_block_ && phase_ == Phase::load_shift;
  }

  /// Advances one clock edge. `input` is the next payload byte (the block's
  /// bytes are fed last to first) and may only be given on LOAD_SHIFT; a
  /// LOAD_SHIFT without input is an idle slot and only valid between blocks.
  CycleEvents tick(std::optional<Byte> input) {
    if (input && phase_ != Phase::load_shift) {
      throw Error(Errc::protocol_violation,
                  std::string("input offered during ") + std::string(phase_name(phase_)));
    }
    if (!input && needs_input()) {
      throw Error(Errc::protocol_violation, "block in flight needs an input byte");
    }
    if (input && *input == kSentinel) {
      throw Error(Errc::sentinel_in_payload, "simulator input byte is the sentinel");
    }

    CycleEvents ev;
    ev.cycle = cycle_;
    ev.phase = phase_;
    switch (phase_) {
      case Phase::load_shift: load_shift(input, ev); break;
      case Phase::find_marker: if (in_block_) find_marker(); break;
      case Phase::count_le: if (in_block_) count_le(); break;
      case Phase::count_lt: if (in_block_) count_lt(); break;
      case Phase::place_char: if (in_block_) place_char(); break;
      case Phase::place_marker: if (in_block_) place_marker(ev); break;
    }
    snapshot(ev);
    ++cycle_;
    phase_ = next_phase(phase_);
    return ev;
  }

  /// Runs one slot with no input (all six phases).
  template <class Observer = NoObserver>
  void idle_slot(Observer&& observe = {}) {
    for (std::size_t k = 0; k < kCyclesPerSymbol; ++k) observe(tick(std::nullopt));
  }

  /// Streams blocks back to back, then idles until the last one has drained.
  /// Must start quiescent.
  template <class Observer = NoObserver>
  StreamRun run_stream(std::span<const Bytes> payloads, Observer&& observe = {}) {
    for (const auto& p : payloads) {
      if (p.size() != config_.block_size) {
        throw Error(Errc::block_size_mismatch, "payload of " + std::to_string(p.size()) +
                                                   " bytes for block size " +
                                                   std::to_string(config_.block_size));
      }
    }
    if (!quiescent()) throw Error(Errc::protocol_violation, "simulator is not quiescent");

    StreamRun run;
    const std::uint64_t start = cycle_;
    Assembler assembler(config_.block_size);
    auto step = [&](std::optional<Byte> in) {
      const CycleEvents ev = tick(in);
      if (ev.completed_block_cycles) run.block_cycles.push_back(*ev.completed_block_cycles);
      assembler.consume(ev, run.outputs);
      observe(ev);
    };

    for (const auto& payload : payloads) {
      for (auto it = payload.rbegin(); it != payload.rend(); ++it) {
        step(*it);
        for (std::size_t k = 1; k < kCyclesPerSymbol; ++k) step(std::nullopt);
      }
    }
    const std::uint64_t loaded = cycle_;
    while (assembler.pending()) {
      for (std::size_t k = 0; k < kCyclesPerSymbol; ++k) step(std::nullopt);
    }
    run.drain_cycles = cycle_ - loaded;
    run.total_cycles = cycle_ - start;
    return run;
  }

  template <class Observer = NoObserver>
  BlockRun run_block(std::span<const Byte> payload, Observer&& observe = {}) {
    const std::array<Bytes, 1> one{Bytes(payload.begin(), payload.end())};
    StreamRun s = run_stream(std::span<const Bytes>(one), std::forward<Observer>(observe));
    return BlockRun{std::move(s.outputs.front()), s.block_cycles.front(), s.drain_cycles};
  }

 private:
  static constexpr Byte kReset = 0x00;

  // Rebuilds transforms from the output port: bytes leave last-first and
  // without the sentinel, whose position arrives as the primary index.
  class Assembler {
   public:
    explicit Assembler(std::size_t n) : n_(n) {}
    [[nodiscard]] bool pending() const noexcept { return !primaries_.empty(); }
    void consume(const CycleEvents& ev, std::vector<TransformedBlock>& out) {
      if (ev.completed_primary) primaries_.push_back(*ev.completed_primary);
      if (!ev.emitted_output) return;
      bytes_.push_back(*ev.emitted_output);
      if (bytes_.size() < n_) return;
      std::reverse(bytes_.begin(), bytes_.end());
      bytes_.insert(bytes_.begin() + static_cast<std::ptrdiff_t>(primaries_.front()), kSentinel);
      primaries_.pop_front();
      out.push_back(TransformedBlock::from_bytes(std::move(bytes_)));
      bytes_.clear();
    }

   private:
    std::size_t n_;
    std::deque<std::size_t> primaries_;
    Bytes bytes_;
  };

  void load_shift(std::optional<Byte> input, CycleEvents& ev) {
    const std::size_t n = chain_.size();
    if (pending_drop_) {
      // Close the gap left by the finished block's sentinel.
      std::copy_backward(chain_.begin(), chain_.begin() + static_cast<std::ptrdiff_t>(drop_at_),
                         chain_.begin() + static_cast<std::ptrdiff_t>(drop_at_ + 1));
      chain_[0] = kReset;
      drain_ = n - 1;
      free_ = 1;
      active_ = 0;
      pending_drop_ = false;
    }
    if (drain_ > 0) {
      ev.emitted_output = chain_[n - 1];
      --drain_;
    } else {
      --free_;
    }
    std::copy_backward(chain_.begin(), chain_.end() - 1, chain_.end());
    latched_ = {};

    if (!input) {
      chain_[0] = kReset;
      ++free_;
      return;
    }
    chain_[0] = *input;
    c_ = *input;
    ev.consumed_input = input;
    if (!in_block_) {
      // Base case: the block's last byte and its sentinel enter together.
      chain_[1] = kSentinel;
      --free_;
      active_ = 2;
      cursor_ = n - 2;
      in_block_ = true;
      block_start_ = cycle_;
    } else {
      ++active_;
      --cursor_;
    }
  }

  void find_marker() {
    for (std::size_t i = 0; i < chain_.size(); ++i) scratch_[i] = chain_[i] == kSentinel;
    latched_.marker = encode_marker_position(scratch_, 1, active_);
  }

  void count_le() {
    const std::size_t p = *latched_.marker;
    for (std::size_t i = 0; i < chain_.size(); ++i) scratch_[i] = chain_[i] <= c_;
    const PartialSums sums = popcount_two_stage(scratch_, 1, p);
    if (config_.two_stage_popcount) {
      latched_.partial_le = sums;
    } else {
      latched_.count_le = sums.total();
    }
  }

  void count_lt() {
    const std::size_t p = *latched_.marker;
    if (config_.two_stage_popcount) latched_.count_le = latched_.partial_le->total();
    for (std::size_t i = 0; i < chain_.size(); ++i) scratch_[i] = chain_[i] < c_;
    const PartialSums sums = popcount_two_stage(scratch_, p, active_);
    if (config_.two_stage_popcount) {
      latched_.partial_lt = sums;
    } else {
      latched_.count_lt = sums.total();
    }
  }

  void place_char() {
    if (config_.two_stage_popcount) latched_.count_lt = latched_.partial_lt->total();
    latched_.rank = *latched_.count_le + *latched_.count_lt;
    chain_[*latched_.marker] = c_;
  }

  void place_marker(CycleEvents& ev) {
    const std::size_t r = *latched_.rank;
    std::copy(chain_.begin() + 1, chain_.begin() + static_cast<std::ptrdiff_t>(r + 1),
              chain_.begin());
    chain_[r] = kSentinel;
    if (cursor_ != 0) return;
    in_block_ = false;
    pending_drop_ = true;
    drop_at_ = r;
    ev.completed_primary = r;
    ev.completed_block_cycles = cycle_ - block_start_ + 1;
  }

  void snapshot(CycleEvents& ev) const {
    const bool live = in_block_ || ev.completed_primary.has_value();
    if (!live) return;
    const std::size_t s = cursor_;
    ev.cursor = s;
    if (latched_.marker) ev.marker = s + *latched_.marker;
    ev.partial_le = latched_.partial_le;
    ev.partial_lt = latched_.partial_lt;
    ev.count_le = latched_.count_le;
    ev.count_lt = latched_.count_lt;
    if (latched_.rank) ev.rank = s + *latched_.rank;
  }

  // Per-iteration datapath registers, in register coordinates.
  struct Latches {
    std::optional<std::size_t> marker;
    std::optional<PartialSums> partial_le;
    std::optional<PartialSums> partial_lt;
    std::optional<std::size_t> count_le;
    std::optional<std::size_t> count_lt;
    std::optional<std::size_t> rank;
  };

  BlockConfig config_;
  Bytes chain_;
  BitVector scratch_;
  Latches latched_;
  Byte c_ = 0;
  Phase phase_ = Phase::load_shift;
  std::uint64_t cycle_ = 0;
  std::uint64_t block_start_ = 0;
  std::size_t cursor_ = 0;
  std::size_t active_ = 0;
  std::size_t free_ = 0;
  std::size_t drain_ = 0;
  std::size_t drop_at_ = 0;
  bool in_block_ = false;
  bool pending_drop_ = false;
};

}  // namespace ibwt::hw
