#pragma once

// Corpus loading, wall-clock benchmarks of the in-place transform and the
// simulator, the quadratic-scaling check, and CSV output.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibwt/bwt.hpp"
#include "ibwt/detail/sample_text.hpp"
#include "ibwt/error.hpp"
#include "ibwt/hwsim.hpp"

namespace ibwt::bench {

enum class CorpusKind { file, zeros, random, markov_text };

struct CorpusSpec {
  CorpusKind kind = CorpusKind::file;
  std::string path;          // file corpora
  std::size_t length = 0;    // generated corpora
  std::uint64_t seed = 1;
  std::string description;

  static CorpusSpec from_file(std::string p) {
    return {CorpusKind::file, p, 0, 0, "file " + p};
  }
  static CorpusSpec generated(CorpusKind kind, std::size_t length, std::uint64_t seed = 1);
};

inline std::optional<CorpusKind> parse_generator(std::string_view name) {
  if (name == "zeros") return CorpusKind::zeros;
  if (name == "random") return CorpusKind::random;
  if (name == "markov-text") return CorpusKind::markov_text;
  return std::nullopt;
}

inline std::string generator_name(CorpusKind k) {
  switch (k) {
    case CorpusKind::zeros: return "zeros";
    case CorpusKind::random: return "random";
    case CorpusKind::markov_text: return "markov-text";
    case CorpusKind::file: break;
  }
  return "file";
}

inline CorpusSpec CorpusSpec::generated(CorpusKind kind, std::size_t length, std::uint64_t seed) {
  return {kind, {}, length, seed,
          generator_name(kind) + " length=" + std::to_string(length) +
              " seed=" + std::to_string(seed)};
}

struct Corpus {
  Bytes data;
  std::size_t remapped_zeros = 0;  // 0x00 bytes rewritten to 0x01
  std::string description;
};

/// Order-2 character model trained on the embedded sample prose.
inline Bytes markov_text(std::size_t length, std::uint64_t seed) {
  const std::string_view train = detail::kSampleText;
  std::map<std::uint16_t, std::array<std::uint32_t, 256>> counts;
  const std::size_t n = train.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<Byte>(train[i]);
    const auto b = static_cast<Byte>(train[(i + 1) % n]);
    const auto c = static_cast<Byte>(train[(i + 2) % n]);
    ++counts[static_cast<std::uint16_t>(a << 8 | b)][c];
  }

  std::mt19937_64 rng(seed);
  Bytes out;
  out.reserve(length);
  Byte a = static_cast<Byte>(train[0]);
  Byte b = static_cast<Byte>(train[1]);
  while (out.size() < length) {
    const auto& row = counts.at(static_cast<std::uint16_t>(a << 8 | b));
    std::uint64_t total = 0;
    for (auto v : row) total += v;
    std::uint64_t pick = rng() % total;
    std::size_t c = 0;
    while (pick >= row[c]) pick -= row[c++];
    out.push_back(static_cast<Byte>(c));
    a = b;
    b = static_cast<Byte>(c);
  }
  return out;
}

inline Corpus load_corpus(const CorpusSpec& spec) {
  Corpus c;
  c.description = spec.description;
  switch (spec.kind) {
    case CorpusKind::file: {
      std::ifstream in(spec.path, std::ios::binary);
      if (!in) throw Error(Errc::not_found, "cannot open corpus " + spec.path);
      c.data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
      break;
    }
    case CorpusKind::zeros: c.data.assign(spec.length, 0x00); break;
    case CorpusKind::random: {
      std::mt19937_64 rng(spec.seed);
      c.data.resize(spec.length);
      for (auto& b : c.data) b = static_cast<Byte>(rng() >> 56);
      break;
    }
    case CorpusKind::markov_text: c.data = markov_text(spec.length, spec.seed); break;
  }
  if (c.data.empty()) throw Error(Errc::empty_corpus, spec.description);
  for (auto& b : c.data) {
    if (b == kSentinel) {
      b = 0x01;
      ++c.remapped_zeros;
    }
  }
  return c;
}

struct ThroughputRow {
  std::size_t block_size = 0;
  std::size_t num_blocks = 0;
  double total_time_s = 0.0;
  double throughput_bps = 0.0;
  std::optional<double> cycles_per_byte;  // simulator rows only
};

struct ThroughputReport {
  std::vector<ThroughputRow> rows;
};

inline std::size_t block_count(std::size_t bytes, std::size_t block_size) {
  return (bytes + block_size - 1) / block_size;
}

struct BenchOptions {
  unsigned repetitions = 3;  // median is reported
  bool verify = true;        // compare timed output against an untimed pass
};

namespace detail {

using Clock = std::chrono::steady_clock;

// Transforms every block of `corpus` into `out` (block bytes plus sentinel each).
inline void transform_all(std::span<const Byte> corpus, std::size_t block_size, Bytes& out) {
  std::size_t w = 0;
  for (std::size_t at = 0; at < corpus.size(); at += block_size) {
    const std::size_t len = std::min(block_size, corpus.size() - at);
    std::copy_n(corpus.begin() + static_cast<std::ptrdiff_t>(at), len,
                out.begin() + static_cast<std::ptrdiff_t>(w));
    out[w + len] = kSentinel;
    bwt_inplace(std::span<Byte>(out).subspan(w, len + 1));
    w += len + 1;
  }
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

/// Throws std::logic_error if a timed pass produces different bytes from the
/// untimed verification pass. Repetitions are interleaved across block sizes
/// (all sizes once, then all sizes again) so slow periods on a shared machine
/// spread over every size instead of skewing one of them.
inline ThroughputReport bench_inplace(std::span<const Byte> corpus,
                                      std::span<const std::size_t> block_sizes,
                                      BenchOptions opt = {}) {
  struct Slot {
    std::size_t bs;
    Bytes check;
    Bytes out;
    std::vector<double> times;
  };
  std::vector<Slot> slots;
  for (std::size_t bs : block_sizes) {
    if (bs == 0) throw Error(Errc::invalid_config, "block size must be >= 1");
    Slot slot{bs, {}, Bytes(corpus.size() + block_count(corpus.size(), bs)), {}};
    // The untimed reference pass runs first so it also warms caches and pages.
    if (opt.verify) {
      slot.check.reserve(slot.out.size());
      for (std::size_t at = 0; at < corpus.size(); at += bs) {
        const auto len = std::min(bs, corpus.size() - at);
        const auto t = bwt_inplace(attach_sentinel(corpus.subspan(at, len)));
        slot.check.insert(slot.check.end(), t.data().begin(), t.data().end());
      }
    }
    slots.push_back(std::move(slot));
  }

  for (unsigned rep = 0; rep < std::max(1u, opt.repetitions); ++rep) {
    for (auto& slot : slots) {
      const auto t0 = detail::Clock::now();
      detail::transform_all(corpus, slot.bs, slot.out);
      const auto t1 = detail::Clock::now();
      slot.times.push_back(std::chrono::duration<double>(t1 - t0).count());
      if (opt.verify && slot.out != slot.check) {
        throw std::logic_error("timed transform output differs from untimed output");
      }
    }
  }

  ThroughputReport report;
  for (const auto& slot : slots) {
    ThroughputRow row;
    row.block_size = slot.bs;
    row.num_blocks = block_count(corpus.size(), slot.bs);
    row.total_time_s = detail::median(slot.times);
    row.throughput_bps = static_cast<double>(corpus.size()) / row.total_time_s;
    report.rows.push_back(row);
  }
  return report;
}

/// Same loop as bench_inplace with the transform left out: block copies and
/// sentinel writes only. Its throughput does not depend on block size.
inline ThroughputReport bench_copy_baseline(std::span<const Byte> corpus,
                                            std::span<const std::size_t> block_sizes,
                                            BenchOptions opt = {}) {
  ThroughputReport report;
  for (std::size_t bs : block_sizes) {
    if (bs == 0) throw Error(Errc::invalid_config, "block size must be >= 1");
    const std::size_t blocks = block_count(corpus.size(), bs);
    Bytes out(corpus.size() + blocks);
    std::vector<double> times;
    for (unsigned rep = 0; rep < std::max(1u, opt.repetitions); ++rep) {
      const auto t0 = detail::Clock::now();
      std::size_t w = 0;
      for (std::size_t at = 0; at < corpus.size(); at += bs) {
        const std::size_t len = std::min(bs, corpus.size() - at);
        std::copy_n(corpus.begin() + static_cast<std::ptrdiff_t>(at), len,
                    out.begin() + static_cast<std::ptrdiff_t>(w));
        out[w + len] = kSentinel;
        w += len + 1;
      }
      times.push_back(std::chrono::duration<double>(detail::Clock::now() - t0).count());
    }
    ThroughputRow row;
    row.block_size = bs;
    row.num_blocks = blocks;
    row.total_time_s = std::max(detail::median(times), 1e-9);
    row.throughput_bps = static_cast<double>(corpus.size()) / row.total_time_s;
    report.rows.push_back(row);
  }
  return report;
}

/// Runs the whole corpus through the cycle model, one simulator per distinct
/// block length (full blocks streamed, then the short tail if any).
/// `cycles_per_byte` counts block cycles only; drain slots are excluded.
inline ThroughputReport bench_simulator(std::span<const Byte> corpus,
                                        std::span<const std::size_t> block_sizes,
                                        bool two_stage_popcount = true) {
  ThroughputReport report;
  for (std::size_t bs : block_sizes) {
    if (bs == 0) throw Error(Errc::invalid_config, "block size must be >= 1");
    std::vector<Bytes> full;
    for (std::size_t at = 0; at + bs <= corpus.size(); at += bs) {
      full.emplace_back(corpus.begin() + static_cast<std::ptrdiff_t>(at),
                        corpus.begin() + static_cast<std::ptrdiff_t>(at + bs));
    }
    const std::size_t tail = corpus.size() % bs;

    std::uint64_t cycles = 0;
    const auto t0 = detail::Clock::now();
    if (!full.empty()) {
      hw::Simulator sim({bs, two_stage_popcount});
      for (auto c : sim.run_stream(full).block_cycles) cycles += c;
    }
    if (tail) {
      hw::Simulator sim({tail, two_stage_popcount});
      cycles += sim.run_block(corpus.last(tail)).cycles;
    }
    const auto t1 = detail::Clock::now();

    ThroughputRow row;
    row.block_size = bs;
    row.num_blocks = block_count(corpus.size(), bs);
    row.total_time_s = std::chrono::duration<double>(t1 - t0).count();
    row.throughput_bps = static_cast<double>(corpus.size()) / row.total_time_s;
    row.cycles_per_byte = static_cast<double>(cycles) / static_cast<double>(corpus.size());
    report.rows.push_back(row);
  }
  return report;
}

struct ScalingResult {
  bool pass = false;
  std::vector<std::size_t> sizes;  // smaller size of each doubling
  std::vector<double> ratios;      // throughput(B) / throughput(2B)
};

/// Quadratic cost per block means doubling the block size should roughly
/// halve throughput. Needs at least three sizes, each double the previous.
inline ScalingResult scaling_check(const ThroughputReport& report, double lo = 1.5,
                                   double hi = 2.5) {
  auto rows = report.rows;
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.block_size < b.block_size; });
  if (rows.size() < 3) {
    throw Error(Errc::insufficient_data, "need at least 3 block sizes, got " +
                                             std::to_string(rows.size()));
  }
  ScalingResult r;
  r.pass = true;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    if (rows[k + 1].block_size != 2 * rows[k].block_size) {
      throw Error(Errc::insufficient_data, "block sizes " + std::to_string(rows[k].block_size) +
                                               " and " + std::to_string(rows[k + 1].block_size) +
                                               " are not a doubling");
    }
    const double ratio = rows[k].throughput_bps / rows[k + 1].throughput_bps;
    r.sizes.push_back(rows[k].block_size);
    r.ratios.push_back(ratio);
    if (!(ratio >= lo && ratio <= hi)) r.pass = false;
  }
  return r;
}

inline std::string format_g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void emit_csv(const ThroughputReport& report, std::ostream& out) {
  auto rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.block_size < b.block_size; });
  out << "block_size,num_blocks,total_time_s,throughput_bps,cycles_per_byte\n";
  for (const auto& r : rows) {
    out << r.block_size << ',' << r.num_blocks << ',' << format_g6(r.total_time_s) << ','
        << format_g6(r.throughput_bps) << ','
        << (r.cycles_per_byte ? format_g6(*r.cycles_per_byte) : std::string()) << '\n';
  }
  if (!out) throw Error(Errc::io_error, "failed writing CSV");
}

}  // namespace ibwt::bench
