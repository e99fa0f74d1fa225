// ibwt: command-line front end for the in-place BWT toolkit.
//
// Exit codes: 0 ok, 1 scaling check failed, 2 usage, 3 data error, 4 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ibwt/ibwt.hpp"

namespace {

using ibwt::Byte;
using ibwt::Bytes;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitIo = 4;

struct CommandConfig {
  std::string input = "-";
  std::string output = "-";
  std::size_t block_size = 1024;
  double freq_mhz = 345.0;
  bool trace = false;
  std::string csv;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  // bench
  std::string corpus;
  std::string generator = "markov-text";
  std::size_t length = std::size_t{4} << 20;
  std::vector<std::size_t> sizes{1024, 2048, 4096, 8192, 16384};
  unsigned reps = 3;
  bool check = false;
  std::string engine = "inplace";
  bool single_stage = false;
};

Bytes read_input(const std::string& path) {
  if (path == "-") {
    std::cin >> std::noskipws;
    return Bytes(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ibwt::Error(ibwt::Errc::not_found, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_output(const std::string& path, std::span<const Byte> data) {
  if (path == "-") {
    std::cout.write(reinterpret_cast<const char*>(data.data()),
                    static_cast<std::streamsize>(data.size()));
    std::cout.flush();
    if (!std::cout) throw ibwt::Error(ibwt::Errc::io_error, "failed writing stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw ibwt::Error(ibwt::Errc::io_error, "failed writing " + path);
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<Byte>(v >> (8 * k)));
}

std::uint32_t get_u32(std::span<const Byte> in, std::size_t at) {
  return std::uint32_t{in[at]} | std::uint32_t{in[at + 1]} << 8 |
         std::uint32_t{in[at + 2]} << 16 | std::uint32_t{in[at + 3]} << 24;
}

// Framing: block_size u32 | block_count u32 | last_block_len u32, then every
// block's transform (payload length + 1 bytes each).
constexpr std::size_t kFrameHeader = 12;

int cmd_transform(const CommandConfig& cfg) {
  const Bytes input = read_input(cfg.input);
  const std::size_t bs = cfg.block_size;
  const std::size_t count = (input.size() + bs - 1) / bs;
  Bytes out;
  out.reserve(kFrameHeader + input.size() + count);
  put_u32(out, static_cast<std::uint32_t>(bs));
  put_u32(out, static_cast<std::uint32_t>(count));
  put_u32(out, static_cast<std::uint32_t>(count ? input.size() - (count - 1) * bs : 0));
  for (std::size_t at = 0; at < input.size(); at += bs) {
    const auto block = std::span<const Byte>(input).subspan(at, std::min(bs, input.size() - at));
    const auto t = ibwt::bwt_inplace(ibwt::attach_sentinel(block));
    out.insert(out.end(), t.data().begin(), t.data().end());
  }
  write_output(cfg.output, out);
  return kExitOk;
}

int cmd_inverse(const CommandConfig& cfg) {
  const Bytes input = read_input(cfg.input);
  if (input.empty()) {
    write_output(cfg.output, {});
    return kExitOk;
  }
  if (input.size() < kFrameHeader) {
    throw ibwt::Error(ibwt::Errc::truncated_stream, "transform header is incomplete");
  }
  const std::uint64_t bs = get_u32(input, 0);
  const std::uint64_t count = get_u32(input, 4);
  const std::uint64_t tail = get_u32(input, 8);
  if (bs == 0 || (count == 0 && tail != 0) || (count > 0 && (tail == 0 || tail > bs))) {
    throw ibwt::Error(ibwt::Errc::malformed_transform, "inconsistent transform header");
  }
  const std::uint64_t expected = count ? (count - 1) * (bs + 1) + tail + 1 : 0;
  if (input.size() - kFrameHeader != expected) {
    throw ibwt::Error(input.size() - kFrameHeader < expected ? ibwt::Errc::truncated_stream
                                                             : ibwt::Errc::malformed_transform,
                      "expected " + std::to_string(expected) + " transform bytes, found " +
                          std::to_string(input.size() - kFrameHeader));
  }
  Bytes out;
  std::size_t at = kFrameHeader;
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::size_t len = (k + 1 == count ? tail : bs) + 1;
    const Bytes block = ibwt::bwt_inverse(std::span<const Byte>(input).subspan(at, len));
    out.insert(out.end(), block.begin(), block.end());
    at += len;
  }
  write_output(cfg.output, out);
  return kExitOk;
}

int cmd_compress(const CommandConfig& cfg) {
  const Bytes input = read_input(cfg.input);
  ibwt::codec::Container c;
  c.block_size = static_cast<std::uint32_t>(cfg.block_size);
  c.blocks = ibwt::codec::compress_blocks(input, cfg.block_size, cfg.jobs);

  std::ostringstream buf(std::ios::binary);
  ibwt::codec::write_container(c, buf);
  const std::string bytes = buf.str();
  write_output(cfg.output, std::span<const Byte>(reinterpret_cast<const Byte*>(bytes.data()),
                                                 bytes.size()));

  std::uint64_t payload_bits = 0;
  for (const auto& b : c.blocks) payload_bits += b.payload_bits;
  const double n = static_cast<double>(input.size());
  std::fprintf(stderr,
               "blocks=%zu block_size=%zu input_bytes=%zu payload_bits=%llu bpc=%.4f "
               "container_bytes=%zu total_bpc=%.4f\n",
               c.blocks.size(), cfg.block_size, input.size(),
               static_cast<unsigned long long>(payload_bits),
               n > 0 ? static_cast<double>(payload_bits) / n : 0.0, bytes.size(),
               n > 0 ? static_cast<double>(bytes.size()) * 8.0 / n : 0.0);
  return kExitOk;
}

int cmd_decompress(const CommandConfig& cfg) {
  const Bytes input = read_input(cfg.input);
  std::istringstream in(std::string(input.begin(), input.end()), std::ios::binary);
  const auto c = ibwt::codec::read_container(in);
  Bytes out;
  for (std::size_t k = 0; k < c.blocks.size(); ++k) {
    const Bytes block = ibwt::codec::decompress_block(c.blocks[k]);
    if (k + 1 < c.blocks.size() && block.size() != c.block_size) {
      throw ibwt::Error(ibwt::Errc::malformed_container, "short block before the last one");
    }
    out.insert(out.end(), block.begin(), block.end());
  }
  write_output(cfg.output, out);
  return kExitOk;
}

int cmd_simulate(const CommandConfig& cfg) {
  const Bytes input = read_input(cfg.input);
  const std::size_t bs = cfg.block_size;
  std::vector<Bytes> full;
  for (std::size_t at = 0; at + bs <= input.size(); at += bs) {
    full.emplace_back(input.begin() + static_cast<std::ptrdiff_t>(at),
                      input.begin() + static_cast<std::ptrdiff_t>(at + bs));
  }
  const std::size_t tail = input.size() % bs;
  for (Byte b : input) {
    if (b == ibwt::kSentinel) {
      throw ibwt::Error(ibwt::Errc::sentinel_in_payload, "input contains a 0x00 byte");
    }
  }

  auto trace = [&](const ibwt::hw::CycleEvents& ev) {
    if (cfg.trace) std::cout << ibwt::hw::format_trace(ev) << '\n';
  };

  std::vector<ibwt::TransformedBlock> outputs;
  std::vector<std::uint64_t> cycles;
  std::uint64_t total = 0;
  std::uint64_t drain = 0;
  if (!full.empty()) {
    ibwt::hw::Simulator sim({bs, !cfg.single_stage});
    auto run = sim.run_stream(full, trace);
    outputs = std::move(run.outputs);
    cycles = std::move(run.block_cycles);
    total += run.total_cycles;
    drain += run.drain_cycles;
  }
  if (tail) {
    ibwt::hw::Simulator sim({tail, !cfg.single_stage});
    auto run = sim.run_block(std::span<const Byte>(input).last(tail), trace);
    outputs.push_back(std::move(run.output));
    cycles.push_back(run.cycles);
    total += run.cycles + run.drain_cycles;
    drain += run.drain_cycles;
  }

  std::uint64_t block_total = 0;
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    const std::size_t at = k * bs;
    const auto len = std::min(bs, input.size() - at);
    const auto expect =
        ibwt::bwt_inplace(ibwt::attach_sentinel(std::span<const Byte>(input).subspan(at, len)));
    if (!(outputs[k] == expect)) {
      std::fprintf(stderr, "error: simulator output differs from software transform in block %zu\n",
                   k);
      return kExitData;
    }
    std::cout << "block=" << k << " bytes=" << len << " cycles=" << cycles[k] << '\n';
    block_total += cycles[k];
  }
  const double bps = ibwt::hw::throughput_model(cfg.freq_mhz * 1e6);
  char line[64];
  std::snprintf(line, sizeof line, "%.2f", bps / 1e6);
  std::cout << "block_cycles=" << block_total << '\n'
            << "drain_cycles=" << drain << '\n'
            << "total_cycles=" << total << '\n'
            << "cycles_per_byte="
            << (input.empty() ? std::string("-")
                              : ibwt::bench::format_g6(static_cast<double>(block_total) /
                                                       static_cast<double>(input.size())))
            << '\n'
            << "modeled_throughput=" << line << " MB/s\n";
  return kExitOk;
}

int cmd_bench(const CommandConfig& cfg) {
  const auto& sizes = cfg.sizes;
  ibwt::bench::CorpusSpec spec;
  if (!cfg.corpus.empty()) {
    spec = ibwt::bench::CorpusSpec::from_file(cfg.corpus);
  } else {
    const auto kind = ibwt::bench::parse_generator(cfg.generator);
    if (!kind) {
      std::fprintf(stderr, "error: unknown generator '%s'\n", cfg.generator.c_str());
      return kExitUsage;
    }
    spec = ibwt::bench::CorpusSpec::generated(*kind, cfg.length, cfg.seed);
  }
  const auto corpus = ibwt::bench::load_corpus(spec);
  std::fprintf(stderr, "corpus: %s bytes=%zu remapped_zeros=%zu\n", corpus.description.c_str(),
               corpus.data.size(), corpus.remapped_zeros);

  ibwt::bench::ThroughputReport report;
  const ibwt::bench::BenchOptions opt{cfg.reps, true};
  if (cfg.engine == "inplace") {
    report = ibwt::bench::bench_inplace(corpus.data, sizes, opt);
  } else if (cfg.engine == "sim") {
    report = ibwt::bench::bench_simulator(corpus.data, sizes, !cfg.single_stage);
  } else if (cfg.engine == "null") {
    report = ibwt::bench::bench_copy_baseline(corpus.data, sizes, opt);
  } else {
    std::fprintf(stderr, "error: unknown engine '%s'\n", cfg.engine.c_str());
    return kExitUsage;
  }

  if (cfg.csv.empty() || cfg.csv == "-") {
    ibwt::bench::emit_csv(report, std::cout);
  } else {
    std::ofstream out(cfg.csv);
    if (!out) throw ibwt::Error(ibwt::Errc::io_error, "cannot write " + cfg.csv);
    ibwt::bench::emit_csv(report, out);
  }

  if (!cfg.check) return kExitOk;
  const auto result = ibwt::bench::scaling_check(report);
  std::string ratios;
  for (std::size_t k = 0; k < result.ratios.size(); ++k) {
    if (k) ratios += ',';
    ratios += std::to_string(result.sizes[k]) + ":" + ibwt::bench::format_g6(result.ratios[k]);
  }
  std::fprintf(stderr, "scaling_check=%s ratios=%s bounds=[1.5,2.5]\n",
               result.pass ? "pass" : "fail", ratios.c_str());
  return result.pass ? kExitOk : kExitCheckFailed;
}

int exit_code_for(ibwt::Errc code) {
  switch (code) {
    case ibwt::Errc::not_found:
    case ibwt::Errc::io_error: return kExitIo;
    case ibwt::Errc::insufficient_data:
    case ibwt::Errc::invalid_config: return kExitUsage;
    default: return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"In-place Burrows-Wheeler transform toolkit"};
  app.require_subcommand(1);
  CommandConfig cfg;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("-i,--input", cfg.input, "Input file, '-' for stdin");
    sub->add_option("-o,--output", cfg.output, "Output file, '-' for stdout");
  };
  auto add_block = [&](CLI::App* sub) {
    sub->add_option("-b,--block-size", cfg.block_size, "Bytes per block (k/m suffixes allowed)")
        ->transform(CLI::AsSizeValue(false))
        ->check(CLI::PositiveNumber);
  };

  auto* transform = app.add_subcommand("transform", "Blockwise BWT with framing header");
  add_io(transform);
  add_block(transform);
  auto* inverse = app.add_subcommand("inverse", "Undo `transform`");
  add_io(inverse);

  auto* compress = app.add_subcommand("compress", "BWT + MTF + zero runs + Huffman into IBW1");
  add_io(compress);
  add_block(compress);
  compress->add_option("-j,--jobs", cfg.jobs, "Worker threads (0 = all cores)");
  auto* decompress = app.add_subcommand("decompress", "Expand an IBW1 container");
  add_io(decompress);

  auto* simulate = app.add_subcommand(
      "simulate",
      "Run the 6-cycle scanchain model. Modeled throughput is freq/6 bytes per second "
      "(one byte per six cycles), e.g. 57.50 MB/s at 345 MHz, which is below the 66 MB/s "
      "published for that clock.");
  simulate->add_option("-i,--input", cfg.input, "Input file, '-' for stdin");
  add_block(simulate);
  simulate->add_option("--freq-mhz", cfg.freq_mhz, "Clock for the throughput model")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--trace", cfg.trace, "Print one line per clock cycle");
  simulate->add_flag("--single-stage-popcount", cfg.single_stage,
                     "Finish each population count in one cycle");

  auto* bench = app.add_subcommand("bench", "Time the transform over growing block sizes");
  bench->add_option("--corpus", cfg.corpus, "Corpus file (overrides --generator)");
  bench->add_option("--generator", cfg.generator, "zeros | random | markov-text");
  bench->add_option("--length", cfg.length, "Generated corpus length in bytes")
      ->transform(CLI::AsSizeValue(false));
  bench->add_option("--seed", cfg.seed, "Generator seed");
  bench->add_option("--sizes", cfg.sizes, "Block sizes, e.g. 1k,2k,4k")
      ->delimiter(',')
      ->transform(CLI::AsSizeValue(false))
      ->check(CLI::PositiveNumber);
  bench->add_option("--reps", cfg.reps, "Timed repetitions per size (median kept)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--csv", cfg.csv, "CSV destination (default stdout)");
  bench->add_flag("--check", cfg.check, "Fail unless every doubling ratio is in [1.5, 2.5]");
  bench->add_option("--engine", cfg.engine, "inplace | sim | null (copy-only baseline)");
  bench->add_flag("--single-stage-popcount", cfg.single_stage, "Simulator popcount mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*transform) return cmd_transform(cfg);
    if (*inverse) return cmd_inverse(cfg);
    if (*compress) return cmd_compress(cfg);
    if (*decompress) return cmd_decompress(cfg);
    if (*simulate) return cmd_simulate(cfg);
    if (*bench) return cmd_bench(cfg);
  } catch (const ibwt::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
