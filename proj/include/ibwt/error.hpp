#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ibwt {

enum class Errc {
  sentinel_in_payload,
  no_marker,
  multiple_markers,
  already_done,
  malformed_transform,
  invalid_config,
  protocol_violation,
  block_size_mismatch,
  index_out_of_range,
  malformed_run,
  empty_input,
  corrupt_bitstream,
  malformed_container,
  bad_magic,
  unsupported_version,
  truncated_stream,
  checksum_mismatch,
  not_found,
  empty_corpus,
  insufficient_data,
  io_error,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::sentinel_in_payload: return "SentinelInPayload";
    case Errc::no_marker: return "NoMarker";
    case Errc::multiple_markers: return "MultipleMarkers";
    case Errc::already_done: return "AlreadyDone";
    case Errc::malformed_transform: return "MalformedTransform";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::protocol_violation: return "ProtocolViolation";
    case Errc::block_size_mismatch: return "BlockSizeMismatch";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::malformed_run: return "MalformedRun";
    case Errc::empty_input: return "EmptyInput";
    case Errc::corrupt_bitstream: return "CorruptBitstream";
    case Errc::malformed_container: return "MalformedContainer";
    case Errc::bad_magic: return "BadMagic";
    case Errc::unsupported_version: return "UnsupportedVersion";
    case Errc::truncated_stream: return "TruncatedStream";
    case Errc::checksum_mismatch: return "ChecksumMismatch";
    case Errc::not_found: return "NotFound";
    case Errc::empty_corpus: return "EmptyCorpus";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying an Errc.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ibwt
