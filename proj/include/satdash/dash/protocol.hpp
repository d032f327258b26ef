// SPDX-License-Identifier: Apache-2.0
// Segment request/response framing. A request is two big-endian u32 (segment
// index, representation index); a response is a big-endian u64 body length
// followed by the body.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace satdash::dash {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kRequestBytes = 8;
inline constexpr std::size_t kResponseHeaderBytes = 8;

struct SegmentRequest {
  std::uint32_t segment = 0;
  std::uint32_t rep = 0;
  friend bool operator==(const SegmentRequest&, const SegmentRequest&) = default;
};

std::array<std::uint8_t, kRequestBytes> encode_request(SegmentRequest r);
std::array<std::uint8_t, kResponseHeaderBytes> encode_response_header(std::uint64_t body_bytes);

/// Splits a byte stream into fixed-size requests.
class RequestReader {
 public:
  /// Appends bytes and returns every request completed by them.
  std::vector<SegmentRequest> feed(std::span<const std::uint8_t> bytes);
  std::size_t partial_bytes() const { return have_; }

 private:
  std::array<std::uint8_t, kRequestBytes> buf_{};
  std::size_t have_ = 0;
};

/// Tracks one or more back-to-back responses on a byte stream.
class ResponseReader {
 public:
  struct Progress {
    std::uint64_t body_bytes = 0;  // body bytes consumed by this call
    std::uint32_t completed = 0;   // responses finished by this call
  };

  Progress feed(std::span<const std::uint8_t> bytes);
  /// Body length of the response in progress, once its header is complete.
  std::optional<std::uint64_t> current_length() const { return length_; }
  std::uint64_t current_received() const { return received_; }
  std::uint64_t last_completed_length() const { return last_length_; }

 private:
  std::array<std::uint8_t, kResponseHeaderBytes> header_{};
  std::size_t header_have_ = 0;
  std::optional<std::uint64_t> length_;
  std::uint64_t received_ = 0;
  std::uint64_t last_length_ = 0;
};

}  // namespace satdash::dash
