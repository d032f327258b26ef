// SPDX-License-Identifier: Apache-2.0
#include "satdash/dash/protocol.hpp"

#include <algorithm>

namespace satdash::dash {
namespace {

template <std::size_t N>
void put_be(std::uint8_t* out, std::uint64_t v) {
  for (std::size_t i = 0; i < N; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * (N - 1 - i)));
}

std::uint64_t get_be(const std::uint8_t* in, std::size_t n) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) v = (v << 8) | in[i];
  return v;
}

}  // namespace

std::array<std::uint8_t, kRequestBytes> encode_request(SegmentRequest r) {
  std::array<std::uint8_t, kRequestBytes> out{};
  put_be<4>(out.data(), r.segment);
  put_be<4>(out.data() + 4, r.rep);
  return out;
}

std::array<std::uint8_t, kResponseHeaderBytes> encode_response_header(std::uint64_t body_bytes) {
  std::array<std::uint8_t, kResponseHeaderBytes> out{};
  put_be<8>(out.data(), body_bytes);
  return out;
}

std::vector<SegmentRequest> RequestReader::feed(std::span<const std::uint8_t> bytes) {
  std::vector<SegmentRequest> out;
  for (std::uint8_t b : bytes) {
    buf_[have_++] = b;
    if (have_ == kRequestBytes) {
      out.push_back({static_cast<std::uint32_t>(get_be(buf_.data(), 4)),
                     static_cast<std::uint32_t>(get_be(buf_.data() + 4, 4))});
      have_ = 0;
    }
  }
  return out;
}

ResponseReader::Progress ResponseReader::feed(std::span<const std::uint8_t> bytes) {
  Progress p;
  while (!bytes.empty()) {
    if (!length_) {
      const std::size_t n = std::min(bytes.size(), kResponseHeaderBytes - header_have_);
      std::copy_n(bytes.begin(), n, header_.begin() + static_cast<std::ptrdiff_t>(header_have_));
      header_have_ += n;
      bytes = bytes.subspan(n);
      if (header_have_ < kResponseHeaderBytes) break;
      length_ = get_be(header_.data(), kResponseHeaderBytes);
      received_ = 0;
      header_have_ = 0;
    }
    const std::uint64_t n = std::min<std::uint64_t>(bytes.size(), *length_ - received_);
    received_ += n;
    p.body_bytes += n;
    bytes = bytes.subspan(static_cast<std::size_t>(n));
    if (received_ == *length_) {
      ++p.completed;
      last_length_ = *length_;
      length_.reset();
    }
  }
  return p;
}

}  // namespace satdash::dash
