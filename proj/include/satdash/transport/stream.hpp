// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "satdash/transport/interval_set.hpp"

namespace satdash::transport {

/// Sending half of a stream: an append-only byte sequence with per-range
/// acknowledgment state. Acknowledged prefix bytes are released.
class SendStream {
 public:
  void write(std::span<const std::uint8_t> data, bool fin);

  std::uint64_t end_offset() const { return base_ + buf_.size(); }
  std::uint64_t next_offset() const { return next_; }
  std::uint64_t unsent_bytes() const { return end_offset() - next_; }
  bool has_unsent() const { return next_ < end_offset() || (fin_ && !fin_sent_); }
  bool fin_written() const { return fin_; }

  /// Claims up to `max_bytes` of never-sent data. Returns the claimed range
  /// and whether it carries the FIN.
  struct Claim {
    std::uint64_t offset;
    std::uint64_t length;
    bool fin;
  };
  Claim claim_new(std::uint64_t max_bytes);

  /// Copies bytes that are still buffered (not released).
  std::vector<std::uint8_t> copy(std::uint64_t offset, std::uint64_t length) const;

  /// Returns the number of bytes newly acknowledged.
  std::uint64_t on_acked(std::uint64_t offset, std::uint64_t length, bool fin);
  const IntervalSet& acked() const { return acked_; }
  bool fin_acked() const { return fin_acked_; }
  bool fully_acked() const { return fin_ && fin_acked_ && acked_.covers(0, end_offset()); }
  std::uint64_t buffered_bytes() const { return buf_.size(); }
  /// Offsets below this have been acknowledged and released.
  std::uint64_t released_offset() const { return base_; }

 private:
  void release_acked_prefix();

  std::vector<std::uint8_t> buf_;
  std::uint64_t base_ = 0;  // stream offset of buf_[0]
  std::uint64_t next_ = 0;
  bool fin_ = false;
  bool fin_sent_ = false;
  bool fin_acked_ = false;
  IntervalSet acked_;
};

/// Receiving half: reassembles out-of-order frames and hands the contiguous
/// prefix to the application exactly once, in offset order.
class RecvStream {
 public:
  /// Appends newly deliverable bytes to `out`. Returns true when the FIN has
  /// now been delivered.
  bool on_frame(std::uint64_t offset, std::span<const std::uint8_t> data, bool fin, std::vector<std::uint8_t>& out);

  std::uint64_t delivered_offset() const { return delivered_; }
  bool finished() const { return fin_offset_ && delivered_ == *fin_offset_; }
  std::uint64_t buffered_bytes() const;

 private:
  std::uint64_t delivered_ = 0;
  std::map<std::uint64_t, std::vector<std::uint8_t>> pending_;
  IntervalSet received_;
  std::optional<std::uint64_t> fin_offset_;
  bool fin_delivered_ = false;
};

}  // namespace satdash::transport
