// SPDX-License-Identifier: Apache-2.0
#include "satdash/transport/stream.hpp"

#include <algorithm>
#include <stdexcept>

namespace satdash::transport {

void SendStream::write(std::span<const std::uint8_t> data, bool fin) {
  if (fin_) throw std::logic_error("SendStream::write after FIN");
  buf_.insert(buf_.end(), data.begin(), data.end());
  fin_ = fin;
}

SendStream::Claim SendStream::claim_new(std::uint64_t max_bytes) {
  const std::uint64_t len = std::min(max_bytes, unsent_bytes());
  Claim c{next_, len, false};
  next_ += len;
  if (fin_ && next_ == end_offset() && !fin_sent_) {
    c.fin = true;
    fin_sent_ = true;
  }
  return c;
}

std::vector<std::uint8_t> SendStream::copy(std::uint64_t offset, std::uint64_t length) const {
  if (offset < base_ || offset + length > end_offset()) throw std::out_of_range("SendStream::copy: range released");
  const auto first = buf_.begin() + static_cast<std::ptrdiff_t>(offset - base_);
  return {first, first + static_cast<std::ptrdiff_t>(length)};
}

std::uint64_t SendStream::on_acked(std::uint64_t offset, std::uint64_t length, bool fin) {
  const std::uint64_t added = acked_.insert(offset, offset + length);
  if (fin) fin_acked_ = true;
  release_acked_prefix();
  return added;
}

void SendStream::release_acked_prefix() {
  const std::uint64_t done = acked_.contiguous_end(0);
  const std::uint64_t releasable = done > base_ ? done - base_ : 0;
  // Erase in large batches; erasing the vector front is linear.
  if (releasable >= 64 * 1024 && releasable * 2 >= buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(releasable));
    base_ = done;
  }
}

bool RecvStream::on_frame(std::uint64_t offset, std::span<const std::uint8_t> data, bool fin,
                          std::vector<std::uint8_t>& out) {
  const std::uint64_t end = offset + data.size();
  if (fin) {
    if (fin_offset_ && *fin_offset_ != end) throw std::runtime_error("RecvStream: conflicting final offset");
    fin_offset_ = end;
  }
  if (fin_offset_ && end > *fin_offset_) throw std::runtime_error("RecvStream: data beyond final offset");

  // Store only the sub-ranges not seen before.
  std::uint64_t cur = std::max(offset, delivered_);
  while (cur < end) {
    if (received_.contains(cur)) {
      cur = std::min(end, received_.contiguous_end(cur));
      continue;
    }
    auto next = received_.ranges().upper_bound(cur);
    const std::uint64_t gap_end = next == received_.ranges().end() ? end : std::min(end, next->first);
    const auto* src = data.data() + (cur - offset);
    pending_.emplace(cur, std::vector<std::uint8_t>(src, src + (gap_end - cur)));
    received_.insert(cur, gap_end);
    cur = gap_end;
  }

  for (auto it = pending_.begin(); it != pending_.end() && it->first == delivered_; it = pending_.erase(it)) {
    out.insert(out.end(), it->second.begin(), it->second.end());
    delivered_ += it->second.size();
  }
  received_.erase_below(delivered_);

  if (!fin_delivered_ && finished()) {
    fin_delivered_ = true;
    return true;
  }
  return false;
}

std::uint64_t RecvStream::buffered_bytes() const {
  std::uint64_t n = 0;
  for (const auto& [off, chunk] : pending_) n += chunk.size();
  return n;
}

}  // namespace satdash::transport
