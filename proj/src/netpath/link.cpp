// SPDX-License-Identifier: Apache-2.0
#include "satdash/netpath/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace satdash::netpath {

namespace {

constexpr std::uint64_t kNsPerSec = 1'000'000'000ULL;

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a / b + (a % b != 0 ? 1 : 0); }

}  // namespace

RateTrace::RateTrace(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("RateTrace: no points");
  if (points_.front().start != engine::kTimeZero) throw std::invalid_argument("RateTrace: first point must be at t=0");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].rate_bps == 0) throw std::invalid_argument("RateTrace: rate must be positive");
    if (i > 0 && points_[i].start <= points_[i - 1].start) {
      throw std::invalid_argument("RateTrace: times must be strictly increasing");
    }
  }
}

RateTrace RateTrace::constant(std::uint64_t rate_bps) { return RateTrace({Point{engine::kTimeZero, rate_bps}}); }

RateTrace RateTrace::parse(std::istream& in) {
  std::vector<Point> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double t_s = 0;
    double rate = 0;
    if (!(ls >> t_s)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw TraceFormatError("rate trace line " + std::to_string(lineno) + ": expected '<time_s> <rate_bps>'");
    }
    std::string extra;
    if (!(ls >> rate) || (ls >> extra)) {
      throw TraceFormatError("rate trace line " + std::to_string(lineno) + ": expected '<time_s> <rate_bps>'");
    }
    if (t_s < 0 || !(rate > 0)) {
      throw TraceFormatError("rate trace line " + std::to_string(lineno) + ": time must be >= 0 and rate > 0");
    }
    const SimTime start{engine::from_seconds(t_s)};
    if (!pts.empty() && start <= pts.back().start) {
      throw TraceFormatError("rate trace line " + std::to_string(lineno) + ": times must be strictly increasing");
    }
    pts.push_back(Point{start, static_cast<std::uint64_t>(std::llround(rate))});
  }
  if (pts.empty()) throw TraceFormatError("rate trace: no points");
  if (pts.front().start != engine::kTimeZero) throw TraceFormatError("rate trace: first point must be at time 0");
  try {
    return RateTrace(std::move(pts));
  } catch (const std::invalid_argument& e) {
    throw TraceFormatError(e.what());
  }
}

RateTrace RateTrace::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot open rate trace '" + path + "'");
  return parse(in);
}

std::uint64_t RateTrace::rate_at(SimTime t) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](SimTime v, const Point& p) { return v < p.start; });
  return std::prev(it)->rate_bps;
}

std::uint64_t RateTrace::max_rate() const {
  std::uint64_t m = 0;
  for (const auto& p : points_) m = std::max(m, p.rate_bps);
  return m;
}

SimTime RateTrace::transmit_finish(SimTime start, std::uint64_t bits) const {
  // Work in bit-nanoseconds so that a constant-rate link is exact.
  std::uint64_t remaining = bits * kNsPerSec;
  auto it = std::upper_bound(points_.begin(), points_.end(), start,
                             [](SimTime v, const Point& p) { return v < p.start; });
  --it;
  SimTime t = start;
  while (true) {
    const std::uint64_t rate = it->rate_bps;
    const auto next = std::next(it);
    const std::uint64_t need_ns = ceil_div(remaining, rate);
    if (next == points_.end() || t + Duration{static_cast<std::int64_t>(need_ns)} <= next->start) {
      return t + Duration{static_cast<std::int64_t>(need_ns)};
    }
    const auto span = static_cast<std::uint64_t>((next->start - t).count());
    remaining -= rate * span;
    t = next->start;
    it = next;
  }
}

void LinkSpec::validate() const {
  if (rate.points().empty()) throw std::invalid_argument("LinkSpec: empty rate trace");
  for (const auto& p : rate.points()) {
    if (p.rate_bps == 0) throw std::invalid_argument("LinkSpec: rate must be > 0");
  }
  if (prop_delay < Duration::zero()) throw std::invalid_argument("LinkSpec: negative propagation delay");
  if (queue_capacity < 1) throw std::invalid_argument("LinkSpec: queue_capacity must be >= 1");
  if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) throw std::invalid_argument("LinkSpec: loss_prob must be in [0,1]");
}

Link::Link(engine::Simulator& sim, LinkSpec spec, engine::SeededRng rng, std::string name)
    : sim_(sim), spec_(std::move(spec)), rng_(rng), name_(std::move(name)) {
  spec_.validate();
}

std::size_t Link::queue_length() {
  const SimTime now = sim_.now();
  while (!finish_times_.empty() && finish_times_.front() <= now) finish_times_.pop_front();
  return finish_times_.size();
}

TransmitOutcome Link::transmit(Packet pkt) {
  if (pkt.size_bytes == 0) throw std::invalid_argument("Link::transmit: empty packet");
  const SimTime now = sim_.now();
  ++stats_.offered;
  stats_.offered_bytes += pkt.size_bytes;

  if (queue_length() >= spec_.queue_capacity) {
    ++stats_.dropped_queue;
    return {Disposition::DroppedQueueFull, std::nullopt};
  }
  if (rng_.bernoulli(spec_.loss_prob)) {
    ++stats_.dropped_loss;
    return {Disposition::DroppedLoss, std::nullopt};
  }
  if (drop_filter_ && drop_filter_(pkt)) {
    ++stats_.dropped_filter;
    return {Disposition::DroppedFilter, std::nullopt};
  }

  const SimTime start = std::max(now, busy_until_);
  const SimTime finish = spec_.rate.transmit_finish(start, std::uint64_t{pkt.size_bytes} * 8);
  busy_until_ = finish;
  finish_times_.push_back(finish);
  const SimTime arrival = finish + spec_.prop_delay;
  pkt.enqueue_time = now;
  sim_.schedule(arrival, [this, p = std::move(pkt)]() mutable {
    ++stats_.delivered;
    stats_.delivered_bytes += p.size_bytes;
    if (receiver_) receiver_(std::move(p));
  });
  return {Disposition::Queued, arrival};
}

}  // namespace satdash::netpath
