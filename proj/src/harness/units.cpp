// SPDX-License-Identifier: Apache-2.0
#include "satdash/harness/units.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace satdash::harness {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Splits "12.5ms" into 12.5 and "ms".
std::pair<double, std::string_view> number_and_suffix(std::string_view text, const char* what) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr == text.data())
    throw std::invalid_argument("expected a " + std::string(what) + ", got '" + std::string(text) + "'");
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
  return {v, trim(std::string_view(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr)))};
}

template <std::size_t N>
double unit_scale(std::string_view suffix, const std::pair<const char*, double> (&units)[N], const char* what,
                  bool case_sensitive) {
  const std::string key = case_sensitive ? std::string(suffix) : lower(suffix);
  for (const auto& [name, scale] : units) {
    if (key == name) return scale;
  }
  throw std::invalid_argument("unknown " + std::string(what) + " unit '" + std::string(suffix) + "'");
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

engine::Duration parse_duration(std::string_view text) {
  static constexpr std::pair<const char*, double> kUnits[] = {
      {"", 1e9}, {"ns", 1.0}, {"us", 1e3}, {"ms", 1e6}, {"s", 1e9}, {"min", 60e9}, {"h", 3600e9}};
  const auto [v, suffix] = number_and_suffix(text, "duration");
  const double ns = v * unit_scale(suffix, kUnits, "duration", true);
  if (std::abs(ns) > 9.2e18) throw std::invalid_argument("duration out of range");
  return engine::Duration{std::llround(ns)};
}

double parse_rate(std::string_view text) {
  static constexpr std::pair<const char*, double> kUnits[] = {
      {"", 1.0},         {"bps", 1.0},     {"bit/s", 1.0},  {"k", 1e3},       {"kbps", 1e3},
      {"kbit/s", 1e3},   {"m", 1e6},       {"mbps", 1e6},   {"mbit/s", 1e6},  {"g", 1e9},
      {"gbps", 1e9},     {"gbit/s", 1e9}};
  const auto [v, suffix] = number_and_suffix(text, "rate");
  return v * unit_scale(suffix, kUnits, "rate", false);
}

std::uint64_t parse_bytes(std::string_view text) {
  static constexpr std::pair<const char*, double> kUnits[] = {
      {"", 1.0},   {"b", 1.0},      {"kb", 1e3}, {"kib", 1024.0}, {"mb", 1e6},
      {"mib", 1048576.0}, {"gb", 1e9}, {"gib", 1073741824.0}};
  const auto [v, suffix] = number_and_suffix(text, "size");
  const double bytes = v * unit_scale(suffix, kUnits, "size", false);
  if (bytes < 0.0 || bytes > 1.8e19) throw std::invalid_argument("size out of range");
  if (bytes != std::floor(bytes)) throw std::invalid_argument("size must be a whole number of bytes");
  return static_cast<std::uint64_t>(bytes);
}

double parse_real(std::string_view text) {
  const auto [v, suffix] = number_and_suffix(text, "number");
  if (!suffix.empty()) throw std::invalid_argument("unexpected text after number: '" + std::string(suffix) + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

std::string format_duration(engine::Duration d) {
  const std::int64_t ns = d.count();
  static constexpr std::pair<std::int64_t, const char*> kUnits[] = {
      {1'000'000'000, "s"}, {1'000'000, "ms"}, {1'000, "us"}};
  for (const auto& [scale, name] : kUnits) {
    if (ns % scale == 0) return std::to_string(ns / scale) + name;
  }
  return std::to_string(ns) + "ns";
}

std::string format_rate(double bps) {
  if (bps == std::floor(bps) && bps < 9e18) {
    const auto v = static_cast<std::uint64_t>(bps);
    if (v != 0 && v % 1'000'000'000 == 0) return std::to_string(v / 1'000'000'000) + "Gbps";
    if (v != 0 && v % 1'000'000 == 0) return std::to_string(v / 1'000'000) + "Mbps";
    if (v != 0 && v % 1'000 == 0) return std::to_string(v / 1'000) + "kbps";
  }
  return shortest(bps) + "bps";
}

std::string format_bytes(std::uint64_t bytes) {
  if (bytes != 0 && bytes % (1ull << 30) == 0) return std::to_string(bytes >> 30) + "GiB";
  if (bytes != 0 && bytes % (1ull << 20) == 0) return std::to_string(bytes >> 20) + "MiB";
  if (bytes != 0 && bytes % (1ull << 10) == 0) return std::to_string(bytes >> 10) + "KiB";
  return std::to_string(bytes) + "B";
}

std::string format_real(double v) { return shortest(v); }

}  // namespace satdash::harness
