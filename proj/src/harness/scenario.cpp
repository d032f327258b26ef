// SPDX-License-Identifier: Apache-2.0
#include "satdash/harness/scenario.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "satdash/harness/units.hpp"

namespace satdash::harness {
namespace {

using engine::Duration;
using Setter = std::function<void(ScenarioConfig&, std::string_view, const std::filesystem::path&)>;
using Getter = std::function<std::optional<std::string>(const ScenarioConfig&)>;

struct Key {
  std::string name;
  Setter set;
  Getter get;  // nullopt: omitted from the resolved echo
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Duration positive_duration(std::string_view v) {
  const Duration d = parse_duration(v);
  if (d <= Duration::zero()) throw std::invalid_argument("must be positive");
  return d;
}

double positive_rate(std::string_view v) {
  const double r = parse_rate(v);
  if (!(r > 0.0)) throw std::invalid_argument("must be positive");
  return r;
}

template <typename T>
T positive_uint(std::string_view v) {
  const std::uint64_t x = parse_uint(v);
  if (x == 0) throw std::invalid_argument("must be positive");
  if (x > std::numeric_limits<T>::max()) throw std::invalid_argument("too large");
  return static_cast<T>(x);
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected true or false");
}

std::uint64_t rate_bps(double r) { return static_cast<std::uint64_t>(std::llround(r)); }

// Which link specs a key prefix addresses, and the canonical names.
struct LinkRef {
  const char* name;
  netpath::LinkSpec netpath::PathConfig::*spec;
};
constexpr LinkRef kLinks[] = {
    {"backhaul_down", &netpath::PathConfig::backhaul_down},
    {"backhaul_up", &netpath::PathConfig::backhaul_up},
    {"access_down", &netpath::PathConfig::access_down},
    {"access_up", &netpath::PathConfig::access_up},
};

void add_link_keys(std::vector<Key>& keys, const std::string& prefix, std::vector<LinkRef> targets, bool echo) {
  auto each = [targets](ScenarioConfig& c, const std::function<void(netpath::LinkSpec&, const char*)>& f) {
    for (const auto& t : targets) f(c.path.*(t.spec), t.name);
  };
  const LinkRef self = targets.front();
  auto getter = [echo, self](std::function<std::optional<std::string>(const ScenarioConfig&, const netpath::LinkSpec&)>
                                 f) -> Getter {
    if (!echo) return [](const ScenarioConfig&) -> std::optional<std::string> { return std::nullopt; };
    return [f, self](const ScenarioConfig& c) { return f(c, c.path.*(self.spec)); };
  };

  keys.push_back({prefix + ".rate",
                  [each](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                    const double r = positive_rate(v);
                    each(c, [&](netpath::LinkSpec& s, const char* name) {
                      s.rate = netpath::RateTrace::constant(rate_bps(r));
                      c.trace_files.erase(name);
                    });
                  },
                  getter([self](const ScenarioConfig& c, const netpath::LinkSpec& s) -> std::optional<std::string> {
                    if (c.trace_files.count(self.name)) return std::nullopt;
                    return format_rate(static_cast<double>(s.rate.max_rate()));
                  })});
  keys.push_back({prefix + ".trace",
                  [each](ScenarioConfig& c, std::string_view v, const std::filesystem::path& base) {
                    std::filesystem::path p(std::string{v});
                    if (p.is_relative()) p = std::filesystem::absolute(base / p);
                    const auto trace = netpath::RateTrace::load(p.string());
                    each(c, [&](netpath::LinkSpec& s, const char* name) {
                      s.rate = trace;
                      c.trace_files[name] = p.lexically_normal().string();
                    });
                  },
                  getter([self](const ScenarioConfig& c, const netpath::LinkSpec&) -> std::optional<std::string> {
                    auto it = c.trace_files.find(self.name);
                    if (it == c.trace_files.end()) return std::nullopt;
                    return it->second;
                  })});
  keys.push_back({prefix + ".delay",
                  [each](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                    const Duration d = parse_duration(v);
                    if (d < Duration::zero()) throw std::invalid_argument("must not be negative");
                    each(c, [&](netpath::LinkSpec& s, const char*) { s.prop_delay = d; });
                  },
                  getter([](const ScenarioConfig&, const netpath::LinkSpec& s) -> std::optional<std::string> {
                    return format_duration(s.prop_delay);
                  })});
  keys.push_back({prefix + ".queue",
                  [each](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                    const auto q = positive_uint<std::uint32_t>(v);
                    each(c, [&](netpath::LinkSpec& s, const char*) { s.queue_capacity = q; });
                  },
                  getter([](const ScenarioConfig&, const netpath::LinkSpec& s) -> std::optional<std::string> {
                    return std::to_string(s.queue_capacity);
                  })});
  keys.push_back({prefix + ".loss",
                  [each](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                    const double p = parse_real(v);
                    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("must be in [0, 1)");
                    each(c, [&](netpath::LinkSpec& s, const char*) { s.loss_prob = p; });
                  },
                  getter([](const ScenarioConfig&, const netpath::LinkSpec& s) -> std::optional<std::string> {
                    return format_real(s.loss_prob);
                  })});
}

template <typename Field>
Key duration_key(std::string name, Field field) {
  return {std::move(name),
          [field](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) { field(c) = positive_duration(v); },
          [field](const ScenarioConfig& c) -> std::optional<std::string> {
            return format_duration(field(c));
          }};
}

template <typename T, typename Field>
Key count_key(std::string name, Field field) {
  return {std::move(name),
          [field](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) { field(c) = positive_uint<T>(v); },
          [field](const ScenarioConfig& c) -> std::optional<std::string> {
            return std::to_string(field(c));
          }};
}

const std::vector<Key>& key_table() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    // Keys for both directions first: they are applied before the
    // direction-specific ones.
    add_link_keys(k, "backhaul", {kLinks[0], kLinks[1]}, false);
    add_link_keys(k, "access", {kLinks[2], kLinks[3]}, false);
    for (const auto& l : kLinks) add_link_keys(k, l.name, {l}, true);
    k.push_back({"access.rate_jitter",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   const double j = parse_real(v);
                   if (!(j >= 0.0 && j < 1.0)) throw std::invalid_argument("must be in [0, 1)");
                   c.access_rate_jitter = j;
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return format_real(c.access_rate_jitter); }});
    k.push_back(count_key<std::uint32_t>("n_users", [](auto& c) -> auto& { return c.n_users; }));

    k.push_back({"transport",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   auto m = transport::parse_mode(v);
                   if (!m) throw std::invalid_argument("expected tcp or quic");
                   c.transport_mode = *m;
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> {
                   return c.transport_mode == transport::TransportMode::TcpLike ? "tcp" : "quic";
                 }});
    k.push_back({"cc",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   auto a = cc::parse_algorithm(v);
                   if (!a) throw std::invalid_argument("expected newreno, cubic or bbr");
                   c.cc_algorithm = *a;
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> {
                   switch (c.cc_algorithm) {
                     case cc::Algorithm::NewReno: return "newreno";
                     case cc::Algorithm::Cubic: return "cubic";
                     case cc::Algorithm::Bbr: return "bbr";
                   }
                   return std::nullopt;
                 }});
    k.push_back(count_key<std::uint32_t>("initial_cwnd",
                                         [](auto& c) -> auto& { return c.transport.initial_cwnd_packets; }));
    k.push_back({"ssthresh",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   const auto b = parse_bytes(v);
                   if (b == 0) throw std::invalid_argument("must be positive");
                   c.transport.initial_ssthresh_bytes = b;
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> {
                   return std::to_string(c.transport.initial_ssthresh_bytes);
                 }});
    k.push_back(duration_key("idle_timeout", [](auto& c) -> auto& { return c.transport.idle_timeout; }));
    k.push_back(count_key<std::uint32_t>("reordering_threshold",
                                         [](auto& c) -> auto& { return c.transport.reordering_threshold; }));
    k.push_back(count_key<std::uint32_t>("max_tail_loss_probes",
                                         [](auto& c) -> auto& { return c.transport.max_tail_loss_probes; }));
    k.push_back(duration_key("min_rto", [](auto& c) -> auto& { return c.transport.min_rto; }));
    k.push_back(duration_key("delayed_ack_timeout",
                             [](auto& c) -> auto& { return c.transport.delayed_ack_timeout; }));
    k.push_back(duration_key("initial_rtt", [](auto& c) -> auto& { return c.transport.initial_rtt; }));
    k.push_back(count_key<std::uint32_t>("max_payload", [](auto& c) -> auto& { return c.transport.max_payload; }));
    k.push_back(count_key<std::uint32_t>("ack_frequency",
                                         [](auto& c) -> auto& { return c.transport.ack_frequency; }));
    k.push_back({"pace_loss_based",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   c.transport.pace_loss_based = parse_bool(v);
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> {
                   return c.transport.pace_loss_based ? "true" : "false";
                 }});

    k.push_back({"ladder",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   std::vector<double> rates;
                   std::size_t pos = 0;
                   while (pos <= v.size()) {
                     const auto comma = v.find(',', pos);
                     const auto item = trim(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos));
                     rates.push_back(positive_rate(item));
                     if (comma == std::string_view::npos) break;
                     pos = comma + 1;
                   }
                   c.manifest.ladder = dash::Ladder(std::move(rates));
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> {
                   std::string out;
                   for (double r : c.manifest.ladder.bitrates()) out += (out.empty() ? "" : ", ") + format_rate(r);
                   return out;
                 }});
    k.push_back(duration_key("segment_duration", [](auto& c) -> auto& { return c.manifest.segment_duration; }));
    k.push_back(duration_key("content_duration", [](auto& c) -> auto& { return c.manifest.content_duration; }));
    k.push_back({"target_buffer",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   c.fdash.target_buffer_s = engine::to_seconds(positive_duration(v));
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> {
                   return format_duration(engine::from_seconds(c.fdash.target_buffer_s));
                 }});
    k.push_back({"fdash.delta_saturation",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   const double d = parse_real(v);
                   if (!(d > 0.0)) throw std::invalid_argument("must be positive");
                   c.fdash.delta_saturation = d;
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return format_real(c.fdash.delta_saturation); }});
    k.push_back({"fdash.horizon",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   const Duration d = parse_duration(v);
                   if (d < Duration::zero()) throw std::invalid_argument("must not be negative");
                   c.fdash.horizon_s = engine::to_seconds(d);
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> {
                   return format_duration(engine::from_seconds(c.fdash.horizon_s));
                 }});
    k.push_back(duration_key("resume_threshold", [](auto& c) -> auto& { return c.resume_threshold; }));
    k.push_back({"buffer_size",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   const auto b = parse_bytes(v);
                   if (b == 0) throw std::invalid_argument("must be positive");
                   c.buffer_bytes = b;
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return format_bytes(c.buffer_bytes); }});
    k.push_back(duration_key("estimation_window", [](auto& c) -> auto& { return c.estimation_window; }));
    k.push_back({"estimate_alpha",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   const double a = parse_real(v);
                   if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("must be in (0, 1]");
                   c.estimate_alpha = a;
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return format_real(c.estimate_alpha); }});
    k.push_back(duration_key("session_limit", [](auto& c) -> auto& { return c.session_limit; }));
    k.push_back({"latency_warmup",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   const Duration d = parse_duration(v);
                   if (d < Duration::zero()) throw std::invalid_argument("must not be negative");
                   c.latency_warmup = d;
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return format_duration(c.latency_warmup); }});

    k.push_back(count_key<std::uint32_t>("run_count", [](auto& c) -> auto& { return c.run_count; }));
    k.push_back({"base_seed",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) { c.base_seed = parse_uint(v); },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return std::to_string(c.base_seed); }});
    k.push_back({"output_dir",
                 [](ScenarioConfig& c, std::string_view v, const std::filesystem::path&) {
                   if (v.empty()) throw std::invalid_argument("must not be empty");
                   c.output_dir = std::string(v);
                 },
                 [](const ScenarioConfig& c) -> std::optional<std::string> { return c.output_dir; }});
    return k;
  }();
  return table;
}

void validate_config(const ScenarioConfig& cfg, const std::string& source) {
  try {
    cfg.path.validate();
    cfg.transport.validate();
    cfg.client_config().validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(source, 0, e.what());
  }
  if (cfg.n_users == 0) throw ScenarioError(source, 0, "n_users must be positive");
  if (cfg.run_count == 0) throw ScenarioError(source, 0, "run_count must be positive");
  if (cfg.session_limit <= Duration::zero()) throw ScenarioError(source, 0, "session_limit must be positive");
}

}  // namespace

ScenarioError::ScenarioError(std::string source, std::size_t line, const std::string& msg)
    : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + msg), line_(line) {}

netpath::PathConfig ScenarioConfig::default_path() {
  using namespace std::chrono_literals;
  netpath::PathConfig p;
  p.backhaul_down = {netpath::RateTrace::constant(20'000'000), 20ms, 1000, 0.0};
  p.backhaul_up = {netpath::RateTrace::constant(10'000'000), 20ms, 1000, 0.0};
  p.access_down = {netpath::RateTrace::constant(50'000'000), 1ms, 1000, 0.0};
  p.access_up = {netpath::RateTrace::constant(20'000'000), 1ms, 1000, 0.0};
  return p;
}

void ScenarioConfig::validate() const { validate_config(*this, "scenario"); }

dash::ClientConfig ScenarioConfig::client_config() const {
  dash::ClientConfig c;
  c.manifest = manifest;
  c.fdash = fdash;
  c.resume_threshold = resume_threshold;
  c.max_buffer_bytes = buffer_bytes;
  c.estimation_granularity = estimation_window;
  c.estimate_alpha = estimate_alpha;
  return c;
}

cc::CcParams ScenarioConfig::cc_params() const {
  cc::CcParams p;
  p.mss = transport.max_payload;
  p.initial_cwnd_packets = transport.initial_cwnd_packets;
  p.initial_ssthresh = transport.initial_ssthresh_bytes;
  p.initial_rtt = transport.initial_rtt;
  p.pace_loss_based = transport.pace_loss_based;
  return p;
}

ScenarioConfig parse_scenario(std::istream& in, const std::string& source, const std::filesystem::path& base_dir) {
  struct Entry {
    std::size_t line;
    const Key* key;
    std::string value;
  };
  const auto& table = key_table();
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    std::string_view text = raw;
    if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ScenarioError(source, line, "expected 'key = value'");
    const std::string name(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (name.empty()) throw ScenarioError(source, line, "missing key before '='");
    const Key* key = nullptr;
    for (const auto& k : table) {
      if (k.name == name) key = &k;
    }
    if (!key) throw ScenarioError(source, line, "unknown key '" + name + "'");
    if (!seen.insert(name).second) throw ScenarioError(source, line, "duplicate key '" + name + "'");
    if (value.empty()) throw ScenarioError(source, line, "missing value for '" + name + "'");
    entries.push_back({line, key, value});
  }
  // Table order puts both-direction link keys first.
  std::stable_sort(entries.begin(), entries.end(),
                   [&](const Entry& a, const Entry& b) { return a.key < b.key; });

  ScenarioConfig cfg;
  for (const auto& e : entries) {
    try {
      e.key->set(cfg, e.value, base_dir);
    } catch (const std::exception& ex) {
      throw ScenarioError(source, e.line, e.key->name + ": " + ex.what());
    }
  }
  validate_config(cfg, source);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ScenarioError(file.string(), 0, "cannot open scenario file");
  return parse_scenario(in, file.string(), file.parent_path());
}

std::string to_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  for (const auto& k : key_table()) {
    if (auto v = k.get(cfg)) out << k.name << " = " << *v << "\n";
  }
  return out.str();
}

std::vector<std::string> scenario_keys() {
  std::vector<std::string> names;
  for (const auto& k : key_table()) names.push_back(k.name);
  return names;
}

}  // namespace satdash::harness
