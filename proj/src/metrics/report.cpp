// SPDX-License-Identifier: Apache-2.0
#include "satdash/metrics/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace satdash::metrics {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string cell_label(const std::string& scheme) {
  std::string s;
  for (char c : scheme) s += c == '-' ? '_' : c;
  return s;
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : "nan"; }

std::string per_run_csv(const CellReport& cell) {
  std::string out =
      "run,seed,user,playback_s,interruption_s,startup_s,residual_s,stall_count,latency_median_ms,latency_mean_ms,"
      "throughput_bps,bitrate_bps,app_bytes,error\n";
  for (const auto& r : cell.runs) {
    if (!r.ok()) {
      out += std::to_string(r.run) + "," + std::to_string(r.seed) + ",,,,,,,,,,,,\"" + *r.error + "\"\n";
      continue;
    }
    for (std::size_t u = 0; u < r.users.size(); ++u) {
      const auto& m = r.users[u];
      out += std::to_string(r.run) + "," + std::to_string(r.seed) + "," + std::to_string(u) + "," +
             format_number(m.playback_s()) + "," + format_number(m.interruption_s()) + "," +
             format_number(m.startup_s()) + "," + format_number(engine::to_seconds(m.residual)) + "," +
             std::to_string(m.stall_count) + "," + format_number(m.latency_median_ms) + "," +
             format_number(m.latency_mean_ms) + "," + format_number(m.mean_throughput_bps) + "," +
             format_number(m.avg_playback_bitrate_bps) + "," + std::to_string(m.app_bytes) + ",\n";
    }
  }
  return out;
}

std::string summary_csv(const std::vector<CellReport>& cells) {
  std::string out =
      "scheme,n_users,runs,failed_runs,median_interruption_s,mean_total_stalls,median_latency_ms,jain_throughput,"
      "jain_bitrate,jain_playback_duration,median_playback_s,median_bitrate_bps,median_throughput_bps,"
      "mean_startup_s\n";
  for (const auto& c : cells) {
    const auto& s = c.summary;
    out += c.scheme + "," + std::to_string(c.n_users) + "," + std::to_string(s.runs) + "," +
           std::to_string(s.failed_runs) + "," + format_number(s.median_interruption_s) + "," +
           format_number(s.mean_total_stalls) + "," + format_number(s.median_latency_ms) + "," +
           format_number(s.jain_throughput) + "," + format_number(s.jain_bitrate) + "," +
           format_number(s.jain_playback_duration) + "," + format_number(s.median_playback_s) + "," +
           format_number(s.median_bitrate_bps) + "," + format_number(s.median_throughput_bps) + "," +
           format_number(s.mean_startup_s) + "\n";
  }
  return out;
}

std::string summary_json(const std::vector<CellReport>& cells) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    const auto& s = c.summary;
    nlohmann::ordered_json j;
    j["scheme"] = c.scheme;
    j["n_users"] = c.n_users;
    j["runs"] = s.runs;
    j["failed_runs"] = s.failed_runs;
    j["sessions"] = s.sessions;
    j["median_interruption_s"] = s.median_interruption_s;
    j["mean_total_stalls"] = s.mean_total_stalls;
    j["mean_stalls_per_session"] = s.mean_stalls_per_session;
    j["median_latency_ms"] = opt(s.median_latency_ms);
    j["mean_latency_ms"] = opt(s.mean_latency_ms);
    j["median_playback_s"] = s.median_playback_s;
    j["mean_playback_s"] = s.mean_playback_s;
    j["median_bitrate_bps"] = s.median_bitrate_bps;
    j["median_throughput_bps"] = s.median_throughput_bps;
    j["mean_startup_s"] = s.mean_startup_s;
    j["jain_throughput"] = opt(s.jain_throughput);
    j["jain_bitrate"] = opt(s.jain_bitrate);
    j["jain_playback_duration"] = opt(s.jain_playback_duration);
    const auto& q = s.playback_quartiles;
    j["playback_quartiles"] = {q.min, q.q1, q.median, q.q3, q.max};
    doc.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string cdf_csv(const Cdf& cdf) {
  std::string out = "value,cumulative_probability\n";
  for (const auto& [v, p] : cdf) out += format_number(v) + "," + format_number(p) + "\n";
  return out;
}

std::string boxplot_csv(const std::vector<CellReport>& cells) {
  std::string out = "scheme,min,q1,median,q3,max\n";
  for (const auto& c : cells) {
    const auto& q = c.summary.playback_quartiles;
    out += c.scheme + "," + format_number(q.min) + "," + format_number(q.q1) + "," + format_number(q.median) + "," +
           format_number(q.q3) + "," + format_number(q.max) + "\n";
  }
  return out;
}

void write_reports(const std::filesystem::path& dir, const std::vector<CellReport>& cells) {
  std::filesystem::create_directories(dir / "cdf");
  write_file(dir / "summary.csv", summary_csv(cells));
  write_file(dir / "summary.json", summary_json(cells));
  write_file(dir / "playback_duration_boxplot.csv", boxplot_csv(cells));
  for (const auto& c : cells) {
    const std::string label = cell_label(c.scheme);
    write_file(dir / ("per_run_" + label + ".csv"), per_run_csv(c));
    const std::pair<const char*, const Cdf*> cdfs[] = {
        {"bitrate", &c.summary.bitrate_cdf},       {"throughput", &c.summary.throughput_cdf},
        {"playback_duration", &c.summary.playback_cdf}, {"interruption", &c.summary.interruption_cdf},
        {"latency", &c.summary.latency_cdf},
    };
    for (const auto& [metric, cdf] : cdfs) write_file(dir / "cdf" / (std::string(metric) + "_" + label + ".csv"), cdf_csv(*cdf));
  }
}

}  // namespace satdash::metrics
