#pragma once

// Timing harness, CSV records, and the COST calculator: the smallest worker
// count whose best runtime strictly beats the single-threaded baseline.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace actorgraph {

struct BenchRecord {
  std::string algorithm;  // pagerank | labelprop
  std::string variant;    // a VariantId name, "serial", or an external-system tag
  std::string graph;
  std::size_t workers = 1;
  double runtime_s = 0.0;
  std::size_t iterations_run = 0;
  std::size_t repetition = 0;
  std::string status = "ok";  // "ok" or "failed: <reason>"

  bool ok() const { return status == "ok"; }

  auto key() const { return std::tie(algorithm, variant, graph, workers, repetition, runtime_s, iterations_run, status); }
};

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  std::string algorithm;
  std::string variant;
  std::string graph;
  std::size_t workers = 1;
  std::size_t repetitions = 3;
  std::optional<double> time_limit_s;
};

/// Times `compute(state)` for each repetition, where `state` is a fresh
/// `prepare()` result built outside the clock. compute returns the number of
/// iterations it ran. Exceptions and over-limit runs become failed records.
template <class Prepare, class Compute>
std::vector<BenchRecord> time_run(const BenchConfig& cfg, Prepare&& prepare, Compute&& compute) {
  if (cfg.repetitions == 0) throw std::invalid_argument("time_run: need at least one repetition");
  std::vector<BenchRecord> out;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    BenchRecord r{cfg.algorithm, cfg.variant, cfg.graph, cfg.workers, 0.0, 0, rep, "ok"};
    try {
      auto state = prepare();
      const auto t0 = std::chrono::steady_clock::now();
      r.iterations_run = compute(state);
      const auto t1 = std::chrono::steady_clock::now();
      r.runtime_s = std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
      if (cfg.time_limit_s && r.runtime_s > *cfg.time_limit_s)
        throw TimeoutError("exceeded time limit of " + std::to_string(*cfg.time_limit_s) + " s");
    } catch (const std::exception& e) {
      r.status = std::string("failed: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct ScalePoint {
  std::size_t workers = 0;
  double runtime_s = 0.0;

  friend bool operator==(const ScalePoint&, const ScalePoint&) = default;
};

/// Minimum successful runtime per worker count, over all variants and
/// repetitions, ascending by worker count.
inline std::vector<ScalePoint> best_per_scale(const std::vector<BenchRecord>& records) {
  std::map<std::size_t, double> best;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    auto [it, inserted] = best.emplace(r.workers, r.runtime_s);
    if (!inserted) it->second = std::min(it->second, r.runtime_s);
  }
  std::vector<ScalePoint> out;
  for (auto [w, t] : best) out.push_back({w, t});
  return out;
}

struct CostReport {
  std::string algorithm;
  std::string graph;
  double serial_s = 0.0;
  std::optional<std::size_t> cost;  // nullopt: no configuration outperforms (COST = infinity)
  std::vector<ScalePoint> table;
};

inline CostReport compute_cost(double serial_s, std::vector<ScalePoint> table) {
  if (!(serial_s > 0.0)) throw std::invalid_argument("compute_cost: serial runtime must be positive");
  if (table.empty()) throw std::invalid_argument("compute_cost: empty scaling table");
  std::sort(table.begin(), table.end(), [](const ScalePoint& x, const ScalePoint& y) { return x.workers < y.workers; });
  CostReport report;
  report.serial_s = serial_s;
  for (const auto& p : table) {
    if (p.runtime_s < serial_s) {
      report.cost = p.workers;
      break;
    }
  }
  report.table = std::move(table);
  return report;
}

inline std::string cost_string(const CostReport& r) { return r.cost ? std::to_string(*r.cost) : "inf"; }

inline std::string format_cost_report(const CostReport& r) {
  std::ostringstream os;
  os << "algorithm " << r.algorithm << " graph " << r.graph << "\n";
  os << "  serial  " << r.serial_s << " s\n";
  for (const auto& p : r.table)
    os << "  workers " << p.workers << ": " << p.runtime_s << " s" << (p.runtime_s < r.serial_s ? "  (beats serial)" : "")
       << "\n";
  os << "COST = " << (r.cost ? std::to_string(*r.cost) : std::string("∞")) << "\n";
  return os.str();
}

inline nlohmann::json to_json(const CostReport& r) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& p : r.table) table.push_back({{"workers", p.workers}, {"runtime_s", p.runtime_s}});
  nlohmann::json j = {{"algorithm", r.algorithm}, {"graph", r.graph}, {"serial_s", r.serial_s}, {"table", table}};
  if (r.cost)
    j["cost"] = *r.cost;
  else
    j["cost"] = "inf";
  return j;
}

inline constexpr const char* kCsvHeader = "algorithm,variant,graph,workers,runtime_s,iterations_run,repetition,status";

namespace detail {

inline std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

inline std::string format_seconds(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", s);
  return buf;
}

}  // namespace detail

/// CSV text with rows sorted by every field, so equal record sets give
/// byte-identical output.
inline std::string to_csv(std::vector<BenchRecord> records) {
  std::sort(records.begin(), records.end(), [](const BenchRecord& x, const BenchRecord& y) { return x.key() < y.key(); });
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) {
    out += detail::csv_field(r.algorithm) + ',' + detail::csv_field(r.variant) + ',' + detail::csv_field(r.graph) + ',' +
           std::to_string(r.workers) + ',' + detail::format_seconds(r.runtime_s) + ',' +
           std::to_string(r.iterations_run) + ',' + std::to_string(r.repetition) + ',' + detail::csv_field(r.status) +
           '\n';
  }
  return out;
}

inline void emit_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << to_csv(records);
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<BenchRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw CsvError("row 1: missing header");
  ++row;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw CsvError("row 1: unexpected header '" + line + "'");

  std::vector<BenchRecord> records;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    auto fail = [&](const std::string& why) { return CsvError("row " + std::to_string(row) + ": " + why); };
    if (f.size() != 8) throw fail("expected 8 fields, got " + std::to_string(f.size()));
    auto to_size = [&](const std::string& s, const char* name) {
      std::size_t pos = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(s, &pos);
      } catch (const std::exception&) {
        throw fail(std::string("bad ") + name + " '" + s + "'");
      }
      if (pos != s.size() || s.front() == '-') throw fail(std::string("bad ") + name + " '" + s + "'");
      return static_cast<std::size_t>(v);
    };
    BenchRecord r;
    r.algorithm = f[0];
    r.variant = f[1];
    r.graph = f[2];
    r.workers = to_size(f[3], "workers");
    try {
      std::size_t pos = 0;
      r.runtime_s = std::stod(f[4], &pos);
      if (pos != f[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw fail("bad runtime_s '" + f[4] + "'");
    }
    r.iterations_run = to_size(f[5], "iterations_run");
    r.repetition = to_size(f[6], "repetition");
    r.status = f[7];
    if (r.algorithm != "pagerank" && r.algorithm != "labelprop") throw fail("unknown algorithm '" + r.algorithm + "'");
    if (r.workers == 0) throw fail("workers must be at least 1");
    if (r.ok() && !(r.runtime_s > 0.0)) throw fail("runtime_s must be positive");
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<BenchRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

/// One COST report per (algorithm, graph) that has both successful serial
/// records and successful parallel records. Serial time is the best serial
/// repetition.
inline std::vector<CostReport> cost_from_records(const std::vector<BenchRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::pair<std::optional<double>, std::vector<BenchRecord>>> groups;
  for (const auto& r : records) {
    auto& [serial, parallel] = groups[{r.algorithm, r.graph}];
    if (!r.ok()) continue;
    if (r.variant == "serial")
      serial = serial ? std::min(*serial, r.runtime_s) : r.runtime_s;
    else
      parallel.push_back(r);
  }
  std::vector<CostReport> out;
  for (const auto& [key, group] : groups) {
    const auto& [serial, parallel] = group;
    if (!serial || parallel.empty()) continue;
    auto report = compute_cost(*serial, best_per_scale(parallel));
    report.algorithm = key.first;
    report.graph = key.second;
    out.push_back(std::move(report));
  }
  return out;
}

/// Per-configuration aggregate over successful repetitions.
struct BenchSummary {
  std::string algorithm, variant, graph;
  std::size_t workers = 0;
  std::size_t repetitions = 0;
  double min_s = 0.0, mean_s = 0.0, stddev_s = 0.0;
};

inline std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records) {
  std::map<std::tuple<std::string, std::string, std::string, std::size_t>, std::vector<double>> groups;
  for (const auto& r : records)
    if (r.ok()) groups[{r.algorithm, r.variant, r.graph, r.workers}].push_back(r.runtime_s);
  std::vector<BenchSummary> out;
  for (const auto& [key, times] : groups) {
    BenchSummary s{std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), times.size()};
    s.min_s = *std::min_element(times.begin(), times.end());
    double sum = 0.0;
    for (double t : times) sum += t;
    s.mean_s = sum / static_cast<double>(times.size());
    double sq = 0.0;
    for (double t : times) sq += (t - s.mean_s) * (t - s.mean_s);
    s.stddev_s = times.size() > 1 ? std::sqrt(sq / static_cast<double>(times.size() - 1)) : 0.0;
    out.push_back(s);
  }
  return out;
}

inline std::string summary_csv(const std::vector<BenchSummary>& rows) {
  std::string out = "algorithm,variant,graph,workers,repetitions,min_s,mean_s,stddev_s\n";
  for (const auto& s : rows)
    out += s.algorithm + ',' + s.variant + ',' + s.graph + ',' + std::to_string(s.workers) + ',' +
           std::to_string(s.repetitions) + ',' + detail::format_seconds(s.min_s) + ',' + detail::format_seconds(s.mean_s) +
           ',' + detail::format_seconds(s.stddev_s) + '\n';
  return out;
}

}  // namespace actorgraph
