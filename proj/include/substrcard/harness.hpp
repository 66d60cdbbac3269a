#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "substrcard/estimator.hpp"
#include "substrcard/string_set.hpp"
#include "substrcard/updates.hpp"

namespace substrcard {

/// Number of strings in `data` containing `pattern`.
std::uint64_t ground_truth(const StringSet& data, TextView pattern);
/// Total (possibly overlapping) occurrences of `pattern` across `data`.
std::uint64_t count_occurrences(const StringSet& data, TextView pattern);

/// max(y / y_hat, y_hat / y) with both clamped to at least 1.
double qerror(std::uint64_t y, std::uint64_t y_hat);

/// Nearest-rank percentile of an ascending list; p in (0, 100].
double percentile(const std::vector<double>& sorted, double p);

struct WorkloadEntry {
  Text pattern;
  std::optional<std::uint64_t> truth;
};

enum class Provenance { kGenerated, kLoaded };

struct Workload {
  std::vector<WorkloadEntry> entries;
  Provenance provenance = Provenance::kLoaded;
};

struct WorkloadOptions {
  std::size_t count = 1000;
  std::size_t min_len = 1;
  std::size_t max_len = 8;
  std::uint64_t seed = 42;
};

/// Samples distinct substrings of whitespace-delimited words of `data`, each
/// labeled with its ground truth. Returns fewer than `count` patterns when
/// the data cannot supply that many within a bounded number of draws.
Workload gen_workload(const StringSet& data, const WorkloadOptions& opts);

/// Tab-separated pattern and optional truth, one per line, UTF-8.
void write_workload(std::ostream& out, const Workload& w);
/// Throws std::invalid_argument naming the offending line.
Workload read_workload(std::istream& in);
void save_workload(const Workload& w, const std::filesystem::path& path);
Workload load_workload(const std::filesystem::path& path);

struct EvalRow {
  Text pattern;
  std::uint64_t truth = 0;
  std::uint64_t estimate = 0;
  double qerror = 1.0;
  EstimateKind kind = EstimateKind::kStringLevel;
  double latency_us = 0.0;
};

struct Summary {
  double avg = 0, p50 = 0, p90 = 0, p99 = 0, max = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  Summary qerror;
  Summary latency_us;
  std::uint64_t index_bytes = 0;
  double build_seconds = 0.0;
};

struct EvalOptions {
  // Labels entries that carry no truth; such entries are an error without it.
  const StringSet* data = nullptr;
  unsigned threads = 1;
  double build_seconds = 0.0;
};

EvalReport run_eval(const CardinalityIndex& idx, const Workload& w,
                    const EvalOptions& opts = {});
EvalReport run_eval(const IndexSet& set, const Workload& w, const EvalOptions& opts = {});

void write_report_text(std::ostream& out, const EvalReport& r);
/// One row per pattern.
void write_report_csv(std::ostream& out, const EvalReport& r);

}  // namespace substrcard
