#include "substrcard/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "substrcard/serialize.hpp"

namespace substrcard {

std::uint64_t ground_truth(const StringSet& data, TextView pattern) {
  std::uint64_t n = 0;
  for (const Text& s : data)
    if (TextView(s).find(pattern) != TextView::npos) ++n;
  return n;
}

std::uint64_t count_occurrences(const StringSet& data, TextView pattern) {
  std::uint64_t n = 0;
  for (const Text& s : data) {
    const TextView v(s);
    for (std::size_t at = v.find(pattern); at != TextView::npos; at = v.find(pattern, at + 1))
      ++n;
  }
  return n;
}

double qerror(std::uint64_t y, std::uint64_t y_hat) {
  const double a = static_cast<double>(std::max<std::uint64_t>(y, 1));
  const double b = static_cast<double>(std::max<std::uint64_t>(y_hat, 1));
  return std::max(a / b, b / a);
}

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("percentile out of range");
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

namespace {

bool is_space(Char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

std::vector<TextView> words_of(const StringSet& data) {
  std::vector<TextView> words;
  for (const Text& s : data) {
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && is_space(s[i])) ++i;
      std::size_t j = i;
      while (j < s.size() && !is_space(s[j])) ++j;
      if (j > i) words.emplace_back(s.data() + i, j - i);
      i = j;
    }
  }
  return words;
}

Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  double total = 0.0;
  for (double x : v) total += x;
  s.avg = total / static_cast<double>(v.size());
  s.p50 = percentile(v, 50);
  s.p90 = percentile(v, 90);
  s.p99 = percentile(v, 99);
  s.max = v.back();
  return s;
}

using Estimator = std::function<Estimate(TextView)>;

EvalReport evaluate_all(const Estimator& est, const Workload& w, const EvalOptions& opts) {
  EvalReport report;
  report.build_seconds = opts.build_seconds;
  report.rows.resize(w.entries.size());
  for (std::size_t k = 0; k < w.entries.size(); ++k) {
    const WorkloadEntry& e = w.entries[k];
    validate_pattern(e.pattern);
    if (!e.truth && opts.data == nullptr)
      throw std::invalid_argument("workload entry " + std::to_string(k + 1) +
                                  " has no truth and no dataset was given");
    report.rows[k].pattern = e.pattern;
    report.rows[k].truth = e.truth ? *e.truth : ground_truth(*opts.data, e.pattern);
  }

  auto work = [&](std::size_t from, std::size_t step) {
    for (std::size_t k = from; k < report.rows.size(); k += step) {
      EvalRow& row = report.rows[k];
      const auto t0 = std::chrono::steady_clock::now();
      const Estimate e = est(row.pattern);
      const auto t1 = std::chrono::steady_clock::now();
      row.estimate = e.value;
      row.kind = e.kind;
      row.qerror = qerror(row.truth, row.estimate);
      row.latency_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    }
  };
  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& t : pool) t.join();
  }

  std::vector<double> q, lat;
  for (const EvalRow& row : report.rows) {
    q.push_back(row.qerror);
    lat.push_back(row.latency_us);
  }
  report.qerror = summarize(std::move(q));
  report.latency_us = summarize(std::move(lat));
  return report;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

const char* kind_name(EstimateKind k) {
  return k == EstimateKind::kStringLevel ? "string" : "occurrence";
}

}  // namespace

Workload gen_workload(const StringSet& data, const WorkloadOptions& opts) {
  if (data.empty()) throw std::invalid_argument("cannot sample a workload from empty data");
  if (opts.min_len == 0 || opts.min_len > opts.max_len)
    throw std::invalid_argument("bad pattern length range");

  Workload w;
  w.provenance = Provenance::kGenerated;
  std::vector<TextView> words = words_of(data);
  std::erase_if(words, [&](TextView v) { return v.size() < opts.min_len; });
  if (words.empty()) return w;

  std::mt19937_64 rng(opts.seed);
  std::unordered_set<Text> seen;
  const std::size_t max_draws = opts.count * 50 + 1000;
  for (std::size_t draw = 0; draw < max_draws && w.entries.size() < opts.count; ++draw) {
    const TextView word =
        words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)];
    const std::size_t hi = std::min(opts.max_len, word.size());
    const std::size_t len = std::uniform_int_distribution<std::size_t>(opts.min_len, hi)(rng);
    const std::size_t at =
        std::uniform_int_distribution<std::size_t>(0, word.size() - len)(rng);
    Text p(word.substr(at, len));
    if (!seen.insert(p).second) continue;
    w.entries.push_back({p, std::nullopt});
  }
  for (WorkloadEntry& e : w.entries) e.truth = ground_truth(data, e.pattern);
  return w;
}

void write_workload(std::ostream& out, const Workload& w) {
  for (const WorkloadEntry& e : w.entries) {
    out << encode_utf8(e.pattern);
    if (e.truth) out << '\t' << *e.truth;
    out << '\n';
  }
}

Workload read_workload(std::istream& in) {
  Workload w;
  w.provenance = Provenance::kLoaded;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fail = [&](const std::string& why) {
      return std::invalid_argument("workload line " + std::to_string(line_no) + ": " + why);
    };
    const std::size_t tab = line.find('\t');
    WorkloadEntry e;
    try {
      e.pattern = decode_utf8(std::string_view(line).substr(0, tab));
      validate_pattern(e.pattern);
    } catch (const std::invalid_argument& err) {
      throw fail(err.what());
    }
    if (tab != std::string::npos) {
      const std::string_view field = std::string_view(line).substr(tab + 1);
      std::uint64_t v = 0;
      const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || end != field.data() + field.size())
        throw fail("truth is not a non-negative integer");
      e.truth = v;
    }
    w.entries.push_back(std::move(e));
  }
  return w;
}

void save_workload(const Workload& w, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write workload " + path.string());
  write_workload(out, w);
}

Workload load_workload(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open workload " + path.string());
  return read_workload(in);
}

EvalReport run_eval(const CardinalityIndex& idx, const Workload& w, const EvalOptions& opts) {
  EvalReport r = evaluate_all([&](TextView p) { return estimate(idx, p); }, w, opts);
  r.index_bytes = serialize_index(idx).size();
  return r;
}

EvalReport run_eval(const IndexSet& set, const Workload& w, const EvalOptions& opts) {
  EvalReport r = evaluate_all([&](TextView p) { return set.estimate(p); }, w, opts);
  for (std::size_t k = 0; k < set.part_count(); ++k)
    r.index_bytes += serialize_index(set.part(k).index).size();
  return r;
}

void write_report_text(std::ostream& out, const EvalReport& r) {
  std::size_t occurrence = 0;
  for (const EvalRow& row : r.rows)
    if (row.kind == EstimateKind::kOccurrenceLevel) ++occurrence;
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::fixed << std::setprecision(3);
  out << "patterns        " << r.rows.size() << " (" << occurrence
      << " served by backward search)\n";
  out << "q-error         avg " << r.qerror.avg << "  p50 " << r.qerror.p50 << "  p90 "
      << r.qerror.p90 << "  p99 " << r.qerror.p99 << "  max " << r.qerror.max << '\n';
  out << "latency (us)    avg " << r.latency_us.avg << "  p50 " << r.latency_us.p50
      << "  p90 " << r.latency_us.p90 << "  p99 " << r.latency_us.p99 << "  max "
      << r.latency_us.max << '\n';
  out << "index bytes     " << r.index_bytes << '\n';
  out << "build seconds   " << r.build_seconds << '\n';
  out.flags(old_flags);
  out.precision(old_precision);
}

void write_report_csv(std::ostream& out, const EvalReport& r) {
  out << "pattern,truth,estimate,qerror,kind,latency_us\n";
  for (const EvalRow& row : r.rows) {
    out << csv_field(encode_utf8(row.pattern)) << ',' << row.truth << ',' << row.estimate
        << ',' << row.qerror << ',' << kind_name(row.kind) << ',' << row.latency_us << '\n';
  }
}

}  // namespace substrcard
