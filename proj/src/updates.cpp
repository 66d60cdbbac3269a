#include "substrcard/updates.hpp"

#include <chrono>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "substrcard/serialize.hpp"

namespace substrcard {

namespace fs = std::filesystem;

DeltaBuffer::DeltaBuffer(std::uint32_t height, std::uint64_t budget)
    : height_(height), budget_(budget), nodes_(1) {}

void DeltaBuffer::add(Text s) {
  validate_text(s);
  raw_.push_back(std::move(s));
  const Text& t = raw_.back();
  const std::uint64_t id = raw_.size();
  for (std::size_t from = 0; from < t.size(); ++from) {
    std::uint32_t u = 0;
    const std::size_t to = std::min<std::size_t>(t.size(), from + height_);
    for (std::size_t k = from; k < to; ++k) {
      auto it = nodes_[u].children.find(t[k]);
      std::uint32_t v;
      if (it == nodes_[u].children.end()) {
        v = static_cast<std::uint32_t>(nodes_.size());
        nodes_[u].children.emplace(t[k], v);
        nodes_.emplace_back();
      } else {
        v = it->second;
      }
      if (nodes_[v].stamp != id) {
        nodes_[v].stamp = id;
        ++nodes_[v].cnt;
      }
      u = v;
    }
  }
}

std::uint64_t DeltaBuffer::path_count(TextView path) const {
  std::uint32_t u = 0;
  for (Char c : path) {
    auto it = nodes_[u].children.find(c);
    if (it == nodes_[u].children.end()) return 0;
    u = it->second;
  }
  return u == 0 ? raw_.size() : nodes_[u].cnt;
}

std::uint64_t DeltaBuffer::count(TextView pattern) const {
  if (pattern.size() <= height_) return path_count(pattern);
  std::uint64_t n = 0;
  for (const Text& s : raw_)
    if (s.find(pattern) != Text::npos) ++n;
  return n;
}

void DeltaBuffer::clear() {
  nodes_.assign(1, Node{});
  raw_.clear();
}

IndexSet::IndexSet(BuildParams params, UpdateStrategy strategy,
                   std::uint64_t budget, fs::path work_dir)
    : params_(params),
      strategy_(strategy),
      budget_(budget),
      work_dir_(std::move(work_dir)),
      inserts_(params.h, budget),
      deletes_(params.h, budget) {
  params_.validate();
}

void IndexSet::add_part_from(const fs::path& dataset) {
  CardinalityIndex idx = CardinalityIndex::build(StringSet::load(dataset), params_);
  add_part(std::move(idx), dataset);
}

void IndexSet::add_part(CardinalityIndex index, fs::path source) {
  std::unique_lock lock(mu_);
  parts_.push_back({std::move(index), std::move(source)});
}

std::size_t IndexSet::part_count() const {
  std::shared_lock lock(mu_);
  return parts_.size();
}

std::optional<ConsolidationReport> IndexSet::insert(Text s) {
  std::unique_lock lock(mu_);
  inserts_.add(std::move(s));
  if (inserts_.over_budget()) return consolidate_locked();
  return std::nullopt;
}

std::optional<ConsolidationReport> IndexSet::remove(Text s) {
  std::unique_lock lock(mu_);
  deletes_.add(std::move(s));
  if (deletes_.over_budget()) return full_merge_locked();
  return std::nullopt;
}

Estimate IndexSet::estimate(TextView pattern) const {
  validate_pattern(pattern);
  std::shared_lock lock(mu_);
  std::int64_t value = 0;
  bool exact = true;
  EstimateKind kind = EstimateKind::kStringLevel;
  for (const IndexPart& part : parts_) {
    const Estimate e = substrcard::estimate(part.index, pattern);
    value += static_cast<std::int64_t>(e.value);
    exact = exact && e.exact;
    if (e.kind == EstimateKind::kOccurrenceLevel) kind = e.kind;
  }
  value += static_cast<std::int64_t>(inserts_.count(pattern));
  value -= static_cast<std::int64_t>(deletes_.count(pattern));
  if (value < 0) value = 0;
  return {static_cast<std::uint64_t>(value), exact && kind == EstimateKind::kStringLevel,
          kind};
}

std::optional<ConsolidationReport> IndexSet::consolidate() {
  std::unique_lock lock(mu_);
  return consolidate_locked();
}

ConsolidationReport IndexSet::full_merge() {
  std::unique_lock lock(mu_);
  return full_merge_locked();
}

fs::path IndexSet::next_dataset_path() {
  fs::create_directories(work_dir_);
  return work_dir_ / ("part-" + std::to_string(next_part_id_++) + ".txt");
}

std::optional<ConsolidationReport> IndexSet::consolidate_locked() {
  if (inserts_.empty() && deletes_.empty()) return std::nullopt;
  if (strategy_ == UpdateStrategy::kSingle) return full_merge_locked();
  if (inserts_.empty()) return std::nullopt;

  ConsolidationReport report;
  report.strategy = strategy_;
  StringSet data(inserts_.raw());
  const fs::path source = next_dataset_path();
  data.save(source);
  const auto t0 = std::chrono::steady_clock::now();
  CardinalityIndex idx = CardinalityIndex::build(data, params_);
  report.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.strings_indexed = data.size();
  parts_.push_back({std::move(idx), source});
  inserts_.clear();
  return report;
}

ConsolidationReport IndexSet::full_merge_locked() {
  ConsolidationReport report;
  report.strategy = strategy_;
  report.full_merge = true;

  std::vector<Text> merged;
  for (const IndexPart& part : parts_) {
    if (part.source.empty() || !fs::exists(part.source))
      throw std::runtime_error("dataset for index part is missing: '" +
                               part.source.string() + "'");
    StringSet s = StringSet::load(part.source);
    merged.insert(merged.end(), s.begin(), s.end());
  }
  merged.insert(merged.end(), inserts_.raw().begin(), inserts_.raw().end());

  std::unordered_map<Text, std::uint64_t> pending;
  for (const Text& d : deletes_.raw()) ++pending[d];
  std::vector<Text> net;
  net.reserve(merged.size());
  for (Text& s : merged) {
    auto it = pending.find(s);
    if (it != pending.end() && it->second > 0) {
      --it->second;
      continue;
    }
    net.push_back(std::move(s));
  }
  for (const Text& d : deletes_.raw()) {
    auto it = pending.find(d);
    if (it->second > 0) {
      --it->second;
      report.unmatched_deletes.push_back(d);
    }
  }

  std::vector<IndexPart> parts;
  if (!net.empty()) {
    StringSet data(std::move(net));
    const fs::path source = next_dataset_path();
    data.save(source);
    const auto t0 = std::chrono::steady_clock::now();
    CardinalityIndex idx = CardinalityIndex::build(data, params_);
    report.build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.strings_indexed = data.size();
    parts.push_back({std::move(idx), source});
  }
  parts_ = std::move(parts);
  inserts_.clear();
  deletes_.clear();
  return report;
}

namespace {

constexpr const char* kManifest = "manifest.json";

const char* strategy_name(UpdateStrategy s) {
  return s == UpdateStrategy::kSingle ? "single" : "multiple";
}

void write_lines(const fs::path& path, const std::vector<Text>& lines) {
  StringSet(lines).save(path);
}

}  // namespace

void IndexSet::save() const {
  std::shared_lock lock(mu_);
  fs::create_directories(work_dir_);
  nlohmann::json manifest;
  manifest["version"] = 1;
  manifest["params"] = {{"h", params_.h},
                        {"l", params_.l},
                        {"c_m", params_.c_m},
                        {"epsilon", params_.epsilon},
                        {"fit", params_.fit == FitKind::kSpline ? "spline" : "linear"}};
  manifest["strategy"] = strategy_name(strategy_);
  manifest["budget"] = budget_;
  manifest["next_part_id"] = next_part_id_;
  nlohmann::json parts = nlohmann::json::array();
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    const std::string file = "index-" + std::to_string(k) + ".ssc";
    save_index(parts_[k].index, work_dir_ / file);
    parts.push_back({{"index", file}, {"source", fs::absolute(parts_[k].source).string()}});
  }
  manifest["parts"] = parts;
  write_lines(work_dir_ / "inserts.txt", inserts_.raw());
  write_lines(work_dir_ / "deletes.txt", deletes_.raw());
  std::ofstream out(work_dir_ / kManifest, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest in " + work_dir_.string());
  out << manifest.dump(2) << '\n';
}

std::unique_ptr<IndexSet> IndexSet::open(const fs::path& dir) {
  std::ifstream in(dir / kManifest);
  if (!in) throw std::runtime_error("no index set manifest in " + dir.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
    BuildParams p;
    p.h = manifest.at("params").at("h").get<std::uint32_t>();
    p.l = manifest.at("params").at("l").get<std::uint64_t>();
    p.c_m = manifest.at("params").at("c_m").get<std::uint64_t>();
    p.epsilon = manifest.at("params").at("epsilon").get<std::uint64_t>();
    p.fit = manifest.at("params").value("fit", "spline") == "linear" ? FitKind::kLinear
                                                                      : FitKind::kSpline;
    const std::string strategy = manifest.at("strategy").get<std::string>();
    if (strategy != "single" && strategy != "multiple")
      throw std::runtime_error("unknown strategy '" + strategy + "'");
    auto set = std::make_unique<IndexSet>(
        p, strategy == "single" ? UpdateStrategy::kSingle : UpdateStrategy::kMultiple,
        manifest.at("budget").get<std::uint64_t>(), dir);
    set->next_part_id_ = manifest.at("next_part_id").get<std::uint64_t>();
    for (const auto& part : manifest.at("parts")) {
      set->parts_.push_back({load_index(dir / part.at("index").get<std::string>()),
                             part.at("source").get<std::string>()});
    }
    for (const Text& s : StringSet::load(dir / "inserts.txt")) set->inserts_.add(s);
    for (const Text& s : StringSet::load(dir / "deletes.txt")) set->deletes_.add(s);
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest in " + dir.string() + ": " + e.what());
  }
}

}  // namespace substrcard
