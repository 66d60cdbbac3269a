#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "substrcard/harness.hpp"
#include "substrcard/serialize.hpp"
#include "substrcard/updates.hpp"

namespace fs = std::filesystem;
using namespace substrcard;

namespace {

struct ParamFlags {
  BuildParams p;
  std::string fit = "spline";

  void attach(CLI::App* cmd) {
    cmd->add_option("--h", p.h, "Suffix tree height")->capture_default_str();
    cmd->add_option("--l", p.l, "Minimum rows for a kept tree node")->capture_default_str();
    cmd->add_option("--cm", p.c_m, "Minimum bucket size that gets its own fit")
        ->capture_default_str();
    cmd->add_option("--epsilon", p.epsilon, "Spline error bound")->capture_default_str();
    cmd->add_option("--fit", fit, "Rank function kind")
        ->check(CLI::IsMember({"spline", "linear"}))
        ->capture_default_str();
  }

  BuildParams get() const {
    BuildParams out = p;
    out.fit = fit == "linear" ? FitKind::kLinear : FitKind::kSpline;
    out.validate();
    return out;
  }
};

UpdateStrategy parse_strategy(const std::string& s) {
  return s == "multiple" ? UpdateStrategy::kMultiple : UpdateStrategy::kSingle;
}

// Either a single index file or an index set directory.
struct Target {
  std::unique_ptr<CardinalityIndex> index;
  std::unique_ptr<IndexSet> set;

  static Target open(const fs::path& path) {
    Target t;
    if (fs::is_directory(path))
      t.set = IndexSet::open(path);
    else
      t.index = std::make_unique<CardinalityIndex>(load_index(path));
    return t;
  }

  Estimate estimate(TextView p) const {
    return set ? set->estimate(p) : substrcard::estimate(*index, p);
  }
};

void print_report(const ConsolidationReport& r) {
  std::cout << (r.full_merge ? "full merge" : "new part") << ": " << r.strings_indexed
            << " strings indexed in " << r.build_seconds << " s\n";
  for (const Text& s : r.unmatched_deletes)
    std::cerr << "warning: deleted string not found: " << encode_utf8(s) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Substring cardinality estimation with a learned FM-index"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  // build
  std::string data_path, out_path;
  ParamFlags build_flags;
  auto* build = app.add_subcommand("build", "Build an index file from a dataset");
  build->add_option("dataset", data_path, "One string per line, UTF-8")->required();
  build->add_option("-o,--output", out_path, "Index file to write")->required();
  build_flags.attach(build);

  // estimate
  std::string target_path, workload_path;
  std::vector<std::string> patterns;
  auto* est = app.add_subcommand("estimate", "Estimate cardinalities for patterns");
  est->add_option("index", target_path, "Index file or index set directory")->required();
  est->add_option("patterns", patterns, "Patterns to estimate");
  est->add_option("-w,--workload", workload_path, "Read patterns from a workload file");

  // eval
  std::string eval_data, csv_path;
  unsigned threads = 1;
  auto* eval = app.add_subcommand("eval", "Evaluate an index on a workload");
  eval->add_option("index", target_path, "Index file or index set directory")->required();
  eval->add_option("workload", workload_path, "Workload file")->required();
  eval->add_option("--data", eval_data, "Dataset used to label entries without truth");
  eval->add_option("--csv", csv_path, "Write per-pattern results as CSV");
  eval->add_option("--threads", threads, "Query workers")->check(CLI::Range(1u, 256u));

  // gen-queries
  WorkloadOptions wopts;
  auto* gen = app.add_subcommand("gen-queries", "Sample a labeled workload from a dataset");
  gen->add_option("dataset", data_path, "Dataset file")->required();
  gen->add_option("-o,--output", out_path, "Workload file to write")->required();
  gen->add_option("--count", wopts.count, "Number of patterns")->capture_default_str();
  gen->add_option("--min-len", wopts.min_len, "Minimum pattern length")->capture_default_str();
  gen->add_option("--max-len", wopts.max_len, "Maximum pattern length")->capture_default_str();
  gen->add_option("--seed", wopts.seed, "Random seed")->capture_default_str();

  // update
  std::string set_dir, base_path, insert_path, delete_path, strategy = "single";
  std::uint64_t budget = 250000;
  ParamFlags set_flags;
  auto* update = app.add_subcommand("update", "Apply insert/delete batches to an index set");
  update->add_option("set", set_dir, "Index set directory")->required();
  update->add_option("--base", base_path, "Dataset for a new set's first part");
  update->add_option("--insert", insert_path, "Strings to insert, one per line");
  update->add_option("--delete", delete_path, "Strings to delete, one per line");
  update->add_option("--strategy", strategy, "Consolidation strategy for a new set")
      ->check(CLI::IsMember({"single", "multiple"}))
      ->capture_default_str();
  update->add_option("--budget", budget, "Buffer budget in trie nodes for a new set")
      ->capture_default_str();
  set_flags.attach(update);

  // merge
  bool full = false;
  auto* merge = app.add_subcommand("merge", "Consolidate an index set's buffers");
  merge->add_option("set", set_dir, "Index set directory")->required();
  merge->add_flag("--full", full, "Rebuild all parts into one");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      const BuildParams p = build_flags.get();
      const StringSet data = StringSet::load(data_path);
      const auto t0 = std::chrono::steady_clock::now();
      const CardinalityIndex idx = CardinalityIndex::build(data, p);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      save_index(idx, out_path);
      std::cout << "indexed " << data.size() << " strings (" << idx.rows() << " rows, "
                << idx.tree().size() << " nodes, " << idx.tree().function_count()
                << " functions) in " << secs << " s\n";
    } else if (*est) {
      if (patterns.empty() && workload_path.empty())
        throw std::invalid_argument("no patterns given");
      const Target t = Target::open(target_path);
      std::vector<Text> queries;
      for (const std::string& p : patterns) queries.push_back(decode_utf8(p));
      if (!workload_path.empty())
        for (const WorkloadEntry& e : load_workload(workload_path).entries)
          queries.push_back(e.pattern);
      for (const Text& q : queries) {
        const Estimate e = t.estimate(q);
        std::cout << encode_utf8(q) << '\t' << e.value << '\t'
                  << (e.kind == EstimateKind::kStringLevel ? "string" : "occurrence")
                  << '\n';
      }
    } else if (*eval) {
      const Target t = Target::open(target_path);
      const Workload w = load_workload(workload_path);
      StringSet data;
      EvalOptions opts;
      opts.threads = threads;
      if (!eval_data.empty()) {
        data = StringSet::load(eval_data);
        opts.data = &data;
      }
      const EvalReport r = t.set ? run_eval(*t.set, w, opts) : run_eval(*t.index, w, opts);
      write_report_text(std::cout, r);
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::trunc);
        if (!csv) throw std::runtime_error("cannot write " + csv_path);
        write_report_csv(csv, r);
      }
    } else if (*gen) {
      const Workload w = gen_workload(StringSet::load(data_path), wopts);
      save_workload(w, out_path);
      std::cout << "wrote " << w.entries.size() << " patterns\n";
      if (w.entries.size() < wopts.count)
        std::cerr << "warning: the dataset supplied only " << w.entries.size()
                  << " distinct patterns\n";
    } else if (*update) {
      std::unique_ptr<IndexSet> set;
      if (fs::exists(fs::path(set_dir) / "manifest.json")) {
        if (!base_path.empty()) throw std::invalid_argument("index set already exists");
        set = IndexSet::open(set_dir);
      } else {
        if (base_path.empty())
          throw std::invalid_argument("new index set needs --base");
        set = std::make_unique<IndexSet>(set_flags.get(), parse_strategy(strategy), budget,
                                         set_dir);
        set->add_part_from(fs::absolute(base_path));
      }
      if (!insert_path.empty())
        for (const Text& s : StringSet::load(insert_path))
          if (auto r = set->insert(s)) print_report(*r);
      if (!delete_path.empty())
        for (const Text& s : StringSet::load(delete_path))
          if (auto r = set->remove(s)) print_report(*r);
      set->save();
      std::cout << set->part_count() << " parts, " << set->insert_buffer().raw().size()
                << " buffered inserts, " << set->delete_buffer().raw().size()
                << " buffered deletes\n";
    } else if (*merge) {
      auto set = IndexSet::open(set_dir);
      if (full) {
        print_report(set->full_merge());
      } else if (auto r = set->consolidate()) {
        print_report(*r);
      } else {
        std::cout << "nothing to consolidate\n";
      }
      set->save();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
