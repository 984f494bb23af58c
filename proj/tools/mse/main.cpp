//===-- main.cpp - mse command line driver --------------------------------===//
//
// Thin front end over the C interface. Exit status: 0 on success, 1 on
// diagnostics (unreadable, malformed or invalid input), 2 when a budget ran
// out before exploration finished.
//
//===----------------------------------------------------------------------===//

#include "mse/mse.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitBudget = 2;

struct ModuleDeleter {
  void operator()(mse_module *m) const { mse_module_free(m); }
};
using ModulePtr = std::unique_ptr<mse_module, ModuleDeleter>;

struct OwnedString {
  char *s = nullptr;
  ~OwnedString() { mse_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

int report(mse_status s) {
  std::cerr << "error: " << mse_last_error() << "\n";
  return s == MSE_OK ? kExitOk : kExitDiagnostics;
}

/// Loads a file, or a bundled benchmark written bench:NAME[:SIZE[:BITS]].
mse_status loadInput(const std::string &spec, ModulePtr &out) {
  mse_module *m = nullptr;
  mse_status s;
  if (spec.rfind("bench:", 0) == 0) {
    std::vector<std::string> parts;
    std::string rest = spec.substr(6);
    size_t pos;
    while ((pos = rest.find(':')) != std::string::npos) {
      parts.push_back(rest.substr(0, pos));
      rest = rest.substr(pos + 1);
    }
    parts.push_back(rest);
    unsigned size = parts.size() > 1 ? unsigned(std::stoul(parts[1])) : 0;
    unsigned bits = parts.size() > 2 ? unsigned(std::stoul(parts[2])) : 8;
    s = mse_module_benchmark(parts[0].c_str(), size, bits, &m);
  } else {
    s = mse_module_load(spec.c_str(), &m);
  }
  out.reset(m);
  return s;
}

bool writeFile(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << text;
  if (!text.empty() && text.back() != '\n')
    out << "\n";
  return true;
}

struct RunFlags {
  std::string strategy = "dfs";
  bool mergeStates = false;
  bool noCache = false;
  std::string backend = "sat";
  unsigned enumCap = 20;
  double maxTime = 0;
  uint64_t maxPaths = 0;
  std::string dumpSmt;

  void attach(CLI::App *app, bool withMerge) {
    app->add_option("--strategy", strategy, "Search strategy")
        ->check(CLI::IsMember({"dfs", "bfs"}));
    if (withMerge)
      app->add_flag("--merge-states", mergeStates,
                    "Merge sibling states at postdominators");
    app->add_flag("--no-cache", noCache, "Disable the query cache");
    app->add_option("--backend", backend, "Solver backend")
        ->check(CLI::IsMember({"sat", "enum"}));
    app->add_option("--enum-cap", enumCap, "Bit cap of the enumeration backend");
    app->add_option("--max-time", maxTime, "Time budget in seconds");
    app->add_option("--max-paths", maxPaths, "Path budget");
    app->add_option("--dump-smt2", dumpSmt, "Directory receiving issued queries");
  }

  mse_run_options options() const {
    mse_run_options o;
    mse_run_options_init(&o);
    o.strategy = strategy == "bfs" ? MSE_BFS : MSE_DFS;
    o.merge_states = mergeStates;
    o.caching = !noCache;
    o.backend = backend == "enum" ? MSE_BACKEND_ENUM : MSE_BACKEND_SAT;
    o.enum_cap_bits = enumCap;
    o.max_time_seconds = maxTime;
    o.max_paths = maxPaths;
    o.dump_smt_dir = dumpSmt.empty() ? nullptr : dumpSmt.c_str();
    return o;
  }
};

void printRunSummary(const nlohmann::json &r) {
  std::cout << "paths: " << r["paths"] << "\n"
            << "queries: " << r["queries"] << "\n"
            << "cache hits: " << r["cache_hits"] << "\n"
            << "average query size: " << r["avg_query_size"] << "\n"
            << "crashes: " << r["crashes"].size() << "\n"
            << "covered lines: " << r["covered_lines"].size() << "\n"
            << "time (ms): " << r["time_ms"] << "\n"
            << "termination: " << r["termination"].get<std::string>() << "\n";
  for (const auto &c : r["crashes"])
    std::cout << "  " << c["kind"].get<std::string>() << " at "
              << c["loc"].get<std::string>() << " input "
              << c["input_hex"].get<std::string>() << "\n";
}

template <typename T> std::vector<T> splitList(const std::string &s) {
  std::vector<T> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t end = s.find(',', start);
    if (end == std::string::npos)
      end = s.size();
    std::string item = s.substr(start, end - start);
    if (!item.empty()) {
      if constexpr (std::is_same_v<T, unsigned>)
        out.push_back(unsigned(std::stoul(item)));
      else
        out.push_back(item);
    }
    start = end + 1;
  }
  return out;
}

} // namespace

int main(int argc, char **argv) {
  if (const char *seed = std::getenv("MSE_SEED")) {
    char *end = nullptr;
    std::strtoull(seed, &end, 10);
    if (!*seed || *end) {
      std::cerr << "error: MSE_SEED must be a non-negative integer\n";
      return kExitDiagnostics;
    }
  }

  CLI::App app{"Control-flow merging for symbolic execution"};
  app.require_subcommand(1);
  int exitCode = kExitOk;

  // analyze
  auto *analyze = app.add_subcommand("analyze", "Print symbolic value and branch facts");
  std::string analyzeInput, analyzeJson;
  analyze->add_option("input", analyzeInput, "MIR file or bench:NAME[:SIZE[:BITS]]")
      ->required();
  analyze->add_option("--json", analyzeJson, "Write facts to a file instead of stdout");
  analyze->callback([&] {
    ModulePtr m;
    OwnedString facts;
    mse_status s = loadInput(analyzeInput, m);
    if (s == MSE_OK)
      s = mse_analyze(m.get(), &facts.s);
    if (s != MSE_OK) {
      exitCode = report(s);
      return;
    }
    if (analyzeJson.empty())
      std::cout << facts.str() << "\n";
    else if (!writeFile(analyzeJson, facts.str()))
      exitCode = kExitDiagnostics;
  });

  // transform
  auto *transform = app.add_subcommand("transform", "Eliminate symbolic branches");
  std::string transformInput, transformOutput, transformReport;
  std::vector<std::string> skipLocs;
  transform->add_option("input", transformInput, "MIR file or bench:NAME[:SIZE[:BITS]]")
      ->required();
  transform->add_option("-o,--output", transformOutput, "Output MIR file (default stdout)");
  transform->add_option("--skip-loc", skipLocs, "function:block location to keep");
  transform->add_option("--report", transformReport, "Write the transform report as JSON");
  transform->callback([&] {
    ModulePtr m, out;
    OwnedString rep, text;
    mse_status s = loadInput(transformInput, m);
    std::vector<const char *> locs;
    for (const std::string &l : skipLocs)
      locs.push_back(l.c_str());
    mse_module *t = nullptr;
    if (s == MSE_OK)
      s = mse_transform(m.get(), locs.data(), locs.size(), &t, &rep.s);
    out.reset(t);
    if (s == MSE_OK)
      s = mse_module_print(out.get(), &text.s);
    if (s != MSE_OK) {
      exitCode = report(s);
      return;
    }
    if (transformOutput.empty())
      std::cout << text.str();
    else if (!writeFile(transformOutput, text.str()))
      exitCode = kExitDiagnostics;
    if (!transformReport.empty() && !writeFile(transformReport, rep.str()))
      exitCode = kExitDiagnostics;
    auto r = nlohmann::json::parse(rep.str());
    std::cerr << "diamonds found: " << r["found"] << ", merged: " << r["merged"]
              << ", rejected: " << r["rejected_count"] << "\n";
  });

  // run
  auto *run = app.add_subcommand("run", "Explore a program symbolically");
  std::string runInput, runJson;
  RunFlags runFlags;
  run->add_option("input", runInput, "MIR file or bench:NAME[:SIZE[:BITS]]")->required();
  run->add_option("--json", runJson, "Write the report as JSON");
  runFlags.attach(run, true);
  run->callback([&] {
    ModulePtr m;
    OwnedString rep;
    mse_termination term = MSE_EXHAUSTED;
    mse_status s = loadInput(runInput, m);
    mse_run_options o = runFlags.options();
    if (s == MSE_OK)
      s = mse_run(m.get(), &o, &rep.s, &term);
    if (s != MSE_OK) {
      exitCode = report(s);
      return;
    }
    printRunSummary(nlohmann::json::parse(rep.str()));
    if (!runJson.empty() && !writeFile(runJson, rep.str()))
      exitCode = kExitDiagnostics;
    else if (term == MSE_TIME_BUDGET || term == MSE_PATH_BUDGET)
      exitCode = kExitBudget;
  });

  // driver
  auto *driver = app.add_subcommand("driver", "Explore with false-positive filtering");
  std::string driverInput, driverJson;
  unsigned maxIterations = 64;
  RunFlags driverFlags;
  driver->add_option("input", driverInput, "MIR file or bench:NAME[:SIZE[:BITS]]")
      ->required();
  driver->add_option("--json", driverJson, "Write the driver state as JSON");
  driver->add_option("--max-iterations", maxIterations, "Iteration budget");
  driverFlags.attach(driver, false);
  driver->callback([&] {
    ModulePtr m;
    OwnedString st;
    int exhausted = 0;
    mse_status s = loadInput(driverInput, m);
    mse_run_options o = driverFlags.options();
    if (s == MSE_OK)
      s = mse_driver(m.get(), &o, maxIterations, &st.s, &exhausted);
    if (s != MSE_OK) {
      exitCode = report(s);
      return;
    }
    auto j = nlohmann::json::parse(st.str());
    std::cout << "iterations: " << j["iterations"] << "\n";
    for (const auto &it : j["history"])
      std::cout << "  true positives: " << it["true_positives"]
                << ", false positives: " << it["false_positives"]
                << ", constrained: " << it["constraints"].size() << "\n";
    std::cout << "true positives: " << j["true_positives"].size() << "\n";
    for (const auto &c : j["true_positives"])
      std::cout << "  " << c["kind"].get<std::string>() << " at "
                << c["loc"].get<std::string>() << " input "
                << c["input_hex"].get<std::string>() << "\n";
    std::cout << "false positive locations:";
    for (const auto &l : j["false_positive_locations"])
      std::cout << " " << l.get<std::string>();
    std::cout << "\n";
    if (!driverJson.empty() && !writeFile(driverJson, st.str()))
      exitCode = kExitDiagnostics;
    else if (exhausted)
      exitCode = kExitBudget;
  });

  // compare
  auto *compare = app.add_subcommand("compare", "Run the K/SM/C/C-SM comparison");
  std::string benchList, modeList = "K,SM,C,C-SM", sizeList, compareJson, compareTable;
  unsigned compareBits = 8, jobs = 1;
  RunFlags compareFlags;
  compare->add_option("--benchmarks", benchList, "Comma-separated benchmark names");
  compare->add_option("--modes", modeList, "Comma-separated modes");
  compare->add_option("--sizes", sizeList, "Comma-separated sizes (default: each default)");
  compare->add_option("--bits", compareBits, "Free bits per symbolic element");
  compare->add_option("--jobs", jobs, "Cells run in parallel");
  compare->add_option("--json", compareJson, "Write the matrix as JSON");
  compare->add_option("--table", compareTable, "Write the text table");
  compareFlags.attach(compare, false);
  compare->callback([&] {
    std::vector<std::string> names = splitList<std::string>(benchList);
    if (names.empty()) {
      OwnedString list;
      mse_benchmark_list(&list.s);
      for (const auto &b : nlohmann::json::parse(list.str()))
        names.push_back(b["name"]);
    }
    std::vector<unsigned> sizes;
    try {
      sizes = splitList<unsigned>(sizeList);
    } catch (const std::exception &) {
      std::cerr << "error: bad --sizes list\n";
      exitCode = kExitDiagnostics;
      return;
    }
    std::vector<std::string> modes = splitList<std::string>(modeList);
    std::vector<const char *> namePtrs, modePtrs;
    for (const std::string &n : names)
      namePtrs.push_back(n.c_str());
    for (const std::string &m : modes)
      modePtrs.push_back(m.c_str());
    mse_run_options o = compareFlags.options();

    OwnedString matrix, table;
    int oot = 0;
    mse_status s = mse_compare(namePtrs.data(), namePtrs.size(), sizes.data(),
                               sizes.size(), modePtrs.data(), modePtrs.size(),
                               compareBits, &o, jobs, &matrix.s, &table.s, &oot);
    if (s != MSE_OK) {
      exitCode = report(s);
      return;
    }
    std::cout << table.str();
    if (!compareJson.empty() && !writeFile(compareJson, matrix.str()))
      exitCode = kExitDiagnostics;
    if (!compareTable.empty() && !writeFile(compareTable, table.str()))
      exitCode = kExitDiagnostics;
    if (exitCode == kExitOk && oot)
      exitCode = kExitBudget;
  });

  // corpus
  auto *corpus = app.add_subcommand("corpus", "List or emit bundled benchmarks");
  std::string corpusName, corpusOut, corpusDir;
  unsigned corpusSize = 0, corpusBits = 8;
  corpus->add_option("--name", corpusName, "Benchmark to emit");
  corpus->add_option("--size", corpusSize, "Problem size (default: benchmark default)");
  corpus->add_option("--bits", corpusBits, "Free bits per symbolic element");
  corpus->add_option("-o,--output", corpusOut, "Output file (default stdout)");
  corpus->add_option("--dir", corpusDir, "Emit every benchmark at its default size");
  corpus->callback([&] {
    OwnedString list;
    mse_benchmark_list(&list.s);
    auto info = nlohmann::json::parse(list.str());
    auto emit = [&](const std::string &name, unsigned size, unsigned bits,
                    const std::string &path) {
      ModulePtr m;
      OwnedString text;
      mse_module *raw = nullptr;
      mse_status s = mse_module_benchmark(name.c_str(), size, bits, &raw);
      m.reset(raw);
      if (s == MSE_OK)
        s = mse_module_print(m.get(), &text.s);
      if (s != MSE_OK) {
        exitCode = report(s);
        return;
      }
      if (path.empty())
        std::cout << text.str();
      else if (!writeFile(path, text.str()))
        exitCode = kExitDiagnostics;
    };
    if (!corpusDir.empty()) {
      for (const auto &b : info) {
        std::string name = b["name"];
        emit(name, 0, 8, corpusDir + "/" + name + ".mir");
        emit(name, b["small_size"], b["small_bits"], corpusDir + "/" + name + "_small.mir");
      }
    } else if (!corpusName.empty()) {
      emit(corpusName, corpusSize, corpusBits, corpusOut);
    } else {
      for (const auto &b : info)
        std::printf("%-16s size %-3u small %u/%u-bit  %s\n",
                    b["name"].get<std::string>().c_str(),
                    b["default_size"].get<unsigned>(), b["small_size"].get<unsigned>(),
                    b["small_bits"].get<unsigned>(),
                    b["description"].get<std::string>().c_str());
    }
  });

  // replay
  auto *replay = app.add_subcommand("replay", "Run one concrete input");
  std::string replayInput, replayData;
  replay->add_option("input", replayInput, "MIR file or bench:NAME[:SIZE[:BITS]]")
      ->required();
  replay->add_option("--values", replayData, "JSON object of element arrays")->required();
  replay->callback([&] {
    ModulePtr m;
    OwnedString out;
    mse_status s = loadInput(replayInput, m);
    if (s == MSE_OK)
      s = mse_concrete_run(m.get(), replayData.c_str(), &out.s);
    if (s != MSE_OK) {
      exitCode = report(s);
      return;
    }
    std::cout << out.str() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitDiagnostics;
  }
  return exitCode;
}
