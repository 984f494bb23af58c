//===-- Compare.cpp - Four-mode comparison matrix -------------------------===//

#include "mse/Harness.h"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mse {

std::string_view modeName(Mode m) {
  switch (m) {
  case Mode::K: return "K";
  case Mode::SM: return "SM";
  case Mode::C: return "C";
  case Mode::CSM: return "C-SM";
  }
  return "?";
}

std::optional<Mode> modeFromName(std::string_view s) {
  for (Mode m : {Mode::K, Mode::SM, Mode::C, Mode::CSM})
    if (modeName(m) == s)
      return m;
  return std::nullopt;
}

const CompareCell *CompareMatrix::find(const std::string &benchmark, unsigned size,
                                       Mode mode) const {
  for (const CompareCell &c : cells)
    if (c.benchmark == benchmark && c.size == size && c.mode == mode)
      return &c;
  return nullptr;
}

DseReport runMode(const Module &original, Mode mode, const DseConfig &base) {
  DseConfig cfg = base;
  cfg.mergeStates = mode == Mode::SM || mode == Mode::CSM;
  DseReport r;
  if (mode == Mode::C || mode == Mode::CSM) {
    TransformResult t = runCfmse(original, analyzeProgram(original), {});
    r = runDse(t.module, cfg);
  } else {
    r = runDse(original, cfg);
  }
  r.mode = std::string(modeName(mode));
  return r;
}

CompareMatrix runCompare(const CompareConfig &cfg) {
  CompareMatrix matrix;
  for (const std::string &b : cfg.benchmarks) {
    std::vector<unsigned> sizes = cfg.sizes;
    if (sizes.empty()) {
      const BenchmarkInfo *info = findBenchmark(b);
      if (!info)
        throw std::invalid_argument("unknown benchmark '" + b + "'");
      sizes.push_back(info->defaultSize);
    }
    for (unsigned size : sizes)
      for (Mode mode : cfg.modes) {
        CompareCell c;
        c.benchmark = b;
        c.size = size;
        c.mode = mode;
        matrix.cells.push_back(std::move(c));
      }
  }

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < matrix.cells.size(); i = next++) {
      CompareCell &c = matrix.cells[i];
      Module m;
      try {
        m = parseModule(generateBenchmark(c.benchmark, c.size, cfg.bits));
      } catch (const std::invalid_argument &) {
        c.skipped = true;
        continue;
      }
      try {
        c.report = runMode(m, c.mode, cfg.dse);
        c.outOfTime = c.report.termination == Termination::TimeBudget ||
                      c.report.termination == Termination::PathBudget;
      } catch (const std::exception &e) {
        c.error = e.what();
      }
    }
  };
  unsigned jobs = std::max(1u, cfg.jobs);
  std::vector<std::thread> threads;
  for (unsigned j = 1; j < jobs; ++j)
    threads.emplace_back(worker);
  worker();
  for (std::thread &t : threads)
    t.join();
  return matrix;
}

std::string compareTable(const CompareMatrix &m) {
  std::vector<Mode> modes;
  std::vector<std::pair<std::string, unsigned>> rows;
  for (const CompareCell &c : m.cells) {
    if (std::find(modes.begin(), modes.end(), c.mode) == modes.end())
      modes.push_back(c.mode);
    auto row = std::make_pair(c.benchmark, c.size);
    if (std::find(rows.begin(), rows.end(), row) == rows.end())
      rows.push_back(row);
  }

  std::ostringstream os;
  auto metric = [&](const char *title, auto value) {
    os << title << "\n";
    os << std::left << std::setw(18) << "Benchmark" << std::right << std::setw(6) << "Size";
    for (Mode mode : modes)
      os << std::setw(12) << modeName(mode);
    os << "\n";
    for (const auto &[name, size] : rows) {
      os << std::left << std::setw(18) << name << std::right << std::setw(6) << size;
      for (Mode mode : modes) {
        const CompareCell *c = m.find(name, size, mode);
        std::string cell;
        if (!c || c->skipped)
          cell = "-";
        else if (!c->error.empty())
          cell = "ERR";
        else if (c->outOfTime)
          cell = "OOT";
        else
          cell = value(c->report);
        os << std::setw(12) << cell;
      }
      os << "\n";
    }
    os << "\n";
  };
  auto fixed = [](double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
  };
  metric("Time (ms)", [&](const DseReport &r) { return fixed(r.timeMs, 1); });
  metric("Number of queries", [](const DseReport &r) { return std::to_string(r.queries); });
  metric("Average query size", [&](const DseReport &r) { return fixed(r.avgQuerySize, 1); });
  metric("Explored paths", [](const DseReport &r) { return std::to_string(r.paths); });
  return os.str();
}

} // namespace mse
