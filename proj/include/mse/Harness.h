//===-- Harness.h - Benchmarks, driver loop and mode comparison -*- C++ -*-===//
//
// The bundled benchmark generators, the false-positive filtering driver that
// alternates transformation and exploration, and the runner producing the
// four-mode comparison matrix. Report serializers return JSON text.
//
//===----------------------------------------------------------------------===//

#ifndef MSE_HARNESS_H
#define MSE_HARNESS_H

#include "mse/Executor.h"
#include "mse/IR.h"
#include "mse/SymAnalysis.h"
#include "mse/Transform.h"

#include <optional>
#include <string>
#include <vector>

namespace mse {

struct BenchmarkInfo {
  std::string name;
  std::string description;
  unsigned defaultSize = 0;
  /// Smallest instance kept within the enumeration oracles' input space.
  unsigned smallSize = 0;
  unsigned smallBits = 0;
};

const std::vector<BenchmarkInfo> &benchmarks();
const BenchmarkInfo *findBenchmark(const std::string &name);

/// MIR text of benchmark `name` for problem size `size` with `bits` free bits
/// per symbolic element. Throws std::invalid_argument for unsupported sizes.
std::string generateBenchmark(const std::string &name, unsigned size, unsigned bits = 8);

/// Parsed instance; `size` 0 selects the default size.
Module benchmarkModule(const std::string &name, unsigned size = 0, unsigned bits = 8);

struct BenchmarkInstance {
  std::string name;
  unsigned size = 0;
  unsigned bits = 0;
  Module module;
};

/// One small instance per benchmark, each with at most `maxBits` input bits.
std::vector<BenchmarkInstance> enumerationCorpus(unsigned maxBits = 16);

/// Replays `r.input` on the original program and records the verdict.
Classification verifyCrash(const Module &original, CrashReport &r);

struct DriverConfig {
  DseConfig dse;
  unsigned maxIterations = 64;
};

struct DriverIteration {
  LocationConstraints constraints;
  TransformReport transform;
  DseReport report;
  unsigned truePositives = 0;
  unsigned falsePositives = 0;
  std::vector<std::string> addedLocations;
};

struct DriverState {
  LocationConstraints constraints;
  unsigned iterations = 0;
  std::vector<CrashReport> truePositives;
  std::vector<std::string> falsePositiveLocations;
  std::vector<DriverIteration> history;
  DseReport finalReport;
  bool budgetExhausted = false;
};

DriverState driverLoop(const Module &original, const DriverConfig &cfg);

enum class Mode { K, SM, C, CSM };
std::string_view modeName(Mode m);
std::optional<Mode> modeFromName(std::string_view s);

struct CompareConfig {
  std::vector<std::string> benchmarks;
  /// Empty: each benchmark at its default size.
  std::vector<unsigned> sizes;
  std::vector<Mode> modes{Mode::K, Mode::SM, Mode::C, Mode::CSM};
  unsigned bits = 8;
  DseConfig dse;
  unsigned jobs = 1;
};

struct CompareCell {
  std::string benchmark;
  unsigned size = 0;
  Mode mode = Mode::K;
  /// The benchmark has no instance of this size.
  bool skipped = false;
  bool outOfTime = false;
  std::string error;
  DseReport report;
};

struct CompareMatrix {
  std::vector<CompareCell> cells;

  const CompareCell *find(const std::string &benchmark, unsigned size, Mode mode) const;
};

/// Runs one benchmark instance in one mode.
DseReport runMode(const Module &original, Mode mode, const DseConfig &base);

CompareMatrix runCompare(const CompareConfig &cfg);

std::string dseReportJson(const DseReport &r, int indent = 2);
std::string transformReportJson(const TransformReport &r, int indent = 2);
std::string factsJson(const SymFacts &facts, int indent = 2);
std::string driverStateJson(const DriverState &d, int indent = 2);
std::string compareJson(const CompareMatrix &m, int indent = 2);
std::string compareTable(const CompareMatrix &m);

} // namespace mse

#endif
