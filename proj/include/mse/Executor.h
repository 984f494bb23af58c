//===-- Executor.h - Concrete and dynamic symbolic execution ----*- C++ -*-===//
//
// The concrete interpreter replays one input; the symbolic executor forks on
// feasible branch outcomes, optionally merging sibling states at the
// immediate postdominator of their fork point. Both detect the same four
// crash kinds at the same instructions.
//
//===----------------------------------------------------------------------===//

#ifndef MSE_EXECUTOR_H
#define MSE_EXECUTOR_H

#include "mse/Expr.h"
#include "mse/IR.h"
#include "mse/Solver.h"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mse {

enum class CrashKind { OobLoad, OobStore, DivByZero, AssertFail };
std::string_view crashKindName(CrashKind k);

enum class Classification { Unclassified, TruePositive, FalsePositive };
std::string_view classificationName(Classification c);

/// Concrete values per symbolic object name (one entry per element).
using ConcreteInput = std::map<std::string, std::vector<uint64_t>>;

struct CrashSite {
  std::string function;
  std::string block;
  unsigned index = 0;
  std::set<unsigned> lines;
  /// Label of the diamond the crashing instruction was merged from, if any.
  std::string origin;

  std::string str() const;
  /// "function:label" of the responsible diamond, empty when not merged.
  std::string originLocation() const;
  bool operator==(const CrashSite &o) const {
    return function == o.function && block == o.block && index == o.index;
  }
};

struct CrashReport {
  CrashKind kind = CrashKind::AssertFail;
  CrashSite site;
  ConcreteInput input;
  Classification classification = Classification::Unclassified;

  std::string inputHex() const;
};

/// A make_symbolic call site as seen statically.
struct SymbolicDecl {
  std::string name;
  uint32_t length = 0;
  unsigned bits = 8;
};

/// make_symbolic declarations of `m` in program order, plus entry-function
/// parameters (length 1).
std::vector<SymbolicDecl> symbolicDecls(const Module &m);

/// Total number of free input bits described by `decls`.
unsigned totalSymbolicBits(const std::vector<SymbolicDecl> &decls);

/// The `k`-th input of the space spanned by `decls` (first element fastest).
ConcreteInput nthInput(const std::vector<SymbolicDecl> &decls, uint64_t k);

struct BranchEvent {
  std::string function;
  std::string block;
  unsigned successor = 0;
  bool operator==(const BranchEvent &) const = default;
};

struct ConcreteOptions {
  uint64_t maxSteps = 10'000'000;
  bool traceBranches = false;
};

struct ConcreteResult {
  bool crashed = false;
  bool stepLimit = false;
  CrashKind crashKind = CrashKind::AssertFail;
  CrashSite crashSite;
  std::optional<uint64_t> returnValue;
  /// Final contents of every object, keyed "function:alloca#instance".
  std::map<std::string, std::vector<uint64_t>> memory;
  std::vector<BranchEvent> branches;
  /// Executed dead accesses that fell outside their object.
  bool deadAccessOutOfBounds = false;
};

/// Runs the entry function on one input.
ConcreteResult concreteRun(const Module &m, const ConcreteInput &input,
                           const ConcreteOptions &opts = {});

enum class Strategy { Dfs, Bfs };
enum class Termination { Exhausted, TimeBudget, PathBudget, Aborted };
std::string_view terminationName(Termination t);

struct DseConfig {
  Strategy strategy = Strategy::Dfs;
  bool mergeStates = false;
  bool caching = true;
  Backend backend = Backend::Sat;
  unsigned enumCapBits = 20;
  double maxTimeSeconds = 0; // 0: unlimited
  uint64_t maxPaths = 0;     // 0: unlimited
  uint64_t maxSteps = 200'000'000;
  bool recordPaths = false;
  std::string dumpSmtDir;
};

struct PathRecord {
  std::vector<ExprRef> pathCondition;
  bool crashed = false;
  /// Final cell contents per object, keyed like ConcreteResult::memory.
  std::map<std::string, std::vector<ExprRef>> memory;
  /// Entry function result, if it returned a value.
  ExprRef returnValue = nullptr;
};

struct DseReport {
  std::string mode;
  double timeMs = 0;
  uint64_t paths = 0;
  uint64_t exits = 0;
  uint64_t mergedAway = 0;
  uint64_t queries = 0;
  uint64_t cacheHits = 0;
  double avgQuerySize = 0;
  std::vector<CrashReport> crashes;
  std::set<unsigned> coveredLines;
  Termination termination = Termination::Exhausted;
  /// Issued (non-cached) queries per location id.
  std::map<std::string, uint64_t> queriesByLocation;
  /// Completed paths (only with recordPaths); expressions live in `context`.
  std::vector<PathRecord> pathRecords;
  std::shared_ptr<ExprContext> context;
};

/// Invoked for each crash as it is found; returning false aborts the run.
using CrashCallback = std::function<bool(CrashReport &)>;

DseReport runDse(const Module &m, const DseConfig &cfg,
                 const CrashCallback &onCrash = {});

/// Assignment for the context's variables taken from a concrete input.
Assignment assignmentFor(const ExprContext &ctx, const ConcreteInput &input);

} // namespace mse

#endif
