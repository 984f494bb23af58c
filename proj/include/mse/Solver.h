//===-- Solver.h - Satisfiability of bitvector constraints ------*- C++ -*-===//
//
// Two complete backends over the declared symbolic variables: exhaustive
// enumeration (bounded by a bit cap) and bit-blasting to CNF with a CDCL SAT
// solver. A per-solver exact-match cache keyed by the sorted, hash-consed
// constraint set sits in front of both.
//
//===----------------------------------------------------------------------===//

#ifndef MSE_SOLVER_H
#define MSE_SOLVER_H

#include "mse/Expr.h"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mse {

enum class Backend { Sat, Enum };

std::string_view backendName(Backend b);
std::optional<Backend> backendFromName(std::string_view s);

struct SolverConfig {
  Backend backend = Backend::Sat;
  bool caching = true;
  unsigned enumCapBits = 20;
  /// Zero means unlimited.
  uint64_t conflictLimit = 0;
  /// Directory receiving one SMT-LIB2 file per issued query; empty disables.
  std::string dumpDir;
};

struct SolverResult {
  enum class Status { Sat, Unsat, Unknown };
  Status status = Status::Unknown;
  /// Values for every declared variable (unconstrained ones are zero).
  Assignment model;

  bool isSat() const { return status == Status::Sat; }
  bool isUnsat() const { return status == Status::Unsat; }
};

struct EnumCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverStats {
  uint64_t queries = 0;
  uint64_t cacheHits = 0;
  uint64_t totalQuerySize = 0;

  double averageQuerySize() const {
    return queries ? double(totalQuerySize) / double(queries) : 0.0;
  }
};

/// Backend entry points without caching or statistics.
SolverResult solveByEnumeration(ExprContext &ctx,
                                const std::vector<ExprRef> &conjuncts,
                                unsigned capBits);
SolverResult solveBySat(ExprContext &ctx, const std::vector<ExprRef> &conjuncts,
                        uint64_t conflictLimit = 0);

/// Canonical cache key: deduplicated node ids in ascending order, with
/// trivially true conjuncts dropped.
std::vector<uint32_t> canonicalKey(const std::vector<ExprRef> &conjuncts);

class Solver {
public:
  Solver(ExprContext &ctx, SolverConfig cfg);

  /// Satisfiability of the conjunction. Cache misses count as queries.
  SolverResult check(const std::vector<ExprRef> &conjuncts);

  const SolverStats &stats() const { return statistics; }
  const SolverConfig &config() const { return cfg; }
  ExprContext &context() { return ctx; }

private:
  ExprContext &ctx;
  SolverConfig cfg;
  SolverStats statistics;
  std::map<std::vector<uint32_t>, SolverResult> cache;
};

/// Conjuncts of `pc` transitively sharing variables with `goal`.
std::vector<ExprRef> independentSlice(ExprContext &ctx,
                                      const std::vector<ExprRef> &pc,
                                      ExprRef goal);

/// SMT-LIB2 (QF_BV) script asserting the conjunction.
std::string toSmtLib(const ExprContext &ctx, const std::vector<ExprRef> &conjuncts);

} // namespace mse

#endif
