//===-- TestSupport.h - Oracles and generators shared by the tests -*- C++ -*-===//
//
// Independent reference implementations used to cross-check the library:
// set-based dominator dataflow, exhaustive input enumeration for failure
// preservation and path partitioning, brute-force alignment, random module
// and random constraint generators.
//
//===----------------------------------------------------------------------===//

#ifndef MSE_TESTSUPPORT_H
#define MSE_TESTSUPPORT_H

#include "mse/Executor.h"
#include "mse/Expr.h"
#include "mse/IR.h"
#include "mse/Solver.h"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mse::test {

/// Text of a bundled corpus file.
std::string readCorpusFile(const std::string &name);
Module loadCorpus(const std::string &name);

/// Immediate dominators and postdominators from the textbook O(N^2)
/// set-intersection fixed point. -1 marks "none" exactly like CfgInfo.
struct NaiveDominators {
  std::vector<int> idom;
  std::vector<int> ipdom;
};
NaiveDominators naiveDominators(const Function &f);

/// A random well-formed module: straight-line integer code over a random
/// CFG, no phis, no memory.
Module randomModule(std::mt19937 &rng);

/// A random straight-line arm of ALU instructions over `%x`, `%y` (i32).
std::vector<Instruction> randomArm(std::mt19937 &rng, unsigned maxLen,
                                   const std::string &prefix);

/// Matched-pair count of the best order-preserving alignment, found by
/// enumerating every alignment. Compatibility: same opcode, predicate and type.
unsigned bruteForceMatchCount(const std::vector<Instruction> &a,
                              const std::vector<Instruction> &b);

struct PreservationResult {
  uint64_t inputs = 0;
  uint64_t crashesP = 0;
  uint64_t falsePositiveInputs = 0;
  uint64_t comparedSafe = 0;
  uint64_t violations = 0;
  std::string firstViolation;
};

/// Enumerates every input of `original` and checks that crashes are kept by
/// `transformed` and that crash-free inputs without out-of-bounds dead
/// accesses leave identical memory and return values.
PreservationResult checkFailurePreservation(const Module &original,
                                            const Module &transformed);

struct PartitionResult {
  uint64_t inputs = 0;
  uint64_t paths = 0;
  uint64_t uncovered = 0;
  uint64_t overlapping = 0;
  std::string firstViolation;
};

/// Runs exhaustive DSE with the enumeration backend and checks that every
/// input satisfies the path condition of exactly one completed path.
PartitionResult checkPathPartition(const Module &m, const DseConfig &base = {});

struct SolverCrossCheck {
  uint64_t queries = 0;
  uint64_t sat = 0;
  uint64_t disagreements = 0;
  uint64_t invalidModels = 0;
  std::string firstProblem;
};

/// Random conjunctions over at most `maxBits` symbolic bits, solved by both
/// backends; verdicts must agree and sat models must satisfy every conjunct.
SolverCrossCheck crossCheckSolvers(uint64_t count, unsigned maxBits,
                                   uint32_t seed);

/// Random width-`width` expression over the variables of `ctx`.
ExprRef randomExpr(ExprContext &ctx, std::mt19937 &rng, unsigned width,
                   unsigned depth);

} // namespace mse::test

#endif
