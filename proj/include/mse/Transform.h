//===-- Transform.h - Branch elimination by arm melding ---------*- C++ -*-===//
//
// Eliminates symbolic if-then(-else) branches whose arms are single
// straight-line blocks: the two instruction sequences are aligned, unaligned
// instructions receive dead partners so the alignment becomes complete, and
// the arms are melded into one unconditionally executed block with selects on
// the operands that differ.
//
// Dead partners never feed original instructions, never trap on arithmetic
// (neutral operands), and dead stores write back the value just loaded from
// the same address. The result is therefore failure preserving: any input
// that crashes the original also crashes the transformed program, while the
// converse can fail when a guarded memory access becomes unconditional.
//
//===----------------------------------------------------------------------===//

#ifndef MSE_TRANSFORM_H
#define MSE_TRANSFORM_H

#include "mse/IR.h"
#include "mse/SymAnalysis.h"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mse {

/// Location ids ("function:block") at which no branch may be eliminated.
using LocationConstraints = std::set<std::string>;

/// Location label of a conditional branch: its recorded origin when the
/// branch was moved by block fusion, otherwise its block label.
std::string branchLocationLabel(const BasicBlock &bb);

struct DiamondRegion {
  std::string function;
  std::string branchBlock;
  std::string thenBlock;
  std::string elseBlock;
  std::string joinBlock;
  Operand condition;
  /// Label of the branch inside the original program (see branchLocationLabel).
  std::string locationLabel;
  /// Arm synthesized by if-then canonicalization, if any.
  std::string synthesizedArm;

  std::string location() const { return locationId(function, locationLabel); }
};

enum class RejectReason { SymbolicAddress, UnsupportedOpcode, LocationConstrained, Shape };

std::string_view rejectReasonName(RejectReason r);

struct Rejection {
  std::string location;
  RejectReason reason;
  std::string detail;
  bool operator==(const Rejection &) const = default;
};

struct CandidateScan {
  /// Input function with empty arms inserted for every if-then candidate.
  Function canonical;
  std::vector<DiamondRegion> diamonds;
  std::vector<Rejection> rejected;
};

/// Finds mergeable diamonds among the given symbolic branches. If-then shapes
/// are canonicalized by inserting an empty arm. Arms that contain calls,
/// branches or loops are rejected with reason Shape.
CandidateScan findCandidateDiamonds(const Function &f,
                                    const std::vector<InstRef> &branches,
                                    const LocationConstraints &lc);

struct AlignedPair {
  std::optional<unsigned> thenIdx;
  std::optional<unsigned> elseIdx;
  bool compatible = false;

  bool isGap() const { return !thenIdx || !elseIdx; }
  bool operator==(const AlignedPair &) const = default;
};

struct Alignment {
  std::vector<AlignedPair> pairs;

  bool isComplete() const;
  unsigned matchCount() const;
};

enum class MemoryVerdict { Merge, SplitToUnaligned, RejectDiamond };

/// Context for memory-address reasoning: definitions come from `f`, symbolic
/// marks from `facts` (may be null: everything is treated as concrete).
struct MemoryContext {
  const Function *function = nullptr;
  const SymFacts *facts = nullptr;
};

/// Two address operands that provably denote the same location.
bool addressesIdentical(const Operand &a, const Operand &b,
                        const MemoryContext &ctx);

/// Decides how a pair of loads or a pair of stores may be aligned.
MemoryVerdict checkMemoryCriteria(const Instruction &a, const Instruction &b,
                                  const MemoryContext &ctx);

/// Whether two instructions may be merged into one.
bool instructionsCompatible(const Instruction &a, const Instruction &b,
                            const MemoryContext &ctx);

/// Order-preserving alignment maximising the number of compatible pairs;
/// ties prefer the earliest match. Terminators must be excluded by the caller.
Alignment alignInstructions(const std::vector<Instruction> &thenArm,
                            const std::vector<Instruction> &elseArm,
                            const MemoryContext &ctx = {});

struct DeadInsertion {
  std::vector<Instruction> thenArm;
  std::vector<Instruction> elseArm;
  Alignment alignment; // complete when !rejected
  unsigned deadInserted = 0;
  std::optional<Rejection> rejected;
};

/// Neutral operand used by a dead ALU instruction for operand `position`.
int64_t neutralOperand(Opcode op, unsigned position);

/// Completes `a` by inserting dead partners for every unaligned instruction.
/// `f` provides the arms (by the labels in `d`) and the naming scope.
DeadInsertion insertDeadInstructions(const Function &f, const DiamondRegion &d,
                                     const Alignment &a);

struct MergeResult {
  Function function;
  unsigned selects = 0;
};

/// Replaces the diamond by one block holding the melded arms. `arms` must be
/// a complete insertion result for `d` on `f`.
MergeResult mergeDiamond(const Function &f, const DiamondRegion &d,
                         const DeadInsertion &arms);

struct MergeRecord {
  std::string location;
  unsigned selects = 0;
  unsigned deadInserted = 0;
};

struct TransformReport {
  unsigned found = 0;
  std::vector<MergeRecord> merges;
  std::vector<Rejection> rejected;

  unsigned merged() const { return unsigned(merges.size()); }
  unsigned rejectedCount(RejectReason r) const;
};

struct TransformResult {
  Module module;
  TransformReport report;
};

/// Applies the pipeline to every candidate diamond, innermost first, until no
/// candidate remains. Facts are recomputed after each merge.
TransformResult runCfmse(const Module &m, const SymFacts &facts,
                         const LocationConstraints &lc);

} // namespace mse

#endif
