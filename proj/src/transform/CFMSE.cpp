//===-- CFMSE.cpp - Branch elimination driver -----------------------------===//
//
// Rounds of discovery and merging. Each round merges at most one diamond and
// then recomputes the symbolic facts; a shape rejection is only provisional
// because merging an inner diamond can turn an enclosing arm into a single
// block. Everything still rejected once a round merges nothing is final.
//
//===----------------------------------------------------------------------===//

#include "mse/Transform.h"

#include <map>

namespace mse {

unsigned TransformReport::rejectedCount(RejectReason r) const {
  unsigned n = 0;
  for (const Rejection &rej : rejected)
    if (rej.reason == r)
      ++n;
  return n;
}

namespace {

std::vector<Instruction> armBody(const Function &f, const std::string &label) {
  const BasicBlock *bb = f.findBlock(label);
  return {bb->insts.begin(), bb->insts.end() - 1};
}

std::optional<Rejection> symbolicAddressIn(const Function &f,
                                           const DiamondRegion &d,
                                           const SymFacts &facts) {
  for (const std::string &label : {d.thenBlock, d.elseBlock})
    for (const Instruction &inst : f.findBlock(label)->insts) {
      if (!isMemoryOp(inst.op))
        continue;
      const Operand &addr = inst.operands[inst.op == Opcode::Store ? 1 : 0];
      if (facts.isSymbolic(f.name, addr))
        return Rejection{d.location(), RejectReason::SymbolicAddress,
                         "memory access through a symbolic address"};
    }
  return std::nullopt;
}

struct MergeAttempt {
  std::optional<MergeResult> merged;
  std::optional<MergeRecord> record;
  std::optional<Rejection> rejected;
};

MergeAttempt tryMerge(const Function &f, const InstRef &branch,
                      const SymFacts &facts) {
  MergeAttempt out;
  CandidateScan scan = findCandidateDiamonds(f, {branch}, {});
  const Function &g = scan.canonical;
  const DiamondRegion &d = scan.diamonds.front();
  if ((out.rejected = symbolicAddressIn(g, d, facts)))
    return out;

  MemoryContext ctx{&g, &facts};
  Alignment a = alignInstructions(armBody(g, d.thenBlock),
                                  armBody(g, d.elseBlock), ctx);
  DeadInsertion arms = insertDeadInstructions(g, d, a);
  if (arms.rejected) {
    out.rejected = arms.rejected;
    return out;
  }
  out.merged = mergeDiamond(g, d, arms);
  out.record = MergeRecord{d.location(), out.merged->selects, arms.deadInserted};
  return out;
}

} // namespace

TransformResult runCfmse(const Module &m, const SymFacts &facts,
                         const LocationConstraints &lc) {
  TransformResult result;
  result.module = m;
  Module &cur = result.module;
  SymFacts fx = facts;
  std::set<std::string> decided;
  std::map<std::string, Rejection> provisional;

  for (;;) {
    bool progress = false;
    BranchMap branches = classifyBranches(cur, fx);
    for (Function &f : cur.functions) {
      std::vector<InstRef> open;
      for (const InstRef &ref : branches[f.name]) {
        std::string loc =
            locationId(f.name, branchLocationLabel(*f.findBlock(ref.block)));
        if (!decided.count(loc))
          open.push_back(ref);
      }
      CandidateScan scan = findCandidateDiamonds(f, open, lc);
      for (const Rejection &rej : scan.rejected) {
        if (rej.reason == RejectReason::Shape) {
          provisional[rej.location] = rej;
        } else {
          decided.insert(rej.location);
          result.report.rejected.push_back(rej);
        }
      }
      for (const DiamondRegion &d : scan.diamonds) {
        provisional.erase(d.location());
        decided.insert(d.location());
        const BasicBlock *bb = f.findBlock(d.branchBlock);
        InstRef ref{d.branchBlock, unsigned(bb->insts.size() - 1)};
        MergeAttempt attempt = tryMerge(f, ref, fx);
        if (attempt.rejected) {
          result.report.rejected.push_back(*attempt.rejected);
          continue;
        }
        f = std::move(attempt.merged->function);
        result.report.merges.push_back(*attempt.record);
        progress = true;
        break;
      }
      if (progress)
        break;
    }
    if (!progress)
      break;
    fx = analyzeProgram(cur);
  }

  for (auto &[loc, rej] : provisional)
    result.report.rejected.push_back(rej);
  result.report.found =
      unsigned(result.report.merges.size() + result.report.rejected.size());
  return result;
}

} // namespace mse
