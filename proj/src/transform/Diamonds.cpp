//===-- Diamonds.cpp - Candidate diamond discovery ------------------------===//
//
// A candidate is a symbolic conditional branch whose two arms are single
// blocks with the branch block as only predecessor and an unconditional jump
// to a common join block. An if-then whose arm jumps straight to the other
// successor is canonicalized by inserting an empty arm on the direct edge.
//
//===----------------------------------------------------------------------===//

#include "mse/Transform.h"

#include "Naming.h"

#include <algorithm>

namespace mse {

std::string branchLocationLabel(const BasicBlock &bb) {
  const Instruction &br = bb.terminator();
  return br.origin.empty() ? bb.label : br.origin;
}

std::string_view rejectReasonName(RejectReason r) {
  switch (r) {
  case RejectReason::SymbolicAddress:
    return "symbolic-address";
  case RejectReason::UnsupportedOpcode:
    return "unsupported-opcode";
  case RejectReason::LocationConstrained:
    return "location-constrained";
  case RejectReason::Shape:
    return "shape";
  }
  return "unknown";
}

namespace {

enum class ArmShape { Arm, NotArm, CallInside };

unsigned countPreds(const Function &f, const std::string &label) {
  unsigned n = 0;
  for (const BasicBlock &bb : f.blocks)
    for (const std::string &s : bb.successors())
      if (s == label)
        ++n;
  return n;
}

/// Classifies `label` as a single-block arm hanging off `branch`; on success
/// `join` receives its successor.
ArmShape classifyArm(const Function &f, const std::string &label,
                     const std::string &branch, std::string &join) {
  const BasicBlock *bb = f.findBlock(label);
  if (!bb || label == branch || label == f.entryLabel())
    return ArmShape::NotArm;
  if (countPreds(f, label) != 1)
    return ArmShape::NotArm;
  const Instruction &term = bb->terminator();
  if (term.op != Opcode::Br || term.isConditionalBranch())
    return ArmShape::NotArm;
  for (size_t i = 0; i + 1 < bb->insts.size(); ++i)
    if (bb->insts[i].op == Opcode::Call)
      return ArmShape::CallInside;
  join = term.labels[0];
  if (join == label || join == branch)
    return ArmShape::NotArm;
  return ArmShape::Arm;
}

void retargetPhis(BasicBlock &bb, const std::string &from,
                  const std::string &to) {
  for (Instruction &inst : bb.insts) {
    if (inst.op != Opcode::Phi)
      break;
    for (std::string &l : inst.labels)
      if (l == from)
        l = to;
  }
}

} // namespace

CandidateScan findCandidateDiamonds(const Function &f,
                                    const std::vector<InstRef> &branches,
                                    const LocationConstraints &lc) {
  CandidateScan scan;
  scan.canonical = f;
  NameScope names(f);
  Function &g = scan.canonical;

  for (const InstRef &ref : branches) {
    const BasicBlock *bb = g.findBlock(ref.block);
    if (!bb || bb->insts.empty() || !bb->terminator().isConditionalBranch())
      continue;
    const Instruction &br = bb->terminator();
    DiamondRegion d;
    d.function = f.name;
    d.branchBlock = bb->label;
    d.condition = br.operands[0];
    d.locationLabel = branchLocationLabel(*bb);
    std::string loc = d.location();

    if (lc.count(loc)) {
      scan.rejected.push_back({loc, RejectReason::LocationConstrained, ""});
      continue;
    }
    std::string tl = br.labels[0], el = br.labels[1];
    if (tl == el) {
      scan.rejected.push_back({loc, RejectReason::Shape, "both edges reach the same block"});
      continue;
    }

    std::string tj, ej;
    ArmShape ts = classifyArm(g, tl, d.branchBlock, tj);
    ArmShape es = classifyArm(g, el, d.branchBlock, ej);
    if (ts == ArmShape::CallInside || es == ArmShape::CallInside) {
      scan.rejected.push_back({loc, RejectReason::Shape, "arm contains a call"});
      continue;
    }

    std::string synthesizeOn; // "then" or "else" edge gets a fresh empty arm
    if (ts == ArmShape::Arm && es == ArmShape::Arm && tj == ej) {
      d.thenBlock = tl;
      d.elseBlock = el;
      d.joinBlock = tj;
    } else if (ts == ArmShape::Arm && tj == el) {
      d.thenBlock = tl;
      d.joinBlock = el;
      synthesizeOn = "else";
    } else if (es == ArmShape::Arm && ej == tl) {
      d.elseBlock = el;
      d.joinBlock = tl;
      synthesizeOn = "then";
    } else {
      scan.rejected.push_back({loc, RejectReason::Shape,
                               "arms are not single blocks meeting at a join"});
      continue;
    }

    if (!synthesizeOn.empty()) {
      std::string label = names.fresh(d.branchBlock + "." + synthesizeOn);
      BasicBlock arm;
      arm.label = label;
      Instruction jump;
      jump.op = Opcode::Br;
      jump.labels = {d.joinBlock};
      arm.insts.push_back(jump);

      BasicBlock *branchBB = g.findBlock(d.branchBlock);
      unsigned edge = synthesizeOn == "then" ? 0 : 1;
      branchBB->terminator().labels[edge] = label;
      retargetPhis(*g.findBlock(d.joinBlock), d.branchBlock, label);
      int at = g.blockIndex(d.branchBlock);
      g.blocks.insert(g.blocks.begin() + at + 1, std::move(arm));

      (edge == 0 ? d.thenBlock : d.elseBlock) = label;
      d.synthesizedArm = label;
    }
    scan.diamonds.push_back(std::move(d));
  }
  return scan;
}

} // namespace mse
