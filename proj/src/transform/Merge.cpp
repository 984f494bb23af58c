//===-- Merge.cpp - Melding of completely aligned arms --------------------===//
//
// Each aligned pair becomes one instruction in the branch block. An operand
// position needs a select only when the two sources differ and are not
// themselves a melded pair (or provably the same address). Join phis over the
// two arms become selects, the branch turns into a jump, and the join block is
// fused into the branch block when nothing else reaches it.
//
//===----------------------------------------------------------------------===//

#include "mse/Transform.h"

#include "Naming.h"

#include <algorithm>
#include <map>

namespace mse {

namespace {

bool isAddressPosition(const Instruction &inst, unsigned k) {
  switch (inst.op) {
  case Opcode::Load:
    return k == 0;
  case Opcode::Store:
    return k == 1;
  case Opcode::Gep:
    return k == 0;
  default:
    return false;
  }
}

Type fallbackOperandType(const Instruction &inst, unsigned k) {
  if (isCastOp(inst.op))
    return inst.srcType;
  if (inst.op == Opcode::Select && k == 0)
    return Type::intTy(1);
  if (inst.op == Opcode::Gep)
    return k == 0 ? inst.type : Type::intTy(32);
  return inst.type;
}

void replaceUses(Function &f, const std::string &from, const Operand &to) {
  for (BasicBlock &bb : f.blocks)
    for (Instruction &inst : bb.insts)
      for (Operand &op : inst.operands)
        if (op.isValue() && op.name == from)
          op = to;
}

unsigned countEdgesInto(const Function &f, const std::string &label) {
  unsigned n = 0;
  for (const BasicBlock &bb : f.blocks)
    for (const std::string &s : bb.successors())
      if (s == label)
        ++n;
  return n;
}

/// Folds the join block into the branch block when the branch block is its
/// only predecessor.
void fuseJoin(Function &g, const std::string &branch, const std::string &join) {
  if (join == g.entryLabel() || countEdgesInto(g, join) != 1)
    return;
  BasicBlock *jb = g.findBlock(join);
  BasicBlock *bb = g.findBlock(branch);
  if (!jb || !bb || bb->successors() != std::vector<std::string>{join})
    return;

  std::vector<Instruction> body;
  std::vector<std::pair<std::string, Operand>> phiValues;
  for (const Instruction &inst : jb->insts) {
    if (inst.op == Opcode::Phi)
      phiValues.push_back({inst.id, inst.operands[0]});
    else
      body.push_back(inst);
  }
  Instruction &term = body.back();
  if (term.isConditionalBranch() && term.origin.empty())
    term.origin = join;

  body.front().srcLines.insert(bb->terminator().srcLines.begin(),
                               bb->terminator().srcLines.end());
  bb->insts.pop_back();
  bb->insts.insert(bb->insts.end(), body.begin(), body.end());
  std::vector<std::string> succs = bb->successors();
  for (const std::string &s : succs)
    for (Instruction &inst : g.findBlock(s)->insts) {
      if (inst.op != Opcode::Phi)
        break;
      for (std::string &l : inst.labels)
        if (l == join)
          l = branch;
    }
  g.blocks.erase(g.blocks.begin() + g.blockIndex(join));
  for (const auto &[id, value] : phiValues)
    replaceUses(g, id, value);
}

} // namespace

MergeResult mergeDiamond(const Function &f, const DiamondRegion &d,
                         const DeadInsertion &arms) {
  MergeResult result;
  Function &g = result.function;
  g = f;
  NameScope names(f);
  for (const Instruction &inst : arms.thenArm)
    names.reserve(inst.id);
  for (const Instruction &inst : arms.elseArm)
    names.reserve(inst.id);

  std::map<std::string, Type> types = f.valueTypes();
  for (const auto *arm : {&arms.thenArm, &arms.elseArm})
    for (const Instruction &inst : *arm)
      if (inst.hasResult())
        types[inst.id] = inst.op == Opcode::ICmp ? Type::intTy(1) : inst.type;

  MemoryContext ctx{&f, nullptr};
  std::map<std::string, std::string> rename;
  auto remap = [&](const Operand &op) {
    if (op.isValue()) {
      auto it = rename.find(op.name);
      if (it != rename.end())
        return Operand::value(it->second);
    }
    return op;
  };

  std::vector<Instruction> merged;
  auto makeSelect = [&](const Type &ty, const Operand &t, const Operand &e,
                        const std::set<unsigned> &lines) {
    Instruction s;
    s.op = Opcode::Select;
    s.id = names.fresh("sel");
    s.type = ty;
    s.operands = {d.condition, t, e};
    s.srcLines = lines;
    s.origin = d.locationLabel;
    merged.push_back(s);
    ++result.selects;
    return Operand::value(s.id);
  };

  for (const AlignedPair &p : arms.alignment.pairs) {
    const Instruction &a = arms.thenArm[*p.thenIdx];
    const Instruction &b = arms.elseArm[*p.elseIdx];
    Instruction m = a;
    m.srcLines.insert(b.srcLines.begin(), b.srcLines.end());
    m.dead = a.dead && b.dead;
    m.origin = d.locationLabel;
    if (a.hasResult())
      m.id = a.dead ? b.id : a.id;
    for (unsigned k = 0; k < a.operands.size(); ++k) {
      const Operand &oa = a.operands[k], &ob = b.operands[k];
      Operand ra = remap(oa), rb = remap(ob);
      if (ra == rb || (isAddressPosition(a, k) && addressesIdentical(oa, ob, ctx))) {
        m.operands[k] = ra;
        continue;
      }
      Type ty = fallbackOperandType(a, k);
      if (oa.isValue() && types.count(oa.name))
        ty = types[oa.name];
      else if (ob.isValue() && types.count(ob.name))
        ty = types[ob.name];
      m.operands[k] = makeSelect(ty, ra, rb, m.srcLines);
    }
    if (a.hasResult()) {
      rename[a.id] = m.id;
      rename[b.id] = m.id;
    }
    merged.push_back(std::move(m));
  }

  BasicBlock *jb = g.findBlock(d.joinBlock);
  for (Instruction &phi : jb->insts) {
    if (phi.op != Opcode::Phi)
      break;
    auto ti = std::find(phi.labels.begin(), phi.labels.end(), d.thenBlock);
    auto ei = std::find(phi.labels.begin(), phi.labels.end(), d.elseBlock);
    if (ti == phi.labels.end() || ei == phi.labels.end())
      continue;
    size_t tIdx = size_t(ti - phi.labels.begin());
    size_t eIdx = size_t(ei - phi.labels.begin());
    Operand vt = remap(phi.operands[tIdx]), ve = remap(phi.operands[eIdx]);
    Operand v = vt == ve ? vt : makeSelect(phi.type, vt, ve, phi.srcLines);
    for (size_t idx : {std::max(tIdx, eIdx), std::min(tIdx, eIdx)}) {
      phi.operands.erase(phi.operands.begin() + long(idx));
      phi.labels.erase(phi.labels.begin() + long(idx));
    }
    phi.operands.push_back(v);
    phi.labels.push_back(d.branchBlock);
  }

  BasicBlock *bb = g.findBlock(d.branchBlock);
  Instruction jump;
  jump.op = Opcode::Br;
  jump.labels = {d.joinBlock};
  jump.srcLines = bb->terminator().srcLines;
  bb->insts.pop_back();
  bb->insts.insert(bb->insts.end(), merged.begin(), merged.end());
  bb->insts.push_back(jump);

  for (const std::string &arm : {d.thenBlock, d.elseBlock})
    g.blocks.erase(g.blocks.begin() + g.blockIndex(arm));

  fuseJoin(g, d.branchBlock, d.joinBlock);
  return result;
}

} // namespace mse
