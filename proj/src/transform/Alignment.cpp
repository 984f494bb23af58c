//===-- Alignment.cpp - Instruction sequence alignment --------------------===//
//
// Optimal order-preserving alignment: match score 1 for a compatible pair,
// gap score 0. The suffix table lets the traceback run front to back so that,
// among optimal alignments, the earliest possible match is taken first.
//
//===----------------------------------------------------------------------===//

#include "mse/Transform.h"

namespace mse {

namespace {

const Instruction *definition(const Function *f, const std::string &id) {
  if (!f)
    return nullptr;
  for (const BasicBlock &bb : f->blocks)
    for (const Instruction &inst : bb.insts)
      if (inst.id == id)
        return &inst;
  return nullptr;
}

unsigned addressOperand(const Instruction &inst) {
  return inst.op == Opcode::Store ? 1 : 0;
}

bool isSymbolicOperand(const Operand &op, const MemoryContext &ctx) {
  return ctx.facts && ctx.function &&
         ctx.facts->isSymbolic(ctx.function->name, op);
}

} // namespace

bool Alignment::isComplete() const {
  for (const AlignedPair &p : pairs)
    if (p.isGap())
      return false;
  return true;
}

unsigned Alignment::matchCount() const {
  unsigned n = 0;
  for (const AlignedPair &p : pairs)
    if (!p.isGap() && p.compatible)
      ++n;
  return n;
}

bool addressesIdentical(const Operand &a, const Operand &b,
                        const MemoryContext &ctx) {
  if (a == b)
    return true;
  if (!a.isValue() || !b.isValue())
    return false;
  const Instruction *da = definition(ctx.function, a.name);
  const Instruction *db = definition(ctx.function, b.name);
  if (!da || !db || da->op != Opcode::Gep || db->op != Opcode::Gep)
    return false;
  if (!addressesIdentical(da->operands[0], db->operands[0], ctx))
    return false;
  const Operand &ia = da->operands[1], &ib = db->operands[1];
  return ia == ib;
}

MemoryVerdict checkMemoryCriteria(const Instruction &a, const Instruction &b,
                                  const MemoryContext &ctx) {
  const Operand &pa = a.operands[addressOperand(a)];
  const Operand &pb = b.operands[addressOperand(b)];
  if (isSymbolicOperand(pa, ctx) || isSymbolicOperand(pb, ctx))
    return MemoryVerdict::RejectDiamond;
  if (addressesIdentical(pa, pb, ctx))
    return MemoryVerdict::Merge;
  return MemoryVerdict::SplitToUnaligned;
}

bool instructionsCompatible(const Instruction &a, const Instruction &b,
                            const MemoryContext &ctx) {
  if (a.op != b.op || !(a.type == b.type))
    return false;
  if (isALUOp(a.op)) {
    if (a.op == Opcode::ICmp && a.pred != b.pred)
      return false;
    if (isCastOp(a.op) && !(a.srcType == b.srcType))
      return false;
    return true;
  }
  if (isMemoryOp(a.op))
    return checkMemoryCriteria(a, b, ctx) == MemoryVerdict::Merge;
  if (a.op == Opcode::Gep)
    return addressesIdentical(a.operands[0], b.operands[0], ctx) &&
           a.operands[1] == b.operands[1];
  return false;
}

Alignment alignInstructions(const std::vector<Instruction> &thenArm,
                            const std::vector<Instruction> &elseArm,
                            const MemoryContext &ctx) {
  size_t n = thenArm.size(), m = elseArm.size();
  std::vector<std::vector<char>> compat(n, std::vector<char>(m, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j)
      compat[i][j] = instructionsCompatible(thenArm[i], elseArm[j], ctx);

  // best[i][j]: maximum matches aligning thenArm[i..] with elseArm[j..].
  std::vector<std::vector<unsigned>> best(n + 1, std::vector<unsigned>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;) {
      unsigned v = std::max(best[i + 1][j], best[i][j + 1]);
      if (compat[i][j])
        v = std::max(v, best[i + 1][j + 1] + 1);
      best[i][j] = v;
    }

  Alignment a;
  size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && compat[i][j] && best[i][j] == best[i + 1][j + 1] + 1) {
      a.pairs.push_back({unsigned(i), unsigned(j), true});
      ++i, ++j;
    } else if (i < n && (j == m || best[i][j] == best[i + 1][j])) {
      a.pairs.push_back({unsigned(i), std::nullopt, false});
      ++i;
    } else {
      a.pairs.push_back({std::nullopt, unsigned(j), false});
      ++j;
    }
  }
  return a;
}

} // namespace mse
