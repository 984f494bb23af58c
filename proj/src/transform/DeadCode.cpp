//===-- DeadCode.cpp - Dead partner insertion -----------------------------===//
//
// Every unaligned instruction receives a dead partner in the other arm so the
// alignment becomes complete. Operands of a dead partner follow the partner
// arm's def-use chain when the producing instruction is paired, and fall back
// to a neutral constant otherwise. A dead store writes back the value freshly
// loaded from its own address; the load gets a dead mirror in the other arm.
//
//===----------------------------------------------------------------------===//

#include "mse/Transform.h"

#include "Naming.h"

#include <map>

namespace mse {

int64_t neutralOperand(Opcode op, unsigned) {
  switch (op) {
  case Opcode::Mul:
  case Opcode::UDiv:
  case Opcode::SDiv:
    return 1;
  default:
    return 0;
  }
}

namespace {

std::vector<Instruction> armBody(const Function &f, const std::string &label) {
  const BasicBlock *bb = f.findBlock(label);
  if (!bb)
    return {};
  return {bb->insts.begin(), bb->insts.end() - 1};
}

bool supportsDeadPartner(Opcode op) {
  return isALUOp(op) || isMemoryOp(op) || op == Opcode::Gep;
}

class DeadInserter {
public:
  DeadInserter(const Function &f, const DiamondRegion &d, const Alignment &a)
      : names(f), align(a), then(armBody(f, d.thenBlock)),
        els(armBody(f, d.elseBlock)), location(d.location()) {
    for (const Instruction &inst : then)
      if (inst.hasResult())
        armOf[inst.id] = 0;
    for (const Instruction &inst : els)
      if (inst.hasResult())
        armOf[inst.id] = 1;
  }

  DeadInsertion run() {
    DeadInsertion out;
    for (const AlignedPair &p : align.pairs) {
      if (p.thenIdx && p.elseIdx) {
        const Instruction &a = then[*p.thenIdx], &b = els[*p.elseIdx];
        link(a.id, b.id);
        emit(out, a, b);
        continue;
      }
      unsigned side = p.thenIdx ? 0 : 1;
      const Instruction &orig = side == 0 ? then[*p.thenIdx] : els[*p.elseIdx];
      if (!supportsDeadPartner(orig.op)) {
        out.rejected = Rejection{location, RejectReason::UnsupportedOpcode,
                                 std::string(opcodeName(orig.op)) +
                                     " has no dead counterpart"};
        return out;
      }
      if (orig.op == Opcode::Store)
        deadStore(out, orig, side);
      else
        deadCopy(out, orig, side);
    }
    return out;
  }

private:
  NameScope names;
  const Alignment &align;
  std::vector<Instruction> then, els;
  std::string location;
  std::map<std::string, unsigned> armOf;
  std::map<std::string, std::string> partner;

  void link(const std::string &a, const std::string &b) {
    if (a.empty() || b.empty())
      return;
    partner[a] = b;
    partner[b] = a;
  }

  void emit(DeadInsertion &out, const Instruction &a, const Instruction &b) {
    out.alignment.pairs.push_back({unsigned(out.thenArm.size()),
                                   unsigned(out.elseArm.size()), true});
    out.thenArm.push_back(a);
    out.elseArm.push_back(b);
  }

  void emitSided(DeadInsertion &out, const Instruction &orig,
                 const Instruction &dead, unsigned side) {
    if (side == 0)
      emit(out, orig, dead);
    else
      emit(out, dead, orig);
    ++out.deadInserted;
  }

  /// Operand of `orig` as seen from the partner arm: in-arm values map to
  /// their partners; anything else is kept unless a neutral constant is
  /// requested.
  std::optional<Operand> mirror(const Operand &op) const {
    if (op.isValue() && armOf.count(op.name)) {
      auto it = partner.find(op.name);
      if (it != partner.end())
        return Operand::value(it->second);
    }
    if (op.isValue() && armOf.count(op.name))
      return std::nullopt;
    return op;
  }

  Instruction deadTemplate(const Instruction &orig) {
    Instruction dead = orig;
    dead.dead = true;
    dead.origin.clear();
    if (orig.hasResult())
      dead.id = names.fresh(orig.id + ".dead");
    return dead;
  }

  void deadCopy(DeadInsertion &out, const Instruction &orig, unsigned side) {
    Instruction dead = deadTemplate(orig);
    for (unsigned k = 0; k < orig.operands.size(); ++k) {
      const Operand &op = orig.operands[k];
      bool inArm = op.isValue() && armOf.count(op.name);
      if (isALUOp(orig.op)) {
        dead.operands[k] = inArm ? *mirror(op)
                                 : Operand::constantInt(neutralOperand(orig.op, k));
      } else {
        dead.operands[k] = *mirror(op);
      }
    }
    link(orig.id, dead.id);
    emitSided(out, orig, dead, side);
  }

  void deadStore(DeadInsertion &out, const Instruction &orig, unsigned side) {
    const Operand &addr = orig.operands[1];
    Operand mirroredAddr = *mirror(addr);

    Instruction ownLoad;
    ownLoad.op = Opcode::Load;
    ownLoad.type = orig.type;
    ownLoad.operands = {addr};
    ownLoad.srcLines = orig.srcLines;
    ownLoad.dead = true;
    ownLoad.id = names.fresh("reload");

    Instruction partnerLoad = ownLoad;
    partnerLoad.operands = {mirroredAddr};
    partnerLoad.id = names.fresh("reload");

    Instruction store = deadTemplate(orig);
    store.operands = {Operand::value(partnerLoad.id), mirroredAddr};

    if (side == 0)
      emit(out, ownLoad, partnerLoad);
    else
      emit(out, partnerLoad, ownLoad);
    out.deadInserted += 2;
    emitSided(out, orig, store, side);
  }
};

} // namespace

DeadInsertion insertDeadInstructions(const Function &f, const DiamondRegion &d,
                                     const Alignment &a) {
  return DeadInserter(f, d, a).run();
}

} // namespace mse
