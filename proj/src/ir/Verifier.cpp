//===-- Verifier.cpp - Structural and SSA checks for MIR modules ----------===//

#include "mse/CFG.h"
#include "mse/IR.h"

#include <map>

namespace mse {

namespace {

class FunctionVerifier {
public:
  FunctionVerifier(const Module &m, const Function &f,
                   std::vector<Diagnostic> &out)
      : m(m), f(f), out(out) {}

  void run() {
    if (f.blocks.empty()) {
      report("empty-function", "", -1, "function has no blocks");
      return;
    }
    collectDefinitions();
    checkPlacement();
    checkLabels();
    cfg = computeCfgInfo(f);
    if (!cfg.preds[0].empty())
      report("entry-predecessors", f.blocks[0].label, -1,
             "entry block has predecessors");
    checkPhiIncoming();
    checkOperands();
  }

private:
  const Module &m;
  const Function &f;
  std::vector<Diagnostic> &out;
  CfgInfo cfg;
  // Definition site of every SSA id; params map to block -1.
  std::map<std::string, std::pair<int, int>> defs;
  std::map<std::string, Type> types;

  void report(std::string rule, std::string block, int index,
              std::string message) {
    out.push_back({std::move(rule), f.name, std::move(block), index,
                   std::move(message)});
  }

  void collectDefinitions() {
    for (const Param &p : f.params) {
      if (!defs.emplace(p.name, std::pair{-1, -1}).second)
        report("unique-ids", "", -1, "duplicate parameter %" + p.name);
      types[p.name] = p.type;
    }
    for (int b = 0; b < int(f.blocks.size()); ++b)
      for (int i = 0; i < int(f.blocks[b].insts.size()); ++i) {
        const Instruction &inst = f.blocks[b].insts[i];
        if (!inst.hasResult())
          continue;
        if (!defs.emplace(inst.id, std::pair{b, i}).second)
          report("unique-ids", f.blocks[b].label, i,
                 "value %" + inst.id + " defined more than once");
        types[inst.id] =
            inst.op == Opcode::ICmp ? Type::intTy(1) : inst.type;
      }
    std::set<std::string> labels;
    for (const BasicBlock &bb : f.blocks)
      if (!labels.insert(bb.label).second)
        report("unique-labels", bb.label, -1, "duplicate block label");
  }

  void checkPlacement() {
    for (const BasicBlock &bb : f.blocks) {
      if (bb.insts.empty() || !isTerminator(bb.insts.back().op))
        report("terminator-placement", bb.label, -1,
               "block does not end with a terminator");
      bool seenNonPhi = false;
      for (int i = 0; i < int(bb.insts.size()); ++i) {
        const Instruction &inst = bb.insts[i];
        if (isTerminator(inst.op) && i + 1 != int(bb.insts.size()))
          report("terminator-placement", bb.label, i,
                 "terminator in the middle of a block");
        if (inst.op == Opcode::Phi) {
          if (seenNonPhi)
            report("phi-placement", bb.label, i,
                   "phi after a non-phi instruction");
        } else {
          seenNonPhi = true;
        }
      }
    }
  }

  void checkLabels() {
    for (const BasicBlock &bb : f.blocks)
      for (int i = 0; i < int(bb.insts.size()); ++i) {
        const Instruction &inst = bb.insts[i];
        for (const std::string &l : inst.labels)
          if (f.blockIndex(l) < 0)
            report("unresolved-label", bb.label, i, "unknown block '" + l + "'");
        if (inst.op == Opcode::Call && !m.findFunction(inst.callee))
          report("unresolved-callee", bb.label, i,
                 "unknown function @" + inst.callee);
      }
  }

  void checkPhiIncoming() {
    for (unsigned b = 0; b < f.blocks.size(); ++b) {
      std::set<std::string> predLabels;
      for (unsigned p : cfg.preds[b])
        predLabels.insert(f.blocks[p].label);
      for (int i = 0; i < int(f.blocks[b].insts.size()); ++i) {
        const Instruction &inst = f.blocks[b].insts[i];
        if (inst.op != Opcode::Phi)
          continue;
        std::set<std::string> incoming(inst.labels.begin(), inst.labels.end());
        if (incoming != predLabels || incoming.size() != inst.labels.size())
          report("phi-incoming", f.blocks[b].label, i,
                 "phi incoming blocks do not match predecessors");
      }
    }
  }

  std::optional<Type> operandType(const Operand &op) const {
    if (!op.isValue())
      return std::nullopt;
    auto it = types.find(op.name);
    if (it == types.end())
      return std::nullopt;
    return it->second;
  }

  void expectInt(const Operand &op, unsigned width, const std::string &block,
                 int index, const char *what) {
    if (op.isString()) {
      report("type", block, index, std::string(what) + " cannot be a string");
      return;
    }
    auto t = operandType(op);
    if (t && !(t->isInt() && t->width == width))
      report("type", block, index,
             std::string(what) + " has type " + t->str() + ", expected i" +
                 std::to_string(width));
  }

  void expectAddr(const Operand &op, const std::string &block, int index,
                  const char *what) {
    auto t = operandType(op);
    if (!op.isValue() || (t && !t->isAddr()))
      report("type", block, index, std::string(what) + " must be an address");
  }

  void checkArity(const Instruction &inst, const std::string &block,
                  int index) {
    size_t n = inst.operands.size(), lo = 0, hi = SIZE_MAX;
    switch (inst.op) {
    case Opcode::ZExt: case Opcode::SExt: case Opcode::Trunc:
    case Opcode::Load: case Opcode::Assert: case Opcode::VaArg:
      lo = hi = 1;
      break;
    case Opcode::ICmp: case Opcode::Store: case Opcode::Gep:
      lo = hi = 2;
      break;
    case Opcode::Select:
      lo = hi = 3;
      break;
    case Opcode::Alloca:
      lo = hi = 0;
      break;
    case Opcode::MakeSymbolic:
      lo = 3;
      hi = 4;
      break;
    case Opcode::Br:
      lo = 0;
      hi = 1;
      break;
    case Opcode::Ret:
      lo = hi = inst.type.isVoid() ? 0 : 1;
      break;
    case Opcode::Phi:
      lo = 1;
      break;
    case Opcode::Call:
      if (const Function *callee = m.findFunction(inst.callee)) {
        lo = callee->params.size();
        hi = callee->variadic ? SIZE_MAX : lo;
      }
      break;
    default:
      lo = hi = 2;
      break;
    }
    if (n < lo || n > hi)
      report("arity", block, index,
             std::string(opcodeName(inst.op)) + " has " + std::to_string(n) +
                 " operands");
    if (inst.op == Opcode::Br && inst.labels.size() != (n == 1 ? 2u : 1u))
      report("arity", block, index, "br has wrong number of targets");
    if (inst.op == Opcode::Phi && inst.labels.size() != n)
      report("arity", block, index, "phi operand/label count mismatch");
  }

  void checkTypes(const Instruction &inst, const std::string &block,
                  int index) {
    const auto &ops = inst.operands;
    if (isBinaryOp(inst.op) || inst.op == Opcode::ICmp) {
      if (!inst.type.isInt()) {
        report("type", block, index, "arithmetic on non-integer type");
        return;
      }
      for (const Operand &op : ops)
        expectInt(op, inst.type.width, block, index, "operand");
    } else if (isCastOp(inst.op) && ops.size() == 1) {
      expectInt(ops[0], inst.srcType.width, block, index, "cast operand");
      bool ok = inst.op == Opcode::Trunc ? inst.type.width < inst.srcType.width
                                         : inst.type.width > inst.srcType.width;
      if (!ok)
        report("type", block, index, "invalid cast widths");
    } else if (inst.op == Opcode::Select && ops.size() == 3) {
      expectInt(ops[0], 1, block, index, "select condition");
      if (inst.type.isInt()) {
        expectInt(ops[1], inst.type.width, block, index, "select operand");
        expectInt(ops[2], inst.type.width, block, index, "select operand");
      }
    } else if (inst.op == Opcode::Load && ops.size() == 1) {
      expectAddr(ops[0], block, index, "load address");
      auto t = operandType(ops[0]);
      if (t && t->isAddr() && t->width != inst.type.width)
        report("type", block, index, "load type does not match element type");
    } else if (inst.op == Opcode::Store && ops.size() == 2) {
      expectInt(ops[0], inst.type.width, block, index, "stored value");
      expectAddr(ops[1], block, index, "store address");
      auto t = operandType(ops[1]);
      if (t && t->isAddr() && t->width != inst.type.width)
        report("type", block, index, "store type does not match element type");
    } else if (inst.op == Opcode::Gep && ops.size() == 2) {
      expectAddr(ops[0], block, index, "gep base");
      auto t = operandType(ops[0]);
      if (t && t->isAddr() && !(*t == inst.type))
        report("type", block, index, "gep result type differs from base type");
      if (ops[1].isString())
        report("type", block, index, "gep index cannot be a string");
    } else if (inst.op == Opcode::Br && ops.size() == 1) {
      expectInt(ops[0], 1, block, index, "branch condition");
    } else if (inst.op == Opcode::Assert && ops.size() == 1) {
      expectInt(ops[0], 1, block, index, "assert condition");
    } else if (inst.op == Opcode::MakeSymbolic && ops.size() >= 3) {
      expectAddr(ops[0], block, index, "make_symbolic target");
      if (!ops[1].isConst() || ops[1].constant <= 0)
        report("type", block, index, "make_symbolic length must be a positive constant");
      if (!ops[2].isString())
        report("type", block, index, "make_symbolic name must be a string");
      if (ops.size() == 4 && (!ops[3].isConst() || ops[3].constant <= 0))
        report("type", block, index, "make_symbolic bit count must be a positive constant");
    } else if (inst.op == Opcode::VaArg && ops.size() == 1) {
      if (!f.variadic)
        report("type", block, index, "va_arg in a non-variadic function");
      if (!ops[0].isConst() || ops[0].constant < 0)
        report("type", block, index, "va_arg index must be a non-negative constant");
    } else if (inst.op == Opcode::Ret) {
      if (!(inst.type == f.retType))
        report("type", block, index, "return type mismatch");
    } else if (inst.op == Opcode::Call) {
      if (const Function *callee = m.findFunction(inst.callee)) {
        if (!(callee->retType == inst.type))
          report("type", block, index, "call return type mismatch");
        for (size_t i = 0; i < ops.size() && i < callee->params.size(); ++i) {
          const Type &pt = callee->params[i].type;
          if (pt.isAddr()) {
            auto t = operandType(ops[i]);
            if (!ops[i].isValue() || (t && !(*t == pt)))
              report("type", block, index, "argument type mismatch");
          } else {
            expectInt(ops[i], pt.width, block, index, "argument");
          }
        }
      }
    }
  }

  /// Does the definition of `name` dominate the use at (block b, index i)?
  bool dominatesUse(const std::string &name, int b, int i) const {
    auto it = defs.find(name);
    if (it == defs.end())
      return false;
    auto [db, di] = it->second;
    if (db == -1)
      return true;
    if (db == b)
      return di < i;
    return cfg.dominates(unsigned(db), unsigned(b));
  }

  void checkOperands() {
    for (int b = 0; b < int(f.blocks.size()); ++b) {
      const BasicBlock &bb = f.blocks[b];
      for (int i = 0; i < int(bb.insts.size()); ++i) {
        const Instruction &inst = bb.insts[i];
        checkArity(inst, bb.label, i);
        checkTypes(inst, bb.label, i);
        if (!cfg.reachable[b])
          continue;
        for (size_t k = 0; k < inst.operands.size(); ++k) {
          const Operand &op = inst.operands[k];
          if (!op.isValue())
            continue;
          if (!defs.count(op.name)) {
            report("undefined-value", bb.label, i,
                   "use of undefined value %" + op.name);
            continue;
          }
          bool ok;
          if (inst.op == Opcode::Phi && k < inst.labels.size()) {
            int from = f.blockIndex(inst.labels[k]);
            auto [db, di] = defs.at(op.name);
            ok = from < 0 || !cfg.reachable[from] || db == -1 ||
                 db == from ||
                 cfg.dominates(unsigned(db), unsigned(from));
          } else {
            ok = dominatesUse(op.name, b, i);
          }
          if (!ok)
            report("ssa-dominance", bb.label, i,
                   "%" + op.name + " does not dominate its use");
        }
      }
    }
  }
};

} // namespace

std::vector<Diagnostic> validateModule(const Module &m) {
  std::vector<Diagnostic> diags;
  std::set<std::string> names;
  for (const Function &f : m.functions) {
    if (!names.insert(f.name).second)
      diags.push_back({"unique-functions", f.name, "", -1,
                       "function defined more than once"});
    FunctionVerifier(m, f, diags).run();
  }
  return diags;
}

} // namespace mse
