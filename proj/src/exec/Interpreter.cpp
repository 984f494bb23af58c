//===-- Interpreter.cpp - Concrete execution ------------------------------===//
//
// Straightforward frame-based interpreter over MIR. Addresses are pairs of
// object number and element offset; bounds are checked at each access.
//
//===----------------------------------------------------------------------===//

#include "mse/Executor.h"

#include "ExecCommon.h"

#include <stdexcept>

namespace mse {

std::string_view crashKindName(CrashKind k) {
  switch (k) {
  case CrashKind::OobLoad: return "oob-load";
  case CrashKind::OobStore: return "oob-store";
  case CrashKind::DivByZero: return "div-by-zero";
  case CrashKind::AssertFail: return "assert-fail";
  }
  return "unknown";
}

std::string_view classificationName(Classification c) {
  switch (c) {
  case Classification::Unclassified: return "unclassified";
  case Classification::TruePositive: return "true-positive";
  case Classification::FalsePositive: return "false-positive";
  }
  return "unknown";
}

std::string_view terminationName(Termination t) {
  switch (t) {
  case Termination::Exhausted: return "exhausted";
  case Termination::TimeBudget: return "time-budget";
  case Termination::PathBudget: return "path-budget";
  case Termination::Aborted: return "aborted";
  }
  return "unknown";
}

std::string CrashSite::str() const {
  return function + ":" + block + ":" + std::to_string(index);
}

std::string CrashSite::originLocation() const {
  return origin.empty() ? std::string() : locationId(function, origin);
}

std::string CrashReport::inputHex() const {
  static const char *digits = "0123456789abcdef";
  std::string out;
  for (const auto &[name, cells] : input) {
    if (!out.empty())
      out += ";";
    out += name + "=";
    for (uint64_t c : cells) {
      out += digits[(c >> 4) & 0xf];
      out += digits[c & 0xf];
    }
  }
  return out;
}

std::vector<SymbolicDecl> symbolicDecls(const Module &m) {
  std::vector<SymbolicDecl> out;
  if (const Function *entry = m.findFunction(m.entry))
    for (const Param &p : entry->params)
      if (p.type.isInt())
        out.push_back({p.name, 1, p.type.width});
  std::map<std::string, unsigned> seen;
  for (const Function &f : m.functions)
    for (const BasicBlock &bb : f.blocks)
      for (const Instruction &inst : bb.insts) {
        if (inst.op != Opcode::MakeSymbolic)
          continue;
        const std::string &base = inst.operands[2].name;
        unsigned n = seen[base]++;
        SymbolicDecl d;
        d.name = symbolicObjectName(base, n);
        d.length = uint32_t(inst.operands[1].constant);
        if (inst.operands.size() == 4) {
          d.bits = unsigned(inst.operands[3].constant);
        } else {
          auto types = f.valueTypes();
          auto it = types.find(inst.operands[0].name);
          d.bits = it != types.end() ? it->second.width : 8;
        }
        out.push_back(d);
      }
  return out;
}

unsigned totalSymbolicBits(const std::vector<SymbolicDecl> &decls) {
  unsigned bits = 0;
  for (const SymbolicDecl &d : decls)
    bits += d.length * d.bits;
  return bits;
}

ConcreteInput nthInput(const std::vector<SymbolicDecl> &decls, uint64_t k) {
  ConcreteInput in;
  for (const SymbolicDecl &d : decls) {
    std::vector<uint64_t> &cells = in[d.name];
    for (uint32_t i = 0; i < d.length; ++i) {
      cells.push_back(maskTo(k, d.bits));
      k = d.bits >= 64 ? 0 : k >> d.bits;
    }
  }
  return in;
}

Assignment assignmentFor(const ExprContext &ctx, const ConcreteInput &input) {
  Assignment a(ctx.vars().size(), 0);
  for (size_t v = 0; v < ctx.vars().size(); ++v) {
    const SymVar &sv = ctx.vars()[v];
    auto it = input.find(sv.array);
    if (it != input.end() && sv.index < it->second.size())
      a[v] = maskTo(it->second[sv.index], sv.width);
  }
  return a;
}

namespace {

struct CValue {
  uint64_t bits = 0;
  int obj = -1;
  int64_t offset = 0;
};

struct CObject {
  std::string key;
  unsigned width;
  std::vector<uint64_t> cells;
};

struct CFrame {
  const PreparedFunction *fn;
  std::vector<CValue> regs;
  unsigned block = 0;
  unsigned index = 0;
  int resultSlot = -1;
  std::vector<CValue> varargs;
};

struct Crash {
  CrashKind kind;
};

class Interpreter {
public:
  Interpreter(const Module &m, const ConcreteInput &in, const ConcreteOptions &o)
      : prepared(m), input(in), opts(o) {}

  ConcreteResult run() {
    const PreparedFunction &entry = prepared.functions[prepared.entry];
    CFrame frame{&entry, std::vector<CValue>(entry.numSlots), 0, 0, -1, {}};
    for (size_t i = 0; i < entry.fn->params.size(); ++i) {
      const Param &p = entry.fn->params[i];
      if (!p.type.isInt())
        throw std::runtime_error("entry parameter %" + p.name + " must be an integer");
      frame.regs[entry.paramSlots[i]] = {inputCell(p.name, 0, p.type.width), -1, 0};
    }
    stack.push_back(std::move(frame));
    try {
      while (!stack.empty()) {
        if (++steps > opts.maxSteps) {
          result.stepLimit = true;
          break;
        }
        step();
      }
    } catch (const Crash &c) {
      result.crashed = true;
      result.crashKind = c.kind;
      const CFrame &f = stack.back();
      const BasicBlock &bb = f.fn->fn->blocks[f.block];
      const Instruction &inst = bb.insts[f.index];
      result.crashSite = {f.fn->fn->name, bb.label, f.index, inst.srcLines, inst.origin};
      result.deadAccessOutOfBounds =
          (c.kind == CrashKind::OobLoad || c.kind == CrashKind::OobStore) &&
          (inst.dead || !inst.origin.empty());
    }
    for (const CObject &o : objects)
      result.memory[o.key] = o.cells;
    return std::move(result);
  }

private:
  PreparedModule prepared;
  const ConcreteInput &input;
  const ConcreteOptions &opts;
  std::vector<CFrame> stack;
  std::vector<CObject> objects;
  std::map<std::string, unsigned> allocaCounts;
  std::map<std::string, unsigned> symbolicCounts;
  ConcreteResult result;
  uint64_t steps = 0;

  uint64_t inputCell(const std::string &name, uint32_t index, unsigned width) {
    auto it = input.find(name);
    if (it == input.end() || index >= it->second.size())
      throw std::runtime_error("input does not cover symbolic object '" + name + "'");
    return maskTo(it->second[index], width);
  }

  CValue operand(const CFrame &f, const PreparedInst &pi, size_t k) {
    const Operand &op = pi.inst->operands[k];
    if (op.isConst())
      return {uint64_t(op.constant), -1, 0};
    if (op.isValue())
      return f.regs[pi.opSlot[k]];
    throw std::runtime_error("string operand used as a value");
  }

  uint64_t intOperand(const CFrame &f, const PreparedInst &pi, size_t k,
                      unsigned width) {
    return maskTo(operand(f, pi, k).bits, width);
  }

  void define(CFrame &f, const PreparedInst &pi, CValue v) {
    if (pi.result >= 0) {
      if (v.obj < 0)
        v.bits = maskTo(v.bits, pi.width);
      f.regs[pi.result] = v;
    }
  }

  CObject &checkedCell(const CValue &addr, bool isStore, int64_t &offset) {
    if (addr.obj < 0)
      throw std::runtime_error("memory access through a non-address value");
    CObject &o = objects[addr.obj];
    offset = addr.offset;
    if (offset < 0 || offset >= int64_t(o.cells.size()))
      throw Crash{isStore ? CrashKind::OobStore : CrashKind::OobLoad};
    return o;
  }

  void jump(CFrame &f, unsigned target) {
    unsigned from = f.block;
    f.block = target;
    f.index = 0;
    const std::vector<PreparedInst> &bb = f.fn->blocks[target];
    // Phis read their inputs simultaneously.
    std::vector<std::pair<int, CValue>> updates;
    while (f.index < bb.size() && bb[f.index].inst->op == Opcode::Phi) {
      const PreparedInst &phi = bb[f.index];
      size_t k = 0;
      while (k < phi.targets.size() && phi.targets[k] != int(from))
        ++k;
      if (k == phi.targets.size())
        throw std::runtime_error("phi %" + phi.inst->id + " has no input for " +
                                 f.fn->fn->blocks[from].label);
      CValue v = operand(f, phi, k);
      if (v.obj < 0)
        v.bits = maskTo(v.bits, phi.width);
      updates.push_back({phi.result, v});
      ++f.index;
    }
    for (auto &[slot, v] : updates)
      f.regs[slot] = v;
  }

  void step() {
    CFrame &f = stack.back();
    const PreparedInst &pi = f.fn->blocks[f.block][f.index];
    const Instruction &inst = *pi.inst;
    const auto &ops = inst.operands;
    unsigned w = inst.type.width;

    if (isBinaryOp(inst.op)) {
      uint64_t a = intOperand(f, pi, 0, w), b = intOperand(f, pi, 1, w);
      if ((inst.op == Opcode::UDiv || inst.op == Opcode::SDiv) && b == 0)
        throw Crash{CrashKind::DivByZero};
      define(f, pi, {evalBinary(exprKindFor(inst.op), a, b, w), -1, 0});
      ++f.index;
      return;
    }

    switch (inst.op) {
    case Opcode::ICmp: {
      uint64_t a = intOperand(f, pi, 0, w), b = intOperand(f, pi, 1, w);
      define(f, pi, {evalCmp(inst.pred, a, b, w) ? 1u : 0u, -1, 0});
      break;
    }
    case Opcode::ZExt:
    case Opcode::Trunc:
      define(f, pi, {intOperand(f, pi, 0, inst.srcType.width), -1, 0});
      break;
    case Opcode::SExt: {
      uint64_t a = intOperand(f, pi, 0, inst.srcType.width);
      define(f, pi, {uint64_t(signExtend(a, inst.srcType.width)), -1, 0});
      break;
    }
    case Opcode::Select:
      define(f, pi, operand(f, pi, intOperand(f, pi, 0, 1) ? 1 : 2));
      break;
    case Opcode::Alloca: {
      std::string site = f.fn->fn->name + ":" + inst.id;
      unsigned n = allocaCounts[site]++;
      objects.push_back({site + "#" + std::to_string(n), inst.type.width,
                         std::vector<uint64_t>(inst.type.length, 0)});
      define(f, pi, {0, int(objects.size() - 1), 0});
      break;
    }
    case Opcode::Gep: {
      CValue base = operand(f, pi, 0);
      int64_t delta = ops[1].isConst()
                          ? ops[1].constant
                          : signExtend(f.regs[pi.opSlot[1]].bits,
                                       f.fn->slotWidth[pi.opSlot[1]]);
      define(f, pi, {0, base.obj, base.offset + delta});
      break;
    }
    case Opcode::Load: {
      int64_t off;
      CObject &o = checkedCell(operand(f, pi, 0), false, off);
      define(f, pi, {o.cells[off], -1, 0});
      break;
    }
    case Opcode::Store: {
      uint64_t v = intOperand(f, pi, 0, w);
      int64_t off;
      CObject &o = checkedCell(operand(f, pi, 1), true, off);
      o.cells[off] = v;
      break;
    }
    case Opcode::MakeSymbolic: {
      CValue addr = operand(f, pi, 0);
      const std::string &base = ops[2].name;
      std::string name = symbolicObjectName(base, symbolicCounts[base]++);
      uint32_t len = uint32_t(ops[1].constant);
      CObject &o = objects.at(addr.obj);
      unsigned bits = ops.size() == 4 ? unsigned(ops[3].constant) : o.width;
      for (uint32_t i = 0; i < len; ++i) {
        int64_t off = addr.offset + i;
        if (off < 0 || off >= int64_t(o.cells.size()))
          throw std::runtime_error("make_symbolic exceeds its object");
        o.cells[off] = maskTo(inputCell(name, i, bits), o.width);
      }
      break;
    }
    case Opcode::Assert:
      if (!intOperand(f, pi, 0, 1))
        throw Crash{CrashKind::AssertFail};
      break;
    case Opcode::VaArg: {
      size_t k = size_t(ops[0].constant);
      if (k >= f.varargs.size())
        throw std::runtime_error("va_arg index beyond the passed arguments");
      define(f, pi, f.varargs[k]);
      break;
    }
    case Opcode::Call: {
      const PreparedFunction &callee = prepared.functions[pi.callee];
      CFrame next{&callee, std::vector<CValue>(callee.numSlots), 0, 0, pi.result, {}};
      for (size_t k = 0; k < ops.size(); ++k) {
        CValue v = operand(f, pi, k);
        if (k < callee.paramSlots.size())
          next.regs[callee.paramSlots[k]] = v;
        else
          next.varargs.push_back(v);
      }
      ++f.index;
      stack.push_back(std::move(next));
      return;
    }
    case Opcode::Br:
      if (inst.isConditionalBranch()) {
        bool c = intOperand(f, pi, 0, 1);
        if (opts.traceBranches)
          result.branches.push_back(
              {f.fn->fn->name, f.fn->fn->blocks[f.block].label, c ? 0u : 1u});
        jump(f, unsigned(pi.targets[c ? 0 : 1]));
      } else {
        jump(f, unsigned(pi.targets[0]));
      }
      return;
    case Opcode::Ret: {
      CValue v;
      if (!ops.empty()) {
        v = operand(f, pi, 0);
        if (inst.type.isInt())
          v.bits = maskTo(v.bits, w);
      }
      int dest = f.resultSlot;
      stack.pop_back();
      if (stack.empty()) {
        if (!ops.empty() && inst.type.isInt())
          result.returnValue = v.bits;
        return;
      }
      if (dest >= 0)
        stack.back().regs[dest] = v;
      return;
    }
    case Opcode::Phi:
      throw std::runtime_error("phi outside a block head");
    default:
      throw std::runtime_error("unsupported opcode in interpreter");
    }
    ++f.index;
  }
};

} // namespace

ConcreteResult concreteRun(const Module &m, const ConcreteInput &input,
                           const ConcreteOptions &opts) {
  return Interpreter(m, input, opts).run();
}

} // namespace mse
