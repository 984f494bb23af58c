//===-- ExecCommon.h - Helpers shared by both interpreters ------*- C++ -*-===//
//
// PreparedModule resolves SSA names, block labels and callees to indices once
// so that the interpreters work on dense register files.
//
//===----------------------------------------------------------------------===//

#ifndef MSE_EXEC_COMMON_H
#define MSE_EXEC_COMMON_H

#include "mse/IR.h"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mse {

/// Name of the `n`-th object made symbolic under `base`.
inline std::string symbolicObjectName(const std::string &base, unsigned n) {
  return n == 0 ? base : base + "_" + std::to_string(n);
}

struct PreparedInst {
  const Instruction *inst = nullptr;
  int result = -1;
  /// Register slot per operand; -1 for constants and strings.
  std::vector<int> opSlot;
  /// Block index per label (branch targets, phi incoming blocks).
  std::vector<int> targets;
  int callee = -1;
  /// Integer width of the result (1 for icmp).
  unsigned width = 0;
};

struct PreparedFunction {
  const Function *fn = nullptr;
  unsigned numSlots = 0;
  std::vector<unsigned> paramSlots;
  std::vector<unsigned> slotWidth;
  std::vector<std::vector<PreparedInst>> blocks;
};

struct PreparedModule {
  std::vector<PreparedFunction> functions;
  int entry = -1;

  explicit PreparedModule(const Module &m) {
    std::map<std::string, int> fnIndex;
    for (size_t i = 0; i < m.functions.size(); ++i)
      fnIndex[m.functions[i].name] = int(i);
    auto entryIt = fnIndex.find(m.entry);
    if (entryIt == fnIndex.end())
      throw std::runtime_error("module has no entry function @" + m.entry);
    entry = entryIt->second;
    for (const Function &f : m.functions) {
      PreparedFunction pf;
      pf.fn = &f;
      std::map<std::string, unsigned> slots;
      auto newSlot = [&](const std::string &id, unsigned w) {
        unsigned s = pf.numSlots++;
        slots[id] = s;
        pf.slotWidth.push_back(w);
        return s;
      };
      for (const Param &p : f.params)
        pf.paramSlots.push_back(newSlot(p.name, p.type.width));
      for (const BasicBlock &bb : f.blocks)
        for (const Instruction &inst : bb.insts)
          if (inst.hasResult())
            newSlot(inst.id, inst.op == Opcode::ICmp ? 1 : inst.type.width);
      for (const BasicBlock &bb : f.blocks) {
        std::vector<PreparedInst> insts;
        for (const Instruction &inst : bb.insts) {
          PreparedInst pi;
          pi.inst = &inst;
          if (inst.hasResult()) {
            pi.result = int(slots.at(inst.id));
            pi.width = pf.slotWidth[pi.result];
          } else {
            pi.width = inst.type.width;
          }
          for (const Operand &op : inst.operands) {
            int s = -1;
            if (op.isValue()) {
              auto it = slots.find(op.name);
              if (it == slots.end())
                throw std::runtime_error("use of undefined value %" + op.name +
                                         " in @" + f.name);
              s = int(it->second);
            }
            pi.opSlot.push_back(s);
          }
          for (const std::string &l : inst.labels) {
            int b = f.blockIndex(l);
            if (b < 0)
              throw std::runtime_error("unknown block " + l + " in @" + f.name);
            pi.targets.push_back(b);
          }
          if (inst.op == Opcode::Call) {
            auto it = fnIndex.find(inst.callee);
            if (it == fnIndex.end())
              throw std::runtime_error("call to unknown function @" + inst.callee);
            pi.callee = it->second;
          }
          insts.push_back(std::move(pi));
        }
        pf.blocks.push_back(std::move(insts));
      }
      functions.push_back(std::move(pf));
    }
  }
};

} // namespace mse

#endif
