//===-- Printer.cpp - MIR text printer ------------------------------------===//

#include "mse/IR.h"

#include <sstream>

namespace mse {

namespace {

std::string operandStr(const Operand &op) {
  switch (op.kind) {
  case Operand::Kind::Value:
    return "%" + op.name;
  case Operand::Kind::Const:
    return std::to_string(op.constant);
  case Operand::Kind::String: {
    std::string s = "\"";
    for (char c : op.name) {
      if (c == '"' || c == '\\')
        s += '\\';
      s += c;
    }
    return s + "\"";
  }
  }
  return "?";
}

std::string joinOperands(const std::vector<Operand> &ops) {
  std::string s;
  for (size_t i = 0; i < ops.size(); ++i) {
    if (i)
      s += ", ";
    s += operandStr(ops[i]);
  }
  return s;
}

void printInstruction(std::ostream &os, const Instruction &inst) {
  os << "  ";
  if (inst.hasResult())
    os << "%" << inst.id << " = ";
  switch (inst.op) {
  case Opcode::ICmp:
    os << "icmp " << predName(inst.pred) << " " << inst.type.str() << " "
       << joinOperands(inst.operands);
    break;
  case Opcode::ZExt:
  case Opcode::SExt:
  case Opcode::Trunc:
    os << opcodeName(inst.op) << " " << inst.srcType.str() << " "
       << operandStr(inst.operands[0]) << " to " << inst.type.str();
    break;
  case Opcode::Alloca:
    os << "alloca " << inst.type.str();
    break;
  case Opcode::Phi:
    os << "phi " << inst.type.str() << " ";
    for (size_t i = 0; i < inst.operands.size(); ++i) {
      if (i)
        os << ", ";
      os << "[" << operandStr(inst.operands[i]) << ", " << inst.labels[i]
         << "]";
    }
    break;
  case Opcode::Br:
    if (inst.operands.empty())
      os << "br " << inst.labels[0];
    else
      os << "br " << operandStr(inst.operands[0]) << ", " << inst.labels[0]
         << ", " << inst.labels[1];
    break;
  case Opcode::Ret:
    os << "ret " << inst.type.str();
    if (!inst.operands.empty())
      os << " " << operandStr(inst.operands[0]);
    break;
  case Opcode::Call:
    os << "call " << inst.type.str() << " @" << inst.callee << "("
       << joinOperands(inst.operands) << ")";
    break;
  case Opcode::MakeSymbolic:
    os << "call @" << kMakeSymbolicIntrinsic << "("
       << joinOperands(inst.operands) << ")";
    break;
  case Opcode::Assert:
    os << "call @" << kAssertIntrinsic << "(" << joinOperands(inst.operands)
       << ")";
    break;
  default:
    os << opcodeName(inst.op) << " " << inst.type.str();
    if (!inst.operands.empty())
      os << " " << joinOperands(inst.operands);
    break;
  }
  if (!inst.srcLines.empty()) {
    os << " !lines ";
    bool first = true;
    for (unsigned l : inst.srcLines) {
      if (!first)
        os << ",";
      os << l;
      first = false;
    }
  }
  if (inst.dead)
    os << " !dead";
  if (!inst.origin.empty())
    os << " !loc " << inst.origin;
  os << "\n";
}

} // namespace

std::string printModule(const Module &m) {
  std::ostringstream os;
  if (m.entry != "main")
    os << "entry @" << m.entry << "\n\n";
  for (size_t fi = 0; fi < m.functions.size(); ++fi) {
    const Function &f = m.functions[fi];
    if (fi)
      os << "\n";
    os << "func @" << f.name << "(";
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i)
        os << ", ";
      os << f.params[i].type.str() << " %" << f.params[i].name;
    }
    if (f.variadic)
      os << (f.params.empty() ? "..." : ", ...");
    os << ") -> " << f.retType.str() << " {\n";
    for (const BasicBlock &bb : f.blocks) {
      os << bb.label << ":\n";
      for (const Instruction &inst : bb.insts)
        printInstruction(os, inst);
    }
    os << "}\n";
  }
  return os.str();
}

} // namespace mse
