//===-- IR.cpp ------------------------------------------------------------===//

#include "mse/IR.h"

#include <array>

namespace mse {

namespace {

constexpr std::array<std::string_view, 27> kOpcodeNames = {
    "add",  "sub",  "mul",   "udiv",   "sdiv",  "and",   "or",
    "xor",  "shl",  "lshr",  "ashr",   "icmp",  "zext",  "sext",
    "trunc", "select", "load", "store", "gep",   "alloca", "phi",
    "br",   "call", "ret",   "make_symbolic", "assert", "va_arg"};

constexpr std::array<std::string_view, 10> kPredNames = {
    "eq", "ne", "ult", "ule", "ugt", "uge", "slt", "sle", "sgt", "sge"};

} // namespace

std::string Type::str() const {
  switch (kind) {
  case Kind::Void:
    return "void";
  case Kind::Int:
    return "i" + std::to_string(width);
  case Kind::Addr:
    return "ptr[i" + std::to_string(width) + " x " + std::to_string(length) +
           "]";
  }
  return "?";
}

bool isLegalIntWidth(unsigned w) { return w == 1 || w == 8 || w == 16 || w == 32; }

std::string_view opcodeName(Opcode op) { return kOpcodeNames[size_t(op)]; }

std::optional<Opcode> opcodeFromName(std::string_view name) {
  for (size_t i = 0; i < kOpcodeNames.size(); ++i)
    if (kOpcodeNames[i] == name)
      return Opcode(i);
  return std::nullopt;
}

std::string_view predName(Pred p) { return kPredNames[size_t(p)]; }

std::optional<Pred> predFromName(std::string_view name) {
  for (size_t i = 0; i < kPredNames.size(); ++i)
    if (kPredNames[i] == name)
      return Pred(i);
  return std::nullopt;
}

bool isBinaryOp(Opcode op) { return op >= Opcode::Add && op <= Opcode::AShr; }

bool isCastOp(Opcode op) {
  return op == Opcode::ZExt || op == Opcode::SExt || op == Opcode::Trunc;
}

bool isTerminator(Opcode op) { return op == Opcode::Br || op == Opcode::Ret; }

bool isMemoryOp(Opcode op) { return op == Opcode::Load || op == Opcode::Store; }

bool isALUOp(Opcode op) {
  return isBinaryOp(op) || isCastOp(op) || op == Opcode::ICmp ||
         op == Opcode::Select;
}

std::vector<std::string> BasicBlock::successors() const {
  if (insts.empty() || insts.back().op != Opcode::Br)
    return {};
  return insts.back().labels;
}

int Function::blockIndex(std::string_view label) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].label == label)
      return int(i);
  return -1;
}

const BasicBlock *Function::findBlock(std::string_view label) const {
  int i = blockIndex(label);
  return i < 0 ? nullptr : &blocks[i];
}

BasicBlock *Function::findBlock(std::string_view label) {
  int i = blockIndex(label);
  return i < 0 ? nullptr : &blocks[i];
}

std::map<std::string, Type> Function::valueTypes() const {
  std::map<std::string, Type> types;
  for (const Param &p : params)
    types[p.name] = p.type;
  for (const BasicBlock &bb : blocks)
    for (const Instruction &inst : bb.insts) {
      if (!inst.hasResult())
        continue;
      types[inst.id] = inst.op == Opcode::ICmp ? Type::intTy(1) : inst.type;
    }
  return types;
}

const Function *Module::findFunction(std::string_view name) const {
  for (const Function &f : functions)
    if (f.name == name)
      return &f;
  return nullptr;
}

Function *Module::findFunction(std::string_view name) {
  for (Function &f : functions)
    if (f.name == name)
      return &f;
  return nullptr;
}

std::set<unsigned> Module::allSourceLines() const {
  std::set<unsigned> lines;
  for (const Function &f : functions)
    for (const BasicBlock &bb : f.blocks)
      for (const Instruction &inst : bb.insts)
        lines.insert(inst.srcLines.begin(), inst.srcLines.end());
  return lines;
}

std::string locationId(std::string_view function, std::string_view block) {
  std::string s(function);
  s += ':';
  s += block;
  return s;
}

ParseError::ParseError(unsigned l, unsigned c, const std::string &msg)
    : std::runtime_error("line " + std::to_string(l) + ", col " +
                         std::to_string(c) + ": " + msg),
      line(l), column(c) {}

std::string Diagnostic::str() const {
  std::string s = "[" + rule + "] @" + function;
  if (!block.empty())
    s += ":" + block;
  if (index >= 0)
    s += ":" + std::to_string(index);
  return s + ": " + message;
}

} // namespace mse
