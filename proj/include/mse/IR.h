//===-- IR.h - Minimal SSA intermediate representation ----------*- C++ -*-===//
//
// MIR: a small SSA IR with fixed-width two's-complement integers, statically
// sized stack objects and single-index address arithmetic. Every instruction
// carries the set of source lines it was derived from so that coverage can be
// reported through merged code.
//
//===----------------------------------------------------------------------===//

#ifndef MSE_IR_H
#define MSE_IR_H

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mse {

struct Type {
  enum class Kind : uint8_t { Void, Int, Addr };

  Kind kind = Kind::Void;
  /// Int: bit width. Addr: element bit width.
  unsigned width = 0;
  /// Addr: element count of the object.
  uint32_t length = 0;

  static Type voidTy() { return {}; }
  static Type intTy(unsigned w) { return {Kind::Int, w, 0}; }
  static Type addrTy(unsigned elemWidth, uint32_t len) {
    return {Kind::Addr, elemWidth, len};
  }

  bool isVoid() const { return kind == Kind::Void; }
  bool isInt() const { return kind == Kind::Int; }
  bool isAddr() const { return kind == Kind::Addr; }
  Type elementType() const { return intTy(width); }

  std::string str() const;
  bool operator==(const Type &) const = default;
};

bool isLegalIntWidth(unsigned w);

enum class Opcode : uint8_t {
  Add, Sub, Mul, UDiv, SDiv, And, Or, Xor, Shl, LShr, AShr,
  ICmp, ZExt, SExt, Trunc, Select,
  Load, Store, Gep, Alloca, Phi,
  Br, Call, Ret,
  MakeSymbolic, Assert, VaArg
};

enum class Pred : uint8_t { Eq, Ne, Ult, Ule, Ugt, Uge, Slt, Sle, Sgt, Sge };

std::string_view opcodeName(Opcode op);
std::optional<Opcode> opcodeFromName(std::string_view name);
std::string_view predName(Pred p);
std::optional<Pred> predFromName(std::string_view name);

bool isBinaryOp(Opcode op);
bool isCastOp(Opcode op);
bool isTerminator(Opcode op);
bool isMemoryOp(Opcode op);
/// Side-effect free arithmetic/logical/comparison/cast operations.
bool isALUOp(Opcode op);

struct Operand {
  enum class Kind : uint8_t { Value, Const, String };

  Kind kind = Kind::Const;
  std::string name;     // Value: SSA id without '%'. String: literal.
  int64_t constant = 0; // Const

  static Operand value(std::string n) { return {Kind::Value, std::move(n), 0}; }
  static Operand constantInt(int64_t c) { return {Kind::Const, {}, c}; }
  static Operand string(std::string s) { return {Kind::String, std::move(s), 0}; }

  bool isValue() const { return kind == Kind::Value; }
  bool isConst() const { return kind == Kind::Const; }
  bool isString() const { return kind == Kind::String; }
  bool operator==(const Operand &) const = default;
};

/// An instruction. `type` is the result type, except for icmp (operand
/// type), store (stored type) and br/assert/make_symbolic (void). Casts keep
/// their source type in `srcType`.
struct Instruction {
  std::string id; // empty for instructions without a result
  Opcode op = Opcode::Add;
  Pred pred = Pred::Eq;
  Type type;
  Type srcType;
  std::vector<Operand> operands;
  std::vector<std::string> labels; // br targets, phi incoming blocks
  std::string callee;
  std::set<unsigned> srcLines;
  bool dead = false;
  /// Location id of the diamond a merged instruction came from, or the
  /// original location of a conditional branch that was moved by fusion.
  std::string origin;

  bool hasResult() const { return !id.empty(); }
  bool isConditionalBranch() const {
    return op == Opcode::Br && operands.size() == 1;
  }
  bool operator==(const Instruction &) const = default;
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> insts;

  const Instruction &terminator() const { return insts.back(); }
  Instruction &terminator() { return insts.back(); }
  std::vector<std::string> successors() const;
  bool operator==(const BasicBlock &) const = default;
};

struct Param {
  std::string name;
  Type type;
  bool operator==(const Param &) const = default;
};

struct Function {
  std::string name;
  std::vector<Param> params;
  Type retType;
  bool variadic = false;
  std::vector<BasicBlock> blocks; // blocks[0] is the entry block

  const std::string &entryLabel() const { return blocks.front().label; }
  int blockIndex(std::string_view label) const;
  const BasicBlock *findBlock(std::string_view label) const;
  BasicBlock *findBlock(std::string_view label);
  /// Result types of parameters and instructions, keyed by SSA id.
  std::map<std::string, Type> valueTypes() const;
  bool operator==(const Function &) const = default;
};

struct Module {
  std::vector<Function> functions;
  std::string entry = "main";

  const Function *findFunction(std::string_view name) const;
  Function *findFunction(std::string_view name);
  /// Union of every instruction's source lines.
  std::set<unsigned> allSourceLines() const;
  bool operator==(const Module &) const = default;
};

inline constexpr std::string_view kMakeSymbolicIntrinsic = "sym.make_symbolic";
inline constexpr std::string_view kAssertIntrinsic = "sym.assert";

/// A `function:block` location naming a conditional branch / diamond.
std::string locationId(std::string_view function, std::string_view block);

/// Stable reference to one instruction inside a function.
struct InstRef {
  std::string block;
  unsigned index = 0;
  auto operator<=>(const InstRef &) const = default;
  std::string str() const { return block + ":" + std::to_string(index); }
};

struct ParseError : std::runtime_error {
  unsigned line, column;
  ParseError(unsigned l, unsigned c, const std::string &msg);
};

Module parseModule(std::string_view text);
std::string printModule(const Module &m);

struct Diagnostic {
  std::string rule; // e.g. "ssa-dominance", "terminator-placement"
  std::string function;
  std::string block;
  int index = -1;
  std::string message;

  std::string str() const;
};

std::vector<Diagnostic> validateModule(const Module &m);

/// Two's-complement helpers shared by both interpreters and the solver.
inline uint64_t maskTo(uint64_t v, unsigned width) {
  return width >= 64 ? v : (v & ((uint64_t(1) << width) - 1));
}
inline int64_t signExtend(uint64_t v, unsigned width) {
  if (width >= 64)
    return int64_t(v);
  uint64_t m = uint64_t(1) << (width - 1);
  v = maskTo(v, width);
  return int64_t((v ^ m) - m);
}

} // namespace mse

#endif
