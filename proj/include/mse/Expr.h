//===-- Expr.h - Hash-consed bitvector expressions --------------*- C++ -*-===//
//
// Fixed-width bitvector terms over symbolic input reads. Every node is owned
// by an ExprContext and structurally unique inside it, so pointer equality is
// structural equality and node ids give a canonical order.
//
//===----------------------------------------------------------------------===//

#ifndef MSE_EXPR_H
#define MSE_EXPR_H

#include "mse/IR.h"

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace mse {

enum class ExprKind : uint8_t {
  Const,
  Read,
  Add, Sub, Mul, UDiv, SDiv, And, Or, Xor, Shl, LShr, AShr,
  Cmp,
  Not,
  ZExt, SExt,
  Extract,
  Concat,
  Ite
};

struct Expr;
using ExprRef = const Expr *;

struct Expr {
  ExprKind kind;
  unsigned width;
  /// Creation order inside the owning context; canonical ordering key.
  uint32_t id;
  Pred pred = Pred::Eq;      // Cmp
  uint64_t value = 0;        // Const: value. Extract: low bit. Read: variable.
  ExprRef ops[3] = {nullptr, nullptr, nullptr};
  uint8_t numOps = 0;

  bool isConst() const { return kind == ExprKind::Const; }
  bool isTrue() const { return isConst() && width == 1 && value == 1; }
  bool isFalse() const { return isConst() && width == 1 && value == 0; }
};

/// A symbolic input cell: element `index` of the object named `array`,
/// `width` free bits wide.
struct SymVar {
  std::string array;
  uint32_t index = 0;
  unsigned width = 8;
};

class ExprContext {
public:
  ExprContext();
  ~ExprContext();
  ExprContext(const ExprContext &) = delete;
  ExprContext &operator=(const ExprContext &) = delete;

  unsigned declareVar(const std::string &array, uint32_t index, unsigned width);
  const std::vector<SymVar> &vars() const { return varTable; }

  ExprRef constant(uint64_t v, unsigned width);
  ExprRef boolConst(bool b) { return constant(b ? 1 : 0, 1); }
  ExprRef read(unsigned var);

  ExprRef binary(ExprKind k, ExprRef a, ExprRef b);
  ExprRef cmp(Pred p, ExprRef a, ExprRef b);
  ExprRef bitNot(ExprRef a);
  ExprRef zext(ExprRef a, unsigned width);
  ExprRef sext(ExprRef a, unsigned width);
  ExprRef extract(ExprRef a, unsigned lo, unsigned width);
  ExprRef concat(ExprRef hi, ExprRef lo);
  ExprRef ite(ExprRef c, ExprRef t, ExprRef f);

  ExprRef add(ExprRef a, ExprRef b) { return binary(ExprKind::Add, a, b); }
  ExprRef sub(ExprRef a, ExprRef b) { return binary(ExprKind::Sub, a, b); }
  ExprRef land(ExprRef a, ExprRef b) { return binary(ExprKind::And, a, b); }
  ExprRef lor(ExprRef a, ExprRef b) { return binary(ExprKind::Or, a, b); }
  ExprRef lnot(ExprRef a) { return bitNot(a); }
  ExprRef eq(ExprRef a, ExprRef b) { return cmp(Pred::Eq, a, b); }

  size_t size() const { return nodes.size(); }

  /// Sorted variables of `e`, memoized per node.
  const std::vector<unsigned> &varsOf(ExprRef e);

private:
  struct Key {
    ExprKind kind;
    unsigned width;
    Pred pred;
    uint64_t value;
    ExprRef ops[3];
    bool operator==(const Key &) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key &k) const;
  };

  ExprRef intern(ExprKind kind, unsigned width, Pred pred, uint64_t value,
                 ExprRef a, ExprRef b, ExprRef c, uint8_t numOps);

  std::deque<Expr> nodes;
  std::unordered_map<Key, ExprRef, KeyHash> table;
  std::vector<SymVar> varTable;
  std::vector<ExprRef> readNodes;
  std::unordered_map<ExprRef, std::vector<unsigned>> varMemo;
};

/// Concrete values of symbolic variables, indexed by variable number.
using Assignment = std::vector<uint64_t>;

/// Two's-complement evaluation; division by zero follows SMT-LIB.
uint64_t evaluate(ExprRef e, const Assignment &a);

/// Shared concrete semantics used by expression evaluation and the
/// interpreter.
uint64_t evalBinary(ExprKind k, uint64_t a, uint64_t b, unsigned width);
bool evalCmp(Pred p, uint64_t a, uint64_t b, unsigned width);

/// Sorted variables occurring in any of `roots`.
std::vector<unsigned> exprVars(const std::vector<ExprRef> &roots);

/// Number of distinct nodes reachable from `roots`.
size_t dagSize(const std::vector<ExprRef> &roots);

std::string exprToString(ExprRef e, const ExprContext &ctx);

ExprKind exprKindFor(Opcode op);

} // namespace mse

#endif
