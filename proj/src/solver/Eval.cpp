//===-- Eval.cpp - Concrete expression semantics --------------------------===//

#include "mse/Expr.h"

#include <stdexcept>
#include <unordered_map>

namespace mse {

namespace {

uint64_t udiv(uint64_t a, uint64_t b, unsigned w) {
  return b == 0 ? maskTo(~uint64_t(0), w) : a / b;
}

uint64_t negate(uint64_t a, unsigned w) { return maskTo(~a + 1, w); }

bool msb(uint64_t a, unsigned w) { return (a >> (w - 1)) & 1; }

} // namespace

uint64_t evalBinary(ExprKind k, uint64_t a, uint64_t b, unsigned w) {
  a = maskTo(a, w);
  b = maskTo(b, w);
  switch (k) {
  case ExprKind::Add:
    return maskTo(a + b, w);
  case ExprKind::Sub:
    return maskTo(a - b, w);
  case ExprKind::Mul:
    return maskTo(a * b, w);
  case ExprKind::UDiv:
    return udiv(a, b, w);
  case ExprKind::SDiv: {
    bool na = msb(a, w), nb = msb(b, w);
    uint64_t q = udiv(na ? negate(a, w) : a, nb ? negate(b, w) : b, w);
    return na != nb ? negate(q, w) : q;
  }
  case ExprKind::And:
    return a & b;
  case ExprKind::Or:
    return a | b;
  case ExprKind::Xor:
    return a ^ b;
  case ExprKind::Shl:
    return b >= w ? 0 : maskTo(a << b, w);
  case ExprKind::LShr:
    return b >= w ? 0 : a >> b;
  case ExprKind::AShr: {
    if (b >= w)
      return msb(a, w) ? maskTo(~uint64_t(0), w) : 0;
    return maskTo(uint64_t(signExtend(a, w) >> b), w);
  }
  default:
    throw std::logic_error("not a binary expression kind");
  }
}

bool evalCmp(Pred p, uint64_t a, uint64_t b, unsigned w) {
  a = maskTo(a, w);
  b = maskTo(b, w);
  int64_t sa = signExtend(a, w), sb = signExtend(b, w);
  switch (p) {
  case Pred::Eq: return a == b;
  case Pred::Ne: return a != b;
  case Pred::Ult: return a < b;
  case Pred::Ule: return a <= b;
  case Pred::Ugt: return a > b;
  case Pred::Uge: return a >= b;
  case Pred::Slt: return sa < sb;
  case Pred::Sle: return sa <= sb;
  case Pred::Sgt: return sa > sb;
  case Pred::Sge: return sa >= sb;
  }
  return false;
}

namespace {

class Evaluator {
public:
  explicit Evaluator(const Assignment &a) : assignment(a) {}

  uint64_t eval(ExprRef e) {
    if (e->isConst())
      return e->value;
    auto it = memo.find(e);
    if (it != memo.end())
      return it->second;
    uint64_t v = compute(e);
    memo.emplace(e, v);
    return v;
  }

private:
  const Assignment &assignment;
  std::unordered_map<ExprRef, uint64_t> memo;

  uint64_t compute(ExprRef e) {
    switch (e->kind) {
    case ExprKind::Read:
      if (e->value >= assignment.size())
        throw std::out_of_range("assignment does not cover every variable");
      return maskTo(assignment[e->value], e->width);
    case ExprKind::Cmp:
      return evalCmp(e->pred, eval(e->ops[0]), eval(e->ops[1]), e->ops[0]->width);
    case ExprKind::Not:
      return maskTo(~eval(e->ops[0]), e->width);
    case ExprKind::ZExt:
      return eval(e->ops[0]);
    case ExprKind::SExt:
      return maskTo(uint64_t(signExtend(eval(e->ops[0]), e->ops[0]->width)),
                    e->width);
    case ExprKind::Extract:
      return maskTo(eval(e->ops[0]) >> e->value, e->width);
    case ExprKind::Concat:
      return (eval(e->ops[0]) << e->ops[1]->width) | eval(e->ops[1]);
    case ExprKind::Ite:
      return eval(e->ops[0]) ? eval(e->ops[1]) : eval(e->ops[2]);
    default:
      return evalBinary(e->kind, eval(e->ops[0]), eval(e->ops[1]), e->width);
    }
  }
};

} // namespace

uint64_t evaluate(ExprRef e, const Assignment &a) {
  return Evaluator(a).eval(e);
}

} // namespace mse
