//===-- Expr.cpp - Expression construction and simplification ------------===//
//
// Constructors fold constants and apply a handful of local identities before
// interning. Commutative operands are ordered by node id so that equal terms
// built in a different order share one node.
//
//===----------------------------------------------------------------------===//

#include "mse/Expr.h"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace mse {

namespace {

bool isCommutative(ExprKind k) {
  return k == ExprKind::Add || k == ExprKind::Mul || k == ExprKind::And ||
         k == ExprKind::Or || k == ExprKind::Xor;
}

uint64_t allOnes(unsigned width) { return maskTo(~uint64_t(0), width); }

void requireSameWidth(ExprRef a, ExprRef b, const char *what) {
  if (a->width != b->width)
    throw std::logic_error(std::string("width mismatch in ") + what);
}

} // namespace

size_t ExprContext::KeyHash::operator()(const Key &k) const {
  size_t h = std::hash<uint64_t>()(k.value);
  auto mix = [&](size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(size_t(k.kind));
  mix(k.width);
  mix(size_t(k.pred));
  for (ExprRef op : k.ops)
    mix(std::hash<const void *>()(op));
  return h;
}

ExprContext::ExprContext() = default;
ExprContext::~ExprContext() = default;

ExprRef ExprContext::intern(ExprKind kind, unsigned width, Pred pred,
                            uint64_t value, ExprRef a, ExprRef b, ExprRef c,
                            uint8_t numOps) {
  Key key{kind, width, pred, value, {a, b, c}};
  auto it = table.find(key);
  if (it != table.end())
    return it->second;
  Expr &e = nodes.emplace_back();
  e.kind = kind;
  e.width = width;
  e.id = uint32_t(nodes.size() - 1);
  e.pred = pred;
  e.value = value;
  e.ops[0] = a;
  e.ops[1] = b;
  e.ops[2] = c;
  e.numOps = numOps;
  table.emplace(key, &e);
  return &e;
}

unsigned ExprContext::declareVar(const std::string &array, uint32_t index,
                                 unsigned width) {
  varTable.push_back({array, index, width});
  readNodes.push_back(nullptr);
  return unsigned(varTable.size() - 1);
}

ExprRef ExprContext::constant(uint64_t v, unsigned width) {
  if (width == 0 || width > 64)
    throw std::logic_error("invalid constant width");
  return intern(ExprKind::Const, width, Pred::Eq, maskTo(v, width), nullptr,
                nullptr, nullptr, 0);
}

ExprRef ExprContext::read(unsigned var) {
  if (var >= varTable.size())
    throw std::logic_error("undeclared symbolic variable");
  if (!readNodes[var])
    readNodes[var] = intern(ExprKind::Read, varTable[var].width, Pred::Eq, var,
                            nullptr, nullptr, nullptr, 0);
  return readNodes[var];
}

ExprRef ExprContext::binary(ExprKind k, ExprRef a, ExprRef b) {
  requireSameWidth(a, b, "binary expression");
  unsigned w = a->width;
  if (a->isConst() && b->isConst())
    return constant(evalBinary(k, a->value, b->value, w), w);
  if (isCommutative(k) && (b->isConst() ? false : a->isConst() || a->id > b->id))
    std::swap(a, b);
  // From here on a commutative constant operand, if any, is `b`.
  auto isZero = [](ExprRef e) { return e->isConst() && e->value == 0; };
  auto isOne = [](ExprRef e) { return e->isConst() && e->value == 1; };
  auto isOnes = [w](ExprRef e) { return e->isConst() && e->value == allOnes(w); };
  switch (k) {
  case ExprKind::Add:
  case ExprKind::Or:
  case ExprKind::Xor:
    if (isZero(b))
      return a;
    if (k == ExprKind::Or && isOnes(b))
      return b;
    if (k == ExprKind::Or && a == b)
      return a;
    if (k == ExprKind::Xor && a == b)
      return constant(0, w);
    break;
  case ExprKind::Sub:
    if (isZero(b))
      return a;
    if (a == b)
      return constant(0, w);
    break;
  case ExprKind::Mul:
    if (isOne(b))
      return a;
    if (isZero(b))
      return b;
    break;
  case ExprKind::UDiv:
  case ExprKind::SDiv:
    if (isOne(b))
      return a;
    break;
  case ExprKind::And:
    if (isZero(b))
      return b;
    if (isOnes(b) || a == b)
      return a;
    break;
  case ExprKind::Shl:
  case ExprKind::LShr:
  case ExprKind::AShr:
    if (isZero(b))
      return a;
    break;
  default:
    break;
  }
  return intern(k, w, Pred::Eq, 0, a, b, nullptr, 2);
}

ExprRef ExprContext::cmp(Pred p, ExprRef a, ExprRef b) {
  requireSameWidth(a, b, "comparison");
  if (a->isConst() && b->isConst())
    return boolConst(evalCmp(p, a->value, b->value, a->width));
  if (a == b) {
    bool reflexive = p == Pred::Eq || p == Pred::Ule || p == Pred::Uge ||
                     p == Pred::Sle || p == Pred::Sge;
    return boolConst(reflexive);
  }
  if (p == Pred::Eq || p == Pred::Ne) {
    if (a->isConst() || (!b->isConst() && a->id > b->id))
      std::swap(a, b);
    if (a->width == 1 && b->isConst()) {
      bool wantTrue = (b->value == 1) == (p == Pred::Eq);
      return wantTrue ? a : bitNot(a);
    }
  }
  return intern(ExprKind::Cmp, 1, p, 0, a, b, nullptr, 2);
}

ExprRef ExprContext::bitNot(ExprRef a) {
  if (a->isConst())
    return constant(~a->value, a->width);
  if (a->kind == ExprKind::Not)
    return a->ops[0];
  return intern(ExprKind::Not, a->width, Pred::Eq, 0, a, nullptr, nullptr, 1);
}

ExprRef ExprContext::zext(ExprRef a, unsigned width) {
  if (width < a->width)
    throw std::logic_error("zext to a narrower width");
  if (width == a->width)
    return a;
  if (a->isConst())
    return constant(a->value, width);
  return intern(ExprKind::ZExt, width, Pred::Eq, 0, a, nullptr, nullptr, 1);
}

ExprRef ExprContext::sext(ExprRef a, unsigned width) {
  if (width < a->width)
    throw std::logic_error("sext to a narrower width");
  if (width == a->width)
    return a;
  if (a->isConst())
    return constant(uint64_t(signExtend(a->value, a->width)), width);
  return intern(ExprKind::SExt, width, Pred::Eq, 0, a, nullptr, nullptr, 1);
}

ExprRef ExprContext::extract(ExprRef a, unsigned lo, unsigned width) {
  if (width == 0 || lo + width > a->width)
    throw std::logic_error("extract out of range");
  if (lo == 0 && width == a->width)
    return a;
  if (a->isConst())
    return constant(a->value >> lo, width);
  if (a->kind == ExprKind::ZExt && lo == 0 && width <= a->ops[0]->width)
    return extract(a->ops[0], 0, width);
  return intern(ExprKind::Extract, width, Pred::Eq, lo, a, nullptr, nullptr, 1);
}

ExprRef ExprContext::concat(ExprRef hi, ExprRef lo) {
  unsigned w = hi->width + lo->width;
  if (w > 64)
    throw std::logic_error("concat wider than 64 bits");
  if (hi->isConst() && lo->isConst())
    return constant((hi->value << lo->width) | lo->value, w);
  return intern(ExprKind::Concat, w, Pred::Eq, 0, hi, lo, nullptr, 2);
}

ExprRef ExprContext::ite(ExprRef c, ExprRef t, ExprRef f) {
  if (c->width != 1)
    throw std::logic_error("ite condition must be one bit wide");
  requireSameWidth(t, f, "ite");
  if (c->isConst())
    return c->value ? t : f;
  if (t == f)
    return t;
  if (t->width == 1 && t->isConst() && f->isConst())
    return t->value ? c : bitNot(c);
  if (c->kind == ExprKind::Not)
    return ite(c->ops[0], f, t);
  return intern(ExprKind::Ite, t->width, Pred::Eq, 0, c, t, f, 3);
}

const std::vector<unsigned> &ExprContext::varsOf(ExprRef e) {
  auto it = varMemo.find(e);
  if (it != varMemo.end())
    return it->second;
  std::vector<unsigned> out;
  if (e->kind == ExprKind::Read) {
    out.push_back(unsigned(e->value));
  } else {
    for (unsigned i = 0; i < e->numOps; ++i) {
      const std::vector<unsigned> &sub = varsOf(e->ops[i]);
      std::vector<unsigned> merged;
      std::set_union(out.begin(), out.end(), sub.begin(), sub.end(),
                     std::back_inserter(merged));
      out.swap(merged);
    }
  }
  return varMemo.emplace(e, std::move(out)).first->second;
}

std::vector<unsigned> exprVars(const std::vector<ExprRef> &roots) {
  std::unordered_set<ExprRef> seen;
  std::vector<ExprRef> work(roots.begin(), roots.end());
  std::vector<unsigned> out;
  while (!work.empty()) {
    ExprRef e = work.back();
    work.pop_back();
    if (!seen.insert(e).second)
      continue;
    if (e->kind == ExprKind::Read)
      out.push_back(unsigned(e->value));
    for (unsigned i = 0; i < e->numOps; ++i)
      work.push_back(e->ops[i]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

size_t dagSize(const std::vector<ExprRef> &roots) {
  std::unordered_set<ExprRef> seen;
  std::vector<ExprRef> work(roots.begin(), roots.end());
  while (!work.empty()) {
    ExprRef e = work.back();
    work.pop_back();
    if (!seen.insert(e).second)
      continue;
    for (unsigned i = 0; i < e->numOps; ++i)
      work.push_back(e->ops[i]);
  }
  return seen.size();
}

static std::string_view kindName(ExprKind k) {
  switch (k) {
  case ExprKind::Add: return "add";
  case ExprKind::Sub: return "sub";
  case ExprKind::Mul: return "mul";
  case ExprKind::UDiv: return "udiv";
  case ExprKind::SDiv: return "sdiv";
  case ExprKind::And: return "and";
  case ExprKind::Or: return "or";
  case ExprKind::Xor: return "xor";
  case ExprKind::Shl: return "shl";
  case ExprKind::LShr: return "lshr";
  case ExprKind::AShr: return "ashr";
  case ExprKind::Not: return "not";
  case ExprKind::ZExt: return "zext";
  case ExprKind::SExt: return "sext";
  case ExprKind::Extract: return "extract";
  case ExprKind::Concat: return "concat";
  case ExprKind::Ite: return "ite";
  default: return "?";
  }
}

std::string exprToString(ExprRef e, const ExprContext &ctx) {
  std::ostringstream os;
  switch (e->kind) {
  case ExprKind::Const:
    os << e->value << ":i" << e->width;
    break;
  case ExprKind::Read: {
    const SymVar &v = ctx.vars()[e->value];
    os << v.array << "[" << v.index << "]";
    break;
  }
  case ExprKind::Cmp:
    os << "(" << predName(e->pred) << " " << exprToString(e->ops[0], ctx) << " "
       << exprToString(e->ops[1], ctx) << ")";
    break;
  default:
    os << "(" << kindName(e->kind);
    if (e->kind == ExprKind::Extract)
      os << "@" << e->value;
    if (e->kind == ExprKind::ZExt || e->kind == ExprKind::SExt ||
        e->kind == ExprKind::Extract)
      os << ":i" << e->width;
    for (unsigned i = 0; i < e->numOps; ++i)
      os << " " << exprToString(e->ops[i], ctx);
    os << ")";
  }
  return os.str();
}

ExprKind exprKindFor(Opcode op) {
  switch (op) {
  case Opcode::Add: return ExprKind::Add;
  case Opcode::Sub: return ExprKind::Sub;
  case Opcode::Mul: return ExprKind::Mul;
  case Opcode::UDiv: return ExprKind::UDiv;
  case Opcode::SDiv: return ExprKind::SDiv;
  case Opcode::And: return ExprKind::And;
  case Opcode::Or: return ExprKind::Or;
  case Opcode::Xor: return ExprKind::Xor;
  case Opcode::Shl: return ExprKind::Shl;
  case Opcode::LShr: return ExprKind::LShr;
  case Opcode::AShr: return ExprKind::AShr;
  default:
    throw std::logic_error("opcode has no binary expression kind");
  }
}

} // namespace mse
