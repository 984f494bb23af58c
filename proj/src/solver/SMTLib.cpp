//===-- SMTLib.cpp - SMT-LIB2 export --------------------------------------===//

#include "mse/Solver.h"

#include <sstream>
#include <unordered_map>

namespace mse {

namespace {

class SmtPrinter {
public:
  SmtPrinter(const ExprContext &c, std::ostream &o) : ctx(c), os(o) {}

  /// Emits let-free definitions for every DAG node and returns its name.
  std::string name(ExprRef e) {
    auto it = names.find(e);
    if (it != names.end())
      return it->second;
    std::string body = term(e);
    std::string n = "n" + std::to_string(e->id);
    os << "(define-fun " << n << " () " << sort(e) << " " << body << ")\n";
    names.emplace(e, n);
    return n;
  }

private:
  const ExprContext &ctx;
  std::ostream &os;
  std::unordered_map<ExprRef, std::string> names;

  static std::string sort(ExprRef e) {
    return "(_ BitVec " + std::to_string(e->width) + ")";
  }

  std::string bv(uint64_t v, unsigned w) {
    return "(_ bv" + std::to_string(v) + " " + std::to_string(w) + ")";
  }

  std::string term(ExprRef e) {
    auto op = [&](unsigned i) { return name(e->ops[i]); };
    switch (e->kind) {
    case ExprKind::Const:
      return bv(e->value, e->width);
    case ExprKind::Read: {
      const SymVar &v = ctx.vars()[e->value];
      return "|" + v.array + "_" + std::to_string(v.index) + "|";
    }
    case ExprKind::Add: return "(bvadd " + op(0) + " " + op(1) + ")";
    case ExprKind::Sub: return "(bvsub " + op(0) + " " + op(1) + ")";
    case ExprKind::Mul: return "(bvmul " + op(0) + " " + op(1) + ")";
    case ExprKind::UDiv: return "(bvudiv " + op(0) + " " + op(1) + ")";
    case ExprKind::SDiv: return "(bvsdiv " + op(0) + " " + op(1) + ")";
    case ExprKind::And: return "(bvand " + op(0) + " " + op(1) + ")";
    case ExprKind::Or: return "(bvor " + op(0) + " " + op(1) + ")";
    case ExprKind::Xor: return "(bvxor " + op(0) + " " + op(1) + ")";
    case ExprKind::Shl: return "(bvshl " + op(0) + " " + op(1) + ")";
    case ExprKind::LShr: return "(bvlshr " + op(0) + " " + op(1) + ")";
    case ExprKind::AShr: return "(bvashr " + op(0) + " " + op(1) + ")";
    case ExprKind::Not: return "(bvnot " + op(0) + ")";
    case ExprKind::Cmp: {
      static const char *names[] = {"=", "distinct", "bvult", "bvule", "bvugt",
                                    "bvuge", "bvslt", "bvsle", "bvsgt", "bvsge"};
      return "(ite (" + std::string(names[size_t(e->pred)]) + " " + op(0) + " " +
             op(1) + ") #b1 #b0)";
    }
    case ExprKind::ZExt:
      return "((_ zero_extend " + std::to_string(e->width - e->ops[0]->width) +
             ") " + op(0) + ")";
    case ExprKind::SExt:
      return "((_ sign_extend " + std::to_string(e->width - e->ops[0]->width) +
             ") " + op(0) + ")";
    case ExprKind::Extract:
      return "((_ extract " + std::to_string(e->value + e->width - 1) + " " +
             std::to_string(e->value) + ") " + op(0) + ")";
    case ExprKind::Concat:
      return "(concat " + op(0) + " " + op(1) + ")";
    case ExprKind::Ite:
      return "(ite (= " + op(0) + " #b1) " + op(1) + " " + op(2) + ")";
    }
    return "";
  }
};

} // namespace

std::string toSmtLib(const ExprContext &ctx, const std::vector<ExprRef> &conjuncts) {
  std::ostringstream os;
  os << "(set-logic QF_BV)\n";
  for (unsigned v : exprVars(conjuncts)) {
    const SymVar &sv = ctx.vars()[v];
    os << "(declare-fun |" << sv.array << "_" << sv.index << "| () (_ BitVec "
       << sv.width << "))\n";
  }
  SmtPrinter printer(ctx, os);
  std::vector<std::string> roots;
  for (ExprRef c : conjuncts)
    roots.push_back(printer.name(c));
  for (const std::string &r : roots)
    os << "(assert (= " << r << " #b1))\n";
  os << "(check-sat)\n(exit)\n";
  return os.str();
}

} // namespace mse
