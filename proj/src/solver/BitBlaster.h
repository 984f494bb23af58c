//===-- BitBlaster.h - Expressions to CNF -----------------------*- C++ -*-===//

#ifndef MSE_SOLVER_BITBLASTER_H
#define MSE_SOLVER_BITBLASTER_H

#include "SatSolver.h"
#include "mse/Expr.h"

#include <map>
#include <unordered_map>

namespace mse {

/// Tseitin encoding of bitvector expressions into a SatSolver. Bits are
/// least-significant first; gates on constant inputs are folded.
class BitBlaster {
public:
  explicit BitBlaster(SatSolver &s);

  const std::vector<Lit> &blast(ExprRef e);
  /// Constrains a width-1 expression to be true.
  void assertTrue(ExprRef e);
  /// Bits of variable `var` (created on demand).
  const std::vector<Lit> &varBits(unsigned var, unsigned width);

  Lit trueLit() const { return tru; }
  Lit falseLit() const { return negLit(tru); }

private:
  using Bits = std::vector<Lit>;

  SatSolver &sat;
  Lit tru;
  std::unordered_map<ExprRef, Bits> cache;
  std::map<unsigned, Bits> vars;
  std::map<std::tuple<int, Lit, Lit, Lit>, Lit> gates;

  bool isTrue(Lit l) const { return l == tru; }
  bool isFalse(Lit l) const { return l == negLit(tru); }
  Lit fresh() { return mkLit(sat.newVar()); }

  Lit mkAnd(Lit a, Lit b);
  Lit mkOr(Lit a, Lit b) { return negLit(mkAnd(negLit(a), negLit(b))); }
  Lit mkXor(Lit a, Lit b);
  Lit mkMux(Lit c, Lit t, Lit f);

  Bits constBits(uint64_t v, unsigned w);
  Bits addBits(const Bits &a, const Bits &b, Lit carryIn);
  Bits negBits(const Bits &a);
  Bits mulBits(const Bits &a, const Bits &b);
  void udivBits(const Bits &a, const Bits &b, Bits &q, Bits &r);
  Bits sdivBits(const Bits &a, const Bits &b);
  Bits shiftBits(ExprKind k, const Bits &a, const Bits &b);
  Lit ultBits(const Bits &a, const Bits &b);
  Lit eqBits(const Bits &a, const Bits &b);
  Lit cmpBits(Pred p, const Bits &a, const Bits &b);
  Bits muxBits(Lit c, const Bits &t, const Bits &f);
  Bits compute(ExprRef e);
};

} // namespace mse

#endif
