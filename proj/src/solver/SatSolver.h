//===-- SatSolver.h - Conflict-driven clause learning -----------*- C++ -*-===//

#ifndef MSE_SOLVER_SATSOLVER_H
#define MSE_SOLVER_SATSOLVER_H

#include <cstdint>
#include <vector>

namespace mse {

/// Literal encoding: 2 * var for the positive literal, 2 * var + 1 negated.
using Lit = uint32_t;

inline Lit mkLit(uint32_t var, bool negated = false) { return var * 2 + negated; }
inline Lit negLit(Lit l) { return l ^ 1; }
inline uint32_t litVar(Lit l) { return l >> 1; }
inline bool litSign(Lit l) { return l & 1; }

class SatSolver {
public:
  enum class Result { Sat, Unsat, Unknown };

  uint32_t newVar();
  uint32_t numVars() const { return uint32_t(assigns.size()); }
  /// Adds a clause; returns false once the formula is known unsatisfiable.
  bool addClause(std::vector<Lit> lits);
  /// Solves; a non-zero conflict limit turns exhaustion into Unknown.
  Result solve(uint64_t conflictLimit = 0);
  /// Model value after Sat.
  bool modelValue(uint32_t var) const { return model[var]; }

  uint64_t conflicts() const { return totalConflicts; }

private:
  static constexpr int8_t kFalse = 0, kTrue = 1, kUndef = 2;
  static constexpr int32_t kNoReason = -1;

  std::vector<std::vector<Lit>> clauses;
  std::vector<std::vector<int32_t>> watches; // per literal: clauses watching it
  std::vector<int8_t> assigns;
  std::vector<int32_t> reason;
  std::vector<uint32_t> level;
  std::vector<char> polarity;
  std::vector<double> activity;
  std::vector<Lit> trail;
  std::vector<uint32_t> trailLim;
  size_t qhead = 0;
  double varInc = 1.0;
  bool unsat = false;
  std::vector<char> model;
  uint64_t totalConflicts = 0;

  std::vector<uint32_t> heap;
  std::vector<int32_t> heapIndex;

  int8_t litValue(Lit l) const {
    int8_t v = assigns[litVar(l)];
    return v == kUndef ? kUndef : int8_t(v ^ int8_t(litSign(l)));
  }
  uint32_t decisionLevel() const { return uint32_t(trailLim.size()); }
  void enqueue(Lit l, int32_t why);
  int32_t propagate();
  void analyze(int32_t confl, std::vector<Lit> &learnt, uint32_t &btLevel);
  void cancelUntil(uint32_t lvl);
  void bumpVar(uint32_t v);
  void attach(int32_t cref);

  bool heapLess(uint32_t a, uint32_t b) const { return activity[a] > activity[b]; }
  void heapUp(size_t i);
  void heapDown(size_t i);
  void heapInsert(uint32_t v);
  uint32_t heapPop();
};

} // namespace mse

#endif
