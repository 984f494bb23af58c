//===-- SatSolver.cpp - CDCL with watched literals ------------------------===//
//
// MiniSat-style core: two watched literals, first-UIP learning, VSIDS
// activities with phase saving, and Luby restarts.
//
//===----------------------------------------------------------------------===//

#include "SatSolver.h"

#include <algorithm>

namespace mse {

namespace {

double luby(double y, uint64_t x) {
  uint64_t size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  while (seq--)
    r *= y;
  return r;
}

} // namespace

uint32_t SatSolver::newVar() {
  uint32_t v = uint32_t(assigns.size());
  assigns.push_back(kUndef);
  reason.push_back(kNoReason);
  level.push_back(0);
  polarity.push_back(1);
  activity.push_back(0);
  watches.emplace_back();
  watches.emplace_back();
  heapIndex.push_back(-1);
  heapInsert(v);
  return v;
}

void SatSolver::attach(int32_t cref) {
  const std::vector<Lit> &c = clauses[cref];
  watches[negLit(c[0])].push_back(cref);
  watches[negLit(c[1])].push_back(cref);
}

bool SatSolver::addClause(std::vector<Lit> lits) {
  if (unsat)
    return false;
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == negLit(lits[i]))
      return true; // tautology
    int8_t v = litValue(lits[i]);
    if (v == kTrue && level[litVar(lits[i])] == 0)
      return true;
    if (v == kFalse && level[litVar(lits[i])] == 0)
      continue;
    kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    unsat = true;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) {
      unsat = true;
      return false;
    }
    return true;
  }
  clauses.push_back(std::move(kept));
  attach(int32_t(clauses.size() - 1));
  return true;
}

void SatSolver::enqueue(Lit l, int32_t why) {
  uint32_t v = litVar(l);
  assigns[v] = litSign(l) ? kFalse : kTrue;
  reason[v] = why;
  level[v] = decisionLevel();
  trail.push_back(l);
}

int32_t SatSolver::propagate() {
  while (qhead < trail.size()) {
    Lit p = trail[qhead++];
    // Clauses watching p are those containing ~p, which just became false.
    std::vector<int32_t> &ws = watches[p];
    Lit falseLit = negLit(p);
    size_t i = 0, j = 0;
    while (i < ws.size()) {
      int32_t cref = ws[i++];
      std::vector<Lit> &c = clauses[cref];
      if (c[0] == falseLit)
        std::swap(c[0], c[1]);
      if (litValue(c[0]) == kTrue) {
        ws[j++] = cref;
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < c.size(); ++k)
        if (litValue(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches[negLit(c[1])].push_back(cref);
          moved = true;
          break;
        }
      if (moved)
        continue;
      ws[j++] = cref;
      if (litValue(c[0]) == kFalse) {
        while (i < ws.size())
          ws[j++] = ws[i++];
        ws.resize(j);
        qhead = trail.size();
        return cref;
      }
      enqueue(c[0], cref);
    }
    ws.resize(j);
  }
  return kNoReason;
}

void SatSolver::bumpVar(uint32_t v) {
  activity[v] += varInc;
  if (activity[v] > 1e100) {
    for (double &a : activity)
      a *= 1e-100;
    varInc *= 1e-100;
  }
  if (heapIndex[v] >= 0)
    heapUp(size_t(heapIndex[v]));
}

void SatSolver::analyze(int32_t confl, std::vector<Lit> &learnt,
                        uint32_t &btLevel) {
  std::vector<char> seen(assigns.size(), 0);
  learnt.assign(1, 0);
  int pathCount = 0;
  Lit p = 0;
  bool first = true;
  size_t index = trail.size();
  do {
    const std::vector<Lit> &c = clauses[confl];
    for (size_t k = first ? 0 : 1; k < c.size(); ++k) {
      Lit q = c[k];
      uint32_t v = litVar(q);
      if (seen[v] || level[v] == 0)
        continue;
      seen[v] = 1;
      bumpVar(v);
      if (level[v] >= decisionLevel())
        ++pathCount;
      else
        learnt.push_back(q);
    }
    first = false;
    while (!seen[litVar(trail[--index])])
      ;
    p = trail[index];
    confl = reason[litVar(p)];
    seen[litVar(p)] = 0;
    --pathCount;
  } while (pathCount > 0);
  learnt[0] = negLit(p);

  btLevel = 0;
  if (learnt.size() > 1) {
    size_t maxI = 1;
    for (size_t k = 2; k < learnt.size(); ++k)
      if (level[litVar(learnt[k])] > level[litVar(learnt[maxI])])
        maxI = k;
    std::swap(learnt[1], learnt[maxI]);
    btLevel = level[litVar(learnt[1])];
  }
  varInc *= 1.0 / 0.95;
}

void SatSolver::cancelUntil(uint32_t lvl) {
  if (decisionLevel() <= lvl)
    return;
  for (size_t i = trail.size(); i-- > trailLim[lvl];) {
    uint32_t v = litVar(trail[i]);
    assigns[v] = kUndef;
    reason[v] = kNoReason;
    polarity[v] = litSign(trail[i]);
    if (heapIndex[v] < 0)
      heapInsert(v);
  }
  trail.resize(trailLim[lvl]);
  trailLim.resize(lvl);
  qhead = trail.size();
}

SatSolver::Result SatSolver::solve(uint64_t conflictLimit) {
  if (unsat)
    return Result::Unsat;
  if (propagate() != kNoReason) {
    unsat = true;
    return Result::Unsat;
  }
  uint64_t conflictsHere = 0;
  uint64_t restartNo = 0;
  for (;;) {
    uint64_t budget = uint64_t(luby(2, restartNo++) * 100);
    uint64_t inRound = 0;
    for (;;) {
      int32_t confl = propagate();
      if (confl != kNoReason) {
        ++totalConflicts;
        ++conflictsHere;
        ++inRound;
        if (decisionLevel() == 0) {
          unsat = true;
          return Result::Unsat;
        }
        std::vector<Lit> learnt;
        uint32_t bt = 0;
        analyze(confl, learnt, bt);
        cancelUntil(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          clauses.push_back(learnt);
          int32_t cref = int32_t(clauses.size() - 1);
          attach(cref);
          enqueue(learnt[0], cref);
        }
        if (conflictLimit && conflictsHere >= conflictLimit) {
          cancelUntil(0);
          return Result::Unknown;
        }
        continue;
      }
      if (inRound >= budget) {
        cancelUntil(0);
        break;
      }
      uint32_t next = UINT32_MAX;
      while (!heap.empty()) {
        uint32_t v = heapPop();
        if (assigns[v] == kUndef) {
          next = v;
          break;
        }
      }
      if (next == UINT32_MAX) {
        model.assign(assigns.size(), 0);
        for (size_t v = 0; v < assigns.size(); ++v)
          model[v] = assigns[v] == kTrue;
        cancelUntil(0);
        return Result::Sat;
      }
      trailLim.push_back(uint32_t(trail.size()));
      enqueue(mkLit(next, polarity[next]), kNoReason);
    }
  }
}

void SatSolver::heapUp(size_t i) {
  uint32_t v = heap[i];
  while (i > 0) {
    size_t parent = (i - 1) / 2;
    if (!heapLess(v, heap[parent]))
      break;
    heap[i] = heap[parent];
    heapIndex[heap[i]] = int32_t(i);
    i = parent;
  }
  heap[i] = v;
  heapIndex[v] = int32_t(i);
}

void SatSolver::heapDown(size_t i) {
  uint32_t v = heap[i];
  for (;;) {
    size_t child = 2 * i + 1;
    if (child >= heap.size())
      break;
    if (child + 1 < heap.size() && heapLess(heap[child + 1], heap[child]))
      ++child;
    if (!heapLess(heap[child], v))
      break;
    heap[i] = heap[child];
    heapIndex[heap[i]] = int32_t(i);
    i = child;
  }
  heap[i] = v;
  heapIndex[v] = int32_t(i);
}

void SatSolver::heapInsert(uint32_t v) {
  heap.push_back(v);
  heapIndex[v] = int32_t(heap.size() - 1);
  heapUp(heap.size() - 1);
}

uint32_t SatSolver::heapPop() {
  uint32_t top = heap.front();
  heapIndex[top] = -1;
  heap.front() = heap.back();
  heap.pop_back();
  if (!heap.empty()) {
    heapIndex[heap.front()] = 0;
    heapDown(0);
  }
  return top;
}

} // namespace mse
