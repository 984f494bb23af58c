//===-- CFG.h - Control-flow graph, dominators, postdominators --*- C++ -*-===//

#ifndef MSE_CFG_H
#define MSE_CFG_H

#include "mse/IR.h"

#include <set>
#include <utility>
#include <vector>

namespace mse {

/// Per-block CFG facts, indexed by position in Function::blocks.
struct CfgInfo {
  static constexpr int kNone = -1;

  std::vector<std::vector<unsigned>> preds;
  std::vector<std::vector<unsigned>> succs;
  std::vector<bool> reachable;
  /// Immediate dominator; kNone for the entry and for unreachable blocks.
  std::vector<int> idom;
  /// Immediate postdominator; kNone when the block's only postdominator is
  /// the virtual exit, or when the block cannot reach an exit.
  std::vector<int> ipdom;
  std::vector<bool> reachesExit;
  std::vector<Diagnostic> diagnostics;

  size_t size() const { return succs.size(); }
  bool dominates(unsigned a, unsigned b) const;
  bool postDominates(unsigned a, unsigned b) const;
};

CfgInfo computeCfgInfo(const Function &f);

/// A control decision: conditional branch block and successor index taken.
using Decision = std::pair<unsigned, unsigned>;

/// Control dependence derived from the postdominator tree.
struct ControlDependence {
  /// direct[b]: decisions block b is directly control dependent on.
  std::vector<std::set<Decision>> direct;
  /// closure[b]: transitive closure of `direct` through the deciding blocks.
  std::vector<std::set<Decision>> closure;

  /// Decisions that determine whether edge (from -> to) is taken.
  std::set<Decision> edgeDecisions(const CfgInfo &cfg, unsigned from,
                                   unsigned to) const;
};

ControlDependence computeControlDependence(const CfgInfo &cfg);

/// Indices of blocks that participate in a cycle reachable from the entry.
std::set<unsigned> blocksInCycles(const CfgInfo &cfg);

} // namespace mse

#endif
