//===-- CFG.cpp -----------------------------------------------------------===//
//
// Dominators use the Cooper/Harvey/Kennedy iterative scheme over reverse
// postorder. Postdominators run the same scheme on the reversed graph with a
// virtual exit node fed by every block that has no successors.
//
//===----------------------------------------------------------------------===//

#include "mse/CFG.h"

#include <algorithm>
#include <functional>

namespace mse {

namespace {

/// Generic iterative immediate-dominator computation on a graph given by
/// successor lists, rooted at `root`. Returns idom with root mapped to itself
/// and unreachable nodes mapped to -1.
std::vector<int> immediateDominators(const std::vector<std::vector<unsigned>> &succ,
                                     unsigned root) {
  size_t n = succ.size();
  std::vector<std::vector<unsigned>> pred(n);
  for (unsigned u = 0; u < n; ++u)
    for (unsigned v : succ[u])
      pred[v].push_back(u);

  std::vector<int> order; // postorder
  std::vector<int> poIndex(n, -1);
  std::vector<char> seen(n, 0);
  // Iterative DFS to avoid deep recursion on long chains.
  std::vector<std::pair<unsigned, size_t>> stack;
  stack.push_back({root, 0});
  seen[root] = 1;
  while (!stack.empty()) {
    auto &[u, i] = stack.back();
    if (i < succ[u].size()) {
      unsigned v = succ[u][i++];
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back({v, 0});
      }
    } else {
      poIndex[u] = int(order.size());
      order.push_back(int(u));
      stack.pop_back();
    }
  }

  std::vector<int> idom(n, -1);
  idom[root] = int(root);
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (poIndex[a] < poIndex[b])
        a = idom[a];
      while (poIndex[b] < poIndex[a])
        b = idom[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      unsigned b = unsigned(*it);
      if (b == root)
        continue;
      int newIdom = -1;
      for (unsigned p : pred[b]) {
        if (idom[p] == -1)
          continue;
        newIdom = newIdom == -1 ? int(p) : intersect(int(p), newIdom);
      }
      if (newIdom != idom[b]) {
        idom[b] = newIdom;
        changed = true;
      }
    }
  }
  return idom;
}

} // namespace

bool CfgInfo::dominates(unsigned a, unsigned b) const {
  if (!reachable[b])
    return false;
  for (int x = int(b); x != kNone; x = idom[x])
    if (unsigned(x) == a)
      return true;
  return false;
}

bool CfgInfo::postDominates(unsigned a, unsigned b) const {
  if (!reachesExit[b])
    return false;
  for (int x = int(b); x != kNone; x = ipdom[x])
    if (unsigned(x) == a)
      return true;
  return false;
}

CfgInfo computeCfgInfo(const Function &f) {
  CfgInfo cfg;
  size_t n = f.blocks.size();
  cfg.preds.assign(n, {});
  cfg.succs.assign(n, {});
  for (unsigned b = 0; b < n; ++b)
    for (const std::string &s : f.blocks[b].successors()) {
      int t = f.blockIndex(s);
      if (t < 0)
        continue;
      cfg.succs[b].push_back(unsigned(t));
      cfg.preds[t].push_back(b);
    }

  cfg.idom.assign(n, CfgInfo::kNone);
  cfg.reachable.assign(n, false);
  if (n == 0)
    return cfg;

  std::vector<int> dom = immediateDominators(cfg.succs, 0);
  for (unsigned b = 0; b < n; ++b) {
    cfg.reachable[b] = dom[b] != -1;
    cfg.idom[b] = (b == 0 || dom[b] == -1) ? CfgInfo::kNone : dom[b];
    if (!cfg.reachable[b])
      cfg.diagnostics.push_back({"unreachable-block", f.name, f.blocks[b].label,
                                 -1, "block is unreachable from the entry"});
  }

  // Reverse graph with virtual exit node `n`.
  std::vector<std::vector<unsigned>> rsucc(n + 1);
  for (unsigned b = 0; b < n; ++b) {
    for (unsigned s : cfg.succs[b])
      rsucc[s].push_back(b);
    if (cfg.succs[b].empty())
      rsucc[n].push_back(b);
  }
  std::vector<int> pdom = immediateDominators(rsucc, unsigned(n));
  cfg.ipdom.assign(n, CfgInfo::kNone);
  cfg.reachesExit.assign(n, false);
  for (unsigned b = 0; b < n; ++b) {
    cfg.reachesExit[b] = pdom[b] != -1;
    cfg.ipdom[b] = (pdom[b] == -1 || pdom[b] == int(n)) ? CfgInfo::kNone
                                                         : pdom[b];
    if (cfg.reachable[b] && !cfg.reachesExit[b])
      cfg.diagnostics.push_back({"no-exit", f.name, f.blocks[b].label, -1,
                                 "block cannot reach a function exit"});
  }
  return cfg;
}

std::set<Decision> ControlDependence::edgeDecisions(const CfgInfo &cfg,
                                                    unsigned from,
                                                    unsigned to) const {
  std::set<Decision> d = closure[from];
  if (cfg.succs[from].size() > 1)
    for (unsigned i = 0; i < cfg.succs[from].size(); ++i)
      if (cfg.succs[from][i] == to)
        d.insert({from, i});
  return d;
}

ControlDependence computeControlDependence(const CfgInfo &cfg) {
  size_t n = cfg.size();
  ControlDependence cd;
  cd.direct.assign(n, {});
  for (unsigned x = 0; x < n; ++x) {
    if (cfg.succs[x].size() < 2 || !cfg.reachesExit[x])
      continue;
    for (unsigned i = 0; i < cfg.succs[x].size(); ++i) {
      // Walk from the successor up the postdominator tree until the
      // postdominator of x; every block visited depends on (x, i).
      int y = int(cfg.succs[x][i]);
      while (y != CfgInfo::kNone && y != cfg.ipdom[x]) {
        cd.direct[y].insert({x, i});
        y = cfg.ipdom[y];
      }
    }
  }
  cd.closure = cd.direct;
  bool changed = true;
  while (changed) {
    changed = false;
    for (unsigned b = 0; b < n; ++b) {
      std::set<Decision> add;
      for (const Decision &d : cd.closure[b])
        for (const Decision &e : cd.closure[d.first])
          if (!cd.closure[b].count(e))
            add.insert(e);
      if (!add.empty()) {
        cd.closure[b].insert(add.begin(), add.end());
        changed = true;
      }
    }
  }
  return cd;
}

std::set<unsigned> blocksInCycles(const CfgInfo &cfg) {
  // A block is on a cycle iff it can reach itself.
  std::set<unsigned> result;
  size_t n = cfg.size();
  for (unsigned b = 0; b < n; ++b) {
    if (!cfg.reachable[b])
      continue;
    std::vector<char> seen(n, 0);
    std::vector<unsigned> work(cfg.succs[b].begin(), cfg.succs[b].end());
    while (!work.empty()) {
      unsigned u = work.back();
      work.pop_back();
      if (u == b) {
        result.insert(b);
        break;
      }
      if (seen[u])
        continue;
      seen[u] = 1;
      for (unsigned v : cfg.succs[u])
        work.push_back(v);
    }
  }
  return result;
}

} // namespace mse
