//===-- Solver.cpp - Backends, cache and constraint slicing ---------------===//

#include "mse/Solver.h"

#include "BitBlaster.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <unordered_map>

namespace mse {

std::string_view backendName(Backend b) { return b == Backend::Sat ? "sat" : "enum"; }

std::optional<Backend> backendFromName(std::string_view s) {
  if (s == "sat")
    return Backend::Sat;
  if (s == "enum")
    return Backend::Enum;
  return std::nullopt;
}

SolverResult solveByEnumeration(ExprContext &ctx,
                                const std::vector<ExprRef> &conjuncts,
                                unsigned capBits) {
  std::vector<unsigned> vars = exprVars(conjuncts);
  unsigned bits = 0;
  for (unsigned v : vars)
    bits += ctx.vars()[v].width;
  if (bits > capBits)
    throw EnumCapExceeded("query has " + std::to_string(bits) +
                          " symbolic bits, enumeration cap is " +
                          std::to_string(capBits));

  // Flatten the DAG into post-order once; each assignment is then a single
  // linear pass over the node list.
  std::vector<ExprRef> order;
  std::unordered_map<ExprRef, unsigned> slot;
  std::vector<std::pair<ExprRef, bool>> stack;
  for (ExprRef c : conjuncts)
    stack.push_back({c, false});
  while (!stack.empty()) {
    auto [e, expanded] = stack.back();
    stack.pop_back();
    if (slot.count(e))
      continue;
    if (expanded) {
      slot.emplace(e, unsigned(order.size()));
      order.push_back(e);
      continue;
    }
    stack.push_back({e, true});
    for (unsigned i = 0; i < e->numOps; ++i)
      if (!slot.count(e->ops[i]))
        stack.push_back({e->ops[i], false});
  }
  struct Node {
    ExprRef e;
    unsigned ops[3];
  };
  std::vector<Node> nodes;
  for (ExprRef e : order) {
    Node n{e, {0, 0, 0}};
    for (unsigned i = 0; i < e->numOps; ++i)
      n.ops[i] = slot.at(e->ops[i]);
    nodes.push_back(n);
  }
  std::vector<unsigned> roots;
  for (ExprRef c : conjuncts)
    roots.push_back(slot.at(c));

  std::vector<uint64_t> val(nodes.size());
  auto evalAll = [&](const Assignment &a) {
    for (size_t i = 0; i < nodes.size(); ++i) {
      const Node &n = nodes[i];
      ExprRef e = n.e;
      uint64_t x = n.e->numOps > 0 ? val[n.ops[0]] : 0;
      switch (e->kind) {
      case ExprKind::Const:
        val[i] = e->value;
        break;
      case ExprKind::Read:
        val[i] = maskTo(a[e->value], e->width);
        break;
      case ExprKind::Cmp:
        val[i] = evalCmp(e->pred, x, val[n.ops[1]], e->ops[0]->width);
        break;
      case ExprKind::Not:
        val[i] = maskTo(~x, e->width);
        break;
      case ExprKind::ZExt:
        val[i] = x;
        break;
      case ExprKind::SExt:
        val[i] = maskTo(uint64_t(signExtend(x, e->ops[0]->width)), e->width);
        break;
      case ExprKind::Extract:
        val[i] = maskTo(x >> e->value, e->width);
        break;
      case ExprKind::Concat:
        val[i] = (x << e->ops[1]->width) | val[n.ops[1]];
        break;
      case ExprKind::Ite:
        val[i] = x ? val[n.ops[1]] : val[n.ops[2]];
        break;
      default:
        val[i] = evalBinary(e->kind, x, val[n.ops[1]], e->width);
      }
    }
    for (unsigned r : roots)
      if (!val[r])
        return false;
    return true;
  };

  SolverResult r;
  Assignment a(ctx.vars().size(), 0);
  for (;;) {
    if (evalAll(a)) {
      r.status = SolverResult::Status::Sat;
      r.model = a;
      return r;
    }
    // Odometer step over the query's variables, first variable fastest.
    size_t k = 0;
    for (; k < vars.size(); ++k) {
      unsigned v = vars[k];
      uint64_t limit = maskTo(~uint64_t(0), ctx.vars()[v].width);
      if (a[v] < limit) {
        ++a[v];
        break;
      }
      a[v] = 0;
    }
    if (k == vars.size())
      break;
  }
  r.status = SolverResult::Status::Unsat;
  return r;
}

SolverResult solveBySat(ExprContext &ctx, const std::vector<ExprRef> &conjuncts,
                        uint64_t conflictLimit) {
  SatSolver sat;
  BitBlaster bb(sat);
  for (ExprRef c : conjuncts)
    bb.assertTrue(c);
  SolverResult r;
  switch (sat.solve(conflictLimit)) {
  case SatSolver::Result::Unsat:
    r.status = SolverResult::Status::Unsat;
    return r;
  case SatSolver::Result::Unknown:
    r.status = SolverResult::Status::Unknown;
    return r;
  case SatSolver::Result::Sat:
    break;
  }
  r.status = SolverResult::Status::Sat;
  r.model.assign(ctx.vars().size(), 0);
  for (unsigned v : exprVars(conjuncts)) {
    const std::vector<Lit> &bits = bb.varBits(v, ctx.vars()[v].width);
    uint64_t value = 0;
    for (size_t i = 0; i < bits.size(); ++i)
      if (sat.modelValue(litVar(bits[i])) != litSign(bits[i]))
        value |= uint64_t(1) << i;
    r.model[v] = value;
  }
  return r;
}

std::vector<uint32_t> canonicalKey(const std::vector<ExprRef> &conjuncts) {
  std::vector<uint32_t> key;
  for (ExprRef c : conjuncts)
    if (!c->isTrue())
      key.push_back(c->id);
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  return key;
}

Solver::Solver(ExprContext &c, SolverConfig config) : ctx(c), cfg(std::move(config)) {}

SolverResult Solver::check(const std::vector<ExprRef> &conjuncts) {
  std::vector<ExprRef> live;
  for (ExprRef c : conjuncts) {
    if (c->isFalse()) {
      SolverResult r;
      r.status = SolverResult::Status::Unsat;
      return r;
    }
    if (!c->isTrue())
      live.push_back(c);
  }
  if (live.empty()) {
    SolverResult r;
    r.status = SolverResult::Status::Sat;
    r.model.assign(ctx.vars().size(), 0);
    return r;
  }

  std::vector<uint32_t> key;
  if (cfg.caching) {
    key = canonicalKey(live);
    auto it = cache.find(key);
    if (it != cache.end()) {
      ++statistics.cacheHits;
      SolverResult r = it->second;
      r.model.resize(ctx.vars().size(), 0);
      return r;
    }
  }

  ++statistics.queries;
  statistics.totalQuerySize += dagSize(live);
  if (!cfg.dumpDir.empty()) {
    std::filesystem::create_directories(cfg.dumpDir);
    std::ofstream out(std::filesystem::path(cfg.dumpDir) /
                      ("query-" + std::to_string(statistics.queries) + ".smt2"));
    out << toSmtLib(ctx, live);
  }

  SolverResult r = cfg.backend == Backend::Enum
                       ? solveByEnumeration(ctx, live, cfg.enumCapBits)
                       : solveBySat(ctx, live, cfg.conflictLimit);
  if (cfg.caching && r.status != SolverResult::Status::Unknown)
    cache.emplace(std::move(key), r);
  return r;
}

std::vector<ExprRef> independentSlice(ExprContext &ctx,
                                      const std::vector<ExprRef> &pc,
                                      ExprRef goal) {
  std::vector<unsigned> wanted = ctx.varsOf(goal);
  std::vector<char> taken(pc.size(), 0);
  bool grew = true;
  while (grew) {
    grew = false;
    for (size_t i = 0; i < pc.size(); ++i) {
      if (taken[i])
        continue;
      const std::vector<unsigned> &vs = ctx.varsOf(pc[i]);
      std::vector<unsigned> common;
      std::set_intersection(vs.begin(), vs.end(), wanted.begin(), wanted.end(),
                            std::back_inserter(common));
      if (common.empty())
        continue;
      taken[i] = 1;
      std::vector<unsigned> merged;
      std::set_union(vs.begin(), vs.end(), wanted.begin(), wanted.end(),
                     std::back_inserter(merged));
      if (merged.size() != wanted.size()) {
        wanted.swap(merged);
        grew = true;
      }
    }
  }
  std::vector<ExprRef> out;
  for (size_t i = 0; i < pc.size(); ++i)
    if (taken[i])
      out.push_back(pc[i]);
  return out;
}

} // namespace mse
