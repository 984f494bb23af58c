//===-- Executor.cpp - Forking symbolic execution with state merging ------===//
//
// Each state owns a register file per frame, a copy of memory and a path
// condition. Conditional branches on symbolic values fork when both outcomes
// are feasible. With merging enabled, the two children of a fork form a
// merge group targeting the immediate postdominator of the branching block;
// members park there until every live member has arrived and are then
// combined into one state with ite-valued registers and memory.
//
//===----------------------------------------------------------------------===//

#include "mse/Executor.h"

#include "ExecCommon.h"
#include "mse/CFG.h"
#include "mse/Transform.h"

#include <chrono>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>

namespace mse {

namespace {

struct SymValue {
  ExprRef e = nullptr;
  int obj = -1;
  ExprRef offset = nullptr;

  bool isAddr() const { return obj >= 0; }
};

struct SymObject {
  std::string key;
  unsigned width = 8;
  std::vector<ExprRef> cells;
};

struct Frame {
  const PreparedFunction *fn = nullptr;
  std::vector<SymValue> regs;
  unsigned block = 0;
  unsigned index = 0;
  int resultSlot = -1;
  std::vector<SymValue> varargs;
};

struct State {
  std::vector<Frame> stack;
  std::vector<SymObject> objects;
  std::vector<ExprRef> pc;
  std::map<std::string, unsigned> allocaCounts;
  std::map<std::string, unsigned> symbolicCounts;
  /// Merge groups this state belongs to, innermost last.
  std::vector<unsigned> groups;
  /// Offset chosen for the pending access after forking on a symbolic index.
  std::optional<uint64_t> forcedOffset;
};

using StatePtr = std::unique_ptr<State>;

struct MergeGroup {
  const PreparedFunction *fn = nullptr;
  size_t depth = 0;
  unsigned target = 0;
  unsigned alive = 0;
  bool dissolved = false;
  std::vector<StatePtr> arrived;
};

constexpr unsigned kOffsetWidth = 32;

struct StopSignal {};

class Executor {
public:
  Executor(const Module &m, const DseConfig &c, const CrashCallback &cb)
      : cfg(c), onCrash(cb), prepared(m),
        ctx(std::make_shared<ExprContext>()),
        solver(*ctx, SolverConfig{c.backend, c.caching, c.enumCapBits, 0,
                                  c.dumpSmtDir}),
        decls(symbolicDecls(m)) {
    for (const PreparedFunction &pf : prepared.functions) {
      cfgInfo.push_back(computeCfgInfo(*pf.fn));
      std::vector<std::vector<char>> v;
      for (const auto &bb : pf.blocks)
        v.emplace_back(bb.size(), 0);
      visited.push_back(std::move(v));
    }
  }

  DseReport run() {
    auto start = std::chrono::steady_clock::now();
    report.context = ctx;
    report.mode = cfg.mergeStates ? "merge" : "fork";
    auto initial = std::make_unique<State>();
    const PreparedFunction &entry = prepared.functions[prepared.entry];
    Frame frame;
    frame.fn = &entry;
    frame.regs.resize(entry.numSlots);
    for (size_t i = 0; i < entry.fn->params.size(); ++i) {
      const Param &p = entry.fn->params[i];
      if (!p.type.isInt())
        throw std::runtime_error("entry parameter %" + p.name + " must be an integer");
      frame.regs[entry.paramSlots[i]].e = ctx->read(variable(p.name, 0, p.type.width));
    }
    initial->stack.push_back(std::move(frame));
    worklist.push_back(std::move(initial));

    try {
      for (;;) {
        if (worklist.empty() && !flushStuckGroup())
          break;
        if (worklist.empty())
          continue;
        StatePtr s;
        if (cfg.strategy == Strategy::Dfs) {
          s = std::move(worklist.back());
          worklist.pop_back();
        } else {
          s = std::move(worklist.front());
          worklist.pop_front();
        }
        runState(std::move(s), start);
      }
    } catch (const StopSignal &) {
    }

    const SolverStats &st = solver.stats();
    report.queries = st.queries;
    report.cacheHits = st.cacheHits;
    report.avgQuerySize = st.averageQuerySize();
    report.paths = report.exits + report.crashes.size() + report.mergedAway;
    for (size_t f = 0; f < prepared.functions.size(); ++f)
      for (size_t b = 0; b < visited[f].size(); ++b)
        for (size_t i = 0; i < visited[f][b].size(); ++i)
          if (visited[f][b][i]) {
            const auto &lines = prepared.functions[f].blocks[b][i].inst->srcLines;
            report.coveredLines.insert(lines.begin(), lines.end());
          }
    report.timeMs = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    return std::move(report);
  }

private:
  const DseConfig &cfg;
  const CrashCallback &onCrash;
  PreparedModule prepared;
  std::shared_ptr<ExprContext> ctx;
  Solver solver;
  std::vector<SymbolicDecl> decls;
  std::vector<CfgInfo> cfgInfo;
  std::vector<std::vector<std::vector<char>>> visited;
  std::map<std::pair<std::string, uint32_t>, unsigned> varIds;
  std::deque<StatePtr> worklist;
  std::vector<MergeGroup> groups;
  DseReport report;
  uint64_t steps = 0;

  unsigned variable(const std::string &name, uint32_t index, unsigned width) {
    auto key = std::make_pair(name, index);
    auto it = varIds.find(key);
    if (it != varIds.end())
      return it->second;
    unsigned v = ctx->declareVar(name, index, width);
    varIds.emplace(key, v);
    return v;
  }

  int fnIndex(const PreparedFunction *pf) const {
    return int(pf - prepared.functions.data());
  }

  // Solver access with per-location accounting.

  std::string locationOf(const Frame &f, bool isBranch) const {
    const BasicBlock &bb = f.fn->fn->blocks[f.block];
    const Instruction &inst = bb.insts[f.index];
    std::string label;
    if (isBranch)
      label = branchLocationLabel(bb);
    else
      label = inst.origin.empty() ? bb.label : inst.origin;
    return locationId(f.fn->fn->name, label);
  }

  SolverResult query(const std::vector<ExprRef> &conjuncts, const std::string &loc) {
    uint64_t before = solver.stats().queries;
    SolverResult r = solver.check(conjuncts);
    if (solver.stats().queries != before)
      ++report.queriesByLocation[loc];
    if (r.status == SolverResult::Status::Unknown)
      throw std::runtime_error("solver returned unknown");
    return r;
  }

  bool feasible(const State &s, ExprRef cond, const std::string &loc) {
    std::vector<ExprRef> q = independentSlice(*ctx, s.pc, cond);
    q.push_back(cond);
    return query(q, loc).isSat();
  }

  ConcreteInput inputFromModel(const Assignment &model) {
    ConcreteInput in;
    for (const SymbolicDecl &d : decls)
      in[d.name].assign(d.length, 0);
    for (const auto &[key, var] : varIds) {
      std::vector<uint64_t> &cells = in[key.first];
      if (cells.size() <= key.second)
        cells.resize(key.second + 1, 0);
      cells[key.second] = var < model.size() ? model[var] : 0;
    }
    return in;
  }

  // State lifecycle.

  void checkBudgets(std::chrono::steady_clock::time_point start) {
    if (cfg.maxPaths &&
        report.exits + report.crashes.size() + report.mergedAway >= cfg.maxPaths) {
      report.termination = Termination::PathBudget;
      throw StopSignal{};
    }
    if (cfg.maxTimeSeconds > 0 && (steps & 0x3ff) == 0) {
      double elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      if (elapsed > cfg.maxTimeSeconds) {
        report.termination = Termination::TimeBudget;
        throw StopSignal{};
      }
    }
    if (cfg.maxSteps && steps > cfg.maxSteps) {
      report.termination = Termination::TimeBudget;
      throw StopSignal{};
    }
  }

  void finishPath(State &s, bool crashed, ExprRef returnValue = nullptr) {
    if (cfg.recordPaths) {
      PathRecord rec{s.pc, crashed, {}, returnValue};
      for (const SymObject &o : s.objects)
        rec.memory[o.key] = o.cells;
      report.pathRecords.push_back(std::move(rec));
    }
    for (unsigned g : s.groups) {
      --groups[g].alive;
    }
    for (auto it = s.groups.rbegin(); it != s.groups.rend(); ++it)
      tryComplete(*it);
  }

  void reportCrash(State &s, CrashKind kind, const Assignment &model) {
    const Frame &f = s.stack.back();
    const BasicBlock &bb = f.fn->fn->blocks[f.block];
    const Instruction &inst = bb.insts[f.index];
    CrashReport r;
    r.kind = kind;
    r.site = {f.fn->fn->name, bb.label, f.index, inst.srcLines, inst.origin};
    r.input = inputFromModel(model);
    bool keepGoing = true;
    if (onCrash)
      keepGoing = onCrash(r);
    report.crashes.push_back(std::move(r));
    if (!keepGoing) {
      report.termination = Termination::Aborted;
      throw StopSignal{};
    }
  }

  /// Checks whether `crashCond` can hold; reports the crash and narrows the
  /// state to the non-crashing side. Returns false when no state survives.
  bool guard(State &s, ExprRef crashCond, CrashKind kind) {
    if (crashCond->isFalse())
      return true;
    std::string loc = locationOf(s.stack.back(), false);
    if (crashCond->isTrue()) {
      Assignment model(ctx->vars().size(), 0);
      if (!s.pc.empty())
        model = query(s.pc, loc).model;
      reportCrash(s, kind, model);
      return false;
    }
    std::vector<ExprRef> q = s.pc;
    q.push_back(crashCond);
    SolverResult r = query(q, loc);
    if (!r.isSat())
      return true;
    reportCrash(s, kind, r.model);
    ExprRef ok = ctx->lnot(crashCond);
    if (!feasible(s, ok, loc))
      return false;
    // The crashing side is a path of its own.
    if (cfg.recordPaths) {
      std::vector<ExprRef> crashPc = s.pc;
      crashPc.push_back(crashCond);
      report.pathRecords.push_back({std::move(crashPc), true, {}, nullptr});
    }
    s.pc.push_back(ok);
    return true;
  }

  // Merging.

  bool parkIfAtTarget(StatePtr &s) {
    while (!s->groups.empty()) {
      MergeGroup &g = groups[s->groups.back()];
      if (g.dissolved) {
        s->groups.pop_back();
        continue;
      }
      const Frame &f = s->stack.back();
      if (s->stack.size() - 1 != g.depth || f.fn != g.fn || f.block != g.target)
        return false;
      unsigned id = s->groups.back();
      g.arrived.push_back(std::move(s));
      tryComplete(id);
      return true;
    }
    return false;
  }

  void tryComplete(unsigned id) {
    MergeGroup &g = groups[id];
    if (g.dissolved || g.arrived.empty() || g.arrived.size() < g.alive)
      return;
    completeGroup(id);
  }

  void completeGroup(unsigned id) {
    MergeGroup &g = groups[id];
    std::vector<StatePtr> arrived = std::move(g.arrived);
    g.arrived.clear();
    g.dissolved = true;
    size_t n = arrived.size();
    std::vector<StatePtr> out;
    for (StatePtr &s : arrived) {
      s->groups.pop_back();
      bool merged = false;
      for (StatePtr &acc : out)
        if (mergeInto(*acc, *s)) {
          ++report.mergedAway;
          merged = true;
          break;
        }
      if (!merged)
        out.push_back(std::move(s));
    }
    size_t removed = n - out.size();
    if (removed && !out.empty())
      for (unsigned outer : out.front()->groups)
        groups[outer].alive -= unsigned(removed);
    for (StatePtr &s : out) {
      if (!parkIfAtTarget(s))
        worklist.push_back(std::move(s));
    }
  }

  /// Releases the innermost group holding parked states when nothing else can
  /// make progress.
  bool flushStuckGroup() {
    for (size_t i = groups.size(); i-- > 0;)
      if (!groups[i].dissolved && !groups[i].arrived.empty()) {
        completeGroup(unsigned(i));
        return true;
      }
    return false;
  }

  static bool sameShape(const State &a, const State &b) {
    if (a.stack.size() != b.stack.size() || a.objects.size() != b.objects.size() ||
        a.groups != b.groups || a.allocaCounts != b.allocaCounts ||
        a.symbolicCounts != b.symbolicCounts)
      return false;
    for (size_t i = 0; i < a.stack.size(); ++i) {
      const Frame &x = a.stack[i], &y = b.stack[i];
      if (x.fn != y.fn || x.block != y.block || x.index != y.index ||
          x.resultSlot != y.resultSlot || x.varargs.size() != y.varargs.size())
        return false;
    }
    for (size_t i = 0; i < a.objects.size(); ++i)
      if (a.objects[i].key != b.objects[i].key ||
          a.objects[i].cells.size() != b.objects[i].cells.size())
        return false;
    return true;
  }

  bool mergeValue(SymValue &into, const SymValue &other, ExprRef cond) {
    if (!into.e && !into.isAddr()) {
      into = other;
      return true;
    }
    if (!other.e && !other.isAddr())
      return true;
    if (into.isAddr() != other.isAddr())
      return false;
    if (into.isAddr()) {
      if (into.obj != other.obj)
        return false;
      into.offset = ctx->ite(cond, into.offset, other.offset);
      return true;
    }
    if (into.e->width != other.e->width)
      return false;
    into.e = ctx->ite(cond, into.e, other.e);
    return true;
  }

  ExprRef conjunction(const std::vector<ExprRef> &cs, size_t from) {
    ExprRef r = ctx->boolConst(true);
    for (size_t i = from; i < cs.size(); ++i)
      r = ctx->land(r, cs[i]);
    return r;
  }

  bool mergeInto(State &a, const State &b) {
    if (!sameShape(a, b))
      return false;
    // Registers must agree on address-ness before anything is modified.
    for (size_t i = 0; i < a.stack.size(); ++i) {
      const Frame &x = a.stack[i], &y = b.stack[i];
      for (size_t r = 0; r < x.regs.size(); ++r) {
        const SymValue &u = x.regs[r], &v = y.regs[r];
        bool uSet = u.e || u.isAddr(), vSet = v.e || v.isAddr();
        if (uSet && vSet && (u.obj != v.obj || (u.e && v.e && u.e->width != v.e->width)))
          return false;
      }
      for (size_t r = 0; r < x.varargs.size(); ++r)
        if (x.varargs[r].obj != y.varargs[r].obj)
          return false;
    }
    size_t prefix = 0;
    while (prefix < a.pc.size() && prefix < b.pc.size() && a.pc[prefix] == b.pc[prefix])
      ++prefix;
    ExprRef ca = conjunction(a.pc, prefix);
    ExprRef cb = conjunction(b.pc, prefix);
    for (size_t i = 0; i < a.stack.size(); ++i) {
      Frame &x = a.stack[i];
      const Frame &y = b.stack[i];
      for (size_t r = 0; r < x.regs.size(); ++r)
        mergeValue(x.regs[r], y.regs[r], ca);
      for (size_t r = 0; r < x.varargs.size(); ++r)
        mergeValue(x.varargs[r], y.varargs[r], ca);
    }
    for (size_t i = 0; i < a.objects.size(); ++i)
      for (size_t c = 0; c < a.objects[i].cells.size(); ++c)
        a.objects[i].cells[c] = ctx->ite(ca, a.objects[i].cells[c], b.objects[i].cells[c]);
    a.pc.resize(prefix);
    ExprRef either = ctx->lor(ca, cb);
    if (!either->isTrue())
      a.pc.push_back(either);
    return true;
  }

  // Execution.

  ExprRef constOf(const Operand &op, unsigned width) {
    return ctx->constant(uint64_t(op.constant), width);
  }

  SymValue operand(const Frame &f, const PreparedInst &pi, size_t k, unsigned width) {
    const Operand &op = pi.inst->operands[k];
    if (op.isConst())
      return {constOf(op, width), -1, nullptr};
    if (op.isValue()) {
      const SymValue &v = f.regs[pi.opSlot[k]];
      if (!v.e && !v.isAddr())
        throw std::runtime_error("use of unassigned value %" + op.name);
      return v;
    }
    throw std::runtime_error("string operand used as a value");
  }

  ExprRef intOperand(const Frame &f, const PreparedInst &pi, size_t k, unsigned width) {
    SymValue v = operand(f, pi, k, width);
    if (v.isAddr())
      throw std::runtime_error("address used as an integer");
    return resize(v.e, width);
  }

  ExprRef resize(ExprRef e, unsigned width) {
    if (e->width == width)
      return e;
    if (e->width > width)
      return ctx->extract(e, 0, width);
    return ctx->zext(e, width);
  }

  void define(Frame &f, const PreparedInst &pi, SymValue v) {
    if (pi.result >= 0)
      f.regs[pi.result] = v;
  }

  void markVisited(const Frame &f) {
    visited[fnIndex(f.fn)][f.block][f.index] = 1;
  }

  void jump(Frame &f, unsigned target) {
    unsigned from = f.block;
    f.block = target;
    f.index = 0;
    const std::vector<PreparedInst> &bb = f.fn->blocks[target];
    std::vector<std::pair<int, SymValue>> updates;
    while (f.index < bb.size() && bb[f.index].inst->op == Opcode::Phi) {
      const PreparedInst &phi = bb[f.index];
      markVisited(f);
      size_t k = 0;
      while (k < phi.targets.size() && phi.targets[k] != int(from))
        ++k;
      if (k == phi.targets.size())
        throw std::runtime_error("phi %" + phi.inst->id + " has no input for " +
                                 f.fn->fn->blocks[from].label);
      updates.push_back({phi.result, operand(f, phi, k, phi.width)});
      ++f.index;
    }
    for (auto &[slot, v] : updates)
      f.regs[slot] = v;
  }

  /// Bounds check for an access; returns false when the state terminated.
  bool checkAccess(State &s, const SymValue &addr, bool isStore) {
    if (!addr.isAddr())
      throw std::runtime_error("memory access through a non-address value");
    const SymObject &o = s.objects[addr.obj];
    ExprRef len = ctx->constant(o.cells.size(), kOffsetWidth);
    ExprRef out = ctx->cmp(Pred::Uge, addr.offset, len);
    return guard(s, out, isStore ? CrashKind::OobStore : CrashKind::OobLoad);
  }

  /// Concrete offset for an access through `offset`. A symbolic offset forks
  /// one state per further feasible in-bounds value.
  uint64_t resolveOffset(StatePtr &s, ExprRef offset, size_t length) {
    if (s->forcedOffset) {
      uint64_t v = *s->forcedOffset;
      s->forcedOffset.reset();
      return v;
    }
    if (offset->isConst())
      return offset->value;
    std::string loc = locationOf(s->stack.back(), false);
    std::vector<std::pair<uint64_t, ExprRef>> values;
    for (size_t i = 0; i < length; ++i) {
      ExprRef eq = ctx->eq(offset, ctx->constant(i, kOffsetWidth));
      if (feasible(*s, eq, loc))
        values.push_back({i, eq});
    }
    if (values.empty())
      throw std::runtime_error("no feasible in-bounds offset");
    if (values.size() == 1)
      return values.front().first;
    for (size_t k = 1; k < values.size(); ++k) {
      auto clone = std::make_unique<State>(*s);
      clone->pc.push_back(values[k].second);
      clone->forcedOffset = values[k].first;
      for (unsigned g : clone->groups)
        ++groups[g].alive;
      worklist.push_back(std::move(clone));
    }
    s->pc.push_back(values.front().second);
    return values.front().first;
  }

  /// Runs `s` until it terminates, forks or parks.
  void runState(StatePtr s, std::chrono::steady_clock::time_point start) {
    for (;;) {
      ++steps;
      checkBudgets(start);
      Frame &f = s->stack.back();
      const PreparedInst &pi = f.fn->blocks[f.block][f.index];
      const Instruction &inst = *pi.inst;
      const auto &ops = inst.operands;
      unsigned w = inst.type.width;
      markVisited(f);

      if (isBinaryOp(inst.op)) {
        ExprRef a = intOperand(f, pi, 0, w), b = intOperand(f, pi, 1, w);
        if (inst.op == Opcode::UDiv || inst.op == Opcode::SDiv)
          if (!guard(*s, ctx->eq(b, ctx->constant(0, w)), CrashKind::DivByZero)) {
            finishPath(*s, true);
            return;
          }
        define(s->stack.back(), pi, {ctx->binary(exprKindFor(inst.op), a, b), -1, nullptr});
        ++s->stack.back().index;
        continue;
      }

      switch (inst.op) {
      case Opcode::ICmp:
        define(f, pi, {ctx->cmp(inst.pred, intOperand(f, pi, 0, w), intOperand(f, pi, 1, w)),
                       -1, nullptr});
        break;
      case Opcode::ZExt:
        define(f, pi, {ctx->zext(intOperand(f, pi, 0, inst.srcType.width), w), -1, nullptr});
        break;
      case Opcode::SExt:
        define(f, pi, {ctx->sext(intOperand(f, pi, 0, inst.srcType.width), w), -1, nullptr});
        break;
      case Opcode::Trunc:
        define(f, pi,
               {ctx->extract(intOperand(f, pi, 0, inst.srcType.width), 0, w), -1, nullptr});
        break;
      case Opcode::Select: {
        ExprRef c = intOperand(f, pi, 0, 1);
        SymValue t = operand(f, pi, 1, w), e = operand(f, pi, 2, w);
        if (c->isConst()) {
          define(f, pi, c->value ? t : e);
        } else if (t.isAddr() || e.isAddr()) {
          if (t.obj != e.obj)
            throw std::runtime_error("select between addresses of different objects");
          define(f, pi, {nullptr, t.obj, ctx->ite(c, t.offset, e.offset)});
        } else {
          define(f, pi, {ctx->ite(c, t.e, e.e), -1, nullptr});
        }
        break;
      }
      case Opcode::Alloca: {
        std::string site = f.fn->fn->name + ":" + inst.id;
        unsigned n = s->allocaCounts[site]++;
        SymObject o;
        o.key = site + "#" + std::to_string(n);
        o.width = inst.type.width;
        o.cells.assign(inst.type.length, ctx->constant(0, inst.type.width));
        s->objects.push_back(std::move(o));
        define(f, pi, {nullptr, int(s->objects.size() - 1),
                       ctx->constant(0, kOffsetWidth)});
        break;
      }
      case Opcode::Gep: {
        SymValue base = operand(f, pi, 0, w);
        if (!base.isAddr())
          throw std::runtime_error("gep on a non-address value");
        ExprRef idx;
        if (ops[1].isConst()) {
          idx = ctx->constant(uint64_t(ops[1].constant), kOffsetWidth);
        } else {
          ExprRef raw = f.regs[pi.opSlot[1]].e;
          if (!raw)
            throw std::runtime_error("gep index is not an integer");
          idx = raw->width < kOffsetWidth   ? ctx->sext(raw, kOffsetWidth)
                : raw->width > kOffsetWidth ? ctx->extract(raw, 0, kOffsetWidth)
                                            : raw;
        }
        define(f, pi, {nullptr, base.obj, ctx->add(base.offset, idx)});
        break;
      }
      case Opcode::Load: {
        SymValue addr = operand(f, pi, 0, w);
        if (!s->forcedOffset && !checkAccess(*s, addr, false)) {
          finishPath(*s, true);
          return;
        }
        const SymObject &o = s->objects[addr.obj];
        uint64_t off = resolveOffset(s, addr.offset, o.cells.size());
        define(s->stack.back(), pi, {resize(o.cells[off], w), -1, nullptr});
        break;
      }
      case Opcode::Store: {
        ExprRef v = intOperand(f, pi, 0, w);
        SymValue addr = operand(f, pi, 1, w);
        if (!s->forcedOffset && !checkAccess(*s, addr, true)) {
          finishPath(*s, true);
          return;
        }
        SymObject &o = s->objects[addr.obj];
        uint64_t off = resolveOffset(s, addr.offset, o.cells.size());
        o.cells[off] = resize(v, o.width);
        break;
      }
      case Opcode::MakeSymbolic: {
        SymValue addr = operand(f, pi, 0, w);
        if (!addr.isAddr() || !addr.offset->isConst())
          throw std::runtime_error("make_symbolic needs a concrete address");
        const std::string &baseName = ops[2].name;
        std::string name = symbolicObjectName(baseName, s->symbolicCounts[baseName]++);
        uint32_t len = uint32_t(ops[1].constant);
        SymObject &o = s->objects[addr.obj];
        unsigned bits = ops.size() == 4 ? unsigned(ops[3].constant) : o.width;
        for (uint32_t i = 0; i < len; ++i) {
          uint64_t off = addr.offset->value + i;
          if (off >= o.cells.size())
            throw std::runtime_error("make_symbolic exceeds its object");
          o.cells[off] = resize(ctx->read(variable(name, i, bits)), o.width);
        }
        break;
      }
      case Opcode::Assert: {
        ExprRef c = intOperand(f, pi, 0, 1);
        if (!guard(*s, ctx->lnot(c), CrashKind::AssertFail)) {
          finishPath(*s, true);
          return;
        }
        break;
      }
      case Opcode::VaArg: {
        size_t k = size_t(ops[0].constant);
        if (k >= f.varargs.size())
          throw std::runtime_error("va_arg index beyond the passed arguments");
        SymValue v = f.varargs[k];
        if (!v.isAddr() && inst.type.isInt())
          v.e = resize(v.e, w);
        define(f, pi, v);
        break;
      }
      case Opcode::Call: {
        const PreparedFunction &callee = prepared.functions[pi.callee];
        Frame next;
        next.fn = &callee;
        next.regs.resize(callee.numSlots);
        next.resultSlot = pi.result;
        for (size_t k = 0; k < ops.size(); ++k) {
          if (k < callee.paramSlots.size()) {
            unsigned pw = callee.fn->params[k].type.width;
            SymValue v = operand(f, pi, k, pw);
            if (!v.isAddr())
              v.e = resize(v.e, pw);
            next.regs[callee.paramSlots[k]] = v;
          } else {
            next.varargs.push_back(operand(f, pi, k, 64));
          }
        }
        ++f.index;
        s->stack.push_back(std::move(next));
        continue;
      }
      case Opcode::Ret: {
        SymValue v;
        if (!ops.empty())
          v = operand(f, pi, 0, w);
        int dest = f.resultSlot;
        s->stack.pop_back();
        if (s->stack.empty()) {
          ++report.exits;
          finishPath(*s, false, v.isAddr() ? nullptr : v.e);
          return;
        }
        if (dest >= 0)
          s->stack.back().regs[dest] = v;
        continue;
      }
      case Opcode::Br: {
        if (!inst.isConditionalBranch()) {
          jump(f, unsigned(pi.targets[0]));
          if (cfg.mergeStates && parkIfAtTarget(s))
            return;
          continue;
        }
        ExprRef c = intOperand(f, pi, 0, 1);
        if (c->isConst()) {
          jump(f, unsigned(pi.targets[c->value ? 0 : 1]));
          if (cfg.mergeStates && parkIfAtTarget(s))
            return;
          continue;
        }
        std::string loc = locationOf(f, true);
        bool canTrue = feasible(*s, c, loc);
        if (!canTrue) {
          jump(f, unsigned(pi.targets[1]));
          if (cfg.mergeStates && parkIfAtTarget(s))
            return;
          continue;
        }
        ExprRef nc = ctx->lnot(c);
        if (!feasible(*s, nc, loc)) {
          jump(f, unsigned(pi.targets[0]));
          if (cfg.mergeStates && parkIfAtTarget(s))
            return;
          continue;
        }
        fork(std::move(s), c, nc, pi);
        return;
      }
      case Opcode::Phi:
        throw std::runtime_error("phi outside a block head");
      default:
        throw std::runtime_error("unsupported opcode in executor");
      }
      ++s->stack.back().index;
    }
  }

  void fork(StatePtr s, ExprRef c, ExprRef nc, const PreparedInst &pi) {
    Frame &f = s->stack.back();
    unsigned branchBlock = f.block;
    auto other = std::make_unique<State>(*s);
    for (unsigned g : s->groups)
      ++groups[g].alive;
    if (cfg.mergeStates) {
      int target = cfgInfo[fnIndex(f.fn)].ipdom[branchBlock];
      if (target != CfgInfo::kNone) {
        MergeGroup g;
        g.fn = f.fn;
        g.depth = s->stack.size() - 1;
        g.target = unsigned(target);
        g.alive = 2;
        groups.push_back(std::move(g));
        unsigned id = unsigned(groups.size() - 1);
        s->groups.push_back(id);
        other->groups.push_back(id);
      }
    }
    s->pc.push_back(c);
    other->pc.push_back(nc);
    jump(s->stack.back(), unsigned(pi.targets[0]));
    jump(other->stack.back(), unsigned(pi.targets[1]));
    StatePtr taken = std::move(s), notTaken = std::move(other);
    bool parkedFalse = cfg.mergeStates && parkIfAtTarget(notTaken);
    if (!parkedFalse)
      worklist.push_back(std::move(notTaken));
    bool parkedTrue = cfg.mergeStates && parkIfAtTarget(taken);
    if (!parkedTrue)
      worklist.push_back(std::move(taken));
  }
};

} // namespace

DseReport runDse(const Module &m, const DseConfig &cfg, const CrashCallback &onCrash) {
  return Executor(m, cfg, onCrash).run();
}

} // namespace mse
