//===-- SymAnalysis.cpp ---------------------------------------------------===//

#include "mse/SymAnalysis.h"

#include "mse/CFG.h"

#include <deque>

namespace mse {

const FunctionFacts *SymFacts::find(const std::string &function) const {
  auto it = functions.find(function);
  return it == functions.end() ? nullptr : &it->second;
}

bool SymFacts::isSymbolicValue(const std::string &function,
                               const std::string &value) const {
  const FunctionFacts *ff = find(function);
  return ff && ff->symbolicValues.count(value);
}

bool SymFacts::isSymbolic(const std::string &function,
                          const Operand &op) const {
  return op.isValue() && isSymbolicValue(function, op.name);
}

namespace {

ObjectId objectOf(const Function &f, const std::string &allocaId) {
  return f.name + ":" + allocaId;
}

template <typename T> bool insertAll(std::set<T> &dst, const std::set<T> &src) {
  size_t before = dst.size();
  dst.insert(src.begin(), src.end());
  return dst.size() != before;
}

/// Per-function state that does not change across worklist visits.
struct FunctionShape {
  CfgInfo cfg;
  ControlDependence cd;
  /// For each phi (block, index): branch blocks that decide which incoming
  /// edge is taken.
  std::map<std::pair<unsigned, unsigned>, std::set<unsigned>> phiControllers;
};

FunctionShape computeShape(const Function &f) {
  FunctionShape s;
  s.cfg = computeCfgInfo(f);
  s.cd = computeControlDependence(s.cfg);
  for (unsigned b = 0; b < f.blocks.size(); ++b) {
    const BasicBlock &bb = f.blocks[b];
    for (unsigned i = 0; i < bb.insts.size(); ++i) {
      const Instruction &inst = bb.insts[i];
      if (inst.op != Opcode::Phi)
        continue;
      std::vector<std::set<Decision>> edges;
      for (const std::string &l : inst.labels) {
        int from = f.blockIndex(l);
        if (from >= 0)
          edges.push_back(s.cd.edgeDecisions(s.cfg, unsigned(from), b));
      }
      std::set<unsigned> deciders;
      for (const auto &e : edges)
        for (const Decision &d : e)
          deciders.insert(d.first);
      std::set<unsigned> controllers;
      for (unsigned x : deciders) {
        auto restrictTo = [x](const std::set<Decision> &ds) {
          std::set<unsigned> r;
          for (const Decision &d : ds)
            if (d.first == x)
              r.insert(d.second);
          return r;
        };
        std::set<unsigned> first = restrictTo(edges.front());
        for (size_t k = 1; k < edges.size(); ++k)
          if (restrictTo(edges[k]) != first) {
            controllers.insert(x);
            break;
          }
      }
      s.phiControllers[{b, i}] = std::move(controllers);
    }
  }
  return s;
}

const FunctionShape &shapeOf(const Function &f,
                             std::map<std::string, FunctionShape> &cache) {
  auto it = cache.find(f.name);
  if (it == cache.end())
    it = cache.emplace(f.name, computeShape(f)).first;
  return it->second;
}

class IntraAnalysis {
public:
  IntraAnalysis(const Module &m, const Function &f, const FunctionShape &shape,
                SymFacts &facts)
      : m(m), f(f), shape(shape), facts(facts),
        ff(facts.functions[f.name]) {}

  bool run() {
    bool changedAny = false;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Param &p : f.params)
        if (ff.symbolicParams.count(paramIndex(p.name)))
          changed |= mark(p.name);
      for (unsigned b = 0; b < f.blocks.size(); ++b)
        for (unsigned i = 0; i < f.blocks[b].insts.size(); ++i)
          changed |= visit(b, i);
      changedAny |= changed;
    }
    return changedAny;
  }

private:
  const Module &m;
  const Function &f;
  const FunctionShape &shape;
  SymFacts &facts;
  FunctionFacts &ff;

  unsigned paramIndex(const std::string &name) const {
    for (unsigned k = 0; k < f.params.size(); ++k)
      if (f.params[k].name == name)
        return k;
    return ~0u;
  }

  bool sym(const Operand &op) const {
    return op.isValue() && ff.symbolicValues.count(op.name);
  }

  bool mark(const std::string &id) {
    return !id.empty() && ff.symbolicValues.insert(id).second;
  }

  const std::set<ObjectId> &pts(const Operand &op) {
    static const std::set<ObjectId> empty;
    if (!op.isValue())
      return empty;
    auto it = ff.pointsTo.find(op.name);
    return it == ff.pointsTo.end() ? empty : it->second;
  }

  bool addPts(const std::string &id, const std::set<ObjectId> &objs) {
    if (objs.empty())
      return false;
    return insertAll(ff.pointsTo[id], objs);
  }

  bool anyObjectSymbolic(const std::set<ObjectId> &objs) const {
    for (const ObjectId &o : objs)
      if (facts.symbolicObjects.count(o))
        return true;
    return false;
  }

  /// Block is control dependent on a branch whose condition is symbolic.
  bool underSymbolicControl(unsigned b) const {
    for (const Decision &d : shape.cd.closure[b]) {
      const Instruction &br = f.blocks[d.first].terminator();
      if (br.isConditionalBranch() && sym(br.operands[0]))
        return true;
    }
    return false;
  }

  bool visit(unsigned b, unsigned i) {
    const Instruction &inst = f.blocks[b].insts[i];
    const auto &ops = inst.operands;
    bool changed = false;
    switch (inst.op) {
    case Opcode::Alloca:
      changed |= addPts(inst.id, {objectOf(f, inst.id)});
      break;
    case Opcode::Gep:
      changed |= addPts(inst.id, pts(ops[0]));
      if (sym(ops[0]) || sym(ops[1]))
        changed |= mark(inst.id);
      break;
    case Opcode::Phi: {
      bool s = false;
      for (const Operand &op : ops) {
        s |= sym(op);
        changed |= addPts(inst.id, pts(op));
      }
      auto it = shape.phiControllers.find({b, i});
      if (it != shape.phiControllers.end())
        for (unsigned x : it->second) {
          const Instruction &br = f.blocks[x].terminator();
          if (br.isConditionalBranch() && sym(br.operands[0]))
            s = true;
        }
      if (s)
        changed |= mark(inst.id);
      break;
    }
    case Opcode::Select:
      changed |= addPts(inst.id, pts(ops[1]));
      changed |= addPts(inst.id, pts(ops[2]));
      if (sym(ops[0]) || sym(ops[1]) || sym(ops[2]))
        changed |= mark(inst.id);
      break;
    case Opcode::Load:
      if (sym(ops[0]) || anyObjectSymbolic(pts(ops[0])))
        changed |= mark(inst.id);
      break;
    case Opcode::Store: {
      if (sym(ops[0]) || sym(ops[1]) || underSymbolicControl(b))
        changed |= insertAll(facts.symbolicObjects, pts(ops[1]));
      break;
    }
    case Opcode::MakeSymbolic:
      changed |= insertAll(facts.symbolicObjects, pts(ops[0]));
      break;
    case Opcode::VaArg:
      if (ff.variadicSymbolic)
        changed |= mark(inst.id);
      break;
    case Opcode::Call: {
      const Function *callee = m.findFunction(inst.callee);
      bool s = callee == nullptr;
      for (const Operand &op : ops)
        s |= sym(op);
      if (callee) {
        const FunctionFacts *cf = facts.find(callee->name);
        if (cf) {
          s |= cf->returnsSymbolic;
          if (inst.hasResult())
            changed |= addPts(inst.id, cf->returnPointsTo);
        }
      }
      if (s && inst.hasResult())
        changed |= mark(inst.id);
      break;
    }
    case Opcode::Ret:
      if (!ops.empty()) {
        bool s = sym(ops[0]) || underSymbolicControl(b);
        if (s && !ff.returnsSymbolic) {
          ff.returnsSymbolic = true;
          changed = true;
        }
        changed |= insertAll(ff.returnPointsTo, pts(ops[0]));
      }
      break;
    case Opcode::Br:
      if (inst.isConditionalBranch() && sym(ops[0]))
        changed |= ff.symbolicBranches.insert({f.blocks[b].label, i}).second;
      break;
    case Opcode::Assert:
      break;
    default:
      // ALU: binary, icmp, casts.
      for (const Operand &op : ops)
        if (sym(op)) {
          changed |= mark(inst.id);
          break;
        }
      break;
    }
    return changed;
  }
};

/// Pushes symbolic arguments and address targets from the call sites in `f`
/// into callee facts. Returns the callees whose facts changed.
std::set<std::string> propagateCallSites(const Module &m, const Function &f,
                                         SymFacts &facts) {
  std::set<std::string> touched;
  const FunctionFacts &ff = facts.functions[f.name];
  for (const BasicBlock &bb : f.blocks)
    for (const Instruction &inst : bb.insts) {
      if (inst.op != Opcode::Call)
        continue;
      const Function *callee = m.findFunction(inst.callee);
      if (!callee)
        continue;
      FunctionFacts &cf = facts.functions[callee->name];
      for (unsigned k = 0; k < inst.operands.size(); ++k) {
        const Operand &arg = inst.operands[k];
        bool s = arg.isValue() && ff.symbolicValues.count(arg.name);
        if (k < callee->params.size()) {
          if (s && cf.symbolicParams.insert(k).second)
            touched.insert(callee->name);
          if (arg.isValue()) {
            auto it = ff.pointsTo.find(arg.name);
            if (it != ff.pointsTo.end() &&
                insertAll(cf.pointsTo[callee->params[k].name], it->second))
              touched.insert(callee->name);
          }
        } else if (callee->variadic && s && !cf.variadicSymbolic) {
          cf.variadicSymbolic = true;
          touched.insert(callee->name);
        }
      }
    }
  return touched;
}

} // namespace

SymFacts markSymbolicSources(const Module &m) {
  SymFacts facts;
  for (const Function &f : m.functions) {
    FunctionFacts &ff = facts.functions[f.name];
    if (f.name == m.entry) {
      for (unsigned k = 0; k < f.params.size(); ++k) {
        ff.symbolicParams.insert(k);
        ff.symbolicValues.insert(f.params[k].name);
      }
      if (f.variadic)
        ff.variadicSymbolic = true;
    }
    // Local address flow so that make_symbolic targets resolve to objects.
    bool changed = true;
    while (changed) {
      changed = false;
      for (const BasicBlock &bb : f.blocks)
        for (const Instruction &inst : bb.insts) {
          std::set<ObjectId> objs;
          if (inst.op == Opcode::Alloca)
            objs.insert(objectOf(f, inst.id));
          else if (inst.op == Opcode::Gep || inst.op == Opcode::Phi ||
                   inst.op == Opcode::Select)
            for (const Operand &op : inst.operands)
              if (op.isValue() && ff.pointsTo.count(op.name))
                objs.insert(ff.pointsTo[op.name].begin(),
                            ff.pointsTo[op.name].end());
          if (!objs.empty() && insertAll(ff.pointsTo[inst.id], objs))
            changed = true;
        }
    }
    for (const BasicBlock &bb : f.blocks)
      for (unsigned i = 0; i < bb.insts.size(); ++i) {
        const Instruction &inst = bb.insts[i];
        if (inst.op != Opcode::MakeSymbolic)
          continue;
        const Operand &target = inst.operands.empty() ? Operand{} : inst.operands[0];
        auto it = target.isValue() ? ff.pointsTo.find(target.name)
                                   : ff.pointsTo.end();
        bool isParam = false;
        for (const Param &p : f.params)
          isParam |= target.isValue() && p.name == target.name && p.type.isAddr();
        if (it == ff.pointsTo.end() && !isParam) {
          facts.diagnostics.push_back({"make-symbolic-target", f.name, bb.label,
                                       int(i),
                                       "make_symbolic target is not an address"});
          continue;
        }
        if (it != ff.pointsTo.end())
          facts.symbolicObjects.insert(it->second.begin(), it->second.end());
      }
  }
  return facts;
}

bool propagateFunction(const Module &m, const Function &f, SymFacts &facts) {
  std::map<std::string, FunctionShape> cache;
  return IntraAnalysis(m, f, shapeOf(f, cache), facts).run();
}

SymFacts analyzeProgram(const Module &m) {
  SymFacts facts = markSymbolicSources(m);
  std::map<std::string, FunctionShape> shapes;

  std::map<std::string, std::set<std::string>> callers;
  for (const Function &f : m.functions)
    for (const BasicBlock &bb : f.blocks)
      for (unsigned i = 0; i < bb.insts.size(); ++i) {
        const Instruction &inst = bb.insts[i];
        if (inst.op != Opcode::Call)
          continue;
        if (m.findFunction(inst.callee))
          callers[inst.callee].insert(f.name);
        else
          facts.diagnostics.push_back(
              {"unresolved-callee", f.name, bb.label, int(i),
               "call to unknown @" + inst.callee +
                   " treated as returning a symbolic value"});
      }

  std::deque<std::string> work;
  std::set<std::string> queued;
  auto push = [&](const std::string &name) {
    if (queued.insert(name).second)
      work.push_back(name);
  };
  for (const Function &f : m.functions)
    push(f.name);

  while (!work.empty()) {
    std::string name = work.front();
    work.pop_front();
    queued.erase(name);
    const Function *f = m.findFunction(name);

    size_t objectsBefore = facts.symbolicObjects.size();
    FunctionFacts before = facts.functions[name];
    IntraAnalysis(m, *f, shapeOf(*f, shapes), facts).run();
    const FunctionFacts &after = facts.functions[name];

    for (const std::string &callee : propagateCallSites(m, *f, facts))
      push(callee);
    if (after.returnsSymbolic != before.returnsSymbolic ||
        after.returnPointsTo != before.returnPointsTo)
      for (const std::string &c : callers[name])
        push(c);
    if (facts.symbolicObjects.size() != objectsBefore)
      for (const Function &g : m.functions)
        if (g.name != name)
          push(g.name);
  }
  return facts;
}

BranchMap classifyBranches(const Module &m, const SymFacts &facts) {
  BranchMap out;
  for (const Function &f : m.functions) {
    std::vector<InstRef> &list = out[f.name];
    for (const BasicBlock &bb : f.blocks) {
      if (bb.insts.empty())
        continue;
      const Instruction &br = bb.terminator();
      if (br.isConditionalBranch() && facts.isSymbolic(f.name, br.operands[0]))
        list.push_back({bb.label, unsigned(bb.insts.size() - 1)});
    }
  }
  return out;
}

} // namespace mse
