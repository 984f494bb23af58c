//===-- SymAnalysis.h - Inter-procedural symbolic value analysis -*- C++ -*-===//
//
// Marks SSA values and conditional branches whose outcome may depend on
// symbolic input. Values become symbolic through data dependence, through
// phis controlled by a symbolic branch (sync dependence), and through loads
// from objects that ever held symbolic data. Memory is tracked per alloca
// site; call sites push symbolic arguments into callee parameters and the
// callee is reprocessed until nothing changes.
//
//===----------------------------------------------------------------------===//

#ifndef MSE_SYMANALYSIS_H
#define MSE_SYMANALYSIS_H

#include "mse/IR.h"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mse {

/// Abstract memory object: "function:allocaId".
using ObjectId = std::string;

struct FunctionFacts {
  std::set<std::string> symbolicValues;
  std::set<InstRef> symbolicBranches;
  std::set<unsigned> symbolicParams;
  bool variadicSymbolic = false;
  bool returnsSymbolic = false;
  /// Alloca sites each address-typed value may refer to.
  std::map<std::string, std::set<ObjectId>> pointsTo;
  std::set<ObjectId> returnPointsTo;

  bool operator==(const FunctionFacts &) const = default;
};

struct SymFacts {
  std::map<std::string, FunctionFacts> functions;
  std::set<ObjectId> symbolicObjects;
  std::vector<Diagnostic> diagnostics;

  bool isSymbolic(const std::string &function, const Operand &op) const;
  bool isSymbolicValue(const std::string &function,
                       const std::string &value) const;
  const FunctionFacts *find(const std::string &function) const;

  bool operator==(const SymFacts &o) const {
    return functions == o.functions && symbolicObjects == o.symbolicObjects;
  }
};

/// Make_symbolic targets and entry-function parameters.
SymFacts markSymbolicSources(const Module &m);

/// Intra-procedural fixed point for `f`; returns whether `facts` changed.
bool propagateFunction(const Module &m, const Function &f, SymFacts &facts);

/// Worklist-driven inter-procedural fixed point.
SymFacts analyzeProgram(const Module &m);

using BranchMap = std::map<std::string, std::vector<InstRef>>;

/// Conditional branches whose condition value is symbolic, per function.
BranchMap classifyBranches(const Module &m, const SymFacts &facts);

} // namespace mse

#endif
