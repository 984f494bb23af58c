//===-- Naming.h - Fresh SSA ids and block labels ---------------*- C++ -*-===//

#ifndef MSE_TRANSFORM_NAMING_H
#define MSE_TRANSFORM_NAMING_H

#include "mse/IR.h"

#include <set>
#include <string>

namespace mse {

class NameScope {
public:
  explicit NameScope(const Function &f) {
    for (const Param &p : f.params)
      used.insert(p.name);
    for (const BasicBlock &bb : f.blocks) {
      used.insert(bb.label);
      for (const Instruction &inst : bb.insts)
        if (inst.hasResult())
          used.insert(inst.id);
    }
  }

  void reserve(const std::string &name) { used.insert(name); }

  std::string fresh(const std::string &base) {
    if (used.insert(base).second)
      return base;
    for (unsigned n = 1;; ++n) {
      std::string candidate = base + "." + std::to_string(n);
      if (used.insert(candidate).second)
        return candidate;
    }
  }

private:
  std::set<std::string> used;
};

} // namespace mse

#endif
