//===-- Driver.cpp - False-positive filtering driver loop -----------------===//
//
// Alternates transformation and exploration. Every crash of the transformed
// program is replayed on the original; a crash the original does not share
// blocks the responsible diamond and restarts exploration from scratch.
//
//===----------------------------------------------------------------------===//

#include "mse/Harness.h"

#include <set>
#include <stdexcept>

namespace mse {

Classification verifyCrash(const Module &original, CrashReport &r) {
  ConcreteResult replay = concreteRun(original, r.input);
  r.classification =
      replay.crashed ? Classification::TruePositive : Classification::FalsePositive;
  return r.classification;
}

DriverState driverLoop(const Module &original, const DriverConfig &cfg) {
  DriverState st;
  SymFacts facts = analyzeProgram(original);
  std::set<std::pair<CrashKind, std::string>> seen;

  while (true) {
    if (st.iterations >= cfg.maxIterations) {
      st.budgetExhausted = true;
      break;
    }
    ++st.iterations;
    TransformResult t = runCfmse(original, facts, st.constraints);
    DriverIteration it;
    it.constraints = st.constraints;
    it.transform = t.report;

    std::optional<CrashReport> falsePositive;
    auto onCrash = [&](CrashReport &r) {
      if (!concreteRun(t.module, r.input).crashed)
        throw std::logic_error("crash input " + r.inputHex() +
                               " does not crash the transformed program");
      if (verifyCrash(original, r) == Classification::TruePositive) {
        ++it.truePositives;
        if (seen.insert({r.kind, r.site.str()}).second)
          st.truePositives.push_back(r);
        return true;
      }
      ++it.falsePositives;
      falsePositive = r;
      return false;
    };
    it.report = runDse(t.module, cfg.dse, onCrash);

    if (falsePositive) {
      std::vector<std::string> added;
      std::string loc = falsePositive->site.originLocation();
      if (!loc.empty() && !st.constraints.count(loc)) {
        added.push_back(loc);
      } else {
        for (const MergeRecord &m : t.report.merges)
          if (!st.constraints.count(m.location))
            added.push_back(m.location);
      }
      if (added.empty())
        throw std::logic_error("false positive at " + falsePositive->site.str() +
                               " has no responsible transformation");
      for (const std::string &l : added) {
        st.constraints.insert(l);
        st.falsePositiveLocations.push_back(l);
      }
      it.addedLocations = std::move(added);
      st.history.push_back(std::move(it));
      continue;
    }

    st.finalReport = it.report;
    st.budgetExhausted = it.report.termination == Termination::TimeBudget ||
                         it.report.termination == Termination::PathBudget;
    st.history.push_back(std::move(it));
    break;
  }
  return st;
}

} // namespace mse
