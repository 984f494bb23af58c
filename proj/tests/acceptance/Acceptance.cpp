//===-- Acceptance.cpp - End-to-end acceptance checks ---------------------===//
//
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.
//
//===----------------------------------------------------------------------===//

#include "TestSupport.h"

#include "mse/Harness.h"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace mse;

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

Module transform(const Module &m) {
  return runCfmse(m, analyzeProgram(m), {}).module;
}

/// Each check returns an empty string on success, a reason otherwise.
std::string pathExplosion() {
  auto start = Clock::now();
  Module m = benchmarkModule("toupper", 10);
  DseConfig cfg;
  cfg.backend = Backend::Sat;
  DseReport k = runDse(m, cfg);
  DseReport c = runDse(transform(m), cfg);
  double t = secondsSince(start);
  std::ostringstream os;
  os << "original paths=" << k.paths << ", transformed paths=" << c.paths << ", "
     << t << " s";
  if (k.paths != 1024 || c.paths != 1 || k.termination != Termination::Exhausted ||
      c.termination != Termination::Exhausted || t >= 60)
    return os.str();
  std::printf("  %s\n", os.str().c_str());
  return "";
}

std::string selectShape() {
  Module m = benchmarkModule("toupper", 10);
  TransformReport r = runCfmse(m, analyzeProgram(m), {}).report;
  if (r.merges.size() != 1)
    return "expected one merge, got " + std::to_string(r.merges.size());
  unsigned selects = r.merges[0].selects;
  unsigned counted = 0;
  for (const Function &f : transform(m).functions)
    for (const BasicBlock &b : f.blocks)
      for (const Instruction &i : b.insts)
        counted += i.op == Opcode::Select;
  if (selects != 3 || counted != 3)
    return "selects reported=" + std::to_string(selects) +
           ", in module=" + std::to_string(counted);
  std::printf("  selects=%u\n", selects);
  return "";
}

std::string stateMerging() {
  Module m = benchmarkModule("toupper", 10);
  DseConfig cfg;
  cfg.mergeStates = true;
  DseReport sm = runDse(m, cfg);
  if (sm.paths != 11)
    return "merged paths=" + std::to_string(sm.paths);
  std::printf("  merged paths=%llu\n", (unsigned long long)sm.paths);
  return "";
}

std::string queryFreeBody() {
  for (unsigned n = 1; n <= 100; ++n) {
    Module q = transform(benchmarkModule("toupper", n));
    DseReport r = runDse(q, {});
    auto it = r.queriesByLocation.find("to_upper:l.body");
    uint64_t at = it == r.queriesByLocation.end() ? 0 : it->second;
    if (at != 0 || r.paths != 1)
      return "N=" + std::to_string(n) + ": queries=" + std::to_string(at) +
             ", paths=" + std::to_string(r.paths);
  }
  DseConfig cfg;
  cfg.maxPaths = 64;
  DseReport orig = runDse(benchmarkModule("toupper", 100), cfg);
  uint64_t origQueries = orig.queriesByLocation.count("to_upper:l.body")
                             ? orig.queriesByLocation.at("to_upper:l.body")
                             : 0;
  if (origQueries == 0)
    return "original issued no queries at the branch";
  std::printf("  N=1..100 transformed: 0 queries; original N=100 (64 paths): %llu\n",
              (unsigned long long)origQueries);
  return "";
}

std::string failurePreservation() {
  auto start = Clock::now();
  uint64_t inputs = 0, crashes = 0, compared = 0, fps = 0;
  for (const BenchmarkInstance &inst : enumerationCorpus(16)) {
    test::PreservationResult r = test::checkFailurePreservation(inst.module,
                                                                transform(inst.module));
    inputs += r.inputs;
    crashes += r.crashesP;
    compared += r.comparedSafe;
    fps += r.falsePositiveInputs;
    if (r.violations)
      return inst.name + ": " + std::to_string(r.violations) + " violations, " +
             r.firstViolation;
  }
  double t = secondsSince(start);
  if (t >= 300)
    return "took " + std::to_string(t) + " s";
  std::printf("  inputs=%llu crashes(P)=%llu false-positive inputs=%llu compared=%llu, "
              "%.1f s\n",
              (unsigned long long)inputs, (unsigned long long)crashes,
              (unsigned long long)fps, (unsigned long long)compared, t);
  return "";
}

std::string driverCorrectness() {
  DriverConfig cfg;
  DriverState g = driverLoop(benchmarkModule("guarded_oob"), cfg);
  if (g.history.size() < 2 || g.history[0].falsePositives != 1 ||
      !g.history[1].report.crashes.empty() || !g.truePositives.empty())
    return "guarded_oob: unexpected history";
  for (const char *name : {"divzero", "toupper_bug"}) {
    Module m = benchmarkModule(name);
    DriverState d = driverLoop(m, cfg);
    if (d.truePositives.empty())
      return std::string(name) + ": true positive lost";
    for (const CrashReport &c : d.truePositives)
      if (!concreteRun(m, c.input).crashed)
        return std::string(name) + ": reported input does not crash";
  }
  std::printf("  guarded_oob: %u iterations, constraints=%zu\n", g.iterations,
              g.constraints.size());
  return "";
}

std::string solverCrossCheck() {
  test::SolverCrossCheck r = test::crossCheckSolvers(10000, 16, 20240521);
  if (r.queries < 10000 || r.disagreements || r.invalidModels)
    return "disagreements=" + std::to_string(r.disagreements) +
           ", invalid models=" + std::to_string(r.invalidModels) + " " + r.firstProblem;
  std::printf("  queries=%llu sat=%llu\n", (unsigned long long)r.queries,
              (unsigned long long)r.sat);
  return "";
}

std::string pathPartition() {
  uint64_t inputs = 0, paths = 0;
  for (const BenchmarkInstance &inst : enumerationCorpus(16)) {
    for (const Module &m : {inst.module, transform(inst.module)}) {
      test::PartitionResult r = test::checkPathPartition(m);
      inputs += r.inputs;
      paths += r.paths;
      if (r.uncovered || r.overlapping)
        return inst.name + ": uncovered=" + std::to_string(r.uncovered) +
               ", overlapping=" + std::to_string(r.overlapping) + " " + r.firstViolation;
    }
  }
  std::printf("  inputs=%llu paths=%llu\n", (unsigned long long)inputs,
              (unsigned long long)paths);
  return "";
}

} // namespace

int main() {
  struct Check {
    const char *title;
    std::function<std::string()> run;
  };
  const Check checks[] = {
      {"toupper N=10: 1024 paths originally, 1 after transformation", pathExplosion},
      {"toupper diamond merges with 3 selects", selectShape},
      {"toupper N=10 with state merging: 11 paths", stateMerging},
      {"transformed toupper issues no queries at the merged branch", queryFreeBody},
      {"transformation preserves failures and safe-input behaviour", failurePreservation},
      {"driver filters false positives and keeps true positives", driverCorrectness},
      {"SAT and enumeration backends agree", solverCrossCheck},
      {"path conditions partition the input space", pathPartition},
  };
  int failures = 0;
  unsigned idx = 0;
  for (const Check &c : checks) {
    ++idx;
    std::string why;
    try {
      why = c.run();
    } catch (const std::exception &e) {
      why = std::string("exception: ") + e.what();
    }
    if (why.empty()) {
      std::printf("PASS %u: %s\n", idx, c.title);
    } else {
      std::printf("FAIL %u: %s (%s)\n", idx, c.title, why.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
