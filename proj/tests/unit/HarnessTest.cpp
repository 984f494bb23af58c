//===-- HarnessTest.cpp - Driver loop, corpus and comparison tests --------===//

#include "TestSupport.h"

#include "mse/Harness.h"

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>

using namespace mse;

namespace {

using CrashKey = std::pair<CrashKind, std::string>;

DriverConfig driverConfig() {
  DriverConfig cfg;
  cfg.dse.mergeStates = false;
  return cfg;
}

} // namespace

TEST(CorpusTest, BenchmarksGenerateValidModules) {
  for (const BenchmarkInfo &b : benchmarks()) {
    for (auto [size, bits] : {std::pair{b.defaultSize, 8u},
                              std::pair{b.smallSize, b.smallBits}}) {
      Module m = benchmarkModule(b.name, size, bits);
      EXPECT_TRUE(validateModule(m).empty()) << b.name << " " << size;
    }
  }
  EXPECT_EQ(findBenchmark("nope"), nullptr);
  EXPECT_THROW(generateBenchmark("nope", 1), std::invalid_argument);
  EXPECT_THROW(generateBenchmark("bitonic", 3), std::invalid_argument);
}

TEST(CorpusTest, EnumerationCorpusCoversEveryBenchmark) {
  auto corpus = enumerationCorpus(16);
  EXPECT_EQ(corpus.size(), benchmarks().size());
  for (const BenchmarkInstance &inst : corpus)
    EXPECT_LE(totalSymbolicBits(symbolicDecls(inst.module)), 16u) << inst.name;
}

TEST(VerifyCrashTest, GuardedAccessIsFalsePositive) {
  Module p = test::loadCorpus("guarded_oob");
  Module q = runCfmse(p, analyzeProgram(p), {}).module;
  DseReport r = runDse(q, {});
  ASSERT_FALSE(r.crashes.empty());
  CrashReport c = r.crashes[0];
  EXPECT_TRUE(concreteRun(q, c.input).crashed);
  EXPECT_EQ(verifyCrash(p, c), Classification::FalsePositive);
  EXPECT_EQ(c.classification, Classification::FalsePositive);
  EXPECT_EQ(c.site.originLocation(), "accumulate:l.body");
}

TEST(VerifyCrashTest, DivisionByZeroIsTruePositive) {
  Module p = test::loadCorpus("divzero");
  Module q = runCfmse(p, analyzeProgram(p), {}).module;
  DseReport r = runDse(q, {});
  ASSERT_EQ(r.crashes.size(), 1u);
  CrashReport c = r.crashes[0];
  EXPECT_EQ(c.kind, CrashKind::DivByZero);
  EXPECT_EQ(verifyCrash(p, c), Classification::TruePositive);
  EXPECT_EQ(c.classification, Classification::TruePositive);
}

TEST(DriverTest, GuardedOobNeedsOneConstraint) {
  DriverState st = driverLoop(test::loadCorpus("guarded_oob"), driverConfig());
  ASSERT_EQ(st.iterations, 2u);
  ASSERT_EQ(st.history.size(), 2u);
  EXPECT_EQ(st.history[0].falsePositives, 1u);
  EXPECT_EQ(st.history[0].truePositives, 0u);
  EXPECT_EQ(st.history[0].addedLocations, std::vector<std::string>{"accumulate:l.body"});
  EXPECT_TRUE(st.history[1].report.crashes.empty());
  EXPECT_EQ(st.history[1].falsePositives, 0u);
  EXPECT_EQ(st.history[1].truePositives, 0u);
  EXPECT_EQ(st.constraints, LocationConstraints{"accumulate:l.body"});
  EXPECT_TRUE(st.truePositives.empty());
  EXPECT_FALSE(st.budgetExhausted);
}

TEST(DriverTest, ToupperNeedsOneIteration) {
  DriverState st = driverLoop(test::loadCorpus("toupper"), driverConfig());
  EXPECT_EQ(st.iterations, 1u);
  EXPECT_TRUE(st.truePositives.empty());
  EXPECT_TRUE(st.constraints.empty());
  EXPECT_EQ(st.finalReport.paths, 1u);
  EXPECT_TRUE(st.finalReport.crashes.empty());
}

TEST(DriverTest, GenuineBugSurvivesClassification) {
  for (const char *name : {"toupper_bug", "divzero"}) {
    DriverState st = driverLoop(test::loadCorpus(name), driverConfig());
    EXPECT_EQ(st.iterations, 1u) << name;
    EXPECT_TRUE(st.constraints.empty()) << name;
    ASSERT_EQ(st.truePositives.size(), 1u) << name;
    EXPECT_EQ(st.truePositives[0].classification, Classification::TruePositive);
  }
}

TEST(DriverTest, ConstraintsOnlyGrow) {
  for (const BenchmarkInstance &inst : enumerationCorpus(16)) {
    DriverState st = driverLoop(inst.module, driverConfig());
    for (size_t i = 1; i < st.history.size(); ++i) {
      const auto &prev = st.history[i - 1].constraints;
      const auto &cur = st.history[i].constraints;
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()))
          << inst.name;
      EXPECT_GT(cur.size(), prev.size()) << inst.name;
    }
  }
}

TEST(DriverTest, TruePositivesCrashTheOriginal) {
  for (const BenchmarkInfo &b : benchmarks()) {
    if (b.name == "floyd" || b.name == "tclosure")
      continue;
    Module m = test::loadCorpus(b.name);
    DriverState st = driverLoop(m, driverConfig());
    for (const CrashReport &c : st.truePositives)
      EXPECT_TRUE(concreteRun(m, c.input).crashed) << b.name << " " << c.inputHex();
  }
}

TEST(DriverTest, FindsTheSameBugsAsPlainExploration) {
  for (const BenchmarkInstance &inst : enumerationCorpus(16)) {
    DriverState st = driverLoop(inst.module, driverConfig());
    // Driver findings are sites of P'; compare on the original program by
    // replaying each reported input.
    std::set<CrashKey> driver;
    for (const CrashReport &c : st.truePositives) {
      ConcreteResult r = concreteRun(inst.module, c.input);
      ASSERT_TRUE(r.crashed);
      driver.insert({r.crashKind, r.crashSite.str()});
    }
    std::set<CrashKey> plain;
    for (const CrashReport &c : runDse(inst.module, {}).crashes)
      plain.insert({c.kind, c.site.str()});
    EXPECT_EQ(driver, plain) << inst.name;
  }
}

TEST(CompareTest, ToupperMatrix) {
  CompareConfig cfg;
  cfg.benchmarks = {"toupper"};
  cfg.sizes = {10};
  cfg.jobs = 2;
  CompareMatrix m = runCompare(cfg);
  ASSERT_EQ(m.cells.size(), 4u);
  auto paths = [&](Mode mode) {
    const CompareCell *c = m.find("toupper", 10, mode);
    EXPECT_NE(c, nullptr);
    EXPECT_TRUE(c->error.empty());
    EXPECT_FALSE(c->outOfTime);
    return c->report.paths;
  };
  EXPECT_EQ(paths(Mode::K), 1024u);
  EXPECT_EQ(paths(Mode::SM), 11u);
  EXPECT_EQ(paths(Mode::C), 1u);
  EXPECT_EQ(paths(Mode::CSM), 1u);
  EXPECT_EQ(m.find("toupper", 10, Mode::K)->report.mode, "K");

  std::string table = compareTable(m);
  for (const char *h : {"Time (ms)", "Number of queries", "Average query size",
                        "Explored paths", "toupper"})
    EXPECT_NE(table.find(h), std::string::npos) << h;
  auto json = nlohmann::json::parse(compareJson(m));
  EXPECT_EQ(json["cells"].size(), 4u);
  EXPECT_EQ(json["cells"][0]["status"], "ok");
}

TEST(CompareTest, UnsupportedSizesAreSkipped) {
  CompareConfig cfg;
  cfg.benchmarks = {"bitonic"};
  cfg.sizes = {3};
  cfg.modes = {Mode::C};
  CompareMatrix m = runCompare(cfg);
  ASSERT_EQ(m.cells.size(), 1u);
  EXPECT_TRUE(m.cells[0].skipped);
}

TEST(CompareTest, PathBudgetIsReportedAsOutOfTime) {
  CompareConfig cfg;
  cfg.benchmarks = {"toupper"};
  cfg.modes = {Mode::K};
  cfg.dse.maxPaths = 5;
  CompareMatrix m = runCompare(cfg);
  ASSERT_EQ(m.cells.size(), 1u);
  EXPECT_TRUE(m.cells[0].outOfTime);
  EXPECT_NE(compareTable(m).find("OOT"), std::string::npos);
}

TEST(CompareTest, MergingNeverAddsPathsToTransformedPrograms) {
  CompareConfig cfg;
  for (const BenchmarkInfo &b : benchmarks())
    cfg.benchmarks.push_back(b.name);
  cfg.modes = {Mode::C, Mode::CSM};
  cfg.jobs = 4;
  CompareMatrix m = runCompare(cfg);
  for (const BenchmarkInfo &b : benchmarks()) {
    const CompareCell *c = m.find(b.name, b.defaultSize, Mode::C);
    const CompareCell *s = m.find(b.name, b.defaultSize, Mode::CSM);
    ASSERT_TRUE(c && s) << b.name;
    ASSERT_TRUE(c->error.empty() && s->error.empty()) << b.name;
    EXPECT_LE(s->report.paths, c->report.paths) << b.name;
  }
}

TEST(CompareTest, ModeNames) {
  for (Mode m : {Mode::K, Mode::SM, Mode::C, Mode::CSM})
    EXPECT_EQ(modeFromName(modeName(m)), m);
  EXPECT_EQ(modeName(Mode::CSM), "C-SM");
  EXPECT_FALSE(modeFromName("X"));
}

TEST(CoverageTest, MergedInstructionsCoverAllTheirLines) {
  Module m = test::loadCorpus("toupper");
  DseReport c = runMode(m, Mode::C, {});
  // The then-arm of the eliminated branch sits on source line 4.
  EXPECT_TRUE(c.coveredLines.count(4));
  DseReport k = runMode(m, Mode::K, {});
  EXPECT_EQ(c.coveredLines, k.coveredLines);
  EXPECT_EQ(c.coveredLines, m.allSourceLines());
}

TEST(ReportTest, JsonShapes) {
  Module m = test::loadCorpus("divzero");
  DseReport r = runDse(m, {});
  auto j = nlohmann::json::parse(dseReportJson(r));
  for (const char *key : {"mode", "time_ms", "paths", "queries", "cache_hits",
                          "avg_query_size", "crashes", "covered_lines", "termination"})
    EXPECT_TRUE(j.contains(key)) << key;
  ASSERT_EQ(j["crashes"].size(), 1u);
  for (const char *key : {"kind", "loc", "input_hex", "classification"})
    EXPECT_TRUE(j["crashes"][0].contains(key)) << key;
  EXPECT_EQ(j["crashes"][0]["kind"], "div-by-zero");
  EXPECT_EQ(j["termination"], "exhausted");

  auto facts = nlohmann::json::parse(factsJson(analyzeProgram(test::loadCorpus("toupper"))));
  EXPECT_EQ(facts["to_upper"]["symbolic_branches"], nlohmann::json::array({"l.body:5"}));

  TransformResult t = runCfmse(m, analyzeProgram(m), {});
  auto tj = nlohmann::json::parse(transformReportJson(t.report));
  EXPECT_EQ(tj["found"], 1);
  EXPECT_EQ(tj["merged"], 1);
}
