//===-- TransformTest.cpp - Branch elimination tests ----------------------===//

#include "TestSupport.h"

#include "mse/Harness.h"
#include "mse/Transform.h"

#include <gtest/gtest.h>

using namespace mse;

namespace {

struct Prepared {
  Module module;
  SymFacts facts;
  BranchMap branches;
};

Prepared prepare(Module m) {
  Prepared p{std::move(m), {}, {}};
  p.facts = analyzeProgram(p.module);
  p.branches = classifyBranches(p.module, p.facts);
  return p;
}

CandidateScan scan(const Prepared &p, const std::string &fn,
                   const LocationConstraints &lc = {}) {
  return findCandidateDiamonds(*p.module.findFunction(fn), p.branches.at(fn), lc);
}

std::vector<Opcode> opcodes(const std::vector<Instruction> &arm) {
  std::vector<Opcode> out;
  for (const Instruction &i : arm)
    out.push_back(i.op);
  return out;
}

unsigned conditionalBranches(const Module &m) {
  unsigned n = 0;
  for (const Function &f : m.functions)
    for (const BasicBlock &bb : f.blocks)
      n += bb.terminator().isConditionalBranch();
  return n;
}

const char *kMemory = R"(func @main() -> i32 {
entry:
  %A = alloca ptr[i8 x 4]
  call @sym.make_symbolic(%A, 4, "A")
  %x0 = load i8 %A
  %x = zext i8 %x0 to i32
  %i = add i32 1, 1
  %g = gep ptr[i8 x 4] %A, %i
  %g0 = gep ptr[i8 x 4] %A, 0
  %g0b = gep ptr[i8 x 4] %A, 0
  %g1 = gep ptr[i8 x 4] %A, 1
  %gx = gep ptr[i8 x 4] %A, %x
  %c = icmp ugt i32 %x, 2
  br %c, then, else
then:
  %l1 = load i8 %g
  store i8 1, %g0
  %m1 = load i8 %gx
  store i8 3, %g0
  br join
else:
  %l2 = load i8 %g
  store i8 2, %g1
  %m2 = load i8 %gx
  store i8 4, %g0b
  br join
join:
  ret i32 0
}
)";

const Instruction &instAt(const Function &f, const std::string &block, unsigned i) {
  return f.findBlock(block)->insts[i];
}

} // namespace

TEST(CandidateTest, ToupperIfThenIsCanonicalized) {
  Prepared p = prepare(test::loadCorpus("toupper"));
  CandidateScan s = scan(p, "to_upper");
  ASSERT_EQ(s.diamonds.size(), 1u);
  EXPECT_TRUE(s.rejected.empty());
  const DiamondRegion &d = s.diamonds[0];
  EXPECT_EQ(d.location(), "to_upper:l.body");
  EXPECT_EQ(d.thenBlock, "then");
  EXPECT_EQ(d.joinBlock, "l.latch");
  EXPECT_FALSE(d.synthesizedArm.empty());
  EXPECT_EQ(d.elseBlock, d.synthesizedArm);
  const BasicBlock *arm = s.canonical.findBlock(d.elseBlock);
  ASSERT_NE(arm, nullptr);
  EXPECT_EQ(arm->insts.size(), 1u);
  EXPECT_EQ(s.canonical.blocks.size(),
            p.module.findFunction("to_upper")->blocks.size() + 1);
}

TEST(CandidateTest, ArmWithLoopIsRejected) {
  Prepared p = prepare(parseModule(R"(func @main(i8 %s) -> i32 {
entry:
  %c = icmp ult i8 %s, 4
  br %c, loop, join
loop:
  %i = phi i32 [0, entry], [%n, loop]
  %n = add i32 %i, 1
  %d = icmp ult i32 %n, 3
  br %d, loop, join
join:
  ret i32 0
}
)"));
  CandidateScan s = scan(p, "main");
  EXPECT_TRUE(s.diamonds.empty());
  ASSERT_EQ(s.rejected.size(), 1u);
  EXPECT_EQ(s.rejected[0].reason, RejectReason::Shape);
  EXPECT_EQ(s.rejected[0].location, "main:entry");
}

TEST(CandidateTest, ConstrainedLocationIsSkipped) {
  Prepared p = prepare(test::loadCorpus("toupper"));
  CandidateScan s = scan(p, "to_upper", {"to_upper:l.body"});
  EXPECT_TRUE(s.diamonds.empty());
  ASSERT_EQ(s.rejected.size(), 1u);
  EXPECT_EQ(s.rejected[0].reason, RejectReason::LocationConstrained);
}

TEST(AlignmentTest, IdenticalArmsAlignCompletely) {
  std::mt19937 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto arm = test::randomArm(rng, 6, "t");
    Alignment a = alignInstructions(arm, arm);
    EXPECT_TRUE(a.isComplete());
    EXPECT_EQ(a.matchCount(), arm.size());
    EXPECT_EQ(a.pairs.size(), arm.size());
  }
}

TEST(AlignmentTest, ToupperThenArmIsUnaligned) {
  Prepared p = prepare(test::loadCorpus("toupper"));
  CandidateScan s = scan(p, "to_upper");
  const DiamondRegion &d = s.diamonds[0];
  const BasicBlock *t = s.canonical.findBlock(d.thenBlock);
  std::vector<Instruction> thenArm(t->insts.begin(), t->insts.end() - 1);
  Alignment a = alignInstructions(thenArm, {}, {&s.canonical, &p.facts});
  EXPECT_EQ(a.pairs.size(), thenArm.size());
  EXPECT_EQ(a.matchCount(), 0u);
  for (const AlignedPair &pair : a.pairs)
    EXPECT_TRUE(pair.thenIdx && !pair.elseIdx);
}

TEST(AlignmentTest, TiesPreferEarlierMatches) {
  std::vector<Instruction> one(1), two(2);
  one[0].op = Opcode::Add;
  one[0].type = Type::intTy(32);
  one[0].id = "a";
  two[0] = one[0];
  two[1] = one[0];
  two[0].id = "b0";
  two[1].id = "b1";
  Alignment a = alignInstructions(one, two);
  ASSERT_EQ(a.matchCount(), 1u);
  EXPECT_EQ(a.pairs[0], (AlignedPair{0u, 0u, true}));
  EXPECT_EQ(a.pairs[1], (AlignedPair{std::nullopt, 1u, false}));
}

TEST(AlignmentTest, MatchesBruteForceOracle) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    auto a = test::randomArm(rng, 6, "t");
    auto b = test::randomArm(rng, 6, "e");
    Alignment al = alignInstructions(a, b);
    ASSERT_EQ(al.matchCount(), test::bruteForceMatchCount(a, b));
    // Structure: order preserving, every instruction exactly once, no empty
    // pairs, matched pairs compatible.
    size_t nextT = 0, nextE = 0;
    for (const AlignedPair &p : al.pairs) {
      ASSERT_TRUE(p.thenIdx || p.elseIdx);
      if (p.thenIdx)
        ASSERT_EQ(*p.thenIdx, nextT++);
      if (p.elseIdx)
        ASSERT_EQ(*p.elseIdx, nextE++);
      if (!p.isGap()) {
        ASSERT_TRUE(p.compatible);
        ASSERT_EQ(a[*p.thenIdx].op, b[*p.elseIdx].op);
      }
    }
    ASSERT_EQ(nextT, a.size());
    ASSERT_EQ(nextE, b.size());
  }
}

TEST(MemoryCriteriaTest, Verdicts) {
  Prepared p = prepare(parseModule(kMemory));
  const Function &f = *p.module.findFunction("main");
  MemoryContext ctx{&f, &p.facts};
  EXPECT_EQ(checkMemoryCriteria(instAt(f, "then", 0), instAt(f, "else", 0), ctx),
            MemoryVerdict::Merge);
  EXPECT_EQ(checkMemoryCriteria(instAt(f, "then", 1), instAt(f, "else", 1), ctx),
            MemoryVerdict::SplitToUnaligned);
  EXPECT_EQ(checkMemoryCriteria(instAt(f, "then", 2), instAt(f, "else", 2), ctx),
            MemoryVerdict::RejectDiamond);
  // Same base and equal constant index through different gep values.
  EXPECT_EQ(checkMemoryCriteria(instAt(f, "then", 3), instAt(f, "else", 3), ctx),
            MemoryVerdict::Merge);
  EXPECT_TRUE(addressesIdentical(Operand::value("g0"), Operand::value("g0b"), ctx));
  EXPECT_FALSE(addressesIdentical(Operand::value("g0"), Operand::value("g1"), ctx));
}

TEST(MemoryCriteriaTest, SymbolicAddressRejectsDiamond) {
  Prepared p = prepare(parseModule(kMemory));
  TransformResult t = runCfmse(p.module, p.facts, {});
  EXPECT_EQ(t.report.found, 1u);
  EXPECT_EQ(t.report.merged(), 0u);
  EXPECT_EQ(t.report.rejectedCount(RejectReason::SymbolicAddress), 1u);
  EXPECT_EQ(t.module, p.module);
}

TEST(DeadInsertionTest, ToupperElseArmMirrorsThenArm) {
  Prepared p = prepare(test::loadCorpus("toupper"));
  CandidateScan s = scan(p, "to_upper");
  const DiamondRegion &d = s.diamonds[0];
  const BasicBlock *t = s.canonical.findBlock(d.thenBlock);
  std::vector<Instruction> thenArm(t->insts.begin(), t->insts.end() - 1);
  Alignment a = alignInstructions(thenArm, {}, {&s.canonical, &p.facts});
  DeadInsertion ins = insertDeadInstructions(s.canonical, d, a);
  ASSERT_FALSE(ins.rejected);
  EXPECT_TRUE(ins.alignment.isComplete());

  const std::vector<Opcode> shape = {Opcode::Load, Opcode::Sub, Opcode::Add,
                                     Opcode::Load, Opcode::Store};
  EXPECT_EQ(opcodes(ins.thenArm), shape);
  EXPECT_EQ(opcodes(ins.elseArm), shape);
  for (const Instruction &i : ins.elseArm)
    EXPECT_TRUE(i.dead);
  EXPECT_TRUE(ins.thenArm[3].dead);
  const auto &e = ins.elseArm;
  // t6 = t5 - 0; t7 = t6 + 0; text[i] = t8 with t8 = text[i].
  EXPECT_EQ(e[1].operands[0], Operand::value(e[0].id));
  EXPECT_EQ(e[1].operands[1], Operand::constantInt(0));
  EXPECT_EQ(e[2].operands[0], Operand::value(e[1].id));
  EXPECT_EQ(e[2].operands[1], Operand::constantInt(0));
  EXPECT_EQ(e[4].operands[0], Operand::value(e[3].id));
  EXPECT_EQ(e[4].operands[1], e[3].operands[0]);
  EXPECT_EQ(ins.thenArm[4].operands[1], e[4].operands[1]);
}

TEST(DeadInsertionTest, CompleteAlignmentLeavesArmsUnchanged) {
  Module m = parseModule(R"(func @main(i32 %x) -> i32 {
entry:
  %c = icmp slt i32 %x, 0
  br %c, then, else
then:
  %a = add i32 %x, 1
  br join
else:
  %b = add i32 %x, 2
  br join
join:
  %r = phi i32 [%a, then], [%b, else]
  ret i32 %r
}
)");
  Prepared p = prepare(m);
  CandidateScan s = scan(p, "main");
  ASSERT_EQ(s.diamonds.size(), 1u);
  const Function &f = s.canonical;
  std::vector<Instruction> t = {instAt(f, "then", 0)}, e = {instAt(f, "else", 0)};
  Alignment a = alignInstructions(t, e, {&f, &p.facts});
  ASSERT_TRUE(a.isComplete());
  DeadInsertion ins = insertDeadInstructions(f, s.diamonds[0], a);
  EXPECT_EQ(ins.thenArm, t);
  EXPECT_EQ(ins.elseArm, e);
  EXPECT_EQ(ins.deadInserted, 0u);
}

TEST(DeadInsertionTest, NeutralOperands) {
  for (Opcode op : {Opcode::Add, Opcode::Sub, Opcode::Or, Opcode::Xor,
                    Opcode::Shl, Opcode::LShr, Opcode::AShr})
    EXPECT_EQ(neutralOperand(op, 1), 0) << opcodeName(op);
  for (Opcode op : {Opcode::Mul, Opcode::UDiv, Opcode::SDiv})
    EXPECT_EQ(neutralOperand(op, 1), 1) << opcodeName(op);
}

namespace {

const char *kSdiv = R"(func @main() -> i32 {
entry:
  %a = alloca ptr[i8 x 2]
  call @sym.make_symbolic(%a, 2, "in", 4)
  %x = load i8 %a
  %yp = gep ptr[i8 x 2] %a, 1
  %y = load i8 %yp
  %c = icmp ugt i8 %x, 5
  br %c, then, join
then:
  %d = sdiv i8 %x, %y
  br join
join:
  %r = phi i8 [%d, then], [0, entry]
  %rz = zext i8 %r to i32
  ret i32 %rz
}
)";

} // namespace

TEST(DeadInsertionTest, DeadSdivUsesUnitDivisor) {
  Prepared p = prepare(parseModule(kSdiv));
  CandidateScan s = scan(p, "main");
  ASSERT_EQ(s.diamonds.size(), 1u);
  const DiamondRegion &d = s.diamonds[0];
  std::vector<Instruction> t = {instAt(s.canonical, d.thenBlock, 0)};
  DeadInsertion ins =
      insertDeadInstructions(s.canonical, d, alignInstructions(t, {}));
  ASSERT_EQ(ins.elseArm.size(), 1u);
  EXPECT_EQ(ins.elseArm[0].op, Opcode::SDiv);
  EXPECT_TRUE(ins.elseArm[0].dead);
  EXPECT_EQ(ins.elseArm[0].operands[1], Operand::constantInt(1));

  // Every 4-bit input behaves identically before and after merging.
  TransformResult r = runCfmse(p.module, p.facts, {});
  ASSERT_EQ(r.report.merged(), 1u);
  auto decls = symbolicDecls(p.module);
  ASSERT_EQ(totalSymbolicBits(decls), 8u);
  unsigned crashes = 0;
  for (uint64_t k = 0; k < 256; ++k) {
    ConcreteInput in = nthInput(decls, k);
    ConcreteResult a = concreteRun(p.module, in), b = concreteRun(r.module, in);
    ASSERT_EQ(a.crashed, b.crashed) << k;
    crashes += a.crashed;
    if (!a.crashed) {
      EXPECT_EQ(a.returnValue, b.returnValue) << k;
      EXPECT_EQ(a.memory, b.memory) << k;
    }
  }
  EXPECT_GT(crashes, 0u);
}

TEST(DeadInsertionTest, UnsupportedUnalignedOpcodeRejects) {
  Prepared p = prepare(parseModule(R"(func @main() -> i32 {
entry:
  %a = alloca ptr[i8 x 1]
  call @sym.make_symbolic(%a, 1, "a")
  %x = load i8 %a
  %c = icmp ugt i8 %x, 5
  br %c, then, join
then:
  %k = icmp ult i8 %x, 9
  call @sym.assert(%k)
  br join
join:
  ret i32 0
}
)"));
  TransformResult r = runCfmse(p.module, p.facts, {});
  EXPECT_EQ(r.report.found, 1u);
  EXPECT_EQ(r.report.rejectedCount(RejectReason::UnsupportedOpcode), 1u);
}

TEST(MergeTest, ToupperNeedsThreeSelects) {
  Prepared p = prepare(test::loadCorpus("toupper"));
  TransformResult r = runCfmse(p.module, p.facts, {});
  ASSERT_EQ(r.report.merges.size(), 1u);
  EXPECT_EQ(r.report.merges[0].selects, 3u);
  EXPECT_EQ(r.report.merges[0].location, "to_upper:l.body");
  unsigned selects = 0;
  for (const BasicBlock &bb : r.module.findFunction("to_upper")->blocks)
    for (const Instruction &i : bb.insts)
      selects += i.op == Opcode::Select;
  EXPECT_EQ(selects, 3u);
}

TEST(MergeTest, IdenticalArmsNeedNoSelects) {
  Prepared p = prepare(parseModule(R"(func @main(i32 %x) -> i32 {
entry:
  %c = icmp slt i32 %x, 0
  br %c, then, else
then:
  %a = mul i32 %x, 3
  br join
else:
  %b = mul i32 %x, 3
  br join
join:
  %r = phi i32 [%a, then], [%b, else]
  ret i32 %r
}
)"));
  TransformResult r = runCfmse(p.module, p.facts, {});
  ASSERT_EQ(r.report.merged(), 1u);
  EXPECT_EQ(r.report.merges[0].selects, 0u);
  EXPECT_EQ(r.report.merges[0].deadInserted, 0u);
  EXPECT_EQ(conditionalBranches(r.module), 0u);
}

TEST(MergeTest, MergedLinesAreUnioned) {
  Prepared p = prepare(parseModule(R"(func @main(i32 %x) -> i32 {
entry:
  %c = icmp slt i32 %x, 0 !lines 2
  br %c, then, else !lines 2
then:
  %a = add i32 %x, 1 !lines 3
  br join !lines 3
else:
  %b = add i32 %x, 2 !lines 11
  br join !lines 11
join:
  %r = phi i32 [%a, then], [%b, else] !lines 12
  ret i32 %r !lines 12
}
)"));
  TransformResult r = runCfmse(p.module, p.facts, {});
  ASSERT_EQ(r.report.merged(), 1u);
  bool found = false;
  for (const BasicBlock &bb : r.module.functions[0].blocks)
    for (const Instruction &i : bb.insts)
      if (i.op == Opcode::Add) {
        EXPECT_EQ(i.srcLines, (std::set<unsigned>{3, 11}));
        EXPECT_EQ(i.origin, "entry");
        found = true;
      }
  EXPECT_TRUE(found);
  EXPECT_EQ(r.module.allSourceLines(), p.module.allSourceLines());
}

TEST(MergeTest, ToupperSmallInputsBehaveIdentically) {
  Module m = benchmarkModule("toupper", 4, 2);
  Prepared p = prepare(m);
  TransformResult r = runCfmse(p.module, p.facts, {});
  test::PreservationResult res = test::checkFailurePreservation(p.module, r.module);
  EXPECT_EQ(res.inputs, 256u);
  EXPECT_EQ(res.comparedSafe, 256u);
  EXPECT_EQ(res.violations, 0u) << res.firstViolation;
}

TEST(CfmseTest, ToupperLoopKeepsOnlyBackEdgeTest) {
  Prepared p = prepare(test::loadCorpus("toupper"));
  TransformResult r = runCfmse(p.module, p.facts, {});
  const Function &f = *r.module.findFunction("to_upper");
  std::vector<std::string> condBlocks;
  for (const BasicBlock &bb : f.blocks)
    if (bb.terminator().isConditionalBranch())
      condBlocks.push_back(bb.label);
  EXPECT_EQ(condBlocks, std::vector<std::string>{"l.header"});
  EXPECT_TRUE(validateModule(r.module).empty());
}

TEST(CfmseTest, NoSymbolicBranchesMeansNoChange) {
  Prepared p = prepare(parseModule(R"(func @main() -> i32 {
entry:
  %n = add i32 1, 2
  %c = icmp ult i32 %n, 3
  br %c, a, b
a:
  br b
b:
  ret i32 %n
}
)"));
  TransformResult r = runCfmse(p.module, p.facts, {});
  EXPECT_EQ(r.module, p.module);
  EXPECT_EQ(r.report.found, 0u);
}

TEST(CfmseTest, DilationMergesOneAndRejectsOne) {
  for (const char *name : {"dilation", "erosion"}) {
    Prepared p = prepare(test::loadCorpus(name));
    TransformResult r = runCfmse(p.module, p.facts, {});
    EXPECT_EQ(r.report.found, 2u) << name;
    EXPECT_EQ(r.report.merged(), 1u) << name;
    EXPECT_EQ(r.report.rejectedCount(RejectReason::Shape), 1u) << name;
  }
}

TEST(CfmseTest, CorpusInvariants) {
  for (const BenchmarkInfo &b : benchmarks()) {
    Prepared p = prepare(test::loadCorpus(b.name));
    TransformResult r = runCfmse(p.module, p.facts, {});
    const TransformReport &rep = r.report;
    EXPECT_TRUE(validateModule(r.module).empty()) << b.name;
    EXPECT_EQ(rep.merged() + rep.rejected.size(), rep.found) << b.name;
    if (rep.merged() > 0)
      EXPECT_LT(conditionalBranches(r.module), conditionalBranches(p.module)) << b.name;

    // Idempotence and determinism.
    TransformResult again = runCfmse(r.module, analyzeProgram(r.module), {});
    EXPECT_EQ(again.report.merged(), 0u) << b.name;
    EXPECT_EQ(runCfmse(p.module, p.facts, {}).module, r.module) << b.name;

    // Dead values only feed dead instructions and the selects of a merge.
    for (const Function &f : r.module.functions) {
      std::set<std::string> dead;
      for (const BasicBlock &bb : f.blocks)
        for (const Instruction &i : bb.insts)
          if (i.dead && i.hasResult())
            dead.insert(i.id);
      for (const BasicBlock &bb : f.blocks)
        for (const Instruction &i : bb.insts) {
          if (i.dead || i.op == Opcode::Select)
            continue;
          for (const Operand &op : i.operands)
            EXPECT_FALSE(op.isValue() && dead.count(op.name))
                << b.name << " " << f.name << ":" << bb.label << " uses " << op.name;
        }
    }
  }
}

TEST(CfmseTest, EveryMergedAlignmentIsComplete) {
  for (const BenchmarkInfo &b : benchmarks()) {
    Prepared p = prepare(test::loadCorpus(b.name));
    for (const auto &[fn, branches] : p.branches) {
      CandidateScan s =
          findCandidateDiamonds(*p.module.findFunction(fn), branches, {});
      for (const DiamondRegion &d : s.diamonds) {
        auto arm = [&](const std::string &l) {
          const BasicBlock *bb = s.canonical.findBlock(l);
          return std::vector<Instruction>(bb->insts.begin(), bb->insts.end() - 1);
        };
        Alignment a = alignInstructions(arm(d.thenBlock), arm(d.elseBlock),
                                        {&s.canonical, &p.facts});
        DeadInsertion ins = insertDeadInstructions(s.canonical, d, a);
        if (ins.rejected)
          continue;
        EXPECT_TRUE(ins.alignment.isComplete()) << b.name << " " << d.location();
        EXPECT_EQ(ins.thenArm.size(), ins.elseArm.size());
      }
    }
  }
}

TEST(CfmseTest, ConstraintsBlockMerging) {
  Prepared p = prepare(test::loadCorpus("toupper"));
  TransformResult r = runCfmse(p.module, p.facts, {"to_upper:l.body"});
  EXPECT_EQ(r.report.merged(), 0u);
  EXPECT_EQ(r.report.rejectedCount(RejectReason::LocationConstrained), 1u);
  EXPECT_EQ(r.module, p.module);
}
