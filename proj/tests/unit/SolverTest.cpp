//===-- SolverTest.cpp - Expressions, backends and caching ----------------===//

#include "TestSupport.h"

#include "mse/Expr.h"
#include "mse/Solver.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <memory>

using namespace mse;

namespace {

struct Fixture {
  ExprContext ctx;
  ExprRef x;
  Fixture() { x = ctx.read(ctx.declareVar("x", 0, 8)); }
  ExprRef c8(uint64_t v) { return ctx.constant(v, 8); }
};

} // namespace

TEST(ExprTest, HashConsing) {
  Fixture f;
  ExprRef a = f.ctx.add(f.x, f.c8(3));
  ExprRef b = f.ctx.add(f.x, f.c8(3));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, f.ctx.add(f.x, f.c8(4)));
  EXPECT_EQ(dagSize({a, b}), dagSize({a}));
}

TEST(ExprTest, WidthsAreChecked) {
  Fixture f;
  ExprRef wide = f.ctx.constant(1, 16);
  EXPECT_THROW(f.ctx.add(f.x, wide), std::logic_error);
  EXPECT_THROW(f.ctx.ite(f.x, f.x, f.x), std::logic_error);
  EXPECT_THROW(f.ctx.zext(wide, 8), std::logic_error);
}

TEST(EvalTest, ConstantsAndIte) {
  Fixture f;
  EXPECT_EQ(evaluate(f.c8(42), {0}), 42u);
  EXPECT_EQ(evaluate(f.c8(42), {200}), 42u);
  ExprRef y = f.ctx.read(f.ctx.declareVar("y", 0, 8));
  ExprRef t = f.ctx.ite(f.ctx.boolConst(true), f.x, y);
  EXPECT_EQ(evaluate(t, {5, 9}), 5u);
  // Also through a non-constant condition that evaluates to true.
  ExprRef c = f.ctx.cmp(Pred::Ult, f.x, y);
  EXPECT_EQ(evaluate(f.ctx.ite(c, f.x, y), {5, 9}), 5u);
  EXPECT_EQ(evaluate(f.ctx.ite(c, f.x, y), {9, 5}), 5u);
}

TEST(EvalTest, DivisionByZeroFollowsSmtLib) {
  for (unsigned w : {1u, 8u, 16u, 32u}) {
    uint64_t ones = maskTo(~uint64_t(0), w);
    for (uint64_t a : {uint64_t(0), uint64_t(1), ones}) {
      a = maskTo(a, w);
      EXPECT_EQ(evalBinary(ExprKind::UDiv, a, 0, w), ones);
      // bvsdiv: all ones for a non-negative dividend, one for a negative one.
      uint64_t expect = signExtend(a, w) < 0 ? 1 : ones;
      EXPECT_EQ(evalBinary(ExprKind::SDiv, a, 0, w), expect) << w << " " << a;
    }
  }
  // The SAT backend agrees on the same semantics.
  ExprContext ctx;
  ExprRef x = ctx.read(ctx.declareVar("x", 0, 8));
  ExprRef q = ctx.eq(ctx.binary(ExprKind::UDiv, x, ctx.constant(0, 8)),
                     ctx.constant(255, 8));
  EXPECT_TRUE(solveBySat(ctx, {ctx.lnot(q)}).isUnsat());
  ExprRef neg = ctx.cmp(Pred::Slt, x, ctx.constant(0, 8));
  ExprRef sd = ctx.binary(ExprKind::SDiv, x, ctx.constant(0, 8));
  EXPECT_TRUE(solveBySat(ctx, {neg, ctx.lnot(ctx.eq(sd, ctx.constant(1, 8)))}).isUnsat());
}

namespace {

/// Expression built twice: through the simplifying context and as a plain
/// tree evaluated with textbook semantics.
struct RefNode {
  ExprKind kind;
  unsigned width;
  Pred pred = Pred::Eq;
  uint64_t value = 0;
  unsigned lo = 0;
  std::vector<std::shared_ptr<RefNode>> ops;
};
using RefPtr = std::shared_ptr<RefNode>;

uint64_t refEval(const RefNode &n, const Assignment &a) {
  auto mask = [&](uint64_t v) { return maskTo(v, n.width); };
  auto arg = [&](size_t i) { return refEval(*n.ops[i], a); };
  auto sx = [&](size_t i) { return signExtend(arg(i), n.ops[i]->width); };
  switch (n.kind) {
  case ExprKind::Const:
    return n.value;
  case ExprKind::Read:
    return a[n.value];
  case ExprKind::Add: return mask(arg(0) + arg(1));
  case ExprKind::Sub: return mask(arg(0) - arg(1));
  case ExprKind::Mul: return mask(arg(0) * arg(1));
  case ExprKind::And: return arg(0) & arg(1);
  case ExprKind::Or: return arg(0) | arg(1);
  case ExprKind::Xor: return arg(0) ^ arg(1);
  case ExprKind::UDiv: return arg(1) == 0 ? mask(~uint64_t(0)) : arg(0) / arg(1);
  case ExprKind::SDiv: {
    int64_t x = sx(0), y = sx(1);
    if (y == 0)
      return x < 0 ? 1 : mask(~uint64_t(0));
    if (y == -1)
      return mask(uint64_t(0) - uint64_t(x));
    return mask(uint64_t(x / y));
  }
  case ExprKind::Shl: return arg(1) >= n.width ? 0 : mask(arg(0) << arg(1));
  case ExprKind::LShr: return arg(1) >= n.width ? 0 : arg(0) >> arg(1);
  case ExprKind::AShr: {
    uint64_t s = std::min<uint64_t>(arg(1), n.width - 1);
    return mask(uint64_t(sx(0) >> s));
  }
  case ExprKind::Cmp: {
    uint64_t x = arg(0), y = arg(1);
    int64_t sx0 = sx(0), sy = sx(1);
    switch (n.pred) {
    case Pred::Eq: return x == y;
    case Pred::Ne: return x != y;
    case Pred::Ult: return x < y;
    case Pred::Ule: return x <= y;
    case Pred::Ugt: return x > y;
    case Pred::Uge: return x >= y;
    case Pred::Slt: return sx0 < sy;
    case Pred::Sle: return sx0 <= sy;
    case Pred::Sgt: return sx0 > sy;
    case Pred::Sge: return sx0 >= sy;
    }
    return 0;
  }
  case ExprKind::Not: return mask(~arg(0));
  case ExprKind::ZExt: return arg(0);
  case ExprKind::SExt: return mask(uint64_t(sx(0)));
  case ExprKind::Extract: return mask(arg(0) >> n.lo);
  case ExprKind::Concat: return (arg(0) << n.ops[1]->width) | arg(1);
  case ExprKind::Ite: return arg(0) ? arg(1) : arg(2);
  }
  return 0;
}

struct DualBuilder {
  ExprContext &ctx;
  std::mt19937 &rng;
  unsigned numVars;

  unsigned pickU(unsigned lo, unsigned hi) {
    return std::uniform_int_distribution<unsigned>(lo, hi)(rng);
  }

  std::pair<ExprRef, RefPtr> build(unsigned width, unsigned depth) {
    static const std::vector<ExprKind> bins = {
        ExprKind::Add, ExprKind::Sub, ExprKind::Mul, ExprKind::UDiv,
        ExprKind::SDiv, ExprKind::And, ExprKind::Or, ExprKind::Xor,
        ExprKind::Shl, ExprKind::LShr, ExprKind::AShr};
    if (depth == 0 || pickU(0, 4) == 0) {
      bool useVar = false;
      unsigned v = 0;
      for (unsigned i = 0; i < numVars && !useVar; ++i)
        if (ctx.vars()[i].width == width && pickU(0, 1)) {
          useVar = true;
          v = i;
        }
      if (useVar)
        return {ctx.read(v), std::make_shared<RefNode>(RefNode{ExprKind::Read, width, Pred::Eq, v})};
      // Small constants make identities such as x*1 and x+0 likely.
      uint64_t c = pickU(0, 2) ? pickU(0, 2) : maskTo(rng(), width);
      c = maskTo(c, width);
      return {ctx.constant(c, width), std::make_shared<RefNode>(RefNode{ExprKind::Const, width, Pred::Eq, c})};
    }
    unsigned choice = pickU(0, 9);
    auto node = std::make_shared<RefNode>();
    node->width = width;
    if (width == 1 && choice < 3) {
      unsigned w = pickU(0, 1) ? 8 : 4;
      auto [a, ra] = build(w, depth - 1);
      auto [b, rb] = build(w, depth - 1);
      node->kind = ExprKind::Cmp;
      node->pred = Pred(pickU(0, 9));
      node->ops = {ra, rb};
      return {ctx.cmp(node->pred, a, b), node};
    }
    if (choice < 6) {
      auto [a, ra] = build(width, depth - 1);
      auto [b, rb] = build(width, depth - 1);
      node->kind = bins[pickU(0, unsigned(bins.size() - 1))];
      node->ops = {ra, rb};
      return {ctx.binary(node->kind, a, b), node};
    }
    if (choice == 6) {
      auto [a, ra] = build(width, depth - 1);
      node->kind = ExprKind::Not;
      node->ops = {ra};
      return {ctx.bitNot(a), node};
    }
    if (choice == 7) {
      auto [c, rc] = build(1, depth - 1);
      auto [a, ra] = build(width, depth - 1);
      auto [b, rb] = build(width, depth - 1);
      node->kind = ExprKind::Ite;
      node->ops = {rc, ra, rb};
      return {ctx.ite(c, a, b), node};
    }
    if (choice == 8 && width >= 2) {
      unsigned lo = pickU(1, width - 1);
      auto [h, rh] = build(width - lo, depth - 1);
      auto [l, rl] = build(lo, depth - 1);
      node->kind = ExprKind::Concat;
      node->ops = {rh, rl};
      return {ctx.concat(h, l), node};
    }
    if (width < 8 && pickU(0, 1)) {
      auto [a, ra] = build(8, depth - 1);
      node->kind = ExprKind::Extract;
      node->lo = pickU(0, 8 - width);
      node->ops = {ra};
      return {ctx.extract(a, node->lo, width), node};
    }
    if (width > 4) {
      auto [a, ra] = build(4, depth - 1);
      node->kind = pickU(0, 1) ? ExprKind::ZExt : ExprKind::SExt;
      node->ops = {ra};
      return {node->kind == ExprKind::ZExt ? ctx.zext(a, width) : ctx.sext(a, width), node};
    }
    auto [a, ra] = build(width, depth - 1);
    auto [b, rb] = build(width, depth - 1);
    node->kind = ExprKind::Xor;
    node->ops = {ra, rb};
    return {ctx.binary(ExprKind::Xor, a, b), node};
  }
};

} // namespace

TEST(EvalTest, SimplificationPreservesReferenceSemantics) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 3000; ++trial) {
    ExprContext ctx;
    ctx.declareVar("a", 0, 8);
    ctx.declareVar("a", 1, 4);
    ctx.declareVar("a", 2, 1);
    DualBuilder b{ctx, rng, 3};
    unsigned width = std::vector<unsigned>{1, 4, 8}[trial % 3];
    auto [e, ref] = b.build(width, 4);
    ASSERT_EQ(e->width, width);
    for (int k = 0; k < 20; ++k) {
      Assignment a = {rng() & 0xff, rng() & 0xf, rng() & 1};
      ASSERT_EQ(evaluate(e, a), refEval(*ref, a)) << exprToString(e, ctx);
    }
  }
}

TEST(SolverTest, TrivialQueries) {
  for (Backend be : {Backend::Sat, Backend::Enum}) {
    Fixture f;
    Solver s(f.ctx, {be});
    ExprRef gt5 = f.ctx.cmp(Pred::Ugt, f.x, f.c8(5));
    ExprRef lt3 = f.ctx.cmp(Pred::Ult, f.x, f.c8(3));
    EXPECT_TRUE(s.check({gt5, lt3}).isUnsat());
    SolverResult r = s.check({f.ctx.eq(f.x, f.c8(7))});
    ASSERT_TRUE(r.isSat());
    EXPECT_EQ(r.model, Assignment{7});
  }
}

TEST(SolverTest, EnumerationCapIsEnforced) {
  ExprContext ctx;
  ExprRef a = ctx.read(ctx.declareVar("a", 0, 8));
  ExprRef b = ctx.read(ctx.declareVar("a", 1, 8));
  ExprRef c = ctx.read(ctx.declareVar("a", 2, 8));
  ExprRef q = ctx.eq(ctx.add(ctx.add(a, b), c), ctx.constant(3, 8));
  EXPECT_THROW(solveByEnumeration(ctx, {q}, 20), EnumCapExceeded);
  EXPECT_TRUE(solveBySat(ctx, {q}).isSat());
}

TEST(SolverTest, BackendsAgreeOnRandomQueries) {
  test::SolverCrossCheck r = test::crossCheckSolvers(3000, 16, 17);
  EXPECT_EQ(r.queries, 3000u);
  EXPECT_EQ(r.disagreements, 0u) << r.firstProblem;
  EXPECT_EQ(r.invalidModels, 0u) << r.firstProblem;
  EXPECT_GT(r.sat, 0u);
  EXPECT_LT(r.sat, r.queries);
}

TEST(SolverTest, SatBackendHandlesWideQueries) {
  ExprContext ctx;
  std::vector<ExprRef> vars;
  for (unsigned i = 0; i < 8; ++i)
    vars.push_back(ctx.read(ctx.declareVar("w", i, 8)));
  ExprRef sum = ctx.constant(0, 8);
  for (ExprRef v : vars)
    sum = ctx.add(sum, v);
  std::vector<ExprRef> q = {ctx.eq(sum, ctx.constant(200, 8)),
                            ctx.cmp(Pred::Ugt, vars[0], ctx.constant(100, 8))};
  SolverResult r = solveBySat(ctx, q);
  ASSERT_TRUE(r.isSat());
  for (ExprRef c : q)
    EXPECT_EQ(evaluate(c, r.model), 1u);
}

TEST(CacheTest, RepeatedQueryHits) {
  Fixture f;
  Solver s(f.ctx, {});
  std::vector<ExprRef> q = {f.ctx.cmp(Pred::Ugt, f.x, f.c8(5))};
  s.check(q);
  EXPECT_EQ(s.stats().queries, 1u);
  s.check(q);
  EXPECT_EQ(s.stats().queries, 1u);
  EXPECT_EQ(s.stats().cacheHits, 1u);
}

TEST(CacheTest, ConjunctOrderDoesNotMatter) {
  Fixture f;
  Solver s(f.ctx, {});
  ExprRef a = f.ctx.cmp(Pred::Ugt, f.x, f.c8(5));
  ExprRef b = f.ctx.cmp(Pred::Ult, f.x, f.c8(50));
  EXPECT_EQ(canonicalKey({a, b}), canonicalKey({b, a}));
  EXPECT_EQ(canonicalKey({a, b, a}), canonicalKey({b, a}));
  EXPECT_EQ(canonicalKey({a, f.ctx.boolConst(true)}), canonicalKey({a}));
  EXPECT_NE(canonicalKey({a}), canonicalKey({b}));
  s.check({a, b});
  s.check({b, a});
  EXPECT_EQ(s.stats().queries, 1u);
  EXPECT_EQ(s.stats().cacheHits, 1u);
}

TEST(CacheTest, DisabledCacheCountsEveryCheck) {
  Fixture f;
  SolverConfig cfg;
  cfg.caching = false;
  Solver s(f.ctx, cfg);
  std::vector<ExprRef> q = {f.ctx.cmp(Pred::Ugt, f.x, f.c8(5))};
  for (int i = 0; i < 3; ++i)
    s.check(q);
  EXPECT_EQ(s.stats().queries, 3u);
  EXPECT_EQ(s.stats().cacheHits, 0u);
}

TEST(SolverTest, QuerySizeIsDagSize) {
  Fixture f;
  Solver s(f.ctx, {});
  ExprRef sum = f.ctx.add(f.x, f.c8(1));
  ExprRef a = f.ctx.cmp(Pred::Ugt, sum, f.c8(5));
  ExprRef b = f.ctx.cmp(Pred::Ult, sum, f.c8(50));
  s.check({a, b});
  EXPECT_EQ(s.stats().totalQuerySize, dagSize({a, b}));
  // x, 1, x+1, 5, 50, and the two comparisons.
  EXPECT_EQ(dagSize({a, b}), 7u);
}

TEST(SolverTest, IndependentSliceKeepsRelatedConjuncts) {
  ExprContext ctx;
  ExprRef x = ctx.read(ctx.declareVar("x", 0, 8));
  ExprRef y = ctx.read(ctx.declareVar("y", 0, 8));
  ExprRef z = ctx.read(ctx.declareVar("z", 0, 8));
  ExprRef cx = ctx.cmp(Pred::Ugt, x, ctx.constant(1, 8));
  ExprRef cxy = ctx.cmp(Pred::Ult, x, y);
  ExprRef cz = ctx.cmp(Pred::Eq, z, ctx.constant(3, 8));
  auto slice = independentSlice(ctx, {cx, cxy, cz}, ctx.cmp(Pred::Eq, y, ctx.constant(4, 8)));
  EXPECT_EQ(slice, (std::vector<ExprRef>{cx, cxy}));
}

TEST(SolverTest, SmtLibDumpIsWritten) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mse_smt_dump_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Fixture f;
  SolverConfig cfg;
  cfg.dumpDir = dir.string();
  Solver s(f.ctx, cfg);
  s.check({f.ctx.cmp(Pred::Ugt, f.x, f.c8(5))});
  unsigned files = 0;
  for (const auto &e : fs::directory_iterator(dir)) {
    ++files;
    std::ifstream in(e.path());
    std::string text((std::istreambuf_iterator<char>(in)), {});
    EXPECT_NE(text.find("(check-sat)"), std::string::npos);
    EXPECT_NE(text.find("bvugt"), std::string::npos);
  }
  EXPECT_EQ(files, 1u);
  fs::remove_all(dir);
}
