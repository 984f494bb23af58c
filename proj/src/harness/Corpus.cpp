//===-- Corpus.cpp - Bundled benchmark programs ---------------------------===//
//
// Each benchmark is generated as MIR text from a problem size and the number
// of free bits per symbolic element. Line annotations refer to the lines of
// the C program each benchmark models.
//
//===----------------------------------------------------------------------===//

#include "mse/Harness.h"

#include <functional>
#include <stdexcept>

namespace mse {

namespace {

class Emitter {
public:
  void beginFunction(const std::string &header) {
    out += header + " {\n";
    label("entry");
  }
  void endFunction() { out += "}\n\n"; }

  void label(const std::string &l) {
    out += l + ":\n";
    current = l;
  }

  void emit(const std::string &text, unsigned line) {
    out += "  " + text + " !lines " + std::to_string(line) + "\n";
  }

  const std::string &block() const { return current; }

  /// Emits `for (i = 0; i < n; ++i) body` with `%<p>.i` as induction variable.
  void loop(const std::string &p, unsigned n, unsigned line,
            const std::function<void()> &body) {
    std::string pred = current;
    emit("br " + p + ".header", line);
    label(p + ".header");
    emit("%" + p + ".i = phi i32 [0, " + pred + "], [%" + p + ".next, " + p + ".latch]",
         line);
    emit("%" + p + ".c = icmp slt i32 %" + p + ".i, " + std::to_string(n), line);
    emit("br %" + p + ".c, " + p + ".body, " + p + ".exit", line);
    label(p + ".body");
    body();
    emit("br " + p + ".latch", line);
    label(p + ".latch");
    emit("%" + p + ".next = add i32 %" + p + ".i, 1", line);
    emit("br " + p + ".header", line);
    label(p + ".exit");
  }

  std::string str() const { return out; }

private:
  std::string out;
  std::string current;
};

std::string arrayType(unsigned n) { return "ptr[i8 x " + std::to_string(n) + "]"; }

std::string num(int64_t v) { return std::to_string(v); }

/// `call @sym.make_symbolic`, restricting elements to `bits` when narrower
/// than a byte.
std::string makeSymbolic(const std::string &obj, unsigned n, const std::string &name,
                         unsigned bits) {
  std::string s = "call @sym.make_symbolic(%" + obj + ", " + num(n) + ", \"" + name + "\"";
  if (bits < 8)
    s += ", " + num(bits);
  return s + ")";
}

void checkBits(unsigned bits) {
  if (bits == 0 || bits > 8)
    throw std::invalid_argument("element bits must be in 1..8");
}

void checkSize(unsigned size, unsigned lo, unsigned hi) {
  if (size < lo || size > hi)
    throw std::invalid_argument("size must be in " + num(lo) + ".." + num(hi));
}

enum class ToupperVariant { Plain, Assert, Bug };

std::string toupper(unsigned n, unsigned bits, ToupperVariant variant) {
  checkSize(n, 1, 100);
  checkBits(bits);
  std::string ty = arrayType(n);
  Emitter e;
  e.beginFunction("func @to_upper(" + ty + " %text) -> void");
  e.loop("l", n, 2, [&] {
    e.emit("%p = gep " + ty + " %text, %l.i", 3);
    e.emit("%ch = load i8 %p", 3);
    e.emit("%ge = icmp sge i8 %ch, 97", 3);
    e.emit("%le = icmp sle i8 %ch, 122", 3);
    e.emit("%low = and i1 %ge, %le", 3);
    e.emit("br %low, then, l.latch", 3);
    e.label("then");
    e.emit("%t1 = load i8 %p", 4);
    e.emit("%t2 = sub i8 %t1, 97", 4);
    e.emit("%t3 = add i8 %t2, 65", 4);
    e.emit("store i8 %t3, %p", 4);
  });
  e.emit("ret void", 6);
  e.endFunction();

  e.beginFunction("func @main() -> i32");
  e.emit("%text = alloca " + ty, 15);
  if (bits < 8) {
    // Narrow inputs are biased so that they straddle 'a'.
    e.emit("%raw = alloca " + ty, 15);
    e.emit(makeSymbolic("raw", n, "text", bits), 16);
    e.loop("cp", n, 16, [&] {
      e.emit("%rp = gep " + ty + " %raw, %cp.i", 16);
      e.emit("%rv = load i8 %rp", 16);
      e.emit("%cv = add i8 %rv, 95", 16);
      e.emit("%tp = gep " + ty + " %text, %cp.i", 16);
      e.emit("store i8 %cv, %tp", 16);
    });
  } else {
    e.emit(makeSymbolic("text", n, "text", bits), 16);
  }
  e.emit("call void @to_upper(%text)", 17);
  if (variant == ToupperVariant::Assert) {
    e.loop("chk", n, 18, [&] {
      e.emit("%ap = gep " + ty + " %text, %chk.i", 19);
      e.emit("%av = load i8 %ap", 19);
      e.emit("%age = icmp sge i8 %av, 97", 19);
      e.emit("%ale = icmp sle i8 %av, 122", 19);
      e.emit("%alow = and i1 %age, %ale", 19);
      e.emit("%aok = xor i1 %alow, 1", 19);
      e.emit("call @sym.assert(%aok)", 19);
    });
  } else if (variant == ToupperVariant::Bug) {
    e.emit("%bp = gep " + ty + " %text, 0", 19);
    e.emit("%bv = load i8 %bp", 19);
    e.emit("%bok = icmp ne i8 %bv, 65", 19);
    e.emit("call @sym.assert(%bok)", 19);
  }
  e.emit("ret i32 0", 21);
  e.endFunction();
  return e.str();
}

std::string bitonic(unsigned n, unsigned bits, bool withAssert) {
  if (n < 2 || n > 16 || (n & (n - 1)))
    throw std::invalid_argument("bitonic size must be a power of two in 2..16");
  checkBits(bits);
  std::string ty = arrayType(n);
  Emitter e;
  e.beginFunction("func @cmpswap(" + ty + " %a, i32 %i, i32 %j, i1 %desc) -> void");
  e.emit("%pi = gep " + ty + " %a, %i", 3);
  e.emit("%pj = gep " + ty + " %a, %j", 3);
  e.emit("%x = load i8 %pi", 3);
  e.emit("%y = load i8 %pj", 3);
  e.emit("%gt = icmp ugt i8 %x, %y", 4);
  e.emit("%sw = xor i1 %gt, %desc", 4);
  e.emit("br %sw, swap, done", 4);
  e.label("swap");
  e.emit("store i8 %y, %pi", 5);
  e.emit("store i8 %x, %pj", 6);
  e.emit("br done", 6);
  e.label("done");
  e.emit("ret void", 8);
  e.endFunction();

  e.beginFunction("func @main() -> i32");
  e.emit("%a = alloca " + ty, 20);
  e.emit(makeSymbolic("a", n, "a", bits), 21);
  for (unsigned k = 2; k <= n; k *= 2)
    for (unsigned j = k / 2; j > 0; j /= 2)
      for (unsigned i = 0; i < n; ++i) {
        unsigned l = i ^ j;
        if (l > i)
          e.emit("call void @cmpswap(%a, " + num(i) + ", " + num(l) + ", " +
                     ((i & k) == 0 ? "0" : "1") + ")",
                 25);
      }
  if (withAssert)
    for (unsigned i = 0; i + 1 < n; ++i) {
      std::string s = num(i);
      e.emit("%s" + s + "p = gep " + ty + " %a, " + s, 28);
      e.emit("%s" + s + "q = gep " + ty + " %a, " + num(i + 1), 28);
      e.emit("%s" + s + "x = load i8 %s" + s + "p", 28);
      e.emit("%s" + s + "y = load i8 %s" + s + "q", 28);
      e.emit("%s" + s + "ok = icmp ule i8 %s" + s + "x, %s" + s + "y", 28);
      e.emit("call @sym.assert(%s" + s + "ok)", 28);
    }
  e.emit("ret i32 0", 30);
  e.endFunction();
  return e.str();
}

/// Offsets i*n+j of an n-by-n matrix, computed into `%<name>`.
void matrixIndex(Emitter &e, const std::string &name, const std::string &i,
                 const std::string &j, unsigned n, unsigned line) {
  e.emit("%" + name + ".r = mul i32 %" + i + ", " + num(n), line);
  e.emit("%" + name + " = add i32 %" + name + ".r, %" + j, line);
}

std::string closure(unsigned n, unsigned bits) {
  checkSize(n, 1, 8);
  checkBits(bits);
  std::string ty = arrayType(n * n);
  Emitter e;
  e.beginFunction("func @closure(" + ty + " %m) -> void");
  e.loop("k", n, 2, [&] {
    e.loop("i", n, 3, [&] {
      e.loop("j", n, 4, [&] {
        matrixIndex(e, "ik", "i.i", "k.i", n, 5);
        matrixIndex(e, "kj", "k.i", "j.i", n, 5);
        matrixIndex(e, "ij", "i.i", "j.i", n, 6);
        e.emit("%pik = gep " + ty + " %m, %ik", 5);
        e.emit("%pkj = gep " + ty + " %m, %kj", 5);
        e.emit("%vik = load i8 %pik", 5);
        e.emit("%vkj = load i8 %pkj", 5);
        e.emit("%eik = icmp ne i8 %vik, 0", 5);
        e.emit("%ekj = icmp ne i8 %vkj, 0", 5);
        e.emit("%both = and i1 %eik, %ekj", 5);
        e.emit("br %both, set, j.latch", 5);
        e.label("set");
        e.emit("%pij = gep " + ty + " %m, %ij", 6);
        e.emit("store i8 1, %pij", 6);
      });
    });
  });
  e.emit("ret void", 9);
  e.endFunction();

  e.beginFunction("func @main() -> i32");
  e.emit("%adj = alloca " + ty, 20);
  e.emit(makeSymbolic("adj", n * n, "adj", bits), 21);
  e.emit("call void @closure(%adj)", 22);
  e.emit("ret i32 0", 23);
  e.endFunction();
  return e.str();
}

std::string floyd(unsigned n, unsigned bits) {
  checkSize(n, 1, 8);
  checkBits(bits);
  std::string ty = arrayType(n * n);
  Emitter e;
  e.beginFunction("func @floyd(" + ty + " %d) -> void");
  e.loop("k", n, 2, [&] {
    e.loop("i", n, 3, [&] {
      e.loop("j", n, 4, [&] {
        matrixIndex(e, "ik", "i.i", "k.i", n, 5);
        matrixIndex(e, "kj", "k.i", "j.i", n, 5);
        matrixIndex(e, "ij", "i.i", "j.i", n, 5);
        e.emit("%pik = gep " + ty + " %d, %ik", 5);
        e.emit("%pkj = gep " + ty + " %d, %kj", 5);
        e.emit("%pij = gep " + ty + " %d, %ij", 5);
        e.emit("%vik = load i8 %pik", 5);
        e.emit("%vkj = load i8 %pkj", 5);
        e.emit("%vij = load i8 %pij", 5);
        e.emit("%wik = zext i8 %vik to i16", 5);
        e.emit("%wkj = zext i8 %vkj to i16", 5);
        e.emit("%wij = zext i8 %vij to i16", 5);
        e.emit("%sum = add i16 %wik, %wkj", 5);
        e.emit("%shorter = icmp ult i16 %sum, %wij", 5);
        e.emit("br %shorter, relax, j.latch", 5);
        e.label("relax");
        e.emit("%nd = trunc i16 %sum to i8", 6);
        e.emit("store i8 %nd, %pij", 6);
      });
    });
  });
  e.emit("ret void", 9);
  e.endFunction();

  e.beginFunction("func @main() -> i32");
  e.emit("%dist = alloca " + ty, 20);
  e.emit(makeSymbolic("dist", n * n, "dist", bits), 21);
  e.emit("call void @floyd(%dist)", 22);
  e.emit("ret i32 0", 23);
  e.endFunction();
  return e.str();
}

/// Morphology on an n-by-n binary image (nonzero pixels are set). Dilation
/// marks set pixels and their 4-neighbours, erosion clears unset pixels and
/// their 4-neighbours.
std::string morphology(unsigned n, unsigned bits, bool dilate, bool withAssert) {
  checkSize(n, 2, 8);
  checkBits(bits);
  std::string ty = arrayType(n * n);
  std::string fn = dilate ? "dilate" : "erode";
  std::string mark = dilate ? "1" : "0";
  std::string test = dilate ? "ne" : "eq";
  Emitter e;
  e.beginFunction("func @" + fn + "(" + ty + " %img, " + ty + " %out) -> void");
  e.loop("p", n * n, 2, [&] {
    e.emit("%pp = gep " + ty + " %out, %p.i", 3);
    if (!dilate)
      e.emit("store i8 1, %pp", 3);
    e.emit("%pi = gep " + ty + " %img, %p.i", 4);
    e.emit("%pv = load i8 %pi", 4);
    e.emit("%pt = icmp " + test + " i8 %pv, 0", 4);
    e.emit("br %pt, self, p.latch", 4);
    e.label("self");
    e.emit("store i8 " + mark + ", %pp", 5);
  });
  e.loop("q", n * n, 7, [&] {
    e.emit("%qi = gep " + ty + " %img, %q.i", 8);
    e.emit("%qv = load i8 %qi", 8);
    e.emit("%qt = icmp " + test + " i8 %qv, 0", 8);
    e.emit("br %qt, spread, q.latch", 8);
    e.label("spread");
    e.emit("%row = udiv i32 %q.i, " + num(n), 9);
    e.emit("%rn = mul i32 %row, " + num(n), 9);
    e.emit("%col = sub i32 %q.i, %rn", 9);
    struct Dir {
      std::string name, cond, delta;
      unsigned line;
    };
    std::vector<Dir> dirs = {
        {"up", "icmp sgt i32 %row, 0", "-" + num(n), 10},
        {"down", "icmp slt i32 %row, " + num(n - 1), num(n), 11},
        {"left", "icmp sgt i32 %col, 0", "-1", 12},
        {"right", "icmp slt i32 %col, " + num(n - 1), "1", 13},
    };
    for (const Dir &d : dirs) {
      e.emit("%" + d.name + " = " + d.cond, d.line);
      e.emit("br %" + d.name + ", " + d.name + ".set, " + d.name + ".next", d.line);
      e.label(d.name + ".set");
      e.emit("%" + d.name + ".idx = add i32 %q.i, " + d.delta, d.line);
      e.emit("%" + d.name + ".p = gep " + ty + " %out, %" + d.name + ".idx", d.line);
      e.emit("store i8 " + mark + ", %" + d.name + ".p", d.line);
      e.emit("br " + d.name + ".next", d.line);
      e.label(d.name + ".next");
    }
  });
  e.emit("ret void", 15);
  e.endFunction();

  e.beginFunction("func @main() -> i32");
  e.emit("%img = alloca " + ty, 20);
  e.emit("%out = alloca " + ty, 20);
  e.emit(makeSymbolic("img", n * n, "img", bits), 21);
  e.emit("call void @" + fn + "(%img, %out)", 22);
  if (withAssert) {
    // Dilation is extensive, erosion anti-extensive.
    e.loop("chk", n * n, 23, [&] {
      e.emit("%ci = gep " + ty + " %img, %chk.i", 24);
      e.emit("%co = gep " + ty + " %out, %chk.i", 24);
      e.emit("%cv = load i8 %ci", 24);
      e.emit("%cw = load i8 %co", 24);
      if (dilate) {
        e.emit("%cunset = icmp eq i8 %cv, 0", 24);
        e.emit("%cset = icmp ne i8 %cw, 0", 24);
      } else {
        e.emit("%cunset = icmp eq i8 %cw, 0", 24);
        e.emit("%cset = icmp ne i8 %cv, 0", 24);
      }
      e.emit("%cok = or i1 %cunset, %cset", 24);
      e.emit("call @sym.assert(%cok)", 24);
    });
  }
  e.emit("ret i32 0", 26);
  e.endFunction();
  return e.str();
}

std::string guardedOob(unsigned n, unsigned bits) {
  checkSize(n, 2, 64);
  checkBits(bits);
  std::string ty = arrayType(n);
  Emitter e;
  e.beginFunction("func @accumulate(" + ty + " %a) -> void");
  e.loop("l", n, 2, [&] {
    e.emit("%p = gep " + ty + " %a, %l.i", 3);
    e.emit("%v = load i8 %p", 3);
    e.emit("%nx = add i32 %l.i, 1", 4);
    e.emit("%inb = icmp slt i32 %nx, " + num(n), 4);
    e.emit("%pos = icmp ne i8 %v, 0", 4);
    e.emit("%go = and i1 %inb, %pos", 4);
    e.emit("br %go, then, l.latch", 4);
    e.label("then");
    e.emit("%q = gep " + ty + " %a, %nx", 5);
    e.emit("%w = load i8 %q", 5);
    e.emit("%s = add i8 %v, %w", 5);
    e.emit("store i8 %s, %p", 5);
  });
  e.emit("ret void", 7);
  e.endFunction();

  e.beginFunction("func @main() -> i32");
  e.emit("%a = alloca " + ty, 20);
  e.emit(makeSymbolic("a", n, "a", bits), 21);
  e.emit("call void @accumulate(%a)", 22);
  e.emit("ret i32 0", 23);
  e.endFunction();
  return e.str();
}

std::string divzero(unsigned n, unsigned bits) {
  checkSize(n, 1, 32);
  checkBits(bits);
  std::string in = arrayType(2 * n), out = arrayType(n);
  Emitter e;
  e.beginFunction("func @scale(i8 %x, i8 %y) -> i8");
  e.emit("%big = icmp ugt i8 %x, " + num(bits < 8 ? (1u << bits) / 2 : 10), 3);
  e.emit("br %big, div, done", 3);
  e.label("div");
  e.emit("%q = udiv i8 100, %y", 4);
  e.emit("br done", 4);
  e.label("done");
  e.emit("%r = phi i8 [%q, div], [%x, entry]", 5);
  e.emit("ret i8 %r", 5);
  e.endFunction();

  e.beginFunction("func @main() -> i32");
  e.emit("%in = alloca " + in, 20);
  e.emit("%out = alloca " + out, 20);
  e.emit(makeSymbolic("in", 2 * n, "in", bits), 21);
  e.loop("l", n, 22, [&] {
    e.emit("%xi = mul i32 %l.i, 2", 23);
    e.emit("%yi = add i32 %xi, 1", 23);
    e.emit("%xp = gep " + in + " %in, %xi", 23);
    e.emit("%yp = gep " + in + " %in, %yi", 23);
    e.emit("%x = load i8 %xp", 23);
    e.emit("%y = load i8 %yp", 23);
    e.emit("%r = call i8 @scale(%x, %y)", 24);
    e.emit("%op = gep " + out + " %out, %l.i", 24);
    e.emit("store i8 %r, %op", 24);
  });
  e.emit("ret i32 0", 26);
  e.endFunction();
  return e.str();
}

} // namespace

const std::vector<BenchmarkInfo> &benchmarks() {
  static const std::vector<BenchmarkInfo> list = {
      {"toupper", "upper-case a symbolic string in place", 10, 4, 2},
      {"toupper_assert", "toupper followed by a no-lower-case assertion", 10, 4, 2},
      {"toupper_bug", "toupper with a violated assertion on the first character", 10, 4, 2},
      {"bitonic", "bitonic sorting network", 4, 4, 4},
      {"bitonic_assert", "bitonic sort followed by a sortedness assertion", 4, 4, 4},
      {"tclosure", "transitive closure of an adjacency matrix", 3, 3, 1},
      {"floyd", "Floyd-Warshall shortest paths", 3, 3, 1},
      {"dilation", "binary dilation of an n-by-n image", 3, 3, 1},
      {"dilation_assert", "dilation followed by an extensivity assertion", 3, 3, 1},
      {"erosion", "binary erosion of an n-by-n image", 3, 3, 1},
      {"erosion_assert", "erosion followed by an anti-extensivity assertion", 3, 3, 1},
      {"guarded_oob", "neighbour access guarded against the array end", 4, 4, 4},
      {"divzero", "division guarded by an unrelated condition", 1, 1, 8},
  };
  return list;
}

const BenchmarkInfo *findBenchmark(const std::string &name) {
  for (const BenchmarkInfo &b : benchmarks())
    if (b.name == name)
      return &b;
  return nullptr;
}

std::string generateBenchmark(const std::string &name, unsigned size, unsigned bits) {
  if (name == "toupper")
    return toupper(size, bits, ToupperVariant::Plain);
  if (name == "toupper_assert")
    return toupper(size, bits, ToupperVariant::Assert);
  if (name == "toupper_bug")
    return toupper(size, bits, ToupperVariant::Bug);
  if (name == "bitonic")
    return bitonic(size, bits, false);
  if (name == "bitonic_assert")
    return bitonic(size, bits, true);
  if (name == "tclosure")
    return closure(size, bits);
  if (name == "floyd")
    return floyd(size, bits);
  if (name == "dilation")
    return morphology(size, bits, true, false);
  if (name == "dilation_assert")
    return morphology(size, bits, true, true);
  if (name == "erosion")
    return morphology(size, bits, false, false);
  if (name == "erosion_assert")
    return morphology(size, bits, false, true);
  if (name == "guarded_oob")
    return guardedOob(size, bits);
  if (name == "divzero")
    return divzero(size, bits);
  throw std::invalid_argument("unknown benchmark '" + name + "'");
}

Module benchmarkModule(const std::string &name, unsigned size, unsigned bits) {
  if (size == 0) {
    const BenchmarkInfo *info = findBenchmark(name);
    if (!info)
      throw std::invalid_argument("unknown benchmark '" + name + "'");
    size = info->defaultSize;
  }
  return parseModule(generateBenchmark(name, size, bits));
}

std::vector<BenchmarkInstance> enumerationCorpus(unsigned maxBits) {
  std::vector<BenchmarkInstance> out;
  for (const BenchmarkInfo &b : benchmarks()) {
    Module m = benchmarkModule(b.name, b.smallSize, b.smallBits);
    if (totalSymbolicBits(symbolicDecls(m)) <= maxBits)
      out.push_back({b.name, b.smallSize, b.smallBits, std::move(m)});
  }
  return out;
}

} // namespace mse
