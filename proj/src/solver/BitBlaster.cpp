//===-- BitBlaster.cpp - Expressions to CNF -------------------------------===//
//
// Arithmetic uses ripple-carry adders, shift-and-add multiplication and a
// restoring divider whose behaviour on a zero divisor (all-ones quotient)
// coincides with SMT-LIB. Signed division reduces to unsigned division on
// magnitudes.
//
//===----------------------------------------------------------------------===//

#include "BitBlaster.h"

#include <stdexcept>

namespace mse {

BitBlaster::BitBlaster(SatSolver &s) : sat(s) {
  tru = fresh();
  sat.addClause({tru});
}

Lit BitBlaster::mkAnd(Lit a, Lit b) {
  if (isFalse(a) || isFalse(b) || a == negLit(b))
    return falseLit();
  if (isTrue(a))
    return b;
  if (isTrue(b) || a == b)
    return a;
  if (a > b)
    std::swap(a, b);
  auto key = std::make_tuple(0, a, b, Lit(0));
  auto it = gates.find(key);
  if (it != gates.end())
    return it->second;
  Lit o = fresh();
  sat.addClause({negLit(o), a});
  sat.addClause({negLit(o), b});
  sat.addClause({o, negLit(a), negLit(b)});
  gates.emplace(key, o);
  return o;
}

Lit BitBlaster::mkXor(Lit a, Lit b) {
  if (isFalse(a))
    return b;
  if (isFalse(b))
    return a;
  if (isTrue(a))
    return negLit(b);
  if (isTrue(b))
    return negLit(a);
  if (a == b)
    return falseLit();
  if (a == negLit(b))
    return tru;
  if (a > b)
    std::swap(a, b);
  auto key = std::make_tuple(1, a, b, Lit(0));
  auto it = gates.find(key);
  if (it != gates.end())
    return it->second;
  Lit o = fresh();
  sat.addClause({negLit(o), a, b});
  sat.addClause({negLit(o), negLit(a), negLit(b)});
  sat.addClause({o, negLit(a), b});
  sat.addClause({o, a, negLit(b)});
  gates.emplace(key, o);
  return o;
}

Lit BitBlaster::mkMux(Lit c, Lit t, Lit f) {
  if (isTrue(c) || t == f)
    return t;
  if (isFalse(c))
    return f;
  if (isTrue(t) && isFalse(f))
    return c;
  if (isFalse(t) && isTrue(f))
    return negLit(c);
  auto key = std::make_tuple(2, c, t, f);
  auto it = gates.find(key);
  if (it != gates.end())
    return it->second;
  Lit o = fresh();
  sat.addClause({negLit(c), negLit(t), o});
  sat.addClause({negLit(c), t, negLit(o)});
  sat.addClause({c, negLit(f), o});
  sat.addClause({c, f, negLit(o)});
  gates.emplace(key, o);
  return o;
}

BitBlaster::Bits BitBlaster::constBits(uint64_t v, unsigned w) {
  Bits b(w);
  for (unsigned i = 0; i < w; ++i)
    b[i] = ((v >> i) & 1) ? tru : falseLit();
  return b;
}

BitBlaster::Bits BitBlaster::addBits(const Bits &a, const Bits &b, Lit carry) {
  Bits out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    Lit axb = mkXor(a[i], b[i]);
    out[i] = mkXor(axb, carry);
    carry = mkOr(mkAnd(a[i], b[i]), mkAnd(axb, carry));
  }
  return out;
}

BitBlaster::Bits BitBlaster::negBits(const Bits &a) {
  Bits inv(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    inv[i] = negLit(a[i]);
  return addBits(inv, constBits(0, unsigned(a.size())), tru);
}

BitBlaster::Bits BitBlaster::mulBits(const Bits &a, const Bits &b) {
  size_t w = a.size();
  Bits acc = constBits(0, unsigned(w));
  for (size_t i = 0; i < w; ++i) {
    Bits partial(w, falseLit());
    for (size_t j = 0; j + i < w; ++j)
      partial[j + i] = mkAnd(a[j], b[i]);
    acc = addBits(acc, partial, falseLit());
  }
  return acc;
}

void BitBlaster::udivBits(const Bits &a, const Bits &b, Bits &q, Bits &r) {
  size_t w = a.size();
  Bits rem(w + 1, falseLit());
  Bits divisor(b);
  divisor.push_back(falseLit());
  q.assign(w, falseLit());
  for (size_t step = w; step-- > 0;) {
    // rem = (rem << 1) | a[step]
    for (size_t k = w; k > 0; --k)
      rem[k] = rem[k - 1];
    rem[0] = a[step];
    // Subtract when rem >= divisor.
    Bits inv(w + 1);
    for (size_t k = 0; k <= w; ++k)
      inv[k] = negLit(divisor[k]);
    Bits diff = addBits(rem, inv, tru);
    Lit ge = negLit(ultBits(rem, divisor));
    q[step] = ge;
    rem = muxBits(ge, diff, rem);
  }
  r.assign(rem.begin(), rem.begin() + long(w));
}

BitBlaster::Bits BitBlaster::sdivBits(const Bits &a, const Bits &b) {
  Lit na = a.back(), nb = b.back();
  Bits absA = muxBits(na, negBits(a), a);
  Bits absB = muxBits(nb, negBits(b), b);
  Bits q, r;
  udivBits(absA, absB, q, r);
  return muxBits(mkXor(na, nb), negBits(q), q);
}

BitBlaster::Bits BitBlaster::shiftBits(ExprKind k, const Bits &a, const Bits &b) {
  size_t w = a.size();
  Lit fill = k == ExprKind::AShr ? a.back() : falseLit();
  Bits cur = a;
  // Amount bits that address positions below w form a barrel shifter; any
  // higher set bit means the amount is at least w.
  Lit overflow = falseLit();
  for (size_t s = 0; s < b.size(); ++s) {
    uint64_t dist = s < 63 ? (uint64_t(1) << s) : UINT64_MAX;
    if (dist >= w) {
      overflow = mkOr(overflow, b[s]);
      continue;
    }
    Bits shifted(w);
    for (size_t i = 0; i < w; ++i) {
      if (k == ExprKind::Shl)
        shifted[i] = i >= dist ? cur[i - dist] : falseLit();
      else
        shifted[i] = i + dist < w ? cur[i + dist] : fill;
    }
    cur = muxBits(b[s], shifted, cur);
  }
  Bits saturated(w, fill);
  return muxBits(overflow, saturated, cur);
}

Lit BitBlaster::ultBits(const Bits &a, const Bits &b) {
  // a < b iff a - b borrows.
  Lit lt = falseLit();
  for (size_t i = 0; i < a.size(); ++i) {
    Lit differ = mkXor(a[i], b[i]);
    lt = mkMux(differ, b[i], lt);
  }
  return lt;
}

Lit BitBlaster::eqBits(const Bits &a, const Bits &b) {
  Lit all = tru;
  for (size_t i = 0; i < a.size(); ++i)
    all = mkAnd(all, negLit(mkXor(a[i], b[i])));
  return all;
}

Lit BitBlaster::cmpBits(Pred p, const Bits &a, const Bits &b) {
  auto flip = [](Bits x) {
    x.back() = negLit(x.back());
    return x;
  };
  switch (p) {
  case Pred::Eq: return eqBits(a, b);
  case Pred::Ne: return negLit(eqBits(a, b));
  case Pred::Ult: return ultBits(a, b);
  case Pred::Ule: return negLit(ultBits(b, a));
  case Pred::Ugt: return ultBits(b, a);
  case Pred::Uge: return negLit(ultBits(a, b));
  case Pred::Slt: return ultBits(flip(a), flip(b));
  case Pred::Sle: return negLit(ultBits(flip(b), flip(a)));
  case Pred::Sgt: return ultBits(flip(b), flip(a));
  case Pred::Sge: return negLit(ultBits(flip(a), flip(b)));
  }
  return falseLit();
}

BitBlaster::Bits BitBlaster::muxBits(Lit c, const Bits &t, const Bits &f) {
  Bits out(t.size());
  for (size_t i = 0; i < t.size(); ++i)
    out[i] = mkMux(c, t[i], f[i]);
  return out;
}

const std::vector<Lit> &BitBlaster::varBits(unsigned var, unsigned width) {
  auto it = vars.find(var);
  if (it != vars.end())
    return it->second;
  Bits b(width);
  for (unsigned i = 0; i < width; ++i)
    b[i] = fresh();
  return vars.emplace(var, std::move(b)).first->second;
}

const std::vector<Lit> &BitBlaster::blast(ExprRef e) {
  auto it = cache.find(e);
  if (it != cache.end())
    return it->second;
  Bits b = compute(e);
  return cache.emplace(e, std::move(b)).first->second;
}

BitBlaster::Bits BitBlaster::compute(ExprRef e) {
  switch (e->kind) {
  case ExprKind::Const:
    return constBits(e->value, e->width);
  case ExprKind::Read:
    return varBits(unsigned(e->value), e->width);
  case ExprKind::Add:
    return addBits(blast(e->ops[0]), blast(e->ops[1]), falseLit());
  case ExprKind::Sub: {
    const Bits &b = blast(e->ops[1]);
    Bits inv(b.size());
    for (size_t i = 0; i < b.size(); ++i)
      inv[i] = negLit(b[i]);
    return addBits(blast(e->ops[0]), inv, tru);
  }
  case ExprKind::Mul:
    return mulBits(blast(e->ops[0]), blast(e->ops[1]));
  case ExprKind::UDiv: {
    Bits q, r;
    udivBits(blast(e->ops[0]), blast(e->ops[1]), q, r);
    return q;
  }
  case ExprKind::SDiv:
    return sdivBits(blast(e->ops[0]), blast(e->ops[1]));
  case ExprKind::And:
  case ExprKind::Or:
  case ExprKind::Xor: {
    Bits a = blast(e->ops[0]);
    const Bits &b = blast(e->ops[1]);
    for (size_t i = 0; i < a.size(); ++i)
      a[i] = e->kind == ExprKind::And  ? mkAnd(a[i], b[i])
             : e->kind == ExprKind::Or ? mkOr(a[i], b[i])
                                       : mkXor(a[i], b[i]);
    return a;
  }
  case ExprKind::Shl:
  case ExprKind::LShr:
  case ExprKind::AShr:
    return shiftBits(e->kind, blast(e->ops[0]), blast(e->ops[1]));
  case ExprKind::Cmp:
    return {cmpBits(e->pred, blast(e->ops[0]), blast(e->ops[1]))};
  case ExprKind::Not: {
    Bits a = blast(e->ops[0]);
    for (Lit &l : a)
      l = negLit(l);
    return a;
  }
  case ExprKind::ZExt: {
    Bits a = blast(e->ops[0]);
    a.resize(e->width, falseLit());
    return a;
  }
  case ExprKind::SExt: {
    Bits a = blast(e->ops[0]);
    a.resize(e->width, a.back());
    return a;
  }
  case ExprKind::Extract: {
    const Bits &a = blast(e->ops[0]);
    return Bits(a.begin() + long(e->value), a.begin() + long(e->value + e->width));
  }
  case ExprKind::Concat: {
    Bits lo = blast(e->ops[1]);
    const Bits &hi = blast(e->ops[0]);
    lo.insert(lo.end(), hi.begin(), hi.end());
    return lo;
  }
  case ExprKind::Ite: {
    Lit c = blast(e->ops[0])[0];
    return muxBits(c, blast(e->ops[1]), blast(e->ops[2]));
  }
  }
  throw std::logic_error("unhandled expression kind");
}

void BitBlaster::assertTrue(ExprRef e) {
  if (e->width != 1)
    throw std::logic_error("asserted expression must be one bit wide");
  sat.addClause({blast(e)[0]});
}

} // namespace mse
