//===-- Parser.cpp - MIR text parser --------------------------------------===//
//
// Line-oriented recursive-descent parser. One instruction per line; blocks
// start with `label:`; functions with `func @name(params) -> type {`.
//
//===----------------------------------------------------------------------===//

#include "mse/IR.h"

#include <cctype>
#include <charconv>

namespace mse {

namespace {

enum class Tok {
  Eof, Newline, Local, Global, Ident, Int, String, Annot,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Colon, Equal, Arrow, Ellipsis
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  int64_t value = 0;
  unsigned line = 1, col = 1;
};

bool isIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Lexer {
public:
  explicit Lexer(std::string_view src) : src(src) {}

  std::vector<Token> run() {
    std::vector<Token> toks;
    while (true) {
      Token t = next();
      toks.push_back(t);
      if (t.kind == Tok::Eof)
        break;
    }
    return toks;
  }

private:
  std::string_view src;
  size_t pos = 0;
  unsigned line = 1, col = 1;

  char peek(size_t ahead = 0) const {
    return pos + ahead < src.size() ? src[pos + ahead] : '\0';
  }
  char get() {
    char c = src[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string &msg) {
    throw ParseError(line, col, msg);
  }

  std::string ident() {
    std::string s;
    while (pos < src.size() && isIdentChar(peek()))
      s += get();
    return s;
  }

  Token next() {
    while (pos < src.size()) {
      char c = peek();
      if (c == ';') {
        while (pos < src.size() && peek() != '\n')
          get();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        get();
      } else {
        break;
      }
    }
    Token t;
    t.line = line;
    t.col = col;
    if (pos >= src.size())
      return t;

    char c = peek();
    auto single = [&](Tok k) {
      get();
      t.kind = k;
      return t;
    };
    switch (c) {
    case '\n': return single(Tok::Newline);
    case '(': return single(Tok::LParen);
    case ')': return single(Tok::RParen);
    case '{': return single(Tok::LBrace);
    case '}': return single(Tok::RBrace);
    case '[': return single(Tok::LBracket);
    case ']': return single(Tok::RBracket);
    case ',': return single(Tok::Comma);
    case ':': return single(Tok::Colon);
    case '=': return single(Tok::Equal);
    default: break;
    }
    if (c == '-' && peek(1) == '>') {
      get();
      get();
      t.kind = Tok::Arrow;
      return t;
    }
    if (c == '.' && peek(1) == '.' && peek(2) == '.') {
      get(); get(); get();
      t.kind = Tok::Ellipsis;
      return t;
    }
    if (c == '%' || c == '@' || c == '!') {
      get();
      t.kind = c == '%' ? Tok::Local : c == '@' ? Tok::Global : Tok::Annot;
      t.text = ident();
      if (t.text.empty())
        fail(std::string("expected identifier after '") + c + "'");
      return t;
    }
    if (c == '"') {
      get();
      while (true) {
        if (pos >= src.size() || peek() == '\n')
          fail("unterminated string literal");
        char d = get();
        if (d == '"')
          break;
        if (d == '\\' && pos < src.size())
          d = get();
        t.text += d;
      }
      t.kind = Tok::String;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      std::string s;
      s += get();
      while (std::isdigit(static_cast<unsigned char>(peek())))
        s += get();
      if (s == "-")
        fail("expected digits after '-'");
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), t.value);
      if (ec != std::errc())
        fail("integer literal out of range: " + s);
      t.kind = Tok::Int;
      t.text = s;
      return t;
    }
    if (isIdentChar(c)) {
      t.kind = Tok::Ident;
      t.text = ident();
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

struct PendingUse {
  std::string name;
  unsigned line, col;
};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks(std::move(toks)) {}

  Module parse() {
    Module m;
    skipNewlines();
    while (cur().kind != Tok::Eof) {
      if (isIdent("entry")) {
        advance();
        m.entry = expect(Tok::Global, "entry function name").text;
        endLine();
      } else if (isIdent("func")) {
        m.functions.push_back(parseFunction());
      } else {
        fail("expected 'func' or 'entry'");
      }
      skipNewlines();
    }
    return m;
  }

private:
  std::vector<Token> toks;
  size_t pos = 0;
  std::vector<PendingUse> uses;

  const Token &cur() const { return toks[pos]; }
  Token advance() { return toks[pos == toks.size() - 1 ? pos : pos++]; }
  bool is(Tok k) const { return cur().kind == k; }
  bool isIdent(std::string_view s) const {
    return cur().kind == Tok::Ident && cur().text == s;
  }

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(cur().line, cur().col, msg);
  }

  Token expect(Tok k, const char *what) {
    if (!is(k))
      fail(std::string("expected ") + what);
    return advance();
  }

  void expectIdent(std::string_view s) {
    if (!isIdent(s))
      fail("expected '" + std::string(s) + "'");
    advance();
  }

  void skipNewlines() {
    while (is(Tok::Newline))
      advance();
  }

  void endLine() {
    if (is(Tok::Eof))
      return;
    if (!is(Tok::Newline))
      fail("expected end of line");
    skipNewlines();
  }

  Type parseType() {
    if (!is(Tok::Ident))
      fail("expected type");
    Token t = advance();
    if (t.text == "void")
      return Type::voidTy();
    if (t.text == "ptr") {
      expect(Tok::LBracket, "'['");
      Type elem = parseIntType();
      expectIdent("x");
      Token len = expect(Tok::Int, "element count");
      if (len.value <= 0)
        throw ParseError(len.line, len.col, "object length must be positive");
      expect(Tok::RBracket, "']'");
      return Type::addrTy(elem.width, uint32_t(len.value));
    }
    --pos;
    return parseIntType();
  }

  Type parseIntType() {
    Token t = expect(Tok::Ident, "integer type");
    unsigned w = 0;
    if (t.text.size() > 1 && t.text[0] == 'i') {
      auto [p, ec] =
          std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), w);
      if (ec != std::errc() || p != t.text.data() + t.text.size())
        w = 0;
    }
    if (!isLegalIntWidth(w))
      throw ParseError(t.line, t.col, "invalid integer type '" + t.text + "'");
    return Type::intTy(w);
  }

  Operand parseOperand() {
    if (is(Tok::Local)) {
      Token t = advance();
      uses.push_back({t.text, t.line, t.col});
      return Operand::value(t.text);
    }
    if (is(Tok::Int))
      return Operand::constantInt(advance().value);
    if (isIdent("true") || isIdent("false"))
      return Operand::constantInt(advance().text == "true" ? 1 : 0);
    if (is(Tok::String))
      return Operand::string(advance().text);
    fail("expected operand");
  }

  std::vector<Operand> parseOperandList() {
    std::vector<Operand> ops;
    if (is(Tok::Newline) || is(Tok::Eof) || is(Tok::Annot) || is(Tok::RParen))
      return ops;
    ops.push_back(parseOperand());
    while (is(Tok::Comma)) {
      advance();
      ops.push_back(parseOperand());
    }
    return ops;
  }

  void checkArity(const Instruction &inst, size_t lo, size_t hi,
                  const Token &at) {
    size_t n = inst.operands.size();
    if (n < lo || n > hi) {
      std::string want = lo == hi ? std::to_string(lo)
                                  : std::to_string(lo) + ".." + std::to_string(hi);
      throw ParseError(at.line, at.col,
                       "arity mismatch: '" + std::string(opcodeName(inst.op)) +
                           "' expects " + want + " operands, got " +
                           std::to_string(n));
    }
  }

  Function parseFunction() {
    expectIdent("func");
    Function f;
    f.name = expect(Tok::Global, "function name").text;
    expect(Tok::LParen, "'('");
    if (!is(Tok::RParen)) {
      while (true) {
        if (is(Tok::Ellipsis)) {
          advance();
          f.variadic = true;
          break;
        }
        Param p;
        p.type = parseType();
        if (p.type.isVoid())
          fail("parameter cannot be void");
        p.name = expect(Tok::Local, "parameter name").text;
        f.params.push_back(p);
        if (!is(Tok::Comma))
          break;
        advance();
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    f.retType = parseType();
    expect(Tok::LBrace, "'{'");
    endLine();

    uses.clear();
    while (!is(Tok::RBrace)) {
      if (is(Tok::Eof))
        fail("unexpected end of input in function body");
      Token label = expect(Tok::Ident, "block label");
      expect(Tok::Colon, "':' after block label");
      endLine();
      BasicBlock bb;
      bb.label = label.text;
      while (!is(Tok::RBrace) && !is(Tok::Eof) &&
             !(is(Tok::Ident) && toks[pos + 1].kind == Tok::Colon)) {
        bb.insts.push_back(parseInstruction());
        endLine();
      }
      f.blocks.push_back(std::move(bb));
    }
    advance(); // '}'
    endLine();
    if (f.blocks.empty())
      fail("function @" + f.name + " has no blocks");
    resolveUses(f);
    return f;
  }

  void resolveUses(const Function &f) {
    std::set<std::string> defined;
    for (const Param &p : f.params)
      defined.insert(p.name);
    for (const BasicBlock &bb : f.blocks)
      for (const Instruction &inst : bb.insts)
        if (inst.hasResult())
          defined.insert(inst.id);
    for (const PendingUse &u : uses)
      if (!defined.count(u.name))
        throw ParseError(u.line, u.col,
                         "use of undefined value '%" + u.name + "' in @" +
                             f.name);
  }

  Instruction parseInstruction() {
    Instruction inst;
    Token start = cur();
    if (is(Tok::Local)) {
      inst.id = advance().text;
      expect(Tok::Equal, "'='");
    }
    Token opTok = expect(Tok::Ident, "opcode");
    auto op = opcodeFromName(opTok.text);
    if (!op || *op == Opcode::MakeSymbolic || *op == Opcode::Assert)
      throw ParseError(opTok.line, opTok.col,
                       "unknown opcode '" + opTok.text + "'");
    inst.op = *op;

    switch (inst.op) {
    case Opcode::ICmp: {
      Token p = expect(Tok::Ident, "icmp predicate");
      auto pred = predFromName(p.text);
      if (!pred)
        throw ParseError(p.line, p.col, "unknown predicate '" + p.text + "'");
      inst.pred = *pred;
      inst.type = parseIntType();
      inst.operands = parseOperandList();
      checkArity(inst, 2, 2, opTok);
      break;
    }
    case Opcode::ZExt:
    case Opcode::SExt:
    case Opcode::Trunc:
      inst.srcType = parseIntType();
      inst.operands.push_back(parseOperand());
      expectIdent("to");
      inst.type = parseIntType();
      break;
    case Opcode::Alloca:
      inst.type = parseType();
      if (!inst.type.isAddr())
        fail("alloca requires an address type");
      break;
    case Opcode::Phi:
      inst.type = parseType();
      while (true) {
        expect(Tok::LBracket, "'[' in phi");
        inst.operands.push_back(parseOperand());
        expect(Tok::Comma, "','");
        inst.labels.push_back(expect(Tok::Ident, "incoming block").text);
        expect(Tok::RBracket, "']'");
        if (!is(Tok::Comma))
          break;
        advance();
      }
      break;
    case Opcode::Br:
      if (is(Tok::Ident) && !isIdent("true") && !isIdent("false")) {
        inst.labels.push_back(advance().text);
      } else {
        inst.operands.push_back(parseOperand());
        expect(Tok::Comma, "','");
        inst.labels.push_back(expect(Tok::Ident, "true target").text);
        expect(Tok::Comma, "','");
        inst.labels.push_back(expect(Tok::Ident, "false target").text);
      }
      break;
    case Opcode::Ret:
      inst.type = parseType();
      if (!inst.type.isVoid())
        inst.operands.push_back(parseOperand());
      break;
    case Opcode::Call:
      parseCall(inst);
      break;
    default:
      inst.type = parseType();
      inst.operands = parseOperandList();
      break;
    }

    switch (inst.op) {
    case Opcode::Select:
      checkArity(inst, 3, 3, opTok);
      break;
    case Opcode::Load:
    case Opcode::VaArg:
      checkArity(inst, 1, 1, opTok);
      break;
    case Opcode::Store:
    case Opcode::Gep:
      checkArity(inst, 2, 2, opTok);
      break;
    case Opcode::MakeSymbolic:
      checkArity(inst, 3, 4, opTok);
      break;
    case Opcode::Assert:
      checkArity(inst, 1, 1, opTok);
      break;
    default:
      if (isBinaryOp(inst.op))
        checkArity(inst, 2, 2, opTok);
      break;
    }

    bool wantsResult = !(inst.op == Opcode::Store || inst.op == Opcode::Br ||
                         inst.op == Opcode::Ret || inst.op == Opcode::Assert ||
                         inst.op == Opcode::MakeSymbolic ||
                         (inst.op == Opcode::Call && inst.type.isVoid()));
    if (wantsResult && !inst.hasResult())
      throw ParseError(start.line, start.col,
                       "'" + std::string(opcodeName(inst.op)) +
                           "' must define a value");
    if (!wantsResult && inst.hasResult())
      throw ParseError(start.line, start.col,
                       "'" + std::string(opcodeName(inst.op)) +
                           "' does not produce a value");

    parseAnnotations(inst);
    return inst;
  }

  void parseCall(Instruction &inst) {
    if (is(Tok::Global)) {
      Token callee = advance();
      if (callee.text == kMakeSymbolicIntrinsic)
        inst.op = Opcode::MakeSymbolic;
      else if (callee.text == kAssertIntrinsic)
        inst.op = Opcode::Assert;
      else
        throw ParseError(callee.line, callee.col,
                         "call to @" + callee.text + " needs a return type");
      inst.type = Type::voidTy();
    } else {
      inst.type = parseType();
      inst.callee = expect(Tok::Global, "callee").text;
    }
    expect(Tok::LParen, "'('");
    inst.operands = parseOperandList();
    expect(Tok::RParen, "')'");
  }

  void parseAnnotations(Instruction &inst) {
    while (is(Tok::Annot)) {
      Token a = advance();
      if (a.text == "lines") {
        inst.srcLines.insert(unsigned(expect(Tok::Int, "line number").value));
        while (is(Tok::Comma)) {
          advance();
          inst.srcLines.insert(unsigned(expect(Tok::Int, "line number").value));
        }
      } else if (a.text == "dead") {
        inst.dead = true;
      } else if (a.text == "loc") {
        inst.origin = expect(Tok::Ident, "location").text;
      } else {
        throw ParseError(a.line, a.col, "unknown annotation '!" + a.text + "'");
      }
    }
  }
};

} // namespace

Module parseModule(std::string_view text) {
  Parser p(Lexer(text).run());
  return p.parse();
}

} // namespace mse
