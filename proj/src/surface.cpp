#include "bx/surface.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace bx {

namespace {

// --------------------------------------------------------------------------
// Lexer
// --------------------------------------------------------------------------

enum class Tok {
  LowerId, UpperId, UpperIdStar, Nat, CharLit, StringLit,
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Comma, Semi, Equals, Arrow, Colon, ColonStar, Backslash, Bang, Star, Pipe,
  Underscore,
  KwCase, KwCaseStar, KwOf, KwWith, KwBy, KwData,
  DirEntry, DirExample, DirComponent,
  End
};

struct Token {
  Tok kind;
  std::string text;  // identifier name / decoded literal payload
  int line = 1;
  int col = 1;
};

[[noreturn]] void fail(const Token& t, const std::string& msg) {
  throw SyntaxError(t.line, t.col, msg);
}

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  auto take = [&]() {
    char c = src[i++];
    advance(c);
    return c;
  };
  auto err = [&](const std::string& msg) -> void { throw SyntaxError(line, col, msg); };

  auto decodeEscape = [&](char quote) -> char {
    if (i >= src.size()) err("unterminated escape sequence");
    char c = take();
    if (c != '\\') return c;
    if (i >= src.size()) err("unterminated escape sequence");
    char e = take();
    switch (e) {
      case 'n': return '\n';
      case 't': return '\t';
      case '\\': return '\\';
      case '\'': return '\'';
      case '"': return '"';
      default:
        if (e == quote) return quote;
        err(std::string("unknown escape \\") + e);
    }
    return 0;  // unreachable
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\r') {
      ++i;  // \r\n normalized to \n
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\n') {
      take();
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') take();
      continue;
    }
    int tl = line, tc = col;
    auto push = [&](Tok k, std::string text = "") {
      out.push_back(Token{k, std::move(text), tl, tc});
    };

    if (identStart(c)) {
      std::string name;
      while (i < src.size() && identChar(src[i])) name += take();
      bool starred = i < src.size() && src[i] == '*';
      if (name == "_") {
        push(Tok::Underscore);
      } else if (name == "case") {
        if (starred) { take(); push(Tok::KwCaseStar); }
        else push(Tok::KwCase);
      } else if (name == "of") push(Tok::KwOf);
      else if (name == "with") push(Tok::KwWith);
      else if (name == "by") push(Tok::KwBy);
      else if (name == "data") push(Tok::KwData);
      else if (std::isupper(static_cast<unsigned char>(name[0]))) {
        if (starred) { take(); push(Tok::UpperIdStar, name); }
        else push(Tok::UpperId, name);
      } else {
        push(Tok::LowerId, name);
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) digits += take();
      push(Tok::Nat, digits);
      continue;
    }
    switch (c) {
      case '\'': {
        take();
        char v = decodeEscape('\'');
        if (i >= src.size() || src[i] != '\'') err("unterminated character literal");
        take();
        push(Tok::CharLit, std::string(1, v));
        continue;
      }
      case '"': {
        take();
        std::string s;
        while (i < src.size() && src[i] != '"') s += decodeEscape('"');
        if (i >= src.size()) err("unterminated string literal");
        take();
        push(Tok::StringLit, s);
        continue;
      }
      case '(': take(); push(Tok::LParen); continue;
      case ')': take(); push(Tok::RParen); continue;
      case '[': take(); push(Tok::LBracket); continue;
      case ']': take(); push(Tok::RBracket); continue;
      case '{': take(); push(Tok::LBrace); continue;
      case '}': take(); push(Tok::RBrace); continue;
      case ',': take(); push(Tok::Comma); continue;
      case ';': take(); push(Tok::Semi); continue;
      case '|': take(); push(Tok::Pipe); continue;
      case '\\': take(); push(Tok::Backslash); continue;
      case '!': take(); push(Tok::Bang); continue;
      case '*': take(); push(Tok::Star); continue;
      case '=': take(); push(Tok::Equals); continue;
      case ':':
        take();
        if (i < src.size() && src[i] == '*') { take(); push(Tok::ColonStar); }
        else push(Tok::Colon);
        continue;
      case '-':
        take();
        if (i < src.size() && src[i] == '>') { take(); push(Tok::Arrow); }
        else err("unexpected '-'");
        continue;
      case '#': {
        take();
        std::string name;
        while (i < src.size() && identChar(src[i])) name += take();
        if (name == "entry") push(Tok::DirEntry);
        else if (name == "example") push(Tok::DirExample);
        else if (name == "component") push(Tok::DirComponent);
        else err("unknown directive #" + name);
        continue;
      }
      default:
        err(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

// --------------------------------------------------------------------------
// Parser
// --------------------------------------------------------------------------

struct Parser {
  std::vector<Token> ts;
  size_t i = 0;
  DataDeclTable table = DataDeclTable::prelude();
  NameSupply wildcards;
  bool inDataDecl = false;

  const Token& peek(size_t k = 0) const { return ts[std::min(i + k, ts.size() - 1)]; }

  // Greedy argument chains must not swallow the next top-level item: a
  // lower-case name at the start of a fresh line followed by parameters and
  // then '=' or ':' begins a new definition or signature.
  int prevLine() const { return i == 0 ? 0 : ts[i - 1].line; }
  bool atTopBoundary() const {
    const Token& t = peek();
    if (t.kind != Tok::LowerId || t.line == prevLine()) return false;
    size_t k = 1;
    while (peek(k).kind == Tok::LowerId || peek(k).kind == Tok::Underscore) ++k;
    return peek(k).kind == Tok::Colon || peek(k).kind == Tok::Equals;
  }
  const Token& next() { return ts[std::min(i++, ts.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool eat(Tok k) {
    if (!at(k)) return false;
    ++i;
    return true;
  }
  const Token& expect(Tok k, const std::string& what) {
    if (!at(k)) fail(peek(), "expected " + what);
    return ts[i++];
  }
  Pos posOf(const Token& t) const { return Pos{t.line, t.col}; }

  int conArityOr(const Token& t, const std::string& name) {
    auto ci = table.findCon(name);
    if (!ci) fail(t, "unknown constructor " + name);
    return static_cast<int>(ci->decl->constructors[ci->index].args.size());
  }

  // ---- types --------------------------------------------------------------

  bool atTypeAtomStart() const {
    Tok k = peek().kind;
    if (k == Tok::LowerId)  // type variables only occur inside data declarations
      return inDataDecl && !atTopBoundary();
    return k == Tok::UpperId || k == Tok::LBracket || k == Tok::LParen;
  }

  TypePtr parseTypeAtom() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::UpperId:
      case Tok::LowerId:
        return dataType(t.text);
      case Tok::LBracket: {
        TypePtr inner = parseType();
        expect(Tok::RBracket, "']'");
        return tList(inner);
      }
      case Tok::LParen: {
        TypePtr a = parseType();
        if (eat(Tok::Comma)) {
          TypePtr b = parseType();
          expect(Tok::RParen, "')'");
          return tPair(a, b);
        }
        expect(Tok::RParen, "')'");
        return a;
      }
      default:
        fail(t, "expected a type");
    }
  }

  TypePtr parseBType() {
    if (at(Tok::UpperId)) {
      const Token& t = next();
      if (t.text == "BX") {
        TypePtr inner = parseTypeAtom();
        try {
          return bxType(inner);
        } catch (const BadTypeError& e) {
          fail(t, e.what());
        }
      }
      std::vector<TypePtr> args;
      while (atTypeAtomStart()) args.push_back(parseTypeAtom());
      return dataType(t.text, std::move(args));
    }
    return parseTypeAtom();
  }

  TypePtr parseType() {
    TypePtr lhs = parseBType();
    if (eat(Tok::Arrow)) return funType(lhs, parseType());
    return lhs;
  }

  void checkConcrete(const TypePtr& t, const Token& at) {
    if (auto* d = std::get_if<TData>(&t->node)) {
      if (std::islower(static_cast<unsigned char>(d->name[0])) || d->name[0] == '_')
        fail(at, "type variable '" + d->name + "' not allowed in a signature");
      if (d->args.empty() ? table.find(d->name) == nullptr
                          : (table.find(d->name) == nullptr ||
                             table.find(d->name)->params.size() != d->args.size()))
        fail(at, "unknown or misapplied datatype " + d->name);
      for (const auto& a : d->args) checkConcrete(a, at);
      return;
    }
    if (auto* f = std::get_if<TFun>(&t->node)) {
      checkConcrete(f->arg, at);
      checkConcrete(f->result, at);
      return;
    }
    checkConcrete(std::get<TBX>(t->node).inner, at);
  }

  // ---- patterns -----------------------------------------------------------

  PatPtr natPattern(long n) {
    PatPtr p = pcon("Z");
    for (long k = 0; k < n; ++k) p = pcon("S", {p});
    return p;
  }

  bool atPatAtomStart() const {
    Tok k = peek().kind;
    return k == Tok::LowerId || k == Tok::Underscore || k == Tok::UpperId || k == Tok::Nat ||
           k == Tok::CharLit || k == Tok::StringLit || k == Tok::LBracket || k == Tok::LParen;
  }

  PatPtr parsePatAtom() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::LowerId:
        return pvar(t.text);
      case Tok::Underscore:
        return pvar(wildcards.fresh("_"));
      case Tok::UpperId: {
        int arity = conArityOr(t, t.text);
        if (arity != 0)
          fail(t, "constructor " + t.text + " expects " + std::to_string(arity) +
                      " arguments; parenthesize the pattern");
        return pcon(t.text);
      }
      case Tok::Nat:
        return natPattern(std::stol(t.text));
      case Tok::CharLit:
        return pcon("'" + t.text + "'");
      case Tok::StringLit: {
        PatPtr p = pcon("[]");
        for (auto it = t.text.rbegin(); it != t.text.rend(); ++it)
          p = pcon(":", {pcon(std::string("'") + *it + "'"), p});
        return p;
      }
      case Tok::LBracket: {
        std::vector<PatPtr> elems;
        if (!eat(Tok::RBracket)) {
          elems.push_back(parsePat());
          while (eat(Tok::Comma)) elems.push_back(parsePat());
          expect(Tok::RBracket, "']'");
        }
        PatPtr p = pcon("[]");
        for (auto it = elems.rbegin(); it != elems.rend(); ++it) p = pcon(":", {*it, p});
        return p;
      }
      case Tok::LParen: {
        PatPtr a = parsePat();
        if (eat(Tok::Comma)) {
          PatPtr b = parsePat();
          expect(Tok::RParen, "')'");
          return pcon("(,)", {a, b});
        }
        expect(Tok::RParen, "')'");
        return a;
      }
      default:
        fail(t, "expected a pattern");
    }
  }

  PatPtr parsePApp() {
    if (at(Tok::UpperIdStar)) fail(peek(), "bidirectional constructors cannot appear in patterns");
    if (at(Tok::UpperId)) {
      const Token& t = peek();
      int arity = conArityOr(t, t.text);
      if (arity > 0) {
        next();
        std::vector<PatPtr> args;
        for (int k = 0; k < arity; ++k) {
          if (!atPatAtomStart())
            fail(peek(), "constructor " + t.text + " expects " + std::to_string(arity) +
                             " pattern arguments");
          args.push_back(parsePatAtom());
        }
        return pcon(t.text, std::move(args));
      }
    }
    return parsePatAtom();
  }

  PatPtr parsePat() {
    PatPtr lhs = parsePApp();
    if (eat(Tok::Colon)) return pcon(":", {lhs, parsePat()});
    return lhs;
  }

  // ---- expressions ----------------------------------------------------------

  ExprPtr natExpr(long n, Pos pos) {
    ExprPtr e = econ("Z", {}, pos);
    for (long k = 0; k < n; ++k) e = econ("S", {e}, pos);
    return e;
  }

  ExprPtr stringExpr(const std::string& s, Pos pos) {
    ExprPtr e = econ("[]", {}, pos);
    for (auto it = s.rbegin(); it != s.rend(); ++it)
      e = econ(":", {econ(std::string("'") + *it + "'", {}, pos), e}, pos);
    return e;
  }

  bool atAtomStart() const {
    Tok k = peek().kind;
    return k == Tok::LowerId || k == Tok::UpperId || k == Tok::UpperIdStar || k == Tok::Nat ||
           k == Tok::CharLit || k == Tok::StringLit || k == Tok::LParen || k == Tok::LBracket ||
           k == Tok::Bang;
  }

  // A unit is either a complete expression or a constructor awaiting args.
  struct Unit {
    ExprPtr expr;       // set when this is a complete expression
    std::string con;    // set when this is a constructor reference
    bool bidir = false;
    int arity = 0;
    Token tok;
  };

  Unit parseUnit() {
    const Token& t = peek();
    if (t.kind == Tok::Bang) {
      next();
      Unit u = parseUnit();
      return Unit{elift(forceExpr(u), posOf(t)), "", false, 0, t};
    }
    switch (t.kind) {
      case Tok::LowerId:
        next();
        return Unit{evar(t.text, posOf(t)), "", false, 0, t};
      case Tok::Underscore:
        fail(t, "wildcard '_' is only allowed in patterns and lambda parameters");
      case Tok::UpperId:
      case Tok::UpperIdStar: {
        next();
        bool bidir = t.kind == Tok::UpperIdStar;
        int arity = conArityOr(t, t.text);
        if (arity == 0) {
          ExprPtr e = bidir ? ebcon(t.text, {}, posOf(t)) : econ(t.text, {}, posOf(t));
          return Unit{e, "", false, 0, t};
        }
        return Unit{nullptr, t.text, bidir, arity, t};
      }
      case Tok::Nat:
        next();
        return Unit{natExpr(std::stol(t.text), posOf(t)), "", false, 0, t};
      case Tok::CharLit:
        next();
        return Unit{econ("'" + t.text + "'", {}, posOf(t)), "", false, 0, t};
      case Tok::StringLit:
        next();
        return Unit{stringExpr(t.text, posOf(t)), "", false, 0, t};
      case Tok::LParen: {
        next();
        ExprPtr a = parseExpr();
        if (eat(Tok::Comma)) {
          ExprPtr b = parseExpr();
          expect(Tok::RParen, "')'");
          bool star = eat(Tok::Star);
          ExprPtr e = star ? ebcon("(,)", {a, b}, posOf(t)) : econ("(,)", {a, b}, posOf(t));
          return Unit{e, "", false, 0, t};
        }
        expect(Tok::RParen, "')'");
        if (at(Tok::Star)) fail(peek(), "postfix '*' applies only to pair and [] literals");
        return Unit{a, "", false, 0, t};
      }
      case Tok::LBracket: {
        next();
        if (eat(Tok::RBracket)) {
          bool star = eat(Tok::Star);
          ExprPtr e = star ? ebcon("[]", {}, posOf(t)) : econ("[]", {}, posOf(t));
          return Unit{e, "", false, 0, t};
        }
        std::vector<ExprPtr> elems;
        elems.push_back(parseExpr());
        while (eat(Tok::Comma)) elems.push_back(parseExpr());
        expect(Tok::RBracket, "']'");
        if (at(Tok::Star)) fail(peek(), "postfix '*' applies only to pair and [] literals");
        ExprPtr e = econ("[]", {}, posOf(t));
        for (auto it = elems.rbegin(); it != elems.rend(); ++it)
          e = econ(":", {*it, e}, posOf(t));
        return Unit{e, "", false, 0, t};
      }
      default:
        fail(t, "expected an expression");
    }
  }

  ExprPtr forceExpr(const Unit& u) {
    if (u.expr) return u.expr;
    fail(u.tok, "constructor " + u.con + " expects " + std::to_string(u.arity) +
                    " arguments; parenthesize or apply it fully");
  }

  ExprPtr parseApp() {
    Unit head = parseUnit();
    if (!head.expr) {
      std::vector<ExprPtr> args;
      for (int k = 0; k < head.arity; ++k) {
        if (!atAtomStart() || atTopBoundary())
          fail(peek(), "constructor " + head.con + " expects " +
                           std::to_string(head.arity) + " arguments");
        args.push_back(forceExpr(parseUnit()));
      }
      if (atAtomStart() && !atTopBoundary())
        fail(peek(), "constructor " + head.con + " expects exactly " +
                         std::to_string(head.arity) + " arguments");
      return head.bidir ? ebcon(head.con, std::move(args), posOf(head.tok))
                        : econ(head.con, std::move(args), posOf(head.tok));
    }
    ExprPtr e = head.expr;
    while (atAtomStart() && !atTopBoundary()) e = eapp(e, forceExpr(parseUnit()), e->pos);
    return e;
  }

  ExprPtr parseCons() {
    ExprPtr lhs = parseApp();
    if (at(Tok::Colon)) {
      const Token& t = next();
      return econ(":", {lhs, parseCons()}, posOf(t));
    }
    if (at(Tok::ColonStar)) {
      const Token& t = next();
      return ebcon(":", {lhs, parseCons()}, posOf(t));
    }
    return lhs;
  }

  std::string parseParam() {
    if (at(Tok::Underscore)) {
      next();
      return wildcards.fresh("_");
    }
    return expect(Tok::LowerId, "a parameter name").text;
  }

  ExprPtr parseExpr() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Backslash: {
        next();
        std::vector<std::string> params;
        params.push_back(parseParam());
        while (at(Tok::LowerId) || at(Tok::Underscore)) params.push_back(parseParam());
        expect(Tok::Arrow, "'->'");
        ExprPtr body = parseExpr();
        for (auto it = params.rbegin(); it != params.rend(); ++it)
          body = elam(*it, body, posOf(t));
        return body;
      }
      case Tok::KwCase: {
        next();
        ExprPtr scrut = parseCons();
        expect(Tok::KwOf, "'of'");
        expect(Tok::LBrace, "'{'");
        std::vector<CaseBranch> branches;
        do {
          PatPtr p = parsePat();
          expect(Tok::Arrow, "'->'");
          branches.push_back(CaseBranch{p, parseExpr()});
        } while (eat(Tok::Semi));
        expect(Tok::RBrace, "'}'");
        return ecase(scrut, std::move(branches), posOf(t));
      }
      case Tok::KwCaseStar: {
        next();
        ExprPtr scrut = parseCons();
        expect(Tok::KwOf, "'of'");
        expect(Tok::LBrace, "'{'");
        std::vector<BCaseBranch> branches;
        do {
          PatPtr p = parsePat();
          expect(Tok::Arrow, "'->'");
          ExprPtr body = parseExpr();
          expect(Tok::KwWith, "'with'");
          ExprPtr exitCond = parseExpr();
          expect(Tok::KwBy, "'by'");
          ExprPtr recon = parseExpr();
          branches.push_back(BCaseBranch{p, body, exitCond, recon});
        } while (eat(Tok::Semi));
        expect(Tok::RBrace, "'}'");
        return ebcase(scrut, std::move(branches), posOf(t));
      }
      default:
        return parseCons();
    }
  }

  // ---- first-order value literals ------------------------------------------

  FOPtr parseFOAtom() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Nat:
        return foNat(std::stol(t.text));
      case Tok::CharLit:
        return foChar(t.text[0]);
      case Tok::StringLit:
        return foString(t.text);
      case Tok::UpperId: {
        int arity = conArityOr(t, t.text);
        if (arity != 0)
          fail(t, "constructor " + t.text + " expects " + std::to_string(arity) +
                      " arguments; parenthesize the value");
        return fo(t.text);
      }
      case Tok::LBracket: {
        std::vector<FOPtr> elems;
        if (!eat(Tok::RBracket)) {
          elems.push_back(parseFOApp());
          while (eat(Tok::Comma)) elems.push_back(parseFOApp());
          expect(Tok::RBracket, "']'");
        }
        return foList(elems);
      }
      case Tok::LParen: {
        FOPtr a = parseFOApp();
        if (eat(Tok::Comma)) {
          FOPtr b = parseFOApp();
          expect(Tok::RParen, "')'");
          return foPair(a, b);
        }
        expect(Tok::RParen, "')'");
        return a;
      }
      default:
        fail(t, "expected a first-order value");
    }
  }

  FOPtr parseFOApp() {
    if (at(Tok::UpperId)) {
      const Token& t = peek();
      int arity = conArityOr(t, t.text);
      if (arity > 0) {
        next();
        std::vector<FOPtr> args;
        for (int k = 0; k < arity; ++k) args.push_back(parseFOAtom());
        return fo(t.text, std::move(args));
      }
    }
    return parseFOAtom();
  }

  // ---- top level -------------------------------------------------------------

  SpecFile parseFile() {
    SpecFile f;
    std::set<std::string> defined;
    bool sawEntry = false;
    Token entryTok = peek();

    while (!at(Tok::End)) {
      const Token& t = peek();
      switch (t.kind) {
        case Tok::KwData: {
          next();
          const Token& nameTok = expect(Tok::UpperId, "a datatype name");
          DataDecl d;
          d.name = nameTok.text;
          while (at(Tok::LowerId)) d.params.push_back(next().text);
          expect(Tok::Equals, "'='");
          inDataDecl = true;
          do {
            const Token& conTok = expect(Tok::UpperId, "a constructor name");
            ConDecl c;
            c.name = conTok.text;
            while (atTypeAtomStart()) c.args.push_back(parseTypeAtom());
            d.constructors.push_back(std::move(c));
          } while (eat(Tok::Pipe));
          inDataDecl = false;
          try {
            table.declare(d);
          } catch (const DeclError& e) {
            fail(nameTok, e.what());
          }
          break;
        }
        case Tok::DirEntry: {
          next();
          if (sawEntry) fail(t, "duplicate #entry directive");
          sawEntry = true;
          entryTok = t;
          f.entry = parseExpr();
          break;
        }
        case Tok::DirExample: {
          next();
          const Token& putTok = expect(Tok::LowerId, "'put'");
          if (putTok.text != "put") fail(putTok, "expected 'put'");
          Example ex;
          ex.source = parseFOAtom();
          ex.updatedView = parseFOAtom();
          expect(Tok::Equals, "'='");
          ex.updatedSource = parseFOApp();
          f.examples.push_back(std::move(ex));
          break;
        }
        case Tok::DirComponent: {
          next();
          f.componentNames.insert(expect(Tok::LowerId, "a function name").text);
          break;
        }
        case Tok::LowerId: {
          const Token& nameTok = next();
          if (eat(Tok::Colon)) {
            TypePtr ty = parseType();
            checkConcrete(ty, nameTok);
            if (!f.signatures.emplace(nameTok.text, ty).second)
              fail(nameTok, "duplicate signature for " + nameTok.text);
            break;
          }
          std::vector<std::string> params;
          while (at(Tok::LowerId) || at(Tok::Underscore)) params.push_back(parseParam());
          expect(Tok::Equals, "'='");
          ExprPtr body = parseExpr();
          for (auto it = params.rbegin(); it != params.rend(); ++it)
            body = elam(*it, body, posOf(nameTok));
          if (!defined.insert(nameTok.text).second)
            fail(nameTok, "duplicate definition of " + nameTok.text);
          f.definitions.push_back(Definition{nameTok.text, body});
          break;
        }
        default:
          fail(t, "expected a definition, signature, data declaration, or directive");
      }
    }

    if (!sawEntry) fail(peek(), "missing #entry directive");
    for (const auto& d : f.definitions)
      if (!f.signatures.count(d.name))
        fail(entryTok, "missing signature for " + d.name);
    for (const auto& [name, ty] : f.signatures) {
      (void)ty;
      if (!defined.count(name)) fail(entryTok, "signature without definition: " + name);
    }
    for (const auto& c : f.componentNames)
      if (!defined.count(c)) fail(entryTok, "#component names unknown function " + c);
    f.datatypes = table;
    return f;
  }
};

// --------------------------------------------------------------------------
// Prelude definitions injected into every synthesis input
// --------------------------------------------------------------------------

ExprPtr preludeNot() {
  return elam("b", ecase(evar("b"), {{pcon("True"), econ("False")},
                                     {pcon("False"), econ("True")}}));
}
ExprPtr preludeAnd() {
  return elam("a", elam("b", ecase(evar("a"), {{pcon("True"), evar("b")},
                                               {pcon("False"), econ("False")}})));
}
ExprPtr preludeOr() {
  return elam("a", elam("b", ecase(evar("a"), {{pcon("True"), econ("True")},
                                               {pcon("False"), evar("b")}})));
}

// --------------------------------------------------------------------------
// Printer
// --------------------------------------------------------------------------

bool isCharCon(const std::string& con) {
  return con.size() == 3 && con.front() == '\'' && con.back() == '\'';
}

std::string escapeCharP(char c, char quote) {
  if (c == '\n') return "\\n";
  if (c == '\t') return "\\t";
  if (c == '\\') return "\\\\";
  if (c == quote) return std::string("\\") + quote;
  return std::string(1, c);
}

std::optional<long> natOf(const ExprPtr& e) {
  long n = 0;
  const Expr* cur = e.get();
  while (true) {
    auto* c = std::get_if<ECon>(&cur->node);
    if (!c) return std::nullopt;
    if (c->con == "Z" && c->args.empty()) return n;
    if (c->con == "S" && c->args.size() == 1) {
      ++n;
      cur = c->args[0].get();
      continue;
    }
    return std::nullopt;
  }
}

std::optional<std::vector<ExprPtr>> listOf(const ExprPtr& e) {
  std::vector<ExprPtr> out;
  const Expr* cur = e.get();
  while (true) {
    auto* c = std::get_if<ECon>(&cur->node);
    if (!c) return std::nullopt;
    if (c->con == "[]" && c->args.empty()) return out;
    if (c->con == ":" && c->args.size() == 2) {
      out.push_back(c->args[0]);
      cur = c->args[1].get();
      continue;
    }
    return std::nullopt;
  }
}

std::string binderName(const std::string& b) {
  return b.rfind("_#", 0) == 0 ? "_" : b;
}

std::string patName(const std::string& b) { return binderName(b); }

std::string ppPattern(const PatPtr& p, bool atom);
std::string ppTop(const ExprPtr& e);
std::string ppCons(const ExprPtr& e);
std::string ppApp(const ExprPtr& e);
std::string ppAtom(const ExprPtr& e);

bool isLamOrCase(const ExprPtr& e) {
  return std::holds_alternative<ELam>(e->node) || std::holds_alternative<ECase>(e->node) ||
         std::holds_alternative<EBCase>(e->node);
}

bool isConsNode(const ExprPtr& e) {
  if (auto* c = std::get_if<ECon>(&e->node)) return c->con == ":" && !natOf(e) && !listOf(e);
  if (auto* b = std::get_if<EBCon>(&e->node)) return b->con == ":";
  return false;
}

std::string ppPattern(const PatPtr& p, bool atom) {
  if (auto* v = std::get_if<PVar>(&p->node)) return patName(v->name);
  const auto& c = std::get<PCon>(p->node);
  // nat / list / string sugar
  {
    long n = 0;
    const Pattern* cur = p.get();
    bool isNat = true;
    while (true) {
      auto* k = std::get_if<PCon>(&cur->node);
      if (!k) { isNat = false; break; }
      if (k->con == "Z" && k->args.empty()) break;
      if (k->con == "S" && k->args.size() == 1) { ++n; cur = k->args[0].get(); continue; }
      isNat = false; break;
    }
    if (isNat) return std::to_string(n);
  }
  if (isCharCon(c.con)) return "'" + escapeCharP(c.con[1], '\'') + "'";
  if (c.con == "[]") return "[]";
  if (c.con == "(,)") return "(" + ppPattern(c.args[0], false) + ", " + ppPattern(c.args[1], false) + ")";
  if (c.con == ":") {
    std::string s = ppPattern(c.args[0], true) + " : " + ppPattern(c.args[1], false);
    return atom ? "(" + s + ")" : s;
  }
  if (c.args.empty()) return c.con;
  std::string s = c.con;
  for (const auto& a : c.args) s += " " + ppPattern(a, true);
  return atom ? "(" + s + ")" : s;
}

std::string ppTop(const ExprPtr& e) {
  if (auto* l = std::get_if<ELam>(&e->node)) {
    std::vector<std::string> params;
    const Expr* cur = e.get();
    const ELam* lam = l;
    while (true) {
      params.push_back(binderName(lam->binder));
      cur = lam->body.get();
      lam = std::get_if<ELam>(&cur->node);
      if (!lam) break;
    }
    std::string s = "\\";
    for (size_t k = 0; k < params.size(); ++k) s += (k ? " " : "") + params[k];
    ExprPtr body = e;
    for (size_t k = 0; k < params.size(); ++k) body = std::get<ELam>(body->node).body;
    return s + " -> " + ppTop(body);
  }
  if (auto* c = std::get_if<ECase>(&e->node)) {
    std::string s = "case " + ppCons(c->scrut) + " of { ";
    for (size_t k = 0; k < c->branches.size(); ++k) {
      if (k) s += " ; ";
      s += ppPattern(c->branches[k].pat, false) + " -> " + ppTop(c->branches[k].body);
    }
    return s + " }";
  }
  if (auto* c = std::get_if<EBCase>(&e->node)) {
    std::string s = "case* " + ppCons(c->scrut) + " of { ";
    for (size_t k = 0; k < c->branches.size(); ++k) {
      const auto& br = c->branches[k];
      if (k) s += " ; ";
      s += ppPattern(br.pat, false) + " -> " + ppTop(br.body);
      s += " with " + (br.exitCond ? ppTop(br.exitCond) : std::string("?"));
      s += " by " + (br.recon ? ppTop(br.recon) : std::string("?"));
    }
    return s + " }";
  }
  return ppCons(e);
}

std::string ppCons(const ExprPtr& e) {
  if (isLamOrCase(e)) return "(" + ppTop(e) + ")";
  if (isConsNode(e)) {
    bool bidir = std::holds_alternative<EBCon>(e->node);
    const auto& args = bidir ? std::get<EBCon>(e->node).args : std::get<ECon>(e->node).args;
    std::string rhs = isLamOrCase(args[1]) ? "(" + ppTop(args[1]) + ")" : ppCons(args[1]);
    return ppApp(args[0]) + (bidir ? " :* " : " : ") + rhs;
  }
  return ppApp(e);
}

std::string ppApp(const ExprPtr& e) {
  if (auto* a = std::get_if<EApp>(&e->node)) {
    std::string fn = std::holds_alternative<EApp>(a->fn->node) ? ppApp(a->fn) : ppAtom(a->fn);
    return fn + " " + ppAtom(a->arg);
  }
  if (auto* c = std::get_if<ECon>(&e->node)) {
    if (!c->args.empty() && c->con != ":" && c->con != "(,)" && !natOf(e)) {
      std::string s = c->con;
      for (const auto& arg : c->args) s += " " + ppAtom(arg);
      return s;
    }
  }
  if (auto* b = std::get_if<EBCon>(&e->node)) {
    if (!b->args.empty() && b->con != ":" && b->con != "(,)") {
      std::string s = b->con + "*";
      for (const auto& arg : b->args) s += " " + ppAtom(arg);
      return s;
    }
  }
  if (auto* l = std::get_if<ELift>(&e->node)) return "!" + ppAtom(l->body);
  return ppAtom(e);
}

std::string ppValueForQuote(const ValPtr& v);

std::string ppAtom(const ExprPtr& e) {
  struct V {
    const ExprPtr& e;
    std::string operator()(const EVar& n) { return binderName(n.name); }
    std::string operator()(const ELam&) { return "(" + ppTop(e) + ")"; }
    std::string operator()(const EApp&) { return "(" + ppApp(e) + ")"; }
    std::string operator()(const ECon& n) {
      if (auto nat = natOf(e)) return std::to_string(*nat);
      if (isCharCon(n.con)) return "'" + escapeCharP(n.con[1], '\'') + "'";
      if (auto elems = listOf(e)) {
        bool allChars = !elems->empty() &&
                        std::all_of(elems->begin(), elems->end(), [](const ExprPtr& x) {
                          auto* c = std::get_if<ECon>(&x->node);
                          return c && isCharCon(c->con);
                        });
        if (allChars) {
          std::string s = "\"";
          for (const auto& x : *elems) s += escapeCharP(std::get<ECon>(x->node).con[1], '"');
          return s + "\"";
        }
        std::string s = "[";
        for (size_t k = 0; k < elems->size(); ++k) {
          if (k) s += ", ";
          s += ppTop((*elems)[k]);
        }
        return s + "]";
      }
      if (n.con == "(,)") return "(" + ppTop(n.args[0]) + ", " + ppTop(n.args[1]) + ")";
      if (n.args.empty()) return n.con;
      if (n.con == ":") return "(" + ppCons(e) + ")";  // improper cons chain
      return "(" + ppApp(e) + ")";                     // applied constructor
    }
    std::string operator()(const ECase&) { return "(" + ppTop(e) + ")"; }
    std::string operator()(const EBCon& n) {
      if (n.con == "[]") return "[]*";
      if (n.con == "(,)") return "(" + ppTop(n.args[0]) + ", " + ppTop(n.args[1]) + ")*";
      if (n.args.empty()) return n.con + "*";
      if (n.con == ":") return "(" + ppCons(e) + ")";
      return "(" + ppApp(e) + ")";
    }
    std::string operator()(const EBCase&) { return "(" + ppTop(e) + ")"; }
    std::string operator()(const ELift& n) { return "!" + ppAtom(n.body); }
    std::string operator()(const EHole& n) { return "?" + std::to_string(n.info->id); }
    std::string operator()(const EQuote& n) { return ppValueForQuote(n.v); }
  };
  return std::visit(V{e}, e->node);
}

ExprPtr foToExpr(const FOPtr& u) {
  std::vector<ExprPtr> args;
  args.reserve(u->args.size());
  for (const auto& a : u->args) args.push_back(foToExpr(a));
  return econ(u->con, std::move(args));
}

std::string ppValueForQuote(const ValPtr& v) {
  if (auto* f = std::get_if<VFO>(&v->node)) return ppAtom(foToExpr(f->u));
  if (std::holds_alternative<VClo>(v->node)) return "<closure>";
  return "<residual>";
}

}  // namespace

// --------------------------------------------------------------------------
// Public interface
// --------------------------------------------------------------------------

SpecFile parseSpec(const std::string& text) {
  Parser p;
  p.ts = lex(text);
  return p.parseFile();
}

FOPtr parseFOValue(const std::string& text, const DataDeclTable& datatypes) {
  Parser p;
  p.ts = lex(text);
  p.table = datatypes;
  FOPtr u = p.parseFOApp();
  if (!p.at(Tok::End)) fail(p.peek(), "trailing input after value");
  return u;
}

SynthesisInput toSynthesisInput(const SpecFile& file) {
  SynthesisInput in;
  in.datatypes = file.datatypes;
  in.typingEnv = file.signatures;
  in.entry = file.entry;
  in.examples = file.examples;
  in.components = file.componentNames;

  std::set<std::string> userNames;
  for (const auto& d : file.definitions) userNames.insert(d.name);

  struct P {
    const char* name;
    ExprPtr (*make)();
    TypePtr type;
  };
  const P prelude[] = {
      {"not", preludeNot, funType(tBool(), tBool())},
      {"and", preludeAnd, funType(tBool(), funType(tBool(), tBool()))},
      {"or", preludeOr, funType(tBool(), funType(tBool(), tBool()))},
  };
  for (const auto& p : prelude) {
    if (userNames.count(p.name)) continue;
    in.program.push_back(Definition{p.name, p.make()});
    in.typingEnv[p.name] = p.type;
    in.preludeNames.insert(p.name);
  }
  for (const auto& d : file.definitions) in.program.push_back(d);

  // Reachability from the entry expression; unreachable user definitions
  // become components automatically.
  std::map<std::string, std::set<std::string>> calls;
  for (const auto& d : in.program) {
    std::set<std::string> callees;
    for (const auto& v : freeVars(d.body)) {
      if (userNames.count(v) || in.preludeNames.count(v)) callees.insert(v);
    }
    calls[d.name] = std::move(callees);
  }
  std::set<std::string> reachable;
  std::vector<std::string> work;
  for (const auto& v : freeVars(file.entry))
    if (calls.count(v)) work.push_back(v);
  while (!work.empty()) {
    std::string n = work.back();
    work.pop_back();
    if (!reachable.insert(n).second) continue;
    for (const auto& m : calls[n]) work.push_back(m);
  }
  for (const auto& d : file.definitions)
    if (!reachable.count(d.name)) in.components.insert(d.name);

  return in;
}

std::string printExpr(const ExprPtr& e) { return ppTop(e); }

std::string printType(const TypePtr& t) { return showType(t); }

std::string printProgram(const std::vector<Definition>& defs) {
  for (const auto& d : defs) {
    std::vector<ExprPtr> holes;
    collectHoles(d.body, holes);
    if (!holes.empty()) throw UnfilledHole(std::get<EHole>(holes.front()->node).info->id);
  }
  std::string out;
  for (const auto& d : defs) {
    std::string line = d.name;
    ExprPtr body = d.body;
    while (auto* l = std::get_if<ELam>(&body->node)) {
      line += " " + binderName(l->binder);
      body = l->body;
    }
    out += line + " = " + ppTop(body) + "\n";
  }
  return out;
}

}  // namespace bx
