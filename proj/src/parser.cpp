#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include "covclose/frontend.hpp"

namespace covclose {

std::string Diagnostic::format() const {
  std::ostringstream out;
  out << file << ':' << loc.line << ':' << loc.col << ": " << message;
  return out.str();
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  std::string text;
  for (const auto& d : diagnostics) {
    if (!text.empty()) text += '\n';
    text += d.format();
  }
  return text;
}

}  // namespace

FrontendError::FrontendError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace {

enum class Tok : std::uint8_t {
  End, Ident, Int,
  KwState, KwInput, KwFunc, KwStep, KwIn, KwBool, KwInt32, KwIf, KwElse, KwWhile,
  KwBound, KwCall, KwAssume, KwSkip, KwTrue, KwFalse,
  LBrace, RBrace, LParen, RParen, LBracket, RBracket, Semi, Comma,
  Assign, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, Percent, Bang, AndAnd, OrOr,
};

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  std::int64_t int_value = 0;
  SourceLoc loc;
};

struct SyntaxError {
  SourceLoc loc;
  std::string message;
};

Tok keyword(std::string_view word) {
  static constexpr std::pair<std::string_view, Tok> kTable[] = {
      {"state", Tok::KwState}, {"input", Tok::KwInput},   {"func", Tok::KwFunc},
      {"step", Tok::KwStep},   {"in", Tok::KwIn},         {"bool", Tok::KwBool},
      {"int32", Tok::KwInt32}, {"if", Tok::KwIf},         {"else", Tok::KwElse},
      {"while", Tok::KwWhile}, {"bound", Tok::KwBound},   {"call", Tok::KwCall},
      {"assume", Tok::KwAssume}, {"skip", Tok::KwSkip},   {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},
  };
  for (const auto& [text, tok] : kTable) {
    if (text == word) return tok;
  }
  return Tok::Ident;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_trivia();
    Token t;
    t.loc = {line_, col_};
    if (pos_ >= src_.size()) return t;
    const std::size_t start = pos_;
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        advance();
      }
      t.text = src_.substr(start, pos_ - start);
      t.kind = keyword(t.text);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      t.text = src_.substr(start, pos_ - start);
      t.kind = Tok::Int;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.int_value);
      if (ec != std::errc() || t.int_value > (std::int64_t{1} << 31)) {
        throw SyntaxError{t.loc, "integer literal '" + std::string(t.text) + "' out of range"};
      }
      return t;
    }
    auto two = [&](char second) { return pos_ + 1 < src_.size() && src_[pos_ + 1] == second; };
    auto emit = [&](Tok kind, std::size_t len) {
      for (std::size_t i = 0; i < len; ++i) advance();
      t.kind = kind;
      t.text = src_.substr(start, len);
      return t;
    };
    switch (c) {
      case '{': return emit(Tok::LBrace, 1);
      case '}': return emit(Tok::RBrace, 1);
      case '(': return emit(Tok::LParen, 1);
      case ')': return emit(Tok::RParen, 1);
      case '[': return emit(Tok::LBracket, 1);
      case ']': return emit(Tok::RBracket, 1);
      case ';': return emit(Tok::Semi, 1);
      case ',': return emit(Tok::Comma, 1);
      case '+': return emit(Tok::Plus, 1);
      case '-': return emit(Tok::Minus, 1);
      case '*': return emit(Tok::Star, 1);
      case '/': return emit(Tok::Slash, 1);
      case '%': return emit(Tok::Percent, 1);
      case '=': return two('=') ? emit(Tok::Eq, 2) : emit(Tok::Assign, 1);
      case '!': return two('=') ? emit(Tok::Ne, 2) : emit(Tok::Bang, 1);
      case '<': return two('=') ? emit(Tok::Le, 2) : emit(Tok::Lt, 1);
      case '>': return two('=') ? emit(Tok::Ge, 2) : emit(Tok::Gt, 1);
      case '&':
        if (two('&')) return emit(Tok::AndAnd, 2);
        break;
      case '|':
        if (two('|')) return emit(Tok::OrOr, 2);
        break;
      default:
        break;
    }
    throw SyntaxError{t.loc, std::string("unexpected character '") + c + "'"};
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        const SourceLoc open{line_, col_};
        advance();
        advance();
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) advance();
        if (pos_ + 1 >= src_.size()) throw SyntaxError{open, "unterminated comment"};
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { tok_ = lexer_.next(); }

  Program program() {
    Program p;
    while (tok_.kind != Tok::End) {
      switch (tok_.kind) {
        case Tok::KwState: p.states.push_back(state_decl()); break;
        case Tok::KwInput: p.inputs.push_back(input_decl()); break;
        case Tok::KwFunc:
        case Tok::KwStep: {
          const bool is_entry = tok_.kind == Tok::KwStep;
          const SourceLoc loc = tok_.loc;
          bump();
          Function f;
          f.loc = loc;
          f.name = ident("function name");
          f.body = block();
          if (is_entry) {
            if (!p.entry.empty()) {
              throw SyntaxError{loc, "more than one step function ('" + p.entry + "' and '" + f.name + "')"};
            }
            p.entry = f.name;
          }
          p.functions.push_back(std::move(f));
          break;
        }
        default:
          fail("expected a declaration ('state', 'input', 'func' or 'step'), found " + describe(tok_));
      }
    }
    return p;
  }

 private:
  [[noreturn]] void fail(std::string message) const { throw SyntaxError{tok_.loc, std::move(message)}; }

  void bump() { tok_ = lexer_.next(); }

  bool accept(Tok kind) {
    if (tok_.kind != kind) return false;
    bump();
    return true;
  }

  void expect(Tok kind, std::string_view what) {
    if (tok_.kind != kind) fail("expected " + std::string(what) + ", found " + describe(tok_));
    bump();
  }

  std::string ident(std::string_view what) {
    if (tok_.kind != Tok::Ident) fail("expected " + std::string(what) + ", found " + describe(tok_));
    std::string name(tok_.text);
    bump();
    return name;
  }

  Type type() {
    if (accept(Tok::KwBool)) return Type::Bool;
    if (accept(Tok::KwInt32)) return Type::Int32;
    fail("expected a type ('bool' or 'int32'), found " + describe(tok_));
  }

  std::int64_t signed_int() {
    const bool negative = accept(Tok::Minus);
    if (tok_.kind != Tok::Int) fail("expected an integer constant, found " + describe(tok_));
    const std::int64_t v = negative ? -tok_.int_value : tok_.int_value;
    if (v > std::numeric_limits<std::int32_t>::max()) fail("integer constant out of int32 range");
    bump();
    return v;
  }

  std::int32_t constant_of(Type t) {
    if (t == Type::Bool) {
      if (accept(Tok::KwTrue)) return 1;
      if (accept(Tok::KwFalse)) return 0;
      fail("expected 'true' or 'false', found " + describe(tok_));
    }
    return static_cast<std::int32_t>(signed_int());
  }

  StateDecl state_decl() {
    StateDecl d;
    d.loc = tok_.loc;
    bump();
    d.type = type();
    d.name = ident("state variable name");
    expect(Tok::Assign, "'=' and an initial value");
    d.init = constant_of(d.type);
    expect(Tok::Semi, "';'");
    return d;
  }

  InputDecl input_decl() {
    InputDecl d;
    d.loc = tok_.loc;
    bump();
    d.type = type();
    d.name = ident("input name");
    if (d.type == Type::Bool) {
      d.lo = 0;
      d.hi = 1;
      if (tok_.kind == Tok::KwIn) fail("boolean inputs take no range");
    } else {
      d.lo = std::numeric_limits<std::int32_t>::min();
      d.hi = std::numeric_limits<std::int32_t>::max();
      if (accept(Tok::KwIn)) {
        expect(Tok::LBracket, "'['");
        const SourceLoc range_loc = tok_.loc;
        d.lo = static_cast<std::int32_t>(signed_int());
        expect(Tok::Comma, "','");
        d.hi = static_cast<std::int32_t>(signed_int());
        expect(Tok::RBracket, "']'");
        if (d.lo > d.hi) throw SyntaxError{range_loc, "empty input range for '" + d.name + "'"};
      }
    }
    expect(Tok::Semi, "';'");
    return d;
  }

  std::vector<Stmt> block() {
    const SourceLoc open = tok_.loc;
    expect(Tok::LBrace, "'{'");
    std::vector<Stmt> stmts;
    while (tok_.kind != Tok::RBrace) {
      if (tok_.kind == Tok::End) throw SyntaxError{open, "unterminated block"};
      stmts.push_back(statement());
    }
    if (stmts.empty()) throw SyntaxError{open, "empty block (use 'skip;')"};
    bump();
    return stmts;
  }

  Stmt statement() {
    Stmt s;
    s.loc = tok_.loc;
    switch (tok_.kind) {
      case Tok::KwSkip:
        bump();
        s.kind = Stmt::Kind::Skip;
        expect(Tok::Semi, "';'");
        return s;
      case Tok::KwCall:
        bump();
        s.kind = Stmt::Kind::Call;
        s.name = ident("function name");
        expect(Tok::Semi, "';'");
        return s;
      case Tok::KwAssume:
        bump();
        s.kind = Stmt::Kind::Assume;
        expect(Tok::LParen, "'('");
        s.expr = expression();
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return s;
      case Tok::KwIf:
        bump();
        s.kind = Stmt::Kind::If;
        expect(Tok::LParen, "'('");
        s.expr = expression();
        expect(Tok::RParen, "')'");
        s.body = block();
        if (accept(Tok::KwElse)) {
          if (tok_.kind == Tok::KwIf) {
            s.else_body.push_back(statement());
          } else {
            s.else_body = block();
          }
        }
        return s;
      case Tok::KwWhile: {
        bump();
        s.kind = Stmt::Kind::While;
        expect(Tok::LParen, "'('");
        s.expr = expression();
        expect(Tok::RParen, "')'");
        expect(Tok::KwBound, "'bound' annotation");
        const std::int64_t n = signed_int();
        if (n < 0) fail("loop bound must be non-negative");
        s.bound = static_cast<std::uint32_t>(n);
        s.body = block();
        return s;
      }
      case Tok::Ident:
        s.kind = Stmt::Kind::Assign;
        s.name = std::string(tok_.text);
        bump();
        expect(Tok::Assign, "'='");
        s.expr = expression();
        expect(Tok::Semi, "';'");
        return s;
      default:
        fail("expected a statement, found " + describe(tok_));
    }
  }

  // Precedence climbing, lowest first: || && (== !=) (< <= > >=) (+ -) (* / %)
  Expr expression() { return binary_level(0); }

  static int precedence(Tok t) {
    switch (t) {
      case Tok::OrOr: return 0;
      case Tok::AndAnd: return 1;
      case Tok::Eq: case Tok::Ne: return 2;
      case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge: return 3;
      case Tok::Plus: case Tok::Minus: return 4;
      case Tok::Star: case Tok::Slash: case Tok::Percent: return 5;
      default: return -1;
    }
  }

  static BinaryOp to_op(Tok t) {
    switch (t) {
      case Tok::OrOr: return BinaryOp::Or;
      case Tok::AndAnd: return BinaryOp::And;
      case Tok::Eq: return BinaryOp::Eq;
      case Tok::Ne: return BinaryOp::Ne;
      case Tok::Lt: return BinaryOp::Lt;
      case Tok::Le: return BinaryOp::Le;
      case Tok::Gt: return BinaryOp::Gt;
      case Tok::Ge: return BinaryOp::Ge;
      case Tok::Plus: return BinaryOp::Add;
      case Tok::Minus: return BinaryOp::Sub;
      case Tok::Star: return BinaryOp::Mul;
      case Tok::Slash: return BinaryOp::Div;
      default: return BinaryOp::Mod;
    }
  }

  Expr binary_level(int level) {
    if (level > 5) return unary();
    Expr lhs = binary_level(level + 1);
    while (precedence(tok_.kind) == level) {
      const SourceLoc loc = tok_.loc;
      const BinaryOp op = to_op(tok_.kind);
      bump();
      Expr rhs = binary_level(level + 1);
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs), loc);
    }
    return lhs;
  }

  Expr unary() {
    const SourceLoc loc = tok_.loc;
    if (accept(Tok::Minus)) {
      if (tok_.kind == Tok::Int) {
        const std::int64_t v = -tok_.int_value;
        bump();
        return Expr::constant(static_cast<std::int32_t>(v), Type::Int32, loc);
      }
      return Expr::unary(UnaryOp::Neg, unary(), loc);
    }
    if (accept(Tok::Bang)) return Expr::unary(UnaryOp::Not, unary(), loc);
    return primary();
  }

  Expr primary() {
    const SourceLoc loc = tok_.loc;
    switch (tok_.kind) {
      case Tok::Int: {
        if (tok_.int_value > std::numeric_limits<std::int32_t>::max()) {
          fail("integer literal out of int32 range");
        }
        const auto v = static_cast<std::int32_t>(tok_.int_value);
        bump();
        return Expr::constant(v, Type::Int32, loc);
      }
      case Tok::KwTrue:
        bump();
        return Expr::constant(1, Type::Bool, loc);
      case Tok::KwFalse:
        bump();
        return Expr::constant(0, Type::Bool, loc);
      case Tok::Ident: {
        Expr e = Expr::variable(std::string(tok_.text), loc);
        bump();
        return e;
      }
      case Tok::LParen: {
        bump();
        Expr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        fail("expected an expression, found " + describe(tok_));
    }
  }

  Lexer lexer_;
  Token tok_;
};

}  // namespace

Program parse(std::string_view source, std::string file) {
  Program program;
  try {
    Parser parser(source);
    program = parser.program();
  } catch (const SyntaxError& e) {
    throw FrontendError({Diagnostic{file, e.loc, e.message}});
  }
  program.file = file;
  auto diagnostics = check(program);
  if (!diagnostics.empty()) throw FrontendError(std::move(diagnostics));
  return program;
}

Program parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FrontendError({Diagnostic{path, {}, "cannot open file"}});
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path);
}

}  // namespace covclose
