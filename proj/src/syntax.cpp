#include "specgen/syntax.hpp"

#include "specgen/errors.hpp"

#include <array>
#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

namespace specgen {
namespace {

enum class Tok {
  Ident,
  Int,
  Result,  // \result
  Old,     // \old
  Forall,  // \forall
  Exists,  // \exists
  Op,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Dot,
  Semi,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

// Longest match first.
constexpr std::array<std::string_view, 19> kOperators = {
    "<==>", "<==", "==>", "==", "!=", "<=", ">=", "&&", "||",
    "<",    ">",   "!",   "+",  "-",  "*",  "/",  "%",  ",", "="};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < text.size() && ident_char(text[i])) ++i;
      out.push_back({Tok::Ident, std::string(text.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i < text.size() && ident_start(text[i])) {
        throw SyntaxError(i, "operator", "malformed integer literal");
      }
      out.push_back({Tok::Int, std::string(text.substr(start, i - start)), start});
      continue;
    }
    if (c == '\\') {
      ++i;
      while (i < text.size() && ident_char(text[i])) ++i;
      auto word = text.substr(start, i - start);
      Tok kind;
      if (word == "\\result") {
        kind = Tok::Result;
      } else if (word == "\\old") {
        kind = Tok::Old;
      } else if (word == "\\forall") {
        kind = Tok::Forall;
      } else if (word == "\\exists") {
        kind = Tok::Exists;
      } else {
        throw SyntaxError(start, "\\result, \\old, \\forall or \\exists",
                          "unsupported JML keyword '" + std::string(word) + "'");
      }
      out.push_back({kind, std::string(word), start});
      continue;
    }
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", i++}); continue;
      case ')': out.push_back({Tok::RParen, ")", i++}); continue;
      case '[': out.push_back({Tok::LBracket, "[", i++}); continue;
      case ']': out.push_back({Tok::RBracket, "]", i++}); continue;
      case '.': out.push_back({Tok::Dot, ".", i++}); continue;
      case ';': out.push_back({Tok::Semi, ";", i++}); continue;
      default: break;
    }
    bool matched = false;
    for (auto op : kOperators) {
      if (text.substr(i).starts_with(op)) {
        out.push_back({Tok::Op, std::string(op), i});
        i += op.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw SyntaxError(i, "expression", std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", text.size()});
  return out;
}

std::optional<BinaryOp> binary_op(std::string_view t) {
  static constexpr std::array<std::pair<std::string_view, BinaryOp>, 16> table = {{
      {"<==>", BinaryOp::Equiv}, {"==>", BinaryOp::Implies}, {"<==", BinaryOp::RevImplies},
      {"||", BinaryOp::Or},      {"&&", BinaryOp::And},      {"==", BinaryOp::Eq},
      {"!=", BinaryOp::Ne},      {"<", BinaryOp::Lt},        {"<=", BinaryOp::Le},
      {">", BinaryOp::Gt},       {">=", BinaryOp::Ge},       {"+", BinaryOp::Add},
      {"-", BinaryOp::Sub},      {"*", BinaryOp::Mul},       {"/", BinaryOp::Div},
      {"%", BinaryOp::Mod},
  }};
  for (const auto &[text, op] : table) {
    if (text == t) return op;
  }
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ExprPtr expression() { return equivalence(); }

  const Token &peek() const { return toks_[pos_]; }
  const Token &next() { return toks_[pos_++]; }

  void expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) fail(std::string(what));
    ++pos_;
  }

  [[noreturn]] void fail(const std::string &expected) const {
    const auto &t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.offset, expected, "unexpected " + found);
  }

  bool at_op(std::string_view op) const { return peek().kind == Tok::Op && peek().text == op; }

 private:
  ExprPtr equivalence() {
    auto lhs = implication();
    while (at_op("<==>")) {
      ++pos_;
      lhs = build::bin(BinaryOp::Equiv, lhs, implication());
    }
    return lhs;
  }

  // ==> and <== share a level and associate to the right.
  ExprPtr implication() {
    auto lhs = disjunction();
    if (at_op("==>") || at_op("<==")) {
      auto op = *binary_op(next().text);
      return build::bin(op, lhs, implication());
    }
    return lhs;
  }

  ExprPtr disjunction() {
    auto lhs = conjunction();
    while (at_op("||")) {
      ++pos_;
      lhs = build::bin(BinaryOp::Or, lhs, conjunction());
    }
    return lhs;
  }

  ExprPtr conjunction() {
    auto lhs = equality();
    while (at_op("&&")) {
      ++pos_;
      lhs = build::bin(BinaryOp::And, lhs, equality());
    }
    return lhs;
  }

  ExprPtr equality() {
    auto lhs = relational();
    while (at_op("==") || at_op("!=")) {
      auto op = *binary_op(next().text);
      lhs = build::bin(op, lhs, relational());
    }
    return lhs;
  }

  ExprPtr relational() {
    auto lhs = additive();
    while (at_op("<") || at_op("<=") || at_op(">") || at_op(">=")) {
      auto op = *binary_op(next().text);
      lhs = build::bin(op, lhs, additive());
    }
    return lhs;
  }

  ExprPtr additive() {
    auto lhs = multiplicative();
    while (at_op("+") || at_op("-")) {
      auto op = *binary_op(next().text);
      lhs = build::bin(op, lhs, multiplicative());
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    auto lhs = unary();
    while (at_op("*") || at_op("/") || at_op("%")) {
      auto op = *binary_op(next().text);
      lhs = build::bin(op, lhs, unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at_op("!")) {
      ++pos_;
      return build::un(UnaryOp::Not, unary());
    }
    if (at_op("-")) {
      ++pos_;
      return build::un(UnaryOp::Neg, unary());
    }
    return postfix();
  }

  ExprPtr postfix() {
    auto base = primary();
    for (;;) {
      if (peek().kind == Tok::LBracket) {
        ++pos_;
        auto idx = expression();
        expect(Tok::RBracket, "']'");
        base = build::index(base, idx);
      } else if (peek().kind == Tok::Dot) {
        ++pos_;
        if (peek().kind != Tok::Ident) fail("field name");
        base = build::field(base, next().text);
      } else {
        return base;
      }
    }
  }

  ExprPtr primary() {
    const auto &t = peek();
    switch (t.kind) {
      case Tok::Int: {
        ++pos_;
        return build::lit(BigInt(t.text));
      }
      case Tok::Ident: {
        ++pos_;
        if (t.text == "true") return build::boolean(true);
        if (t.text == "false") return build::boolean(false);
        if (t.text == "null") return build::null();
        if (peek().kind == Tok::LParen) {
          throw SyntaxError(peek().offset, "operator",
                            "method calls are not supported ('" + t.text + "(')");
        }
        return build::var(t.text);
      }
      case Tok::Result: ++pos_; return build::result();
      case Tok::Old: {
        ++pos_;
        expect(Tok::LParen, "'('");
        auto inner = expression();
        expect(Tok::RParen, "')'");
        return build::old(inner);
      }
      case Tok::LParen: {
        ++pos_;
        if (peek().kind == Tok::Forall || peek().kind == Tok::Exists) return quantifier();
        auto inner = expression();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default: fail("expression");
    }
  }

  // After the opening parenthesis: \forall int v; range; body)
  ExprPtr quantifier() {
    auto kind = next().kind == Tok::Forall ? QuantKind::Forall : QuantKind::Exists;
    if (peek().kind != Tok::Ident || peek().text != "int") fail("'int'");
    ++pos_;
    if (peek().kind != Tok::Ident) fail("bound variable name");
    std::string name = next().text;
    if (at_op(",")) fail("';' (one bound variable per quantifier)");
    expect(Tok::Semi, "';'");
    auto range = expression();
    expect(Tok::Semi, "';' (quantifiers need a range and a body)");
    auto body = expression();
    expect(Tok::RParen, "')'");
    return build::quant(kind, std::move(name), range, body);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// --- printing ---------------------------------------------------------------

bool right_associative(BinaryOp op) { return precedence(op) == 2; }

class Printer {
 public:
  std::string take() { return out_.str(); }

  void print(const Expr &e) {
    std::visit([&](const auto &n) { print_node(n); }, e.node);
  }

 private:
  void print_wrapped(const Expr &e, bool parens) {
    if (parens) out_ << '(';
    print(e);
    if (parens) out_ << ')';
  }

  void print_node(const Quantifier &q) {
    out_ << '(' << to_string(q.kind) << " int " << q.var << "; ";
    print(*q.range);
    out_ << "; ";
    print(*q.body);
    out_ << ')';
  }

  void print_node(const Binary &b) {
    int p = precedence(b.op);
    int lp = precedence(*b.lhs);
    int rp = precedence(*b.rhs);
    bool right = right_associative(b.op);
    bool lparen = lp < p || (lp == p && right);
    bool rparen = rp < p || (rp == p && !right);
    if (rp == p && right) {
      // Mixed ==> / <== chains keep their grouping explicit.
      rparen = std::get<Binary>(b.rhs->node).op != b.op;
    }
    print_wrapped(*b.lhs, lparen);
    out_ << ' ' << to_string(b.op) << ' ';
    print_wrapped(*b.rhs, rparen);
  }

  void print_node(const Unary &u) {
    out_ << to_string(u.op);
    // `--x` would read as a decrement.
    const auto *inner = std::get_if<Unary>(&u.operand->node);
    bool double_neg = u.op == UnaryOp::Neg && inner && inner->op == UnaryOp::Neg;
    print_wrapped(*u.operand, double_neg || precedence(*u.operand) < kUnaryPrecedence);
  }

  void print_node(const Var &v) { out_ << v.name; }
  void print_node(const IntLit &l) { out_ << l.value; }
  void print_node(const BoolLit &l) { out_ << (l.value ? "true" : "false"); }
  void print_node(const NullLit &) { out_ << "null"; }

  void print_node(const ArrayIndex &a) {
    print_wrapped(*a.base, precedence(*a.base) < kPrimaryPrecedence);
    out_ << '[';
    print(*a.index);
    out_ << ']';
  }

  void print_node(const FieldAccess &f) {
    print_wrapped(*f.base, precedence(*f.base) < kPrimaryPrecedence);
    out_ << '.' << f.field;
  }

  void print_node(const ResultRef &) { out_ << "\\result"; }

  void print_node(const OldRef &o) {
    out_ << "\\old(";
    print(*o.inner);
    out_ << ')';
  }

  std::ostringstream out_;
};

std::string_view type_name(ValueType t) {
  switch (t) {
    case ValueType::Bool: return "boolean";
    case ValueType::Int: return "int";
    case ValueType::Ref: return "reference";
    case ValueType::Unknown: return "unknown";
  }
  return "?";
}

void require_not(ValueType actual, ValueType forbidden, const Expr &where) {
  if (actual == forbidden) {
    throw TypeMismatch("operand of type " + std::string(type_name(actual)) + " not allowed in '" +
                       render_expr(where) + "'");
  }
}

}  // namespace

ExprPtr parse_expression(std::string_view text) {
  Parser p(lex(text));
  auto e = p.expression();
  if (p.peek().kind != Tok::End) p.fail("end of expression");
  return e;
}

SpecClause parse_clause(std::string_view text) {
  std::size_t base = 0;
  auto skip_ws = [&] {
    while (base < text.size() && std::isspace(static_cast<unsigned char>(text[base]))) ++base;
  };
  skip_ws();
  if (text.substr(base).starts_with("//@")) {
    base += 3;
    skip_ws();
  }
  std::size_t kw_end = base;
  while (kw_end < text.size() && ident_char(text[kw_end])) ++kw_end;
  auto kind = clause_kind_from_keyword(text.substr(base, kw_end - base));
  if (!kind) {
    throw SyntaxError(base, "requires, ensures, maintaining or decreases",
                      "missing or unknown clause keyword");
  }

  std::vector<Token> toks;
  try {
    toks = lex(text.substr(kw_end));
  } catch (const SyntaxError &e) {
    throw SyntaxError(kw_end + e.offset(), e.expected(), "lexical error");
  }
  for (auto &t : toks) t.offset += kw_end;

  Parser p(std::move(toks));
  auto expr = p.expression();
  p.expect(Tok::Semi, "';'");
  if (p.peek().kind != Tok::End) p.fail("end of clause");

  check_clause_type(*kind, *expr);
  return SpecClause{*kind, expr, {}, {}};
}

std::string render_expr(const Expr &e) {
  Printer p;
  p.print(e);
  return p.take();
}

std::string render_clause(ClauseKind kind, const Expr &e) {
  return "//@ " + std::string(to_string(kind)) + " " + render_expr(e) + ";";
}

std::string render_clause(const SpecClause &clause) { return render_clause(clause.kind, *clause.expr); }

ValueType infer_type(const Expr &e) {
  return std::visit(
      [&](const auto &n) -> ValueType {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Quantifier>) {
          require_not(infer_type(*n.range), ValueType::Int, e);
          require_not(infer_type(*n.body), ValueType::Int, e);
          return ValueType::Bool;
        } else if constexpr (std::is_same_v<T, Binary>) {
          auto l = infer_type(*n.lhs);
          auto r = infer_type(*n.rhs);
          if (is_logical(n.op)) {
            require_not(l, ValueType::Int, e);
            require_not(r, ValueType::Int, e);
            require_not(l, ValueType::Ref, e);
            require_not(r, ValueType::Ref, e);
            return ValueType::Bool;
          }
          if (n.op == BinaryOp::Eq || n.op == BinaryOp::Ne) {
            if (l != ValueType::Unknown && r != ValueType::Unknown && l != r) {
              bool ref_ok = (l == ValueType::Ref || r == ValueType::Ref);
              if (!ref_ok) {
                throw TypeMismatch("cannot compare " + std::string(type_name(l)) + " with " +
                                   std::string(type_name(r)) + " in '" + render_expr(e) + "'");
              }
            }
            return ValueType::Bool;
          }
          for (auto t : {l, r}) {
            require_not(t, ValueType::Bool, e);
            require_not(t, ValueType::Ref, e);
          }
          return is_comparison(n.op) ? ValueType::Bool : ValueType::Int;
        } else if constexpr (std::is_same_v<T, Unary>) {
          auto t = infer_type(*n.operand);
          if (n.op == UnaryOp::Not) {
            require_not(t, ValueType::Int, e);
            return ValueType::Bool;
          }
          require_not(t, ValueType::Bool, e);
          return ValueType::Int;
        } else if constexpr (std::is_same_v<T, IntLit>) {
          return ValueType::Int;
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return ValueType::Bool;
        } else if constexpr (std::is_same_v<T, NullLit>) {
          return ValueType::Ref;
        } else if constexpr (std::is_same_v<T, ArrayIndex>) {
          auto bt = infer_type(*n.base);
          require_not(bt, ValueType::Int, e);
          require_not(bt, ValueType::Bool, e);
          auto it = infer_type(*n.index);
          require_not(it, ValueType::Bool, e);
          return ValueType::Int;
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          infer_type(*n.base);
          return n.field == "length" ? ValueType::Int : ValueType::Unknown;
        } else if constexpr (std::is_same_v<T, OldRef>) {
          return infer_type(*n.inner);
        } else {
          return ValueType::Unknown;
        }
      },
      e.node);
}

void check_clause_type(ClauseKind kind, const Expr &e) {
  auto t = infer_type(e);
  if (kind == ClauseKind::Decreases) {
    if (t == ValueType::Bool || t == ValueType::Ref) {
      throw TypeMismatch("decreases clause needs an integer expression, got " +
                         std::string(type_name(t)));
    }
  } else if (t == ValueType::Int || t == ValueType::Ref) {
    throw TypeMismatch(std::string(to_string(kind)) + " clause needs a boolean expression, got " +
                       std::string(type_name(t)));
  }
}

}  // namespace specgen
