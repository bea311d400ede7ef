#include "generators.hpp"

#include "specgen/expr.hpp"
#include "specgen/syntax.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#ifndef SPECGEN_FIXTURE_DIR
#define SPECGEN_FIXTURE_DIR "tests/fixtures"
#endif

namespace specgen::testing {

using namespace specgen::build;

namespace {

const std::vector<std::string> kIntVars = {"x", "y", "n", "i", "j"};

}  // namespace

// --- clause generator ----------------------------------------------------------

int ClauseGenerator::pick(int n) { return static_cast<int>(uniform_index(rng_, static_cast<std::uint64_t>(n))); }

bool ClauseGenerator::chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

ExprPtr ClauseGenerator::int_leaf() {
  int choice = pick(10);
  if (choice < 4) {
    if (!bound_vars_.empty() && chance(0.5)) return var(bound_vars_[pick(static_cast<int>(bound_vars_.size()))]);
    return var(kIntVars[pick(static_cast<int>(kIntVars.size()))]);
  }
  if (choice < 6) return lit(pick(6));
  if (choice < 7) return field(var("a"), "length");
  if (choice < 8) {
    std::string idx = bound_vars_.empty() ? kIntVars[pick(static_cast<int>(kIntVars.size()))] : bound_vars_.back();
    return index(var("a"), var(idx));
  }
  if (choice < 9 && in_post_ && opts_.allow_result) return result();
  if (in_post_ && opts_.allow_old) return old(var(kIntVars[pick(static_cast<int>(kIntVars.size()))]));
  return lit(pick(6));
}

ExprPtr ClauseGenerator::int_expr(int depth) {
  if (depth <= 0 || chance(0.4)) return int_leaf();
  int choice = pick(opts_.allow_division ? 9 : 7);
  switch (choice) {
    case 0:
    case 1:
    case 2: return bin(BinaryOp::Add, int_expr(depth - 1), int_expr(depth - 1));
    case 3:
    case 4: return bin(BinaryOp::Sub, int_expr(depth - 1), int_expr(depth - 1));
    case 5: return bin(BinaryOp::Mul, int_leaf(), int_leaf());
    case 6: return un(UnaryOp::Neg, int_leaf());
    case 7: return bin(BinaryOp::Div, int_expr(depth - 1), int_leaf());
    default: return bin(BinaryOp::Mod, int_expr(depth - 1), int_leaf());
  }
}

ExprPtr ClauseGenerator::bound_expr() {
  switch (pick(5)) {
    case 0: return lit(pick(opts_.bound_limit / 2 + 1));
    case 1: return var(kIntVars[pick(static_cast<int>(kIntVars.size()))]);
    case 2: return field(var("a"), "length");
    case 3: return bin(BinaryOp::Add, var(kIntVars[pick(static_cast<int>(kIntVars.size()))]), lit(1));
    default: return bin(BinaryOp::Sub, var(kIntVars[pick(static_cast<int>(kIntVars.size()))]), lit(1));
  }
}

ExprPtr ClauseGenerator::quantifier(int depth) {
  std::string v = "q" + std::to_string(next_quant_++);
  auto lo = bound_expr();
  auto hi = bound_expr();
  ExprPtr range;
  switch (pick(4)) {
    case 0: range = bin(BinaryOp::And, bin(BinaryOp::Le, lo, var(v)), bin(BinaryOp::Lt, var(v), hi)); break;
    case 1: range = bin(BinaryOp::And, bin(BinaryOp::Lt, lo, var(v)), bin(BinaryOp::Le, var(v), hi)); break;
    case 2: range = bin(BinaryOp::And, bin(BinaryOp::Ge, var(v), lo), bin(BinaryOp::Gt, hi, var(v))); break;
    default: range = bin(BinaryOp::And, bin(BinaryOp::Le, lo, var(v)), bin(BinaryOp::Le, var(v), hi)); break;
  }
  bound_vars_.push_back(v);
  auto body = boolean_expr(depth - 1);
  bound_vars_.pop_back();
  return quant(chance(0.5) ? QuantKind::Forall : QuantKind::Exists, v, range, body);
}

ExprPtr ClauseGenerator::boolean_expr(int depth) {
  static const BinaryOp kCmp[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
  static const BinaryOp kLogic[] = {BinaryOp::And, BinaryOp::Or, BinaryOp::Implies, BinaryOp::RevImplies,
                                    BinaryOp::Equiv};
  if (depth <= 0) {
    int c = pick(10);
    if (c < 7) return bin(kCmp[pick(6)], int_leaf(), int_leaf());
    if (c < 8) return boolean(chance(0.5));
    return bin(chance(0.5) ? BinaryOp::Ne : BinaryOp::Eq, var("a"), null());
  }
  int c = pick(10);
  if (c < 4) return bin(kCmp[pick(6)], int_expr(depth - 1), int_expr(depth - 1));
  if (c < 7) return bin(kLogic[pick(5)], boolean_expr(depth - 1), boolean_expr(depth - 1));
  if (c < 8) return un(UnaryOp::Not, boolean_expr(depth - 1));
  if (bound_vars_.size() < 2) return quantifier(depth);
  return bin(kCmp[pick(6)], int_expr(depth - 1), int_expr(depth - 1));
}

SpecClause ClauseGenerator::clause_of_kind(ClauseKind kind) {
  in_post_ = kind == ClauseKind::Ensures;
  next_quant_ = 0;
  SpecClause c;
  c.kind = kind;
  c.expr = kind == ClauseKind::Decreases ? int_expr(opts_.max_depth) : boolean_expr(opts_.max_depth);
  c.anchor = anchor_for(kind);
  c.id = make_clause_id(c.anchor, kind, 0);
  in_post_ = false;
  return c;
}

SpecClause ClauseGenerator::clause() {
  static const ClauseKind kKinds[] = {ClauseKind::Requires, ClauseKind::Ensures, ClauseKind::Maintaining,
                                      ClauseKind::Decreases};
  int c = pick(10);
  return clause_of_kind(kKinds[c < 3 ? 0 : c < 6 ? 1 : c < 9 ? 2 : 3]);
}

ProgramAnchor anchor_for(ClauseKind kind) {
  if (kind == ClauseKind::Maintaining || kind == ClauseKind::Decreases) return ProgramAnchor{"m", 0};
  return ProgramAnchor{"m", std::nullopt};
}

// --- traces --------------------------------------------------------------------

namespace {

Bindings random_bindings(std::mt19937_64 &rng) {
  auto draw = [&](int lo, int hi) { return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1))); };
  Bindings b;
  for (const auto &v : kIntVars) b[v] = BigInt(draw(-3, 10));
  if (draw(0, 9) == 0) {
    b["a"] = NullValue{};
  } else {
    IntArray arr;
    int len = draw(0, 6);
    for (int k = 0; k < len; ++k) arr.push_back(BigInt(draw(-5, 10)));
    b["a"] = arr;
  }
  return b;
}

}  // namespace

std::vector<TraceRecord> random_trace(std::mt19937_64 &rng, int records) {
  std::vector<TraceRecord> out;
  for (int k = 0; k < records; ++k) {
    TraceRecord r;
    auto phase = uniform_index(rng, 4);
    r.bindings = random_bindings(rng);
    if (phase == 0) {
      r.anchor = ProgramAnchor{"m", std::nullopt};
      r.phase = TracePhase::Pre;
    } else if (phase == 1) {
      r.anchor = ProgramAnchor{"m", std::nullopt};
      r.phase = TracePhase::Post;
      r.result = BigInt(static_cast<int>(uniform_index(rng, 16)) - 5);
      r.old = random_bindings(rng);
    } else {
      r.anchor = ProgramAnchor{"m", 0};
      r.phase = TracePhase::Iter;
    }
    out.push_back(std::move(r));
  }
  return out;
}

// --- token-scan site count -----------------------------------------------------

int count_sites_by_tokens(const std::string &text) {
  static const std::vector<std::string> kOps = {"<==>", "==>", "<==", "&&", "||", "<=", ">=", "==", "!=",
                                                "<",    ">",   "+",   "-",  "*",  "/",  "%",  "!",  "(",
                                                ")",    "[",   "]",   ";",  ".",  ","};
  static const std::vector<std::string> kSites = {"<==>", "==>", "<==", "&&", "||", "<=", ">=", "==", "!=", "<", ">"};
  int count = 0;
  bool operand_before = false;  // previous token ends an operand
  std::size_t pos = text.find("//@") == 0 ? 3 : 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    if (c == '\\') {
      std::size_t end = pos + 1;
      while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end]))) ++end;
      std::string word = text.substr(pos, end - pos);
      if (word == "\\forall" || word == "\\exists") ++count;
      operand_before = word == "\\result";
      pos = end;
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos;
      while (end < text.size() && (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_')) ++end;
      std::string word = text.substr(pos, end - pos);
      // Clause keyword and the `int` of a quantifier declaration are not operands.
      operand_before = !(word == "requires" || word == "ensures" || word == "maintaining" || word == "decreases" ||
                         word == "int");
      pos = end;
      continue;
    }
    std::string op;
    for (const auto &candidate : kOps) {
      if (text.compare(pos, candidate.size(), candidate) == 0) {
        op = candidate;
        break;
      }
    }
    if (op.empty()) throw std::runtime_error("unexpected character in clause text: " + text);
    if (std::find(kSites.begin(), kSites.end(), op) != kSites.end()) ++count;
    if ((op == "+" || op == "-") && operand_before) ++count;
    operand_before = op == ")" || op == "]";
    pos += op.size();
  }
  return count;
}

// --- brute-force family -------------------------------------------------------

namespace {

struct Mutant {
  ExprPtr expr;
  std::array<int, 4> counts{};
};

std::array<int, 4> add(std::array<int, 4> a, const std::array<int, 4> &b) {
  for (int k = 0; k < 4; ++k) a[k] += b[k];
  return a;
}

struct Alternative {
  BinaryOp op;
  int shift;  // 0, -1 (l - 1), +1 (l + 1)
};

// The mutation operator rows, written out independently of the library's operator table.
std::vector<Alternative> table_one(BinaryOp op) {
  switch (op) {
    case BinaryOp::And: return {{BinaryOp::Or, 0}};
    case BinaryOp::Or: return {{BinaryOp::And, 0}};
    case BinaryOp::Equiv: return {{BinaryOp::RevImplies, 0}, {BinaryOp::Implies, 0}};
    case BinaryOp::Implies: return {{BinaryOp::RevImplies, 0}};
    case BinaryOp::RevImplies: return {{BinaryOp::Implies, 0}};
    case BinaryOp::Le: return {{BinaryOp::Lt, 0}, {BinaryOp::Le, -1}};
    case BinaryOp::Ge: return {{BinaryOp::Gt, 0}, {BinaryOp::Ge, +1}};
    case BinaryOp::Lt: return {{BinaryOp::Le, 0}};
    case BinaryOp::Gt: return {{BinaryOp::Ge, 0}};
    case BinaryOp::Eq: return {{BinaryOp::Ne, 0}};
    case BinaryOp::Ne: return {{BinaryOp::Eq, 0}};
    case BinaryOp::Add: return {{BinaryOp::Sub, 0}};
    case BinaryOp::Sub: return {{BinaryOp::Add, 0}};
    default: return {};
  }
}

int kind_index(BinaryOp op) {
  switch (op) {
    case BinaryOp::And:
    case BinaryOp::Or:
    case BinaryOp::Equiv:
    case BinaryOp::Implies:
    case BinaryOp::RevImplies: return 1;
    case BinaryOp::Le:
    case BinaryOp::Ge:
    case BinaryOp::Lt:
    case BinaryOp::Gt:
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 2;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 3;
    default: return -1;
  }
}

std::vector<Mutant> mutants(const ExprPtr &e, const MutationKindSet &kinds) {
  auto enabled = [&](int k) { return kinds.contains(static_cast<MutationKind>(k)); };
  return std::visit(
      [&](const auto &n) -> std::vector<Mutant> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Quantifier>) {
          std::vector<Mutant> out;
          std::vector<QuantKind> ks = {n.kind};
          if (enabled(0)) ks.push_back(n.kind == QuantKind::Forall ? QuantKind::Exists : QuantKind::Forall);
          for (const auto &r : mutants(n.range, kinds)) {
            for (const auto &b : mutants(n.body, kinds)) {
              for (std::size_t i = 0; i < ks.size(); ++i) {
                auto counts = add(r.counts, b.counts);
                if (i) ++counts[0];
                out.push_back({quant(ks[i], n.var, r.expr, b.expr), counts});
              }
            }
          }
          return out;
        } else if constexpr (std::is_same_v<T, Binary>) {
          std::vector<Mutant> out;
          int k = kind_index(n.op);
          std::vector<Alternative> alts = {{n.op, 0}};
          if (k >= 0 && enabled(k)) {
            for (const auto &a : table_one(n.op)) alts.push_back(a);
          }
          for (const auto &l : mutants(n.lhs, kinds)) {
            for (const auto &r : mutants(n.rhs, kinds)) {
              for (std::size_t i = 0; i < alts.size(); ++i) {
                auto counts = add(l.counts, r.counts);
                if (i) ++counts[k];
                ExprPtr lhs = l.expr;
                if (alts[i].shift < 0) lhs = bin(BinaryOp::Sub, lhs, lit(1));
                if (alts[i].shift > 0) lhs = bin(BinaryOp::Add, lhs, lit(1));
                out.push_back({bin(alts[i].op, lhs, r.expr), counts});
              }
            }
          }
          return out;
        } else if constexpr (std::is_same_v<T, Unary>) {
          std::vector<Mutant> out;
          for (const auto &m : mutants(n.operand, kinds)) out.push_back({un(n.op, m.expr), m.counts});
          return out;
        } else if constexpr (std::is_same_v<T, ArrayIndex>) {
          std::vector<Mutant> out;
          for (const auto &b : mutants(n.base, kinds)) {
            for (const auto &i : mutants(n.index, kinds)) out.push_back({index(b.expr, i.expr), add(b.counts, i.counts)});
          }
          return out;
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          std::vector<Mutant> out;
          for (const auto &b : mutants(n.base, kinds)) out.push_back({field(b.expr, n.field), b.counts});
          return out;
        } else if constexpr (std::is_same_v<T, OldRef>) {
          std::vector<Mutant> out;
          for (const auto &m : mutants(n.inner, kinds)) out.push_back({old(m.expr), m.counts});
          return out;
        } else {
          return {Mutant{e, {}}};
        }
      },
      e->node);
}

}  // namespace

std::map<std::string, std::int64_t> brute_force_family(const SpecClause &templ, const MutationKindSet &kinds,
                                                       const WeightTable &weights) {
  std::map<std::string, std::int64_t> out;
  for (const auto &m : mutants(templ.expr, kinds)) {
    std::int64_t score = 0;
    for (int k = 0; k < 4; ++k) score += m.counts[k] * weights.weight[k];
    auto text = render_clause(templ.kind, *m.expr);
    auto it = out.find(text);
    if (it == out.end()) {
      out.emplace(text, score);
    } else {
      it->second = std::max(it->second, score);
    }
  }
  return out;
}

// --- enumerating evaluator ---------------------------------------------------

namespace {

struct OracleError {};
struct Null {};
using OValue = std::variant<long long, bool, std::vector<long long>, Null>;

OValue convert(const Value &v) {
  if (const auto *i = std::get_if<BigInt>(&v)) return static_cast<long long>(*i);
  if (const auto *b = std::get_if<bool>(&v)) return *b;
  if (const auto *a = std::get_if<IntArray>(&v)) {
    std::vector<long long> out;
    for (const auto &x : *a) out.push_back(static_cast<long long>(x));
    return out;
  }
  if (std::holds_alternative<NullValue>(v)) return Null{};
  throw OracleError{};
}

class Enumerator {
 public:
  Enumerator(const TraceRecord &r, int window) : r_(r), window_(window) {}

  OValue eval(const Expr &e) {
    if (const auto *q = std::get_if<Quantifier>(&e.node)) {
      bool forall = q->kind == QuantKind::Forall;
      for (long long v = -window_; v <= window_; ++v) {
        locals_.emplace_back(q->var, v);
        bool in_range = as_bool(eval(*q->range));
        bool body = in_range && as_bool(eval(*q->body));
        locals_.pop_back();
        if (forall && in_range && !body) return false;
        if (!forall && body) return true;
      }
      return forall;
    }
    if (const auto *b = std::get_if<Binary>(&e.node)) return binary(*b);
    if (const auto *u = std::get_if<Unary>(&e.node)) {
      if (u->op == UnaryOp::Not) return !as_bool(eval(*u->operand));
      return -as_int(eval(*u->operand));
    }
    if (const auto *v = std::get_if<Var>(&e.node)) {
      for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
        if (it->first == v->name) return it->second;
      }
      const Bindings *env = use_old_ ? (r_.old ? &*r_.old : nullptr) : &r_.bindings;
      if (!env) throw OracleError{};
      auto it = env->find(v->name);
      if (it == env->end()) throw OracleError{};
      return convert(it->second);
    }
    if (const auto *l = std::get_if<IntLit>(&e.node)) return static_cast<long long>(l->value);
    if (const auto *l = std::get_if<BoolLit>(&e.node)) return l->value;
    if (std::holds_alternative<NullLit>(e.node)) return Null{};
    if (const auto *a = std::get_if<ArrayIndex>(&e.node)) {
      auto base = eval(*a->base);
      const auto *arr = std::get_if<std::vector<long long>>(&base);
      if (!arr) throw OracleError{};
      long long i = as_int(eval(*a->index));
      if (i < 0 || i >= static_cast<long long>(arr->size())) throw OracleError{};
      return (*arr)[static_cast<std::size_t>(i)];
    }
    if (const auto *f = std::get_if<FieldAccess>(&e.node)) {
      auto base = eval(*f->base);
      const auto *arr = std::get_if<std::vector<long long>>(&base);
      if (!arr || f->field != "length") throw OracleError{};
      return static_cast<long long>(arr->size());
    }
    if (std::holds_alternative<ResultRef>(e.node)) {
      if (!r_.result) throw OracleError{};
      return convert(*r_.result);
    }
    if (const auto *o = std::get_if<OldRef>(&e.node)) {
      if (!r_.old) throw OracleError{};
      bool saved = use_old_;
      use_old_ = true;
      auto v = eval(*o->inner);
      use_old_ = saved;
      return v;
    }
    throw OracleError{};
  }

 private:
  static bool as_bool(const OValue &v) {
    if (const auto *b = std::get_if<bool>(&v)) return *b;
    throw OracleError{};
  }
  static long long as_int(const OValue &v) {
    if (const auto *i = std::get_if<long long>(&v)) return *i;
    throw OracleError{};
  }

  static bool is_ref(const OValue &v) {
    return std::holds_alternative<Null>(v) || std::holds_alternative<std::vector<long long>>(v);
  }

  static bool same(const OValue &l, const OValue &r) {
    if (l.index() != r.index()) {
      if (is_ref(l) && is_ref(r)) return false;
      throw OracleError{};
    }
    if (std::holds_alternative<Null>(l)) return true;
    if (const auto *a = std::get_if<std::vector<long long>>(&l)) return *a == std::get<std::vector<long long>>(r);
    if (const auto *b = std::get_if<bool>(&l)) return *b == std::get<bool>(r);
    return std::get<long long>(l) == std::get<long long>(r);
  }

  OValue binary(const Binary &b) {
    switch (b.op) {
      case BinaryOp::And: return as_bool(eval(*b.lhs)) ? as_bool(eval(*b.rhs)) : false;
      case BinaryOp::Or: return as_bool(eval(*b.lhs)) ? true : as_bool(eval(*b.rhs));
      case BinaryOp::Implies: return as_bool(eval(*b.lhs)) ? as_bool(eval(*b.rhs)) : true;
      case BinaryOp::RevImplies: return as_bool(eval(*b.lhs)) ? true : !as_bool(eval(*b.rhs));
      case BinaryOp::Equiv: {
        bool l = as_bool(eval(*b.lhs));
        return l == as_bool(eval(*b.rhs));
      }
      case BinaryOp::Eq:
      case BinaryOp::Ne: {
        auto l = eval(*b.lhs);
        auto r = eval(*b.rhs);
        return same(l, r) == (b.op == BinaryOp::Eq);
      }
      default: break;
    }
    long long l = as_int(eval(*b.lhs));
    long long r = as_int(eval(*b.rhs));
    switch (b.op) {
      case BinaryOp::Lt: return l < r;
      case BinaryOp::Le: return l <= r;
      case BinaryOp::Gt: return l > r;
      case BinaryOp::Ge: return l >= r;
      case BinaryOp::Add: return l + r;
      case BinaryOp::Sub: return l - r;
      case BinaryOp::Mul: return l * r;
      case BinaryOp::Div:
        if (r == 0) throw OracleError{};
        return l / r;
      case BinaryOp::Mod:
        if (r == 0) throw OracleError{};
        return l % r;
      default: throw OracleError{};
    }
  }

  const TraceRecord &r_;
  int window_;
  std::vector<std::pair<std::string, long long>> locals_;
  bool use_old_ = false;
};

}  // namespace

OracleResult oracle_eval_bool(const Expr &e, const TraceRecord &r, int window) {
  try {
    Enumerator en(r, window);
    auto v = en.eval(e);
    const auto *b = std::get_if<bool>(&v);
    if (!b) return OracleResult::Error;
    return *b ? OracleResult::True : OracleResult::False;
  } catch (const OracleError &) {
    return OracleResult::Error;
  }
}

bool oracle_clause_fails(const SpecClause &clause, const std::vector<TraceRecord> &traces) {
  if (clause.kind == ClauseKind::Decreases) {
    bool have_prev = false;
    long long prev = 0;
    for (const auto &r : traces) {
      if (r.anchor.method == clause.anchor.method && !r.anchor.loop) {
        have_prev = false;
        continue;
      }
      if (r.anchor != clause.anchor || r.phase != TracePhase::Iter) continue;
      try {
        Enumerator en(r, 64);
        auto v = en.eval(*clause.expr);
        const auto *n = std::get_if<long long>(&v);
        if (!n || *n < 0 || (have_prev && *n >= prev)) return true;
        have_prev = true;
        prev = *n;
      } catch (const OracleError &) {
        return true;
      }
    }
    return false;
  }
  TracePhase phase = clause.kind == ClauseKind::Requires  ? TracePhase::Pre
                     : clause.kind == ClauseKind::Ensures ? TracePhase::Post
                                                          : TracePhase::Iter;
  for (const auto &r : traces) {
    if (r.anchor != clause.anchor || r.phase != phase) continue;
    if (oracle_eval_bool(*clause.expr, r) != OracleResult::True) return true;
  }
  return false;
}

std::filesystem::path fixture_dir() { return SPECGEN_FIXTURE_DIR; }

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace specgen::testing
