#include "specgen/eval.hpp"

#include "specgen/errors.hpp"
#include "specgen/syntax.hpp"

#include <sstream>

namespace specgen {

std::string describe(const Value &v) {
  return std::visit(
      [](const auto &x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, BigInt>) {
          os << x;
        } else if constexpr (std::is_same_v<T, bool>) {
          os << (x ? "true" : "false");
        } else if constexpr (std::is_same_v<T, IntArray>) {
          os << '[';
          for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
          os << ']';
        } else if constexpr (std::is_same_v<T, std::string>) {
          os << '"' << x << '"';
        } else {
          os << "null";
        }
        return os.str();
      },
      v);
}

std::string_view to_string(TracePhase phase) {
  switch (phase) {
    case TracePhase::Pre: return "pre";
    case TracePhase::Post: return "post";
    case TracePhase::Iter: return "iter";
  }
  return "?";
}

std::optional<TracePhase> trace_phase_from_string(std::string_view s) {
  if (s == "pre") return TracePhase::Pre;
  if (s == "post") return TracePhase::Post;
  if (s == "iter") return TracePhase::Iter;
  return std::nullopt;
}

namespace {

class Evaluator {
 public:
  explicit Evaluator(const TraceRecord &record) : record_(record) {}

  Value eval(const Expr &e) {
    return std::visit([&](const auto &n) { return eval_node(n, e); }, e.node);
  }

  bool eval_bool(const Expr &e) {
    auto v = eval(e);
    if (auto *b = std::get_if<bool>(&v)) return *b;
    throw EvalError(EvalErrorKind::TypeError,
                    "expected boolean from '" + render_expr(e) + "', got " + describe(v));
  }

  BigInt eval_int(const Expr &e) {
    auto v = eval(e);
    if (auto *i = std::get_if<BigInt>(&v)) return *i;
    throw EvalError(EvalErrorKind::TypeError,
                    "expected integer from '" + render_expr(e) + "', got " + describe(v));
  }

  Interval bounds(const Expr &range, std::string_view var) {
    std::optional<BigInt> lo;
    std::optional<BigInt> hi;
    auto lower = [&](BigInt v) { lo = lo ? std::max(*lo, v) : v; };
    auto upper = [&](BigInt v) { hi = hi ? std::min(*hi, v) : v; };

    std::vector<const Expr *> conjuncts;
    flatten_and(range, conjuncts);
    for (const Expr *c : conjuncts) {
      const auto *b = std::get_if<Binary>(&c->node);
      if (!b || !is_comparison(b->op) || b->op == BinaryOp::Ne) continue;
      bool var_left = is_var(*b->lhs, var) && !mentions(*b->rhs, var);
      bool var_right = is_var(*b->rhs, var) && !mentions(*b->lhs, var);
      if (!var_left && !var_right) continue;
      BigInt other = eval_int(var_left ? *b->rhs : *b->lhs);
      // Normalise to `var OP other`.
      BinaryOp op = var_left ? b->op : flip(b->op);
      switch (op) {
        case BinaryOp::Le: upper(other); break;
        case BinaryOp::Lt: upper(other - 1); break;
        case BinaryOp::Ge: lower(other); break;
        case BinaryOp::Gt: lower(other + 1); break;
        case BinaryOp::Eq: lower(other); upper(other); break;
        default: break;
      }
    }
    if (!lo || !hi) {
      throw EvalError(EvalErrorKind::UnboundedQuantifier,
                      "no finite " + std::string(!lo ? "lower" : "upper") + " bound for '" +
                          std::string(var) + "' in '" + render_expr(range) + "'");
    }
    return Interval{*lo, *hi};
  }

 private:
  static bool is_var(const Expr &e, std::string_view name) {
    const auto *v = std::get_if<Var>(&e.node);
    return v && v->name == name;
  }

  static BinaryOp flip(BinaryOp op) {
    switch (op) {
      case BinaryOp::Lt: return BinaryOp::Gt;
      case BinaryOp::Le: return BinaryOp::Ge;
      case BinaryOp::Gt: return BinaryOp::Lt;
      case BinaryOp::Ge: return BinaryOp::Le;
      default: return op;
    }
  }

  static void flatten_and(const Expr &e, std::vector<const Expr *> &out) {
    if (const auto *b = std::get_if<Binary>(&e.node); b && b->op == BinaryOp::And) {
      flatten_and(*b->lhs, out);
      flatten_and(*b->rhs, out);
      return;
    }
    out.push_back(&e);
  }

  const Bindings &bindings() {
    if (!in_old_) return record_.bindings;
    if (!record_.old) {
      throw EvalError(EvalErrorKind::MissingOldSnapshot,
                      "\\old used but the trace record has no method-entry snapshot");
    }
    return *record_.old;
  }

  Value eval_node(const Var &v, const Expr &) {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
      if (it->first == v.name) return it->second;
    }
    const auto &env = bindings();
    auto it = env.find(v.name);
    if (it == env.end()) {
      throw EvalError(EvalErrorKind::UnboundVariable,
                      "unbound variable '" + v.name + "'" + (in_old_ ? " in \\old snapshot" : ""));
    }
    return it->second;
  }

  Value eval_node(const IntLit &l, const Expr &) { return l.value; }
  Value eval_node(const BoolLit &l, const Expr &) { return l.value; }
  Value eval_node(const NullLit &, const Expr &) { return NullValue{}; }

  Value eval_node(const ResultRef &, const Expr &) {
    if (!record_.result) {
      throw EvalError(EvalErrorKind::UnboundVariable, "\\result is not available in this record");
    }
    return *record_.result;
  }

  Value eval_node(const OldRef &o, const Expr &) {
    bool saved = in_old_;
    in_old_ = true;
    bindings();  // fails early when there is no snapshot
    auto v = eval(*o.inner);
    in_old_ = saved;
    return v;
  }

  Value eval_node(const Unary &u, const Expr &) {
    if (u.op == UnaryOp::Not) return !eval_bool(*u.operand);
    return BigInt(-eval_int(*u.operand));
  }

  Value eval_node(const ArrayIndex &a, const Expr &e) {
    auto base = eval(*a.base);
    auto *arr = std::get_if<IntArray>(&base);
    if (!arr) {
      throw EvalError(EvalErrorKind::TypeError,
                      "indexing a non-array value " + describe(base) + " in '" + render_expr(e) + "'");
    }
    BigInt idx = eval_int(*a.index);
    if (idx < 0 || idx >= arr->size()) {
      throw EvalError(EvalErrorKind::IndexOutOfRange,
                      "index " + describe(Value(idx)) + " out of range for array of length " +
                          std::to_string(arr->size()) + " in '" + render_expr(e) + "'");
    }
    return (*arr)[static_cast<std::size_t>(idx)];
  }

  Value eval_node(const FieldAccess &f, const Expr &e) {
    auto base = eval(*f.base);
    if (f.field == "length") {
      if (auto *arr = std::get_if<IntArray>(&base)) return BigInt(arr->size());
    }
    throw EvalError(EvalErrorKind::TypeError,
                    "field '" + f.field + "' not available on " + describe(base) + " in '" +
                        render_expr(e) + "'");
  }

  Value eval_node(const Quantifier &q, const Expr &e) {
    Interval dom = bounds(*q.range, q.var);
    if (dom.width() > kMaxQuantifierDomain) {
      throw EvalError(EvalErrorKind::UnboundedQuantifier,
                      "quantifier domain too large in '" + render_expr(e) + "'");
    }
    bool forall = q.kind == QuantKind::Forall;
    for (BigInt v = dom.lo; v <= dom.hi; ++v) {
      locals_.emplace_back(q.var, v);
      bool in_range = eval_bool(*q.range);
      bool holds = in_range && eval_bool(*q.body);
      locals_.pop_back();
      if (forall && in_range && !holds) return false;
      if (!forall && holds) return true;
    }
    return forall;
  }

  Value eval_node(const Binary &b, const Expr &e) {
    switch (b.op) {
      case BinaryOp::And: return eval_bool(*b.lhs) && eval_bool(*b.rhs);
      case BinaryOp::Or: return eval_bool(*b.lhs) || eval_bool(*b.rhs);
      case BinaryOp::Implies: return !eval_bool(*b.lhs) || eval_bool(*b.rhs);
      case BinaryOp::RevImplies: return eval_bool(*b.lhs) || !eval_bool(*b.rhs);
      case BinaryOp::Equiv: return eval_bool(*b.lhs) == eval_bool(*b.rhs);
      case BinaryOp::Eq: return values_equal(eval(*b.lhs), eval(*b.rhs), e);
      case BinaryOp::Ne: return !values_equal(eval(*b.lhs), eval(*b.rhs), e);
      default: break;
    }
    BigInt l = eval_int(*b.lhs);
    BigInt r = eval_int(*b.rhs);
    switch (b.op) {
      case BinaryOp::Lt: return l < r;
      case BinaryOp::Le: return l <= r;
      case BinaryOp::Gt: return l > r;
      case BinaryOp::Ge: return l >= r;
      case BinaryOp::Add: return BigInt(l + r);
      case BinaryOp::Sub: return BigInt(l - r);
      case BinaryOp::Mul: return BigInt(l * r);
      case BinaryOp::Div:
      case BinaryOp::Mod:
        if (r == 0) {
          throw EvalError(EvalErrorKind::DivisionByZero, "division by zero in '" + render_expr(e) + "'");
        }
        // cpp_int truncates toward zero, matching Java.
        return b.op == BinaryOp::Div ? BigInt(l / r) : BigInt(l % r);
      default: break;
    }
    throw EvalError(EvalErrorKind::TypeError, "unsupported operator in '" + render_expr(e) + "'");
  }

  static bool values_equal(const Value &l, const Value &r, const Expr &e) {
    bool l_ref = std::holds_alternative<NullValue>(l) || std::holds_alternative<IntArray>(l) ||
                 std::holds_alternative<std::string>(l);
    bool r_ref = std::holds_alternative<NullValue>(r) || std::holds_alternative<IntArray>(r) ||
                 std::holds_alternative<std::string>(r);
    if (l.index() == r.index()) return l == r;
    if (l_ref && r_ref) return false;
    throw EvalError(EvalErrorKind::TypeError, "cannot compare " + describe(l) + " with " +
                                                  describe(r) + " in '" + render_expr(e) + "'");
  }

  const TraceRecord &record_;
  std::vector<std::pair<std::string, Value>> locals_;
  bool in_old_ = false;
};

}  // namespace

Value eval_expr(const Expr &expr, const TraceRecord &record) { return Evaluator(record).eval(expr); }

bool eval_bool(const Expr &expr, const TraceRecord &record) {
  return Evaluator(record).eval_bool(expr);
}

Interval extract_bounds(const Expr &range, std::string_view var, const TraceRecord &record) {
  return Evaluator(record).bounds(range, var);
}

}  // namespace specgen
