#include "generators.hpp"

#include "specgen/errors.hpp"
#include "specgen/eval.hpp"
#include "specgen/syntax.hpp"

#include <gtest/gtest.h>

namespace specgen {
namespace {

TraceRecord record(Bindings b) {
  TraceRecord r;
  r.anchor = ProgramAnchor{"m", std::nullopt};
  r.bindings = std::move(b);
  return r;
}

IntArray ints(std::initializer_list<long> xs) {
  IntArray out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

EvalErrorKind error_kind(const std::string &expr, const TraceRecord &r) {
  try {
    eval_expr(*parse_expression(expr), r);
  } catch (const EvalError &e) {
    return e.kind();
  }
  ADD_FAILURE() << "no EvalError for " << expr;
  return EvalErrorKind::TypeError;
}

TEST(Eval, DirectArithmetic) {
  auto r = record({{"nums", ints({2, 7})}, {"target", BigInt(9)}});
  EXPECT_TRUE(eval_bool(*parse_expression("nums[0] + nums[1] == target"), r));
}

TEST(Eval, ClosedQuantifier) {
  EXPECT_TRUE(eval_bool(*parse_expression("(\\forall int a; 0 <= a && a < 3; a < 5)"), record({})));
  EXPECT_FALSE(eval_bool(*parse_expression("(\\forall int a; 0 <= a && a < 6; a < 5)"), record({})));
  EXPECT_TRUE(eval_bool(*parse_expression("(\\exists int a; 0 <= a && a < 6; a == 5)"), record({})));
  EXPECT_FALSE(eval_bool(*parse_expression("(\\exists int a; 3 <= a && a < 3; true)"), record({})));
}

TEST(Eval, TwoSumNoSolutionPostcondition) {
  auto e = parse_expression(
      "(\\result.length == 0) ==> (\\forall int a; 0 <= a && a < nums.length; "
      "(\\forall int b; a < b && b < nums.length; nums[a] + nums[b] != target))");
  auto r = record({{"nums", ints({1, 2, 3})}, {"target", BigInt(100)}});
  r.phase = TracePhase::Post;
  r.result = IntArray{};
  EXPECT_TRUE(eval_bool(*e, r));
  EXPECT_EQ(testing::oracle_eval_bool(*e, r), testing::OracleResult::True);
  // A reachable target makes the consequent false.
  r.bindings["target"] = BigInt(5);
  EXPECT_FALSE(eval_bool(*e, r));
}

TEST(Eval, JavaDivisionAndModulo) {
  auto r = record({});
  EXPECT_EQ(std::get<BigInt>(eval_expr(*parse_expression("-7 / 2"), r)), BigInt(-3));
  EXPECT_EQ(std::get<BigInt>(eval_expr(*parse_expression("-7 % 2"), r)), BigInt(-1));
  EXPECT_EQ(std::get<BigInt>(eval_expr(*parse_expression("7 % -2"), r)), BigInt(1));
}

TEST(Eval, ArbitraryPrecision) {
  auto r = record({{"x", BigInt(2147483647)}});
  EXPECT_TRUE(eval_bool(*parse_expression("x + 1 > x"), r));
}

TEST(Eval, OldAndResult) {
  auto r = record({{"x", BigInt(5)}});
  r.phase = TracePhase::Post;
  r.result = BigInt(6);
  r.old = Bindings{{"x", BigInt(4)}};
  EXPECT_TRUE(eval_bool(*parse_expression("\\result == \\old(x) + 2"), r));
  r.old.reset();
  EXPECT_EQ(error_kind("\\old(x) == 4", r), EvalErrorKind::MissingOldSnapshot);
}

TEST(Eval, ErrorKinds) {
  auto r = record({{"a", ints({1, 2})}, {"x", BigInt(0)}});
  EXPECT_EQ(error_kind("y > 0", r), EvalErrorKind::UnboundVariable);
  EXPECT_EQ(error_kind("a[2] > 0", r), EvalErrorKind::IndexOutOfRange);
  EXPECT_EQ(error_kind("1 / x > 0", r), EvalErrorKind::DivisionByZero);
  EXPECT_EQ(error_kind("(\\forall int k; k > 0; k > 1)", r), EvalErrorKind::UnboundedQuantifier);
}

TEST(Eval, ShortCircuit) {
  auto r = record({{"a", ints({1, 2})}, {"i", BigInt(5)}});
  EXPECT_FALSE(eval_bool(*parse_expression("i < a.length && a[i] > 0"), r));
  EXPECT_TRUE(eval_bool(*parse_expression("i >= a.length || a[i] > 0"), r));
  EXPECT_TRUE(eval_bool(*parse_expression("i < a.length ==> a[i] > 0"), r));
}

TEST(ExtractBounds, Patterns) {
  auto r = record({{"nums", ints({1, 2, 3, 4})}, {"i", BigInt(2)}, {"n", BigInt(5)}});
  auto iv = extract_bounds(*parse_expression("0 <= a && a < nums.length"), "a", r);
  EXPECT_EQ(iv.lo, 0);
  EXPECT_EQ(iv.hi, 3);
  iv = extract_bounds(*parse_expression("i + 1 <= j && j < n"), "j", r);
  EXPECT_EQ(iv.lo, 3);
  EXPECT_EQ(iv.hi, 4);
  iv = extract_bounds(*parse_expression("n > k && k >= i"), "k", r);
  EXPECT_EQ(iv.lo, 2);
  EXPECT_EQ(iv.hi, 4);
  EXPECT_TRUE(extract_bounds(*parse_expression("5 <= k && k < 5"), "k", r).empty());
  EXPECT_THROW(extract_bounds(*parse_expression("a > 0"), "a", r), EvalError);
}

TEST(Eval, Deterministic) {
  testing::ClauseGenerator gen(5);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 200; ++k) {
    auto c = gen.clause_of_kind(ClauseKind::Requires);
    auto recs = testing::random_trace(rng, 1);
    std::string first, second;
    for (std::string *out : {&first, &second}) {
      try {
        *out = describe(eval_expr(*c.expr, recs[0]));
      } catch (const EvalError &e) {
        *out = std::string("error: ") + e.what();
      }
    }
    EXPECT_EQ(first, second);
  }
}

// Quantified expressions agree with plain enumeration whenever the evaluator
// can decide them.
TEST(Eval, QuantifiersMatchEnumeration) {
  testing::GenOptions opts;
  opts.allow_old = false;
  opts.allow_result = false;
  testing::ClauseGenerator gen(11, opts);
  std::mt19937_64 rng(12);
  int decided = 0;
  for (int k = 0; k < 2000; ++k) {
    auto e = gen.boolean_expr(3);
    auto r = testing::random_trace(rng, 1)[0];
    auto oracle = testing::oracle_eval_bool(*e, r);
    bool value;
    try {
      value = eval_bool(*e, r);
    } catch (const EvalError &) {
      EXPECT_EQ(oracle, testing::OracleResult::Error) << render_expr(*e);
      continue;
    }
    ++decided;
    ASSERT_NE(oracle, testing::OracleResult::Error) << render_expr(*e);
    EXPECT_EQ(value, oracle == testing::OracleResult::True) << render_expr(*e);
  }
  EXPECT_GT(decided, 500);
}

}  // namespace
}  // namespace specgen
