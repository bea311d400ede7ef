#include "generators.hpp"

#include "specgen/errors.hpp"
#include "specgen/trace_io.hpp"

#include <gtest/gtest.h>

namespace specgen {
namespace {

TEST(ParseTrace, RecordsAndComments) {
  const char *text =
      "# header\n"
      "{\"anchor\":\"method:twoSum\",\"phase\":\"pre\",\"bindings\":{\"nums\":[2,7],\"target\":9}}\n"
      "\n"
      "{\"anchor\":\"loop:twoSum:0\",\"phase\":\"iter\",\"bindings\":{\"i\":0,\"ok\":true,\"s\":\"x\",\"p\":null}}\n"
      "{\"anchor\":\"method:twoSum\",\"phase\":\"post\",\"bindings\":{},\"result\":[0,1],"
      "\"old\":{\"target\":9}}\n";
  auto recs = parse_trace(text);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].anchor, (ProgramAnchor{"twoSum", std::nullopt}));
  EXPECT_EQ(recs[0].phase, TracePhase::Pre);
  EXPECT_EQ(std::get<IntArray>(recs[0].bindings.at("nums")).size(), 2u);
  EXPECT_EQ(recs[1].anchor, (ProgramAnchor{"twoSum", 0}));
  EXPECT_EQ(std::get<bool>(recs[1].bindings.at("ok")), true);
  EXPECT_EQ(std::get<std::string>(recs[1].bindings.at("s")), "x");
  EXPECT_TRUE(std::holds_alternative<NullValue>(recs[1].bindings.at("p")));
  ASSERT_TRUE(recs[2].result.has_value());
  ASSERT_TRUE(recs[2].old.has_value());
  EXPECT_EQ(std::get<BigInt>(recs[2].old->at("target")), 9);
}

TEST(ParseTrace, ErrorsNameTheLine) {
  try {
    parse_trace("{\"anchor\":\"method:m\",\"phase\":\"pre\",\"bindings\":{}}\n{\"anchor\":\"nowhere\"}\n");
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_trace("{\"anchor\":\"method:m\",\"phase\":\"sideways\",\"bindings\":{}}"), Error);
  EXPECT_THROW(parse_trace("{\"anchor\":\"method:m\",\"phase\":\"pre\",\"bindings\":{\"x\":1.5}}"), Error);
  EXPECT_THROW(parse_trace("not json"), Error);
}

TEST(FormatTrace, RoundTrips) {
  std::mt19937_64 rng(3);
  auto recs = testing::random_trace(rng, 50);
  std::string text;
  for (const auto &r : recs) text += format_trace_record(r) + "\n";
  auto back = parse_trace(text);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    EXPECT_EQ(format_trace_record(back[k]), format_trace_record(recs[k]));
  }
}

TEST(LoadTrace, TwoSumFixture) {
  auto recs = load_trace_file(testing::fixture_dir() / "twosum_traces.jsonl");
  EXPECT_EQ(recs.size(), 24u);
}

}  // namespace
}  // namespace specgen
