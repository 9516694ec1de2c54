#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "test_support.hpp"

namespace fractool {
namespace {

using testing::kPhi;
using testing::load_fixture;
using testing::read_text;
using testing::data_path;

TEST(EvalExpr, Constants) {
  EXPECT_NEAR(eval_expr("phi"), 1.618034, 1e-6);
  EXPECT_NEAR(eval_expr("1/phi^2"), 0.381966, 1e-6);
  EXPECT_NEAR(eval_expr("sqrt(2)/2"), 0.70710678, 1e-8);
  EXPECT_NEAR(eval_expr("sin(2*pi/5)/sin(pi/5)"), kPhi, 1e-15);
  EXPECT_DOUBLE_EQ(eval_expr("pi"), std::numbers::pi);
}

TEST(EvalExpr, PrecedenceAndAssociativity) {
  EXPECT_EQ(eval_expr("1 + 2 * 3"), 7.0);
  EXPECT_EQ(eval_expr("(1 + 2) * 3"), 9.0);
  EXPECT_EQ(eval_expr("2^3^2"), 512.0);
  EXPECT_EQ(eval_expr("-2^2"), -4.0);
  EXPECT_EQ(eval_expr("2^-1"), 0.5);
  EXPECT_EQ(eval_expr("8 / 4 / 2"), 1.0);
  EXPECT_EQ(eval_expr("1 - 2 - 3"), -4.0);
  EXPECT_EQ(eval_expr("--3"), 3.0);
  EXPECT_EQ(eval_expr("1.5e2"), 150.0);
  EXPECT_EQ(eval_expr(".5"), 0.5);
  EXPECT_NEAR(eval_expr("cos(pi)"), -1.0, 1e-15);
}

ParseErrorCode eval_error(const std::string& text) {
  try {
    eval_expr(text);
  } catch (const ParseError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for '" << text << "'";
  return ParseErrorCode::invalid_system;
}

TEST(EvalExpr, Errors) {
  EXPECT_EQ(eval_error("1/0"), ParseErrorCode::division_by_zero);
  EXPECT_EQ(eval_error("1/(phi-phi)"), ParseErrorCode::division_by_zero);
  EXPECT_EQ(eval_error("sqrt(-1)"), ParseErrorCode::domain);
  EXPECT_EQ(eval_error("(-8)^(1/3)"), ParseErrorCode::domain);
  EXPECT_EQ(eval_error("1 +"), ParseErrorCode::syntax);
  EXPECT_EQ(eval_error("(1"), ParseErrorCode::syntax);
  EXPECT_EQ(eval_error("foo"), ParseErrorCode::syntax);
  EXPECT_EQ(eval_error("1 $ 2"), ParseErrorCode::syntax);
  EXPECT_EQ(eval_error("$"), ParseErrorCode::lexical);
  EXPECT_EQ(eval_error("1e"), ParseErrorCode::lexical);
  EXPECT_EQ(eval_error("10^400"), ParseErrorCode::non_finite);
  EXPECT_EQ(eval_error(""), ParseErrorCode::syntax);
}

TEST(EvalExpr, ErrorColumnPointsAtToken) {
  try {
    eval_expr("1 + 2 / 0", {4, 10});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.span().line, 4);
    EXPECT_EQ(e.span().column, 10 + 6);
  }
}

// Random token soup either evaluates to a finite value or raises exactly one
// ParseError; nothing else escapes.
TEST(EvalExpr, TotalOnRandomInputs) {
  const std::vector<std::string> atoms{"1", "2.5", "pi", "phi", "(", ")", "+", "-", "*", "/", "^",
                                       "sqrt(", "sin(", "cos(", "0", " "};
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
  std::uniform_int_distribution<int> len(1, 12);
  int evaluated = 0;
  for (int i = 0; i < 5000; ++i) {
    std::string text;
    for (int k = len(rng); k > 0; --k) text += atoms[pick(rng)];
    try {
      const double v = eval_expr(text);
      EXPECT_TRUE(std::isfinite(v)) << text;
      ++evaluated;
    } catch (const ParseError& e) {
      EXPECT_FALSE(std::string(e.what()).empty());
    }
  }
  EXPECT_GT(evaluated, 0);
}

TEST(ParseSystem, Koch) {
  const auto s = load_fixture("koch.fcs");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.generators[0].steps.size(), 4u);
  EXPECT_NEAR(s.generators[0].scale, 1.0 / 3.0, 1e-15);
}

TEST(ParseSystem, Pentagon) {
  const auto s = load_fixture("pentagon.fcs");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s.generators[0].scale, 1.0 / kPhi, 1e-12);
  EXPECT_NEAR(s.generators[1].scale, 1.0 / (kPhi * kPhi), 1e-12);
  EXPECT_NEAR(s.generators[2].scale, 1.0 / kPhi, 1e-12);
  EXPECT_EQ(s.initiator_type, 0u);
}

TEST(ParseSystem, RadiansAndHeaderUnit) {
  const std::string doc =
      "system r angle_unit radians\n"
      "segment S length 1\n"
      "generator S\n"
      "  step S angle 0\n step S angle pi/3\n step S angle -pi/3\n step S angle 0\n"
      "end\n"
      "initiator S\n";
  const auto s = parse_system(doc);
  EXPECT_NEAR(s.generators[0].steps[1].angle(), std::numbers::pi / 3, 1e-15);
  const auto koch = load_fixture("koch.fcs");
  for (std::size_t m = 0; m < 4; ++m)
    EXPECT_NEAR(s.generators[0].steps[m].angle(), koch.generators[0].steps[m].angle(), 1e-15);
  EXPECT_NEAR(s.generators[0].scale, 1.0 / 3.0, 1e-15);
}

TEST(ParseSystem, FlagsAndCommentsAreParsed) {
  const auto s = load_fixture("pentagon.fcs");
  EXPECT_TRUE(s.generators[0].steps[0].reversed());
  EXPECT_FALSE(s.generators[0].steps[2].reversed());
  const std::string doc =
      "system f\nsegment S length 1\ngenerator S\n step S angle 45 mirrored reversed\n step S angle -45 mirrored\n"
      "end\ninitiator S\n";
  const auto f = parse_system(doc);
  EXPECT_TRUE(f.generators[0].steps[0].reversed());
  EXPECT_TRUE(f.generators[0].steps[0].mirrored());
  EXPECT_FALSE(f.generators[0].steps[1].reversed());
  EXPECT_TRUE(f.generators[0].steps[1].mirrored());
}

TEST(ParseSystem, DeclaredScaleIsChecked) {
  EXPECT_NO_THROW(load_fixture("rightangle.fcs"));
  const std::string bad =
      "system b\nsegment S length 1\ngenerator S scale 0.3\n step S angle 30\n step S angle -30\nend\ninitiator S\n";
  try {
    parse_system(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ParseErrorCode::scale_mismatch);
    EXPECT_EQ(e.span().line, 3);
  }
}

TEST(ParseSystem, MissingInitiator) {
  const std::string doc = "system k\nsegment S length 1\ngenerator S\n step S angle 60\n step S angle -60\nend\n";
  try {
    parse_system(doc);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ParseErrorCode::missing_initiator);
  }
}

// Ten broken documents; each error must point at the offending line.
TEST(ParseSystem, MalformedDocumentsReportTheirLine) {
  const auto& cases = testing::malformed_documents();
  ASSERT_EQ(cases.size(), 10u);
  for (const auto& c : cases) {
    try {
      parse_system(c.text);
      ADD_FAILURE() << "accepted:\n" << c.text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.span().line, c.line) << c.text << "\n" << e.what();
      EXPECT_EQ(e.code(), c.code) << c.text << "\n" << e.what();
      EXPECT_GE(e.span().column, 1);
      EXPECT_FALSE(std::string(e.what()).empty());
    }
  }
}

TEST(ParseSystem, ErrorColumnAtOffendingToken) {
  try {
    parse_system("system a\nsegment S length 1\ngenerator S\n  step Q angle 60\nend\ninitiator S\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.span().line, 4);
    EXPECT_EQ(e.span().column, 8);
  }
}

TEST(ParseSystem, CommentsAndBlankLinesDoNotMatter) {
  const std::string plain = read_text(data_path("koch.fcs"));
  std::string noisy;
  std::size_t pos = 0;
  int line = 0;
  while (pos < plain.size()) {
    const std::size_t eol = plain.find('\n', pos);
    noisy += "\n   # filler " + std::to_string(line++) + "\n";
    noisy += plain.substr(pos, eol - pos) + "   # trailing\n";
    pos = eol + 1;
  }
  EXPECT_EQ(parse_system(plain), parse_system(noisy));
}

void expect_systems_close(const FractalSystem& a, const FractalSystem& b) {
  EXPECT_EQ(a.name, b.name);
  ASSERT_EQ(a.types.size(), b.types.size());
  for (std::size_t i = 0; i < a.types.size(); ++i) {
    EXPECT_EQ(a.types[i].name, b.types[i].name);
    EXPECT_NEAR(a.types[i].length, b.types[i].length, 1e-12);
  }
  EXPECT_EQ(a.initiator_type, b.initiator_type);
  ASSERT_EQ(a.generators.size(), b.generators.size());
  for (std::size_t g = 0; g < a.generators.size(); ++g) {
    const auto& ga = a.generators[g];
    const auto& gb = b.generators[g];
    EXPECT_EQ(ga.target_type, gb.target_type);
    EXPECT_NEAR(ga.scale, gb.scale, 1e-12);
    ASSERT_EQ(ga.steps.size(), gb.steps.size());
    for (std::size_t m = 0; m < ga.steps.size(); ++m) {
      EXPECT_EQ(ga.steps[m].type_index(), gb.steps[m].type_index());
      EXPECT_NEAR(ga.steps[m].angle(), gb.steps[m].angle(), 1e-12);
      EXPECT_EQ(ga.steps[m].reversed(), gb.steps[m].reversed());
      EXPECT_EQ(ga.steps[m].mirrored(), gb.steps[m].mirrored());
    }
  }
}

TEST(SerializeSystem, FixturesRoundTrip) {
  for (const char* name : {"koch.fcs", "pentagon.fcs", "rightangle.fcs"}) {
    const auto s = load_fixture(name);
    const auto text = serialize_system(s);
    expect_systems_close(s, parse_system(text));
    EXPECT_EQ(text, serialize_system(parse_system(text))) << name;
  }
}

TEST(SerializeSystem, RandomSystemsRoundTrip) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const auto s = testing::random_system(rng, 1 + i % 4, false);
    expect_systems_close(s, parse_system(serialize_system(s)));
  }
}

TEST(SerializeSystem, CanonicalAngles) {
  FractalSystem s;
  s.name = "c";
  s.types = {{"S", 1.0}};
  s.generators = {{0, {{0, degrees_to_radians(396.0)}, {0, degrees_to_radians(-36.0)}}, 0.0}};
  s = build_system(s);
  const auto text = serialize_system(s);
  EXPECT_NE(text.find("step S angle 36\n"), std::string::npos) << text;
  EXPECT_NE(text.find("step S angle -36\n"), std::string::npos) << text;
  const auto koch = serialize_system(load_fixture("koch.fcs"));
  EXPECT_EQ(koch,
            "system koch\nangle_unit degrees\nsegment S length 1\ngenerator S\n  step S angle 0\n  step S angle 60\n"
            "  step S angle -60\n  step S angle 0\nend\ninitiator S\n");
}

TEST(CheckDocument, ReportsAllFindingsWithSpans) {
  const auto diags = check_document(read_text(data_path("pentagon_perturbed.fcs")));
  ASSERT_FALSE(diags.empty());
  bool closure = false;
  for (const auto& d : diags) {
    if (d.code == "closure-error") {
      closure = true;
      EXPECT_EQ(d.span.line, 7);
    }
  }
  EXPECT_TRUE(closure);
  EXPECT_TRUE(check_document(read_text(data_path("koch.fcs"))).empty());
}

}  // namespace
}  // namespace fractool
