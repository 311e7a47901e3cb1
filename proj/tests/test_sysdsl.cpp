#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "strobo/sysdsl/expr.hpp"
#include "strobo/sysdsl/system.hpp"
#include "strobo/tpsa/series.hpp"
#include "support.hpp"

using namespace strobo;

namespace {

ParseError::Kind parse_kind(const std::string& doc) {
  try {
    parse_system(doc);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a parse error for " << doc;
  return ParseError::Kind::syntax;
}

std::string one_component(const std::string& expr) {
  return strobo::testing::system_json("s", 1, "2*pi", 2, {{1, {expr}}});
}

// Random expression over x1..x3 and t using the whole grammar.
std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 11);
  std::uniform_real_distribution<double> num(0.1, 2.0);
  char buf[64];
  switch (pick(rng)) {
    case 0:
      std::snprintf(buf, sizeof buf, "%.4f", num(rng));
      return buf;
    case 1:
      return "t";
    case 2:
      return "x" + std::to_string(1 + rng() % 3);
    case 3:
      return "pi";
    case 4:
      return random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1);
    case 5:
      return random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1);
    case 6:
      return "(" + random_expr(rng, depth - 1) + ")*(" + random_expr(rng, depth - 1) + ")";
    case 7:
      std::snprintf(buf, sizeof buf, "/%.3f", num(rng));
      return "(" + random_expr(rng, depth - 1) + ")" + buf;
    case 8:
      return "(" + random_expr(rng, depth - 1) + ")^" + std::to_string(rng() % 4);
    case 9:
      return "sin(" + random_expr(rng, depth - 1) + ")";
    case 10:
      return "cos(" + random_expr(rng, depth - 1) + ")";
    default:
      return "-exp(0.3*(" + random_expr(rng, depth - 1) + "))";
  }
}

}  // namespace

TEST(ParseSystem, TwoLevelCosineSystem) {
  auto s = parse_system(strobo::testing::system_json("cos", 1, "2*pi", 2, {{1, {"cos(t)*x1"}}, {2, {"x1"}}}));
  EXPECT_EQ(s.name, "cos");
  EXPECT_EQ(s.dim, 1u);
  EXPECT_EQ(s.order, 2u);
  EXPECT_DOUBLE_EQ(s.period, 2 * std::numbers::pi);
  EXPECT_EQ(s.fields.size(), 2u);
  ASSERT_NE(s.field(1), nullptr);
  ASSERT_NE(s.field(2), nullptr);
  EXPECT_EQ(s.field(3), nullptr);
}

TEST(ParseSystem, NumericPeriodAccepted) {
  auto s = parse_system(R"({"name":"n","dim":1,"period":3.5,"order":1,"fields":{}})");
  EXPECT_EQ(s.period, 3.5);
  EXPECT_TRUE(s.fields.empty());
}

TEST(ParseSystem, ArityError) {
  EXPECT_EQ(parse_kind(one_component("sin(x1, t)")), ParseError::Kind::arity);
  EXPECT_EQ(parse_kind(one_component("sin")), ParseError::Kind::arity);
  EXPECT_EQ(parse_kind(one_component("x1(t)")), ParseError::Kind::arity);
  // wrong number of components for dim
  EXPECT_EQ(parse_kind(strobo::testing::system_json("s", 2, "1", 1, {{1, {"x1"}}})), ParseError::Kind::arity);
}

TEST(ParseSystem, UnknownIdentifierIsNamed) {
  try {
    parse_system(one_component("y1"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::unknown_identifier);
    EXPECT_NE(std::string(e.what()).find("'y1'"), std::string::npos) << e.what();
  }
  EXPECT_EQ(parse_kind(one_component("x2")), ParseError::Kind::unknown_identifier);
  EXPECT_EQ(parse_kind(one_component("x0")), ParseError::Kind::unknown_identifier);
  EXPECT_EQ(parse_kind(one_component("tan(x1)")), ParseError::Kind::unknown_identifier);
}

TEST(ParseSystem, EpsPowerOutOfRange) {
  EXPECT_EQ(parse_kind(strobo::testing::system_json("s", 1, "1", 2, {{3, {"x1"}}})), ParseError::Kind::eps_power);
  EXPECT_EQ(parse_kind(strobo::testing::system_json("s", 1, "1", 2, {{0, {"x1"}}})), ParseError::Kind::eps_power);
  EXPECT_EQ(parse_kind(R"({"name":"s","dim":1,"period":"1","order":1,"fields":{"a":["x1"]}})"),
            ParseError::Kind::eps_power);
}

TEST(ParseSystem, NonPositivePeriod) {
  EXPECT_EQ(parse_kind(strobo::testing::system_json("s", 1, "-2*pi", 1, {})), ParseError::Kind::period);
  EXPECT_EQ(parse_kind(strobo::testing::system_json("s", 1, "0", 1, {})), ParseError::Kind::period);
  EXPECT_EQ(parse_kind(strobo::testing::system_json("s", 1, "t", 1, {})), ParseError::Kind::period);
}

TEST(ParseSystem, SchemaErrors) {
  EXPECT_EQ(parse_kind(R"({"name":"s","dim":1,"period":"1","order":1})"), ParseError::Kind::schema);
  EXPECT_EQ(parse_kind(R"({"name":"s","dim":0,"period":"1","order":1,"fields":{}})"), ParseError::Kind::schema);
  EXPECT_EQ(parse_kind(R"({"name":"s","dim":1,"period":"1","order":1,"fields":{},"extra":1})"),
            ParseError::Kind::schema);
}

TEST(ParseSystem, SyntaxErrorCarriesLineAndColumn) {
  try {
    parse_system("{\n  \"name\": \"s\",\n  \"dim\": 1,,\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::syntax);
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 12u);
  }
  try {
    parse_expression("x1 +\n  * 2", 1);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
}

TEST(ParseExpression, RestrictedOperators) {
  EXPECT_THROW(parse_expression("x1/x1", 1), ParseError);
  EXPECT_THROW(parse_expression("x1/(t+1)", 1), ParseError);
  EXPECT_THROW(parse_expression("x1/(pi-pi)", 1), ParseError);
  EXPECT_NO_THROW(parse_expression("x1/(2*pi)", 1));
  EXPECT_THROW(parse_expression("x1^2.5", 1), ParseError);
  EXPECT_THROW(parse_expression("x1^-1", 1), ParseError);
  EXPECT_THROW(parse_expression("x1^x1", 1), ParseError);
  EXPECT_THROW(parse_expression("(x1", 1), ParseError);
  EXPECT_THROW(parse_expression("", 1), ParseError);
  EXPECT_NO_THROW(parse_expression("x1^0", 1));
}

TEST(ParseExpression, Precedence) {
  const double x[] = {2.0};
  EXPECT_EQ(eval_real(*parse_expression("1 + 2*3", 1), 0, x), 7.0);
  EXPECT_EQ(eval_real(*parse_expression("-x1^2", 1), 0, x), -4.0);
  EXPECT_EQ(eval_real(*parse_expression("8/2/2", 1), 0, x), 2.0);
  EXPECT_EQ(eval_real(*parse_expression("1 - 2 - 3", 1), 0, x), -4.0);
  EXPECT_DOUBLE_EQ(eval_real(*parse_expression("1.5e-1*x1", 1), 0, x), 0.3);
}

TEST(EvalAst, CosineAtZero) {
  const double x[] = {3.0};
  EXPECT_EQ(eval_real(*parse_expression("cos(t)*x1", 1), 0.0, x), 3.0);
}

TEST(EvalAst, SquareOverSeries) {
  auto e = parse_expression("x1^2", 1);
  std::vector<TruncatedSeries> x{TruncatedSeries::variable(1, 1, 0, 2.0)};
  auto r = eval_ast<TruncatedSeries>(*e, 0.0, x);
  EXPECT_EQ(r.coefficient({0}), 4.0);
  EXPECT_EQ(r.coefficient({1}), 4.0);
}

TEST(EvalAst, RealAndSeriesPathsAgree) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string text = random_expr(rng, 4);
    auto e = parse_expression(text, 3);
    auto p = strobo::testing::random_point(rng, 3);
    const double t = std::uniform_real_distribution<double>(0.0, 7.0)(rng);
    std::vector<TruncatedSeries> xs;
    for (std::size_t j = 0; j < 3; ++j) xs.push_back(TruncatedSeries::variable(3, 2, j, p[j]));
    std::vector<TruncatedSeries> x0;
    for (std::size_t j = 0; j < 3; ++j) x0.push_back(TruncatedSeries::constant(3, 0, p[j]));
    const double real = eval_real(*e, t, p);
    const double series = eval_ast<TruncatedSeries>(*e, t, xs).constant_term();
    const double order0 = eval_ast<TruncatedSeries>(*e, t, x0).constant_term();
    EXPECT_LE(std::abs(real - series), 1e-14 * std::max(1.0, std::abs(real))) << text;
    EXPECT_LE(std::abs(real - order0), 1e-14 * std::max(1.0, std::abs(real))) << text;
  }
}

TEST(PrintExpression, ParsePrintParseIsStable) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string text = random_expr(rng, 4);
    auto a = parse_expression(text, 3);
    const std::string printed = print_expression(*a);
    auto b = parse_expression(printed, 3);
    EXPECT_TRUE(*a == *b) << text << " -> " << printed;
    EXPECT_EQ(print_expression(*b), printed);
  }
}

TEST(SystemJson, RoundTrip) {
  auto s = parse_system(strobo::testing::system_json("r", 2, "pi/2", 3,
                                                     {{1, {"cos(4*t)*x1*x2", "x2^3 - 1/3"}}, {3, {"0", "exp(x1)"}}}));
  auto back = parse_system(system_to_json(s).dump());
  EXPECT_EQ(back.name, s.name);
  EXPECT_EQ(back.period, s.period);
  EXPECT_EQ(back.order, s.order);
  ASSERT_EQ(back.fields.size(), s.fields.size());
  for (const auto& [i, comps] : s.fields) {
    for (std::size_t c = 0; c < comps.size(); ++c) EXPECT_TRUE(*comps[c] == *(*back.field(i))[c]);
  }
}

TEST(SystemSpec, WithOrderDropsHigherFields) {
  auto s = strobo::testing::make_system(1, "1", 3, {{1, {"x1"}}, {3, {"x1"}}});
  auto t = s.with_order(2);
  EXPECT_EQ(t.order, 2u);
  EXPECT_NE(t.field(1), nullptr);
  EXPECT_EQ(t.field(3), nullptr);
  EXPECT_THROW(s.with_order(0), StructuralError);
}

TEST(Periodicity, CosineIsPeriodic) {
  auto s = strobo::testing::make_system(1, "2*pi", 1, {{1, {"cos(t)*x1"}}});
  EXPECT_TRUE(check_periodicity(s, 32, 1e-9).ok());
}

TEST(Periodicity, LinearTimeIsNot) {
  auto s = strobo::testing::make_system(1, "1", 1, {{1, {"t*x1"}}});
  auto rep = check_periodicity(s, 32, 1e-9);
  EXPECT_FALSE(rep.ok());
  EXPECT_EQ(rep.violations.size(), 32u);
  EXPECT_EQ(rep.violations.front().eps_power, 1u);
}

TEST(Periodicity, HalfPeriodSine) {
  auto s = strobo::testing::make_system(1, "pi", 1, {{1, {"sin(2*t)"}}});
  EXPECT_TRUE(check_periodicity(s, 32, 1e-9).ok());
}

TEST(Periodicity, AgreementAtEndpointsIsNotEnough) {
  // sin(t/2) vanishes at 0 and 2 pi but flips sign over one period
  auto s = strobo::testing::make_system(1, "2*pi", 1, {{1, {"sin(t/2)*x1"}}});
  auto rep = check_periodicity(s, 32, 1e-9);
  EXPECT_FALSE(rep.ok());
  for (const auto& v : rep.violations) {
    EXPECT_GT(v.time, 0.0);
    EXPECT_LT(v.time, s.period);
    EXPECT_NEAR(v.one_period_later, -v.at_time, 1e-12);
  }
}

TEST(LoadSystem, MissingFileIsIoError) {
  EXPECT_THROW(load_system("/nonexistent/system.json"), IoError);
}

TEST(LoadSystem, BundledSystemsParse) {
  for (const char* name : {"cos_ell2", "ell3", "linear", "vdp_radial", "negative_control", "planar_ell2"}) {
    auto s = load_system(std::string(STROBO_DATA_DIR) + "/systems/" + name + ".json");
    EXPECT_TRUE(check_periodicity(s).ok()) << name;
  }
}
